"""Scenario file format: a network snapshot as a UTF-8 JSON document.

Top-level keys: machines, subnets, links, catalog, seed. Transit devices may
carry a "policy" list of firewall rules.
"""

from __future__ import annotations

import json
from pathlib import Path

from .model import (
    Catalog,
    Exploit,
    FirewallRule,
    Link,
    Machine,
    Network,
    Service,
    Vulnerability,
)


class ScenarioError(ValueError):
    """Scenario document is malformed or breaks a network invariant."""


def network_to_dict(network: Network) -> dict:
    policy_map = network.policy_map
    machines = []
    for m in network.machines:
        entry = {
            "id": m.id,
            "os": m.os,
            "subnet": m.subnet,
            "role": m.role,
            "value": m.value,
            "powered": m.powered,
            "services": [
                {
                    "port": s.port,
                    "name": s.name,
                    "version": s.version,
                    "state": s.state,
                    "vulns": list(s.vulns),
                }
                for s in m.services
            ],
        }
        if m.id in policy_map:
            entry["policy"] = [
                {
                    "action": r.action,
                    "src": r.src,
                    "dst": r.dst,
                    "port_lo": r.port_lo,
                    "port_hi": r.port_hi,
                }
                for r in policy_map[m.id]
            ]
        machines.append(entry)
    return {
        "seed": network.seed,
        "subnets": list(network.subnets),
        "machines": machines,
        "links": [[l.a, l.b, l.transit] for l in network.links],
        "catalog": {
            "vulnerabilities": [
                {
                    "id": v.id,
                    "matches": list(v.matches),
                    "privilege_gained": v.privilege_gained,
                    "detect_difficulty": v.detect_difficulty,
                }
                for v in network.catalog.vulnerabilities
            ],
            "exploits": [
                {
                    "id": e.id,
                    "targets": e.targets,
                    "success_prob": e.success_prob,
                    "post_modules": list(e.post_modules),
                }
                for e in network.catalog.exploits
            ],
        },
    }


def network_from_dict(data: dict) -> Network:
    try:
        machines = []
        policies = []
        for entry in data["machines"]:
            services = tuple(
                Service(
                    s["port"], s["name"], s["version"],
                    s.get("state", "open"), tuple(s.get("vulns", ())),
                )
                for s in entry.get("services", ())
            )
            machines.append(
                Machine(
                    id=entry["id"],
                    os=entry["os"],
                    subnet=entry["subnet"],
                    role=entry["role"],
                    value=int(entry["value"]),
                    powered=bool(entry.get("powered", True)),
                    services=services,
                )
            )
            if "policy" in entry:
                rules = tuple(
                    FirewallRule(
                        r["action"], r["src"], r["dst"],
                        int(r["port_lo"]), int(r["port_hi"]),
                    )
                    for r in entry["policy"]
                )
                policies.append((entry["id"], rules))
        catalog_data = data.get("catalog", {})
        catalog = Catalog(
            tuple(
                Vulnerability(
                    v["id"], (v["matches"][0], v["matches"][1]),
                    v["privilege_gained"], float(v["detect_difficulty"]),
                )
                for v in catalog_data.get("vulnerabilities", ())
            ),
            tuple(
                Exploit(
                    e["id"], e["targets"], float(e["success_prob"]),
                    tuple(e.get("post_modules", ())),
                )
                for e in catalog_data.get("exploits", ())
            ),
        )
        subnets = tuple(data.get("subnets") or sorted({m.subnet for m in machines}))
        links = tuple(Link(a, b, transit) for a, b, transit in data.get("links", ()))
        return Network(
            machines=tuple(machines),
            subnets=subnets,
            links=links,
            catalog=catalog,
            seed=int(data.get("seed", 0)),
            policies=tuple(sorted(policies)),
        )
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad scenario document: {exc}") from exc


def save_scenario(network: Network, path: str | Path) -> None:
    text = json.dumps(network_to_dict(network), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_scenario(path: str | Path) -> Network:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON in {path}: {exc}") from exc
    return network_from_dict(data)

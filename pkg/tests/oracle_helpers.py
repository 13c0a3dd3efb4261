"""Independent oracles for extraction tests.

Everything here re-derives semantics from scratch (no imports from the
extraction module beyond data types) so the implementation is checked
against a second, brute-force reading of the same contract.
"""

from __future__ import annotations

import json
import random
from itertools import combinations

from recomply.netmodel import (
    Catalog,
    Exploit,
    Machine,
    Network,
    Service,
    Vulnerability,
)


def tiny_network(seed: int) -> Network:
    """2-6 machines, one subnet, at most 3 catalog vulnerabilities."""
    rng = random.Random(seed)
    templates = [(22, "ssh", "8.2"), (80, "http", "2.4"), (445, "smbd", "4.5")]
    n_vulns = rng.randint(1, 3)
    vulns = []
    for i in range(n_vulns):
        port, name, version = templates[rng.randrange(len(templates))]
        vulns.append(
            Vulnerability(
                id=f"SYN-2024-{i + 1:04d}",
                matches=(name, version.split(".")[0]),
                privilege_gained=rng.choice(["user", "root"]),
                detect_difficulty=round(rng.uniform(0.3, 1.0), 3),
            )
        )
    # one exploit per vulnerability keeps the forced dependency core of any
    # machine within the default chain-length cap, so truncation never skews
    # the brute-force comparison
    exploits = []
    for i, vuln in enumerate(vulns):
        exploits.append(
            Exploit(
                id=f"EXP-2024-{i + 1:04d}",
                targets=vuln.id,
                success_prob=round(rng.uniform(0.3, 1.0), 3),
                post_modules=("PM-LOOT",) if rng.random() < 0.25 else (),
            )
        )
    catalog = Catalog(tuple(vulns), tuple(exploits))

    machines = []
    for i in range(rng.randint(2, 6)):
        count = rng.randint(1, 2)
        picks = rng.sample(templates, count)
        services = []
        for port, name, version in sorted(picks):
            carried = tuple(
                v.id for v in vulns
                if v.matches == (name, version.split(".")[0]) and rng.random() < 0.7
            )
            state = "open" if rng.random() < 0.9 else "closed"
            services.append(Service(port, name, version, state, carried))
        machines.append(
            Machine(
                id=f"m{i + 1:03d}",
                os=rng.choice(["linux/ubuntu-20.04", "windows/win10"]),
                subnet="net0",
                role="workstation" if rng.random() < 0.7 else "server",
                value=rng.randint(1, 10),
                powered=rng.random() < 0.95,
                services=tuple(services),
            )
        )
    return Network(tuple(machines), ("net0",), (), catalog, seed)


def encode(action) -> str:
    return json.dumps(action.to_dict(), sort_keys=True, separators=(",", ":"))


def oracle_likelihood(actions, network, target: str, value_weight: float) -> float:
    machine = network.by_id.get(target)
    product = 1.0
    for action in actions:
        if action.kind == "VulnDetect" and machine is not None:
            svc = machine.service_at(action.params["port"])
            if svc is not None:
                for vid in svc.vulns:
                    product *= network.catalog.vuln_by_id[vid].detect_difficulty
        elif action.kind == "Exploit":
            for exp in network.catalog.exploits:
                if exp.id == action.params["exploit"]:
                    product *= exp.success_prob
    value = machine.value if machine is not None else 5
    return product * ((1.0 - value_weight) + value_weight * value / 10.0)


def _narrow(actions_obs):
    """Oracle-side scan narrowing: kept scans cover exactly the kept
    discovered ports they first proved open."""
    from recomply.session.actions import port_scan

    detect_ports = [
        a.params["port"] for a, _ in actions_obs if a.kind == "ServiceDetect"
    ]
    provider: dict[int, int] = {}
    for i, (a, o) in enumerate(actions_obs):
        if a.kind == "PortScan" and o is not None:
            for port in o.open_ports:
                if port in detect_ports:
                    provider.setdefault(port, i)
    out = []
    for i, (a, o) in enumerate(actions_obs):
        if a.kind == "PortScan":
            mine = sorted(p for p, idx in provider.items() if idx == i)
            if not mine:
                continue
            out.append(port_scan(a.subject, mine))
        else:
            out.append(a)
    return out


def oracle_valid(subset, steps, mode: str) -> bool:
    """Dependency-valid and outcome-preserving, re-derived independently."""
    raw_service_ports = {
        a.params["port"] for a, o in steps
        if a.kind == "ServiceDetect" and o is not None and o.value == "TRUE"
    }
    raw_vulns = set()
    for a, o in steps:
        if a.kind == "VulnDetect" and o is not None:
            raw_vulns.update(o.vulns)
    raw_successes = {
        a.params["exploit"] for a, o in steps
        if a.kind == "Exploit" and o is not None and o.value == "SUCCESS"
    }
    raw_posts = {
        (a.params["module"], a.params["exploit"]) for a, o in steps
        if a.kind == "PostExploit"
    }
    has_ping = any(a.kind == "Ping" for a, _ in steps)

    sel = [steps[i] for i in subset]

    if has_ping and not any(a.kind == "Ping" for a, _ in sel):
        return False
    first_on = next(
        (k for k, (a, o) in enumerate(sel)
         if a.kind == "Ping" and o is not None and o.value == "ON"),
        None,
    )
    for k, (a, _) in enumerate(sel):
        if a.kind != "Ping" and (first_on is None or first_on > k):
            return False

    # per-position dependency satisfaction
    open_so_far: set[int] = set()
    detected_ports: set[int] = set()
    detected_vulns: set[str] = set()
    succeeded: set[str] = set()
    for a, o in sel:
        if a.kind == "PortScan" and o is not None:
            open_so_far.update(o.open_ports)
        elif a.kind == "ServiceDetect":
            if a.params["port"] not in open_so_far:
                return False
            if o is not None and o.value == "TRUE":
                detected_ports.add(a.params["port"])
        elif a.kind == "VulnDetect":
            if a.params["port"] not in detected_ports:
                return False
            if o is not None:
                detected_vulns.update(o.vulns)
        elif a.kind == "Exploit":
            if a.params["vuln"] not in detected_vulns:
                return False
            if o is not None and o.value == "SUCCESS":
                succeeded.add(a.params["exploit"])
        elif a.kind == "PostExploit":
            if a.params["exploit"] not in succeeded:
                return False

    # all positive findings preserved
    if detected_ports != raw_service_ports:
        return False
    if detected_vulns != raw_vulns:
        return False
    if succeeded != raw_successes:
        return False
    kept_posts = {
        (a.params["module"], a.params["exploit"]) for a, _ in sel
        if a.kind == "PostExploit"
    }
    if kept_posts != raw_posts:
        return False

    # assessment obligations
    checked_ports = {a.params["port"] for a, _ in sel if a.kind == "VulnDetect"}
    if not raw_service_ports <= checked_ports:
        return False
    if mode == "PT":
        attempted = {a.params["vuln"] for a, _ in sel if a.kind == "Exploit"}
        if not raw_vulns <= attempted:
            return False
    return True


def oracle_best_chain(raw, network, max_len: int, value_weight: float, mode: str = "PT"):
    """Brute-force argmax-likelihood dependency-valid sub-chain.

    Ties break by (chain length, lexicographic action encoding after scan
    narrowing). Returns (chain actions, likelihood) or None.
    """
    steps = list(zip(raw.chain, raw.evidence))
    n = len(steps)
    best = None
    best_key = None
    for size in range(1, min(n, max_len) + 1):
        for subset in combinations(range(n), size):
            if not oracle_valid(subset, steps, mode):
                continue
            narrowed = _narrow([steps[i] for i in subset])
            likelihood = oracle_likelihood(narrowed, network, raw.target, value_weight)
            key = (-likelihood, len(narrowed), [encode(a) for a in narrowed])
            if best_key is None or key < best_key:
                best_key = key
                best = (narrowed, likelihood)
    return best

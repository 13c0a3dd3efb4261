"""Simulated network domain types: machines, services, catalog, topology.

Network values are immutable snapshots; anything mutable during a session
(compromise state, rng draws) lives outside them so snapshots can be shared
between concurrent sessions.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from functools import cached_property

ROLES = ("workstation", "server", "firewall", "router", "ids")
TRANSIT_ROLES = ("firewall", "router")
EXTERNAL = "external"


class InvalidSize(ValueError):
    """Requested machine count outside [2, 250] or outside the profile band."""


class UnknownEntity(LookupError):
    """Probe or exploit referenced a machine, port or id that does not exist."""


class PreconditionViolated(RuntimeError):
    """Phase-ordering contract broken (e.g. exploit before detection)."""


class RngContext:
    """Deterministic named substreams derived from one master seed.

    Each (purpose, *key) pair maps to an independent stream, so sessions that
    order their actions differently still see identical per-action draws.
    """

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed)

    def _derive(self, parts: tuple) -> int:
        h = hashlib.sha256(str(self.master_seed).encode())
        for part in parts:
            h.update(b"\x1f")
            h.update(str(part).encode())
        return int.from_bytes(h.digest()[:8], "big")

    def derive(self, *parts) -> int:
        return self._derive(parts)

    def stream(self, *parts) -> random.Random:
        return random.Random(self._derive(parts))

    def bernoulli(self, p: float, *parts) -> bool:
        if p >= 1.0:
            return True
        if p <= 0.0:
            return False
        return self.stream(*parts).random() < p


@dataclass(frozen=True)
class Service:
    port: int
    name: str
    version: str
    state: str = "open"  # open | filtered | closed
    vulns: tuple[str, ...] = ()

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port {self.port} out of range")
        if self.state not in ("open", "filtered", "closed"):
            raise ValueError(f"bad service state {self.state!r}")


@dataclass(frozen=True)
class Machine:
    id: str
    os: str  # "family/version-label"
    subnet: str
    role: str
    value: int
    powered: bool = True
    services: tuple[Service, ...] = ()

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"bad role {self.role!r}")
        if not 1 <= self.value <= 10:
            raise ValueError(f"asset value {self.value} out of [1, 10]")
        ports = [s.port for s in self.services]
        if len(set(ports)) != len(ports):
            raise ValueError(f"machine {self.id} repeats a service port")

    @property
    def os_family(self) -> str:
        return self.os.split("/", 1)[0]

    @property
    def os_version(self) -> str:
        return self.os.split("/", 1)[1] if "/" in self.os else ""

    def service_at(self, port: int) -> Service | None:
        for svc in self.services:
            if svc.port == port:
                return svc
        return None


@dataclass(frozen=True)
class Vulnerability:
    id: str
    matches: tuple[str, str]  # (service name, version major prefix)
    privilege_gained: str  # user | root
    detect_difficulty: float

    def __post_init__(self):
        if not 0.0 <= self.detect_difficulty <= 1.0:
            raise ValueError("detect_difficulty outside [0, 1]")
        if self.privilege_gained not in ("user", "root"):
            raise ValueError(f"bad privilege {self.privilege_gained!r}")

    def applies_to(self, service: Service) -> bool:
        name, major = self.matches
        return service.name == name and service.version.split(".")[0] == major


@dataclass(frozen=True)
class Exploit:
    id: str
    targets: str  # vulnerability id
    success_prob: float
    post_modules: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.success_prob <= 1.0:
            raise ValueError("success_prob outside (0, 1]")


@dataclass(frozen=True)
class Catalog:
    vulnerabilities: tuple[Vulnerability, ...] = ()
    exploits: tuple[Exploit, ...] = ()

    @cached_property
    def vuln_by_id(self) -> dict[str, Vulnerability]:
        return {v.id: v for v in self.vulnerabilities}

    @cached_property
    def exploits_for(self) -> dict[str, tuple[Exploit, ...]]:
        out: dict[str, list[Exploit]] = {}
        for ex in self.exploits:
            out.setdefault(ex.targets, []).append(ex)
        return {k: tuple(v) for k, v in out.items()}


@dataclass(frozen=True)
class FirewallRule:
    action: str  # allow | deny
    src: str  # subnet id or "*"
    dst: str
    port_lo: int  # 0 stands for ICMP (ping)
    port_hi: int

    def __post_init__(self):
        if self.action not in ("allow", "deny"):
            raise ValueError(f"bad action {self.action!r}")
        if not 0 <= self.port_lo <= self.port_hi <= 65535:
            raise ValueError("bad port range")

    def covers(self, src: str, dst: str) -> bool:
        return self.src in ("*", src) and self.dst in ("*", dst)


@dataclass(frozen=True)
class Link:
    a: str
    b: str
    transit: str | None = None


@dataclass(frozen=True)
class Network:
    machines: tuple[Machine, ...]
    subnets: tuple[str, ...]
    links: tuple[Link, ...]
    catalog: Catalog
    seed: int
    policies: tuple[tuple[str, tuple[FirewallRule, ...]], ...] = ()

    def __post_init__(self):
        ids = [m.id for m in self.machines]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate machine id")
        by_id = {m.id: m for m in self.machines}
        for link in self.links:
            if link.transit is not None:
                transit = by_id.get(link.transit)
                if transit is None or transit.role not in TRANSIT_ROLES:
                    raise ValueError(
                        f"link {link.a}-{link.b} transit {link.transit!r} "
                        "is not a firewall or router"
                    )
        self._check_connected()

    def _check_connected(self):
        if len(self.subnets) <= 1:
            return
        seen = {self.subnets[0]}
        frontier = [self.subnets[0]]
        adj: dict[str, list[str]] = {}
        for link in self.links:
            adj.setdefault(link.a, []).append(link.b)
            adj.setdefault(link.b, []).append(link.a)
        while frontier:
            node = frontier.pop()
            for nxt in adj.get(node, []):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        if seen != set(self.subnets):
            raise ValueError("subnet link graph is not connected")

    @cached_property
    def by_id(self) -> dict[str, Machine]:
        return {m.id: m for m in self.machines}

    @cached_property
    def policy_map(self) -> dict[str, tuple[FirewallRule, ...]]:
        return dict(self.policies)

    @cached_property
    def subnet_adjacency(self) -> dict[str, tuple[tuple[str, str | None], ...]]:
        adj: dict[str, list[tuple[str, str | None]]] = {s: [] for s in self.subnets}
        for link in self.links:
            adj[link.a].append((link.b, link.transit))
            adj[link.b].append((link.a, link.transit))
        return {s: tuple(sorted(nbrs)) for s, nbrs in adj.items()}

    def machine(self, machine_id: str) -> Machine:
        try:
            return self.by_id[machine_id]
        except KeyError:
            raise UnknownEntity(f"no machine {machine_id!r}") from None

    def subnet_of(self, entity: str) -> str:
        """Subnet an entity probes from; the external vantage point sits on
        the first (perimeter) subnet."""
        if entity == EXTERNAL:
            return self.subnets[0]
        return self.machine(entity).subnet

    def machines_in(self, subnet: str) -> list[Machine]:
        return [m for m in self.machines if m.subnet == subnet]


class CompromisedSet:
    """Per-session compromise state; root supersedes user, growth is monotone."""

    _RANK = {"user": 1, "root": 2}

    def __init__(self):
        self._entries: dict[str, str] = {}

    def add(self, machine_id: str, privilege: str) -> None:
        if privilege not in self._RANK:
            raise ValueError(f"bad privilege {privilege!r}")
        current = self._entries.get(machine_id)
        if current is None or self._RANK[privilege] > self._RANK[current]:
            self._entries[machine_id] = privilege

    def privilege(self, machine_id: str) -> str | None:
        return self._entries.get(machine_id)

    def __contains__(self, machine_id: str) -> bool:
        return machine_id in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> list[tuple[str, str]]:
        return sorted(self._entries.items())

    def copy(self) -> "CompromisedSet":
        dup = CompromisedSet()
        dup._entries = dict(self._entries)
        return dup


@dataclass(frozen=True)
class Observation:
    probe: str  # ping | port_scan | service_detect | vuln_check
    target: str
    value: str  # ON/OFF, SCANNED, TRUE/FALSE/UNKNOWN
    port: int | None = None
    open_ports: tuple[int, ...] = ()
    filtered_ranges: tuple[tuple[int, int], ...] = ()
    service: tuple[str, str] | None = None
    vulns: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out: dict = {"probe": self.probe, "target": self.target, "value": self.value}
        if self.port is not None:
            out["port"] = self.port
        if self.open_ports:
            out["open_ports"] = list(self.open_ports)
        if self.filtered_ranges:
            out["filtered_ranges"] = [list(r) for r in self.filtered_ranges]
        if self.service is not None:
            out["service"] = list(self.service)
        if self.vulns:
            out["vulns"] = list(self.vulns)
        return out


@dataclass(frozen=True)
class ExploitOutcome:
    exploit_id: str
    target: str
    value: str  # SUCCESS | FAILED | BLOCKED
    privilege: str | None = None

    @property
    def success(self) -> bool:
        return self.value == "SUCCESS"

    def to_dict(self) -> dict:
        out: dict = {"exploit_id": self.exploit_id, "target": self.target, "value": self.value}
        if self.privilege is not None:
            out["privilege"] = self.privilege
        return out


@dataclass(frozen=True)
class ChangeSet:
    mutated_machines: frozenset[str]
    mutations: tuple[tuple[str, str], ...]  # (machine id, mutation kind)
    fraction: float

    MUTATION_KINDS = (
        "version_bump",
        "port_toggle",
        "vuln_patched",
        "vuln_introduced",
        "machine_added",
        "machine_removed",
    )

    def __post_init__(self):
        for _, kind in self.mutations:
            if kind not in self.MUTATION_KINDS:
                raise ValueError(f"bad mutation kind {kind!r}")

    def to_dict(self) -> dict:
        return {
            "mutated_machines": sorted(self.mutated_machines),
            "mutations": [list(m) for m in self.mutations],
            "fraction": self.fraction,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChangeSet":
        return cls(
            frozenset(data["mutated_machines"]),
            tuple((m, k) for m, k in data["mutations"]),
            float(data["fraction"]),
        )

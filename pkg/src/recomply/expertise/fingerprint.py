"""Context fingerprints: the feature sets that make stored expertise
applicable to a new machine.

Features are "Attribute=Value" symbols covering the machine itself plus its
transit context up to a configurable hop radius over the subnet graph. The
same attribute/value pairs double as generalized rule conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..netmodel.model import Machine, Network


@dataclass(frozen=True)
class ExtractionConfig:
    max_chain_length: int = 12  # longest stored action chain
    neighbor_radius: int = 1
    value_weight: float = 0.5

    def __post_init__(self):
        if self.max_chain_length < 1:
            raise ValueError("max_chain_length must be >= 1")
        if self.neighbor_radius < 0:
            raise ValueError("neighbor_radius must be >= 0")
        if not 0.0 <= self.value_weight <= 1.0:
            raise ValueError("value_weight outside [0, 1]")


def port_class(port: int) -> str:
    if port < 1024:
        return "well_known"
    if port < 49152:
        return "registered"
    return "dynamic"


def value_band(value: int) -> str:
    if value >= 8:
        return "high"
    if value <= 2:
        return "low"
    return "mid"


def version_tag(name: str, version: str) -> str:
    return f"{name}-{version.split('.')[0]}x"


def fingerprint_of(network: Network, machine_id: str, radius: int = 1) -> frozenset[str]:
    """Feature set for one machine and its transit context."""
    machine = network.machine(machine_id)
    feats = {
        f"OS_Family={machine.os_family}",
        f"OS_Version={machine.os_version}",
        f"Role={machine.role}",
        f"Asset_Value={value_band(machine.value)}",
        f"Subnet_Position={'perimeter' if machine.subnet == network.subnets[0] else 'internal'}",
    }
    for svc in machine.services:
        feats.add(f"Service_Name={svc.name}")
        feats.add(f"Service_Version={version_tag(svc.name, svc.version)}")
        feats.add(f"Port_Class={port_class(svc.port)}")
    feats.add(f"Defended={'TRUE' if _is_defended(network, machine) else 'FALSE'}")
    if radius >= 1:
        feats.update(_context_features(network, machine.subnet, radius))
    return frozenset(feats)


def _is_defended(network: Network, machine: Machine) -> bool:
    for nbr, transit in network.subnet_adjacency.get(machine.subnet, ()):
        if transit is not None and network.policy_map.get(transit):
            return True
    return False


def _context_features(network: Network, subnet: str, radius: int) -> set[str]:
    feats = set()
    seen = {subnet}
    frontier = [subnet]
    for _ in range(radius):
        nxt = []
        for node in frontier:
            for nbr, transit in network.subnet_adjacency.get(node, ()):
                if transit is not None:
                    feats.add(f"Ctx_Transit={network.machine(transit).role}")
                if nbr not in seen:
                    seen.add(nbr)
                    nxt.append(nbr)
        frontier = nxt
    degree = len(network.subnet_adjacency.get(subnet, ()))
    feats.add(f"Ctx_Degree={min(degree, 3)}")
    return feats


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)

"""Seeded configuration change sets: the re-test scenario.

A change set mutates round(fraction * machine count) machines; every other
machine compares equal before and after. Mutation kinds are drawn with fixed
weights and each machine is mutated at most once.
"""

from __future__ import annotations

from .generate import OS_TEMPLATES, attach_catalog_vulns, sample_services
from .model import (
    Catalog,
    ChangeSet,
    Exploit,
    Machine,
    Network,
    RngContext,
    Service,
    Vulnerability,
)

MUTATION_WEIGHTS = [
    ("version_bump", 0.30),
    ("port_toggle", 0.25),
    ("vuln_patched", 0.20),
    ("vuln_introduced", 0.15),
    ("machine_added", 0.05),
    ("machine_removed", 0.05),
]


def _pick_kind(rng) -> str:
    roll = rng.random()
    acc = 0.0
    for kind, weight in MUTATION_WEIGHTS:
        acc += weight
        if roll < acc:
            return kind
    return MUTATION_WEIGHTS[-1][0]


def _next_machine_id(used: set[str]) -> str:
    n = 1
    while f"m{n:03d}" in used:
        n += 1
    return f"m{n:03d}"


def apply_changeset(network: Network, fraction: float, seed: int) -> tuple[Network, ChangeSet]:
    """Return a mutated copy of the network plus the change set applied."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction {fraction} outside [0, 1]")
    rng = RngContext(seed).stream("changeset", repr(fraction))
    total = round(fraction * len(network.machines))
    machines = {m.id: m for m in network.machines}
    vulns = list(network.catalog.vulnerabilities)
    exploits = list(network.catalog.exploits)
    transit_ids = {link.transit for link in network.links if link.transit}

    mutated: set[str] = set()
    mutations: list[tuple[str, str]] = []
    added: set[str] = set()

    def untouched(candidates):
        return sorted(set(candidates) - mutated)

    while len(mutated) < total:
        kind = _pick_kind(rng)
        if kind == "machine_added":
            new_id = _next_machine_id(set(machines) | mutated)
            machines[new_id] = Machine(
                id=new_id,
                os=rng.choice(OS_TEMPLATES["workstation"]),
                subnet=rng.choice(network.subnets),
                role="workstation",
                value=rng.randint(1, 7),
                powered=True,
                services=sample_services(rng, rng.randint(1, 3)),
            )
            added.add(new_id)
            mutated.add(new_id)
            mutations.append((new_id, kind))
            continue
        if kind == "machine_removed":
            candidates = untouched(set(machines) - transit_ids)
            if not candidates:
                continue
            victim = candidates[rng.randrange(len(candidates))]
            del machines[victim]
            mutated.add(victim)
            mutations.append((victim, kind))
            continue

        candidates = untouched(machines)
        if not candidates:
            break
        target_id = candidates[rng.randrange(len(candidates))]
        changed = _mutate_machine(machines[target_id], kind, rng, vulns, exploits)
        if changed is None:
            continue
        machines[target_id] = changed
        mutated.add(target_id)
        mutations.append((target_id, kind))

    catalog = Catalog(tuple(vulns), tuple(exploits))
    ordered = tuple(
        attach_catalog_vulns(machines[mid], catalog) if mid in added else machines[mid]
        for mid in sorted(machines)
    )
    new_net = Network(
        machines=ordered,
        subnets=network.subnets,
        links=network.links,
        catalog=catalog,
        seed=network.seed,
        policies=network.policies,
    )
    return new_net, ChangeSet(frozenset(mutated), tuple(mutations), fraction)


def _mutate_machine(machine: Machine, kind: str, rng, vulns, exploits) -> Machine | None:
    services = list(machine.services)
    if not services:
        return None
    idx = rng.randrange(len(services))
    svc = services[idx]

    if kind == "version_bump":
        major, _, minor = svc.version.partition(".")
        bumped = f"{major}.{int(minor or 0) + 1}"
        services[idx] = Service(svc.port, svc.name, bumped, svc.state, svc.vulns)
    elif kind == "port_toggle":
        new_state = "closed" if svc.state == "open" else "open"
        services[idx] = Service(svc.port, svc.name, svc.version, new_state, svc.vulns)
    elif kind == "vuln_patched":
        carriers = [i for i, s in enumerate(services) if s.vulns]
        if not carriers:
            return None
        idx = carriers[rng.randrange(len(carriers))]
        svc = services[idx]
        keep = list(svc.vulns)
        keep.pop(rng.randrange(len(keep)))
        services[idx] = Service(svc.port, svc.name, svc.version, svc.state, tuple(keep))
    elif kind == "vuln_introduced":
        major = svc.version.split(".")[0]
        vuln_id = f"SYN-2024-{len(vulns) + 1:04d}"
        vulns.append(
            Vulnerability(
                id=vuln_id,
                matches=(svc.name, major),
                privilege_gained=rng.choice(["user", "root"]),
                detect_difficulty=round(rng.uniform(0.6, 0.95), 3),
            )
        )
        exploits.append(
            Exploit(
                id=f"EXP-2024-{len(exploits) + 1:04d}",
                targets=vuln_id,
                success_prob=round(rng.uniform(0.5, 0.98), 3),
            )
        )
        services[idx] = Service(
            svc.port, svc.name, svc.version, svc.state, svc.vulns + (vuln_id,)
        )
    else:
        raise ValueError(f"unhandled mutation kind {kind!r}")

    return Machine(
        machine.id, machine.os, machine.subnet, machine.role,
        machine.value, machine.powered, tuple(services),
    )

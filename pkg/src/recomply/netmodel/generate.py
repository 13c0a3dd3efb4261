"""Seeded parametric LAN generator.

Produces connected virtual LANs in three size bands (small 2-50, medium
55-100, large 105-250) with one firewall per subnet boundary, a 5-15% share
of high-value servers, 1-6 services per machine and a synthetic catalog of
roughly one vulnerability per two service instances, each with at least one
exploit. Fully determined by (seed, size, profile).
"""

from __future__ import annotations

import random

from .model import (
    Catalog,
    Exploit,
    FirewallRule,
    InvalidSize,
    Link,
    Machine,
    Network,
    RngContext,
    Service,
    Vulnerability,
)

PROFILE_BANDS = {"small": (2, 50), "medium": (55, 100), "large": (105, 250)}

OS_TEMPLATES = {
    "workstation": [
        "linux/ubuntu-20.04",
        "linux/ubuntu-22.04",
        "linux/debian-11",
        "windows/win10",
        "windows/win11",
    ],
    "server": [
        "linux/centos-7",
        "linux/ubuntu-20.04",
        "linux/debian-11",
        "windows/server-2016",
        "windows/server-2019",
    ],
    "firewall": ["bsd/pfsense-2.6", "linux/vyos-1.3"],
}

# (name, canonical port, versions)
SERVICE_TEMPLATES = [
    ("ssh", 22, ["7.4", "8.2", "9.0"]),
    ("http", 80, ["2.2", "2.4", "1.18"]),
    ("https", 443, ["1.14", "1.18"]),
    ("smbd", 445, ["3.6", "4.5", "4.13"]),
    ("ftp", 21, ["2.3", "3.0"]),
    ("mysql", 3306, ["5.7", "8.0"]),
    ("rdp", 3389, ["10.0"]),
    ("dns", 53, ["9.11", "9.16"]),
    ("smtp", 25, ["2.11", "3.4"]),
    ("ldap", 389, ["2.4"]),
    ("nfs", 2049, ["1.3", "2.3"]),
    ("http-alt", 8080, ["8.5", "9.0"]),
    ("postgres", 5432, ["12.3", "14.1"]),
    ("vnc", 5900, ["6.9"]),
    ("winrm", 5985, ["3.0"]),
]

POST_MODULES = ("PM-CREDDUMP", "PM-PERSIST", "PM-HASHDUMP", "PM-LOOT")


def canonical_ports() -> list[int]:
    return sorted(port for _, port, _ in SERVICE_TEMPLATES)


def _subnet_count(size: int) -> int:
    if size <= 15:
        return 1
    return min(2 + (size - 16) // 40, 8)


def sample_services(rng: random.Random, count: int) -> tuple[Service, ...]:
    picks = rng.sample(SERVICE_TEMPLATES, count)
    services = []
    for name, port, versions in sorted(picks, key=lambda t: t[1]):
        version = rng.choice(versions)
        roll = rng.random()
        state = "open" if roll < 0.85 else ("filtered" if roll < 0.93 else "closed")
        services.append(Service(port, name, version, state))
    return tuple(services)


def generate_testbed(seed: int, size: int, profile: str) -> Network:
    """Generate a deterministic LAN test-bed of `size` machines."""
    if profile not in PROFILE_BANDS:
        raise InvalidSize(f"unknown profile {profile!r}")
    lo, hi = PROFILE_BANDS[profile]
    if not 2 <= size <= 250:
        raise InvalidSize(f"size {size} outside [2, 250]")
    if not lo <= size <= hi:
        raise InvalidSize(f"size {size} outside the {profile} band [{lo}, {hi}]")

    ctx = RngContext(seed)
    rng = ctx.stream("generate", size, profile)

    n_subnets = _subnet_count(size)
    subnets = tuple(f"net{i}" for i in range(n_subnets))
    n_transit = n_subnets - 1

    machines: list[Machine] = []
    links: list[Link] = []
    next_id = 1

    def take_id() -> str:
        nonlocal next_id
        mid = f"m{next_id:03d}"
        next_id += 1
        return mid

    # chain topology, one firewall per boundary, assigned to the inner subnet
    for i in range(1, n_subnets):
        fw_id = take_id()
        machines.append(
            Machine(
                id=fw_id,
                os=rng.choice(OS_TEMPLATES["firewall"]),
                subnet=subnets[i],
                role="firewall",
                value=rng.randint(3, 6),
                powered=True,
                services=(Service(22, "ssh", rng.choice(["7.4", "8.2"]), "open"),),
            )
        )
        links.append(Link(subnets[i - 1], subnets[i], fw_id))

    remaining = size - n_transit
    server_share = rng.uniform(0.05, 0.15)
    n_servers = min(remaining, round(size * server_share))
    if size >= 10:
        n_servers = max(1, n_servers)
    server_subnet = subnets[-1]

    for _ in range(n_servers):
        machines.append(
            Machine(
                id=take_id(),
                os=rng.choice(OS_TEMPLATES["server"]),
                subnet=server_subnet,
                role="server",
                value=rng.randint(8, 10),
                powered=rng.random() < 0.98,
                services=sample_services(rng, rng.randint(2, 6)),
            )
        )
    for _ in range(remaining - n_servers):
        machines.append(
            Machine(
                id=take_id(),
                os=rng.choice(OS_TEMPLATES["workstation"]),
                subnet=rng.choice(subnets),
                role="workstation",
                value=rng.randint(1, 7),
                powered=rng.random() < 0.95,
                services=sample_services(rng, rng.randint(1, 3)),
            )
        )

    catalog = _build_catalog(rng, machines)
    machines = [attach_catalog_vulns(m, catalog) for m in machines]

    policies = _server_subnet_policies(machines, links, server_subnet, n_subnets)

    return Network(
        machines=tuple(machines),
        subnets=subnets,
        links=tuple(links),
        catalog=catalog,
        seed=seed,
        policies=policies,
    )


def _build_catalog(rng: random.Random, machines: list[Machine]) -> Catalog:
    instances = [(svc.name, svc.version.split(".")[0]) for m in machines for svc in m.services]
    n_vulns = max(1, round(0.5 * len(instances)))
    pool = sorted(set(instances))
    vulns = []
    for i in range(n_vulns):
        name, major = pool[rng.randrange(len(pool))] if pool else ("ssh", "8")
        vulns.append(
            Vulnerability(
                id=f"SYN-2024-{i + 1:04d}",
                matches=(name, major),
                privilege_gained=rng.choice(["user", "user", "root"]),
                detect_difficulty=round(rng.uniform(0.6, 0.95), 3),
            )
        )
    exploits = []
    counter = 1
    for vuln in vulns:
        for _ in range(rng.randint(1, 2)):
            n_post = rng.randint(0, 2)
            exploits.append(
                Exploit(
                    id=f"EXP-2024-{counter:04d}",
                    targets=vuln.id,
                    success_prob=round(rng.uniform(0.5, 0.98), 3),
                    post_modules=tuple(sorted(rng.sample(POST_MODULES, n_post))),
                )
            )
            counter += 1
    return Catalog(tuple(vulns), tuple(exploits))


def attach_catalog_vulns(machine: Machine, catalog: Catalog) -> Machine:
    services = tuple(
        Service(
            svc.port,
            svc.name,
            svc.version,
            svc.state,
            tuple(v.id for v in catalog.vulnerabilities if v.applies_to(svc)),
        )
        for svc in machine.services
    )
    return Machine(
        machine.id, machine.os, machine.subnet, machine.role,
        machine.value, machine.powered, services,
    )


def _server_subnet_policies(machines, links, server_subnet, n_subnets):
    """Transit devices guarding the server subnet deny inbound traffic except
    to declared service ports (ICMP always passes)."""
    if n_subnets < 2:
        return ()
    declared = sorted(
        {svc.port for m in machines if m.subnet == server_subnet for svc in m.services}
    )
    rules = [FirewallRule("allow", "*", "*", 0, 0)]
    rules.extend(FirewallRule("allow", "*", server_subnet, p, p) for p in declared)
    rules.append(FirewallRule("deny", "*", server_subnet, 1, 65535))
    policies = []
    for link in links:
        if link.transit is not None and server_subnet in (link.a, link.b):
            policies.append((link.transit, tuple(rules)))
    return tuple(sorted(policies))

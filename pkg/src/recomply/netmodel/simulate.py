"""Probe and exploit primitives over a network snapshot.

All randomness is drawn from named substreams keyed by (purpose, target,
entity ids), so repeating an action in an unchanged network reproduces the
identical outcome regardless of action order.
"""

from __future__ import annotations

from .model import (
    EXTERNAL,
    ExploitOutcome,
    Network,
    Observation,
    PreconditionViolated,
    RngContext,
    UnknownEntity,
)

PortRanges = tuple[tuple[int, int], ...]

ICMP = 0  # pseudo-port used by firewall rules to gate ping traffic


def normalize_ranges(ports) -> PortRanges:
    """Collapse an iterable of ports and/or (lo, hi) pairs into sorted,
    non-overlapping inclusive ranges."""
    spans = []
    for item in ports:
        if isinstance(item, int):
            spans.append((item, item))
        else:
            lo, hi = int(item[0]), int(item[1])
            if lo > hi:
                raise ValueError(f"bad port range {item!r}")
            spans.append((lo, hi))
    spans.sort()
    merged: list[tuple[int, int]] = []
    for lo, hi in spans:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def ranges_count(ranges: PortRanges) -> int:
    return sum(hi - lo + 1 for lo, hi in ranges)


def ranges_member(ranges: PortRanges, port: int) -> bool:
    return any(lo <= port <= hi for lo, hi in ranges)


def ranges_intersect(a: PortRanges, b: PortRanges) -> PortRanges:
    out = []
    for alo, ahi in a:
        for blo, bhi in b:
            lo, hi = max(alo, blo), min(ahi, bhi)
            if lo <= hi:
                out.append((lo, hi))
    return normalize_ranges(out)


def _policy_denied(rules, src: str, dst: str) -> PortRanges:
    """Denied port set for src->dst traffic through one transit device.

    Ordered rules, first match wins per port, default allow. Ports run over
    0..65535 where 0 is ICMP.
    """
    denied: list[tuple[int, int]] = []
    undecided = [(0, 65535)]
    for rule in rules:
        if not rule.covers(src, dst):
            continue
        remaining = []
        for lo, hi in undecided:
            cut_lo, cut_hi = max(lo, rule.port_lo), min(hi, rule.port_hi)
            if cut_lo > cut_hi:
                remaining.append((lo, hi))
                continue
            if rule.action == "deny":
                denied.append((cut_lo, cut_hi))
            if lo < cut_lo:
                remaining.append((lo, cut_lo - 1))
            if cut_hi < hi:
                remaining.append((cut_hi + 1, hi))
        undecided = remaining
    return normalize_ranges(denied)


def _is_tree(network: Network) -> bool:
    return len(network.links) == len(network.subnets) - 1


def _tree_path_transits(network: Network, src: str, dst: str) -> list[str] | None:
    """Transit devices along the unique src->dst subnet path (tree topologies)."""
    if src == dst:
        return []
    parent: dict[str, tuple[str, str | None]] = {}
    seen = {src}
    frontier = [src]
    while frontier:
        node = frontier.pop(0)
        for nbr, transit in network.subnet_adjacency[node]:
            if nbr not in seen:
                seen.add(nbr)
                parent[nbr] = (node, transit)
                if nbr == dst:
                    frontier = []
                    break
                frontier.append(nbr)
    if dst not in seen:
        return None
    transits = []
    node = dst
    while node != src:
        node, transit = parent[node]
        if transit is not None:
            transits.append(transit)
    return transits


def path_denied_ranges(network: Network, src_subnet: str, dst_subnet: str) -> PortRanges | None:
    """Union of denied port ranges along the path, or None when no path exists.

    Tree topologies have a unique path; general graphs fall back to per-port
    search via port_permitted and this returns the conservative union over
    the ICMP-reachable path.
    """
    if src_subnet == dst_subnet:
        return ()
    transits = _tree_path_transits(network, src_subnet, dst_subnet)
    if transits is None:
        return None
    denied: list[tuple[int, int]] = []
    for transit in transits:
        rules = network.policy_map.get(transit, ())
        denied.extend(_policy_denied(rules, src_subnet, dst_subnet))
    return normalize_ranges(denied)


def port_permitted(network: Network, src_subnet: str, dst_subnet: str, port: int) -> bool:
    """True iff some subnet path carries src->dst traffic on this port."""
    if src_subnet == dst_subnet:
        return True
    seen = {src_subnet}
    frontier = [src_subnet]
    while frontier:
        node = frontier.pop(0)
        for nbr, transit in network.subnet_adjacency[node]:
            if nbr in seen:
                continue
            if transit is not None:
                denied = _policy_denied(
                    network.policy_map.get(transit, ()), src_subnet, dst_subnet
                )
                if ranges_member(denied, port):
                    continue
            if nbr == dst_subnet:
                return True
            seen.add(nbr)
            frontier.append(nbr)
    return False


def _resolve(network: Network, entity: str, what: str) -> str:
    if entity == EXTERNAL:
        return network.subnets[0]
    machine = network.by_id.get(entity)
    if machine is None:
        raise UnknownEntity(f"unknown {what} {entity!r}")
    return machine.subnet


def reachable(network: Network, pivot: str, target: str) -> bool:
    """True iff a subnet path exists whose every transit permits pivot->target
    traffic at the ICMP level."""
    src = _resolve(network, pivot, "pivot")
    dst = _resolve(network, target, "target")
    if pivot == target:
        return True
    return port_permitted(network, src, dst, ICMP)


def execute_probe(
    network: Network,
    pivot: str,
    target: str,
    probe: str,
    rng: RngContext,
    *,
    ports: PortRanges = (),
    port: int | None = None,
    variant: int = 0,
) -> Observation:
    """Run one probe primitive and return the resulting observation.

    ping            -> Machine_Status ON/OFF
    port_scan       -> per-port states; observation lists open ports and
                       filtered ranges, unlisted scanned ports are closed
    service_detect  -> TRUE with (name, version), FALSE, or UNKNOWN (blocked)
    vuln_check      -> TRUE with detected vulnerability ids, FALSE, or UNKNOWN;
                       one Bernoulli(detect_difficulty) draw per vulnerability
    """
    src = _resolve(network, pivot, "pivot")
    machine = network.machine(target)
    dst = machine.subnet

    denied = path_denied_ranges(network, src, dst) if _is_tree(network) else None

    def blocked(p: int) -> bool:
        if denied is not None:
            return ranges_member(denied, p)
        return not port_permitted(network, src, dst, p)

    if probe == "ping":
        if blocked(ICMP):
            return Observation("ping", target, "OFF")
        return Observation("ping", target, "ON" if machine.powered else "OFF")

    if probe == "port_scan":
        span = normalize_ranges(ports)
        open_ports: list[int] = []
        filtered: list[tuple[int, int]] = []
        if machine.powered:
            for svc in machine.services:
                if not ranges_member(span, svc.port):
                    continue
                if blocked(svc.port):
                    continue  # reported inside the blocked ranges below
                if svc.state == "open":
                    open_ports.append(svc.port)
                elif svc.state == "filtered":
                    filtered.append((svc.port, svc.port))
        if denied is not None:
            filtered.extend(ranges_intersect(span, denied))
        elif src != dst:
            # non-tree fallback: classify scanned service ports only
            for svc in machine.services:
                if ranges_member(span, svc.port) and blocked(svc.port):
                    filtered.append((svc.port, svc.port))
        return Observation(
            "port_scan",
            target,
            "SCANNED",
            open_ports=tuple(sorted(open_ports)),
            filtered_ranges=normalize_ranges(filtered),
        )

    if probe == "service_detect":
        if port is None:
            raise ValueError("service_detect requires a port")
        if blocked(port):
            return Observation("service_detect", target, "UNKNOWN", port=port)
        svc = machine.service_at(port) if machine.powered else None
        if svc is not None and svc.state == "open":
            return Observation(
                "service_detect", target, "TRUE", port=port, service=(svc.name, svc.version)
            )
        return Observation("service_detect", target, "FALSE", port=port)

    if probe == "vuln_check":
        if port is None:
            raise ValueError("vuln_check requires a port")
        if blocked(port):
            return Observation("vuln_check", target, "UNKNOWN", port=port)
        svc = machine.service_at(port) if machine.powered else None
        if svc is None or svc.state != "open":
            return Observation("vuln_check", target, "FALSE", port=port)
        detected = tuple(
            vuln_id
            for vuln_id in svc.vulns
            if rng.bernoulli(
                network.catalog.vuln_by_id[vuln_id].detect_difficulty,
                "vulncheck",
                target,
                port,
                vuln_id,
                variant,
            )
        )
        value = "TRUE" if detected else "FALSE"
        return Observation("vuln_check", target, value, port=port, vulns=detected)

    raise ValueError(f"unknown probe {probe!r}")


def execute_exploit(
    network: Network,
    pivot: str,
    target: str,
    exploit_id: str,
    rng: RngContext,
    *,
    detected: frozenset[str] | set[str] = frozenset(),
    compromised=None,
) -> ExploitOutcome:
    """Attempt an exploit from the pivot against the target.

    The targeted vulnerability must have been detected first in this session
    (phase ordering); success draws Bernoulli(success_prob) from a substream
    keyed by (target, exploit), so a retry with identical parameters repeats
    the same outcome.
    """
    src = _resolve(network, pivot, "pivot")
    machine = network.machine(target)
    exploit = next((e for e in network.catalog.exploits if e.id == exploit_id), None)
    if exploit is None:
        raise UnknownEntity(f"unknown exploit {exploit_id!r}")
    if exploit.targets not in detected:
        raise PreconditionViolated(
            f"exploit {exploit_id} targets undetected vulnerability {exploit.targets}"
        )
    vuln = network.catalog.vuln_by_id[exploit.targets]
    carrier = next(
        (
            svc
            for svc in machine.services
            if exploit.targets in svc.vulns and svc.state == "open"
        ),
        None,
    )
    if carrier is None or not machine.powered:
        return ExploitOutcome(exploit_id, target, "FAILED")
    if not port_permitted(network, src, machine.subnet, carrier.port):
        return ExploitOutcome(exploit_id, target, "BLOCKED")
    if rng.bernoulli(exploit.success_prob, "exploit", target, exploit_id):
        if compromised is not None:
            compromised.add(target, vuln.privilege_gained)
        return ExploitOutcome(exploit_id, target, "SUCCESS", privilege=vuln.privilege_gained)
    return ExploitOutcome(exploit_id, target, "FAILED")

"""Attack-vector capture, optimal sub-vector extraction and likelihood scoring.

Extraction runs in two passes. Pass one prunes each raw per-machine chain to
the steps on the dependency path to the machine's outcome: positive findings
(discovered services, detected vulnerabilities, compromises) are preserved,
failed probes and redundant re-scans are dropped, port scans are narrowed to
the ports whose discoveries survive, and each detected-but-unexploited
vulnerability keeps exactly one best exploit attempt. Pass two aggregates the
neighborhood context into the fingerprint. The result is truncated to the
configured maximum chain length by dropping whole port branches, latest
first, and scored by the likelihood model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from ..netmodel.model import ExploitOutcome, Network, Observation
from ..session.actions import Action, encode_action, port_scan
from ..session.runner import SessionView, run_session
from ..session.trace import SessionTrace, assessed_machines
from .fingerprint import ExtractionConfig, fingerprint_of

VECTOR_KINDS = ("Ping", "PortScan", "ServiceDetect", "VulnDetect", "Exploit", "PostExploit")


class EmptyAfterPruning(ValueError):
    """No step of the raw vector lies on a dependency path to an outcome."""


@dataclass(frozen=True)
class AttackVector:
    target: str
    chain: tuple[Action, ...]
    fingerprint: frozenset[str]
    outcome: str  # "assessed" | "compromised:user" | "compromised:root"
    evidence: tuple = ()  # per-step observations, populated at capture time

    def __post_init__(self):
        if self.evidence and len(self.evidence) != len(self.chain):
            raise ValueError("evidence must align with the chain")

    @property
    def compromised(self) -> bool:
        return self.outcome.startswith("compromised")


def capture_vectors(trace: SessionTrace, network: Network) -> list[AttackVector]:
    """Partition a completed trace into one raw vector per covered machine."""
    assessed = assessed_machines(trace)
    privilege = dict(trace.compromised)
    per_machine: dict[str, list] = {}
    for step in trace.steps:
        if step.action.kind in VECTOR_KINDS:
            per_machine.setdefault(step.action.subject, []).append(step)

    vectors = []
    for machine_id in sorted(per_machine):
        if machine_id not in assessed and machine_id not in privilege:
            continue
        if machine_id not in network.by_id:
            continue
        steps = per_machine[machine_id]
        outcome = (
            f"compromised:{privilege[machine_id]}"
            if machine_id in privilege
            else "assessed"
        )
        vectors.append(
            AttackVector(
                target=machine_id,
                chain=tuple(s.action for s in steps),
                fingerprint=fingerprint_of(network, machine_id),
                outcome=outcome,
                evidence=tuple(s.observation for s in steps),
            )
        )
    return vectors


def likelihood_of(vector: AttackVector, network: Network, cfg: ExtractionConfig) -> float:
    """Probability-style score that this chain is the optimal flow for its
    context: product of per-step success estimates times a value blend."""
    machine = network.by_id.get(vector.target)
    catalog = network.catalog
    product = 1.0
    for action in vector.chain:
        if action.kind == "VulnDetect" and machine is not None:
            svc = machine.service_at(action.params["port"])
            if svc is not None:
                for vuln_id in svc.vulns:
                    vuln = catalog.vuln_by_id.get(vuln_id)
                    if vuln is not None:
                        product *= vuln.detect_difficulty
        elif action.kind == "Exploit":
            exploit = next(
                (e for e in catalog.exploits if e.id == action.params["exploit"]), None
            )
            if exploit is not None:
                product *= exploit.success_prob
    value = machine.value if machine is not None else 5
    blend = (1.0 - cfg.value_weight) + cfg.value_weight * value / 10.0
    return product * blend


def extract_optimal_vector(
    raw: AttackVector, network: Network, cfg: ExtractionConfig | None = None
) -> tuple[AttackVector, float]:
    """Prune a raw vector to its optimal dependency-respecting sub-chain."""
    cfg = cfg or ExtractionConfig()
    if not raw.chain:
        raise EmptyAfterPruning(f"raw vector for {raw.target} is empty")
    evidence = raw.evidence or (None,) * len(raw.chain)
    steps = list(zip(raw.chain, evidence))

    keep = _dependency_keep_set(steps, network)
    if not keep:
        raise EmptyAfterPruning(
            f"no step of {raw.target}'s vector lies on a dependency path to an outcome"
        )

    narrowed = _narrow_scans(steps, keep)
    kept = [(idx, narrowed.get(idx, steps[idx][0]), steps[idx][1]) for idx in sorted(keep)]
    kept = _truncate(kept, cfg.max_chain_length)

    fingerprint = fingerprint_of(network, raw.target, cfg.neighbor_radius) \
        if raw.target in network.by_id else raw.fingerprint
    pruned = AttackVector(
        target=raw.target,
        chain=tuple(action for _, action, _ in kept),
        fingerprint=fingerprint,
        outcome=raw.outcome,
        evidence=tuple(obs for _, _, obs in kept),
    )
    return pruned, likelihood_of(pruned, network, cfg)


def _dependency_keep_set(steps, network: Network) -> set[int]:
    """Indices on the dependency path to the vector's positive findings."""
    keep: set[int] = set()

    def attempt_prob(action: Action) -> float:
        exploit = next(
            (e for e in network.catalog.exploits if e.id == action.params.get("exploit")),
            None,
        )
        return exploit.success_prob if exploit is not None else 0.0

    ping_on = next(
        (i for i, (a, o) in enumerate(steps)
         if a.kind == "Ping" and isinstance(o, Observation) and o.value == "ON"),
        None,
    )
    first_ping = next((i for i, (a, _) in enumerate(steps) if a.kind == "Ping"), None)

    # first scan that proved each port open
    open_provider: dict[int, int] = {}
    for i, (action, obs) in enumerate(steps):
        if action.kind == "PortScan" and isinstance(obs, Observation):
            for port in obs.open_ports:
                open_provider.setdefault(port, i)

    # first TRUE detection per port
    discovery: dict[int, int] = {}
    for i, (action, obs) in enumerate(steps):
        if (
            action.kind == "ServiceDetect"
            and isinstance(obs, Observation)
            and obs.value == "TRUE"
        ):
            discovery.setdefault(action.params["port"], i)

    # first check per discovered port, and first TRUE check per vulnerability
    first_check: dict[int, int] = {}
    vuln_provider: dict[str, int] = {}
    for i, (action, obs) in enumerate(steps):
        if action.kind == "VulnDetect" and isinstance(obs, Observation):
            port = action.params["port"]
            if port in discovery and discovery[port] < i:
                first_check.setdefault(port, i)
                for vuln in obs.vulns:
                    vuln_provider.setdefault(vuln, i)

    successes: list[int] = []
    attempts: dict[str, list[int]] = {}
    posts: list[int] = []
    exploited: set[str] = set()
    for i, (action, obs) in enumerate(steps):
        if action.kind == "Exploit" and isinstance(obs, ExploitOutcome):
            vuln = action.params.get("vuln")
            if vuln not in vuln_provider or vuln_provider[vuln] > i:
                continue  # attempt without a kept detection: off the path
            attempts.setdefault(vuln, []).append(i)
            if obs.success:
                successes.append(i)
                exploited.add(vuln)
        elif action.kind == "PostExploit" and isinstance(obs, ExploitOutcome):
            posts.append(i)

    for port, disc_idx in discovery.items():
        keep.add(disc_idx)
        if port in first_check:
            keep.add(first_check[port])
    keep.update(vuln_provider.values())
    keep.update(successes)

    # one best attempt per detected but never-exploited vulnerability
    for vuln, idxs in attempts.items():
        if vuln in exploited:
            continue
        best = min(
            idxs,
            key=lambda i: (-attempt_prob(steps[i][0]), encode_action(steps[i][0])),
        )
        keep.add(best)

    # post-exploitation steps ride on a kept successful exploit
    success_exploits = {steps[i][0].params.get("exploit") for i in successes}
    for i in posts:
        if steps[i][0].params.get("exploit") in success_exploits:
            keep.add(i)

    # scans that prove a kept discovery open
    for port in {steps[i][0].params["port"] for i in keep if steps[i][0].kind in ("ServiceDetect", "VulnDetect")}:
        if port in open_provider:
            keep.add(open_provider[port])

    if keep or ping_on is not None or first_ping is not None:
        anchor = ping_on if ping_on is not None else first_ping
        if anchor is not None:
            keep.add(anchor)
    return keep


def _narrow_scans(steps, keep: set[int]) -> dict[int, Action]:
    """Rewrite kept scan steps to cover only the kept discovered ports."""
    needed_ports: dict[int, list[int]] = {}
    open_provider: dict[int, int] = {}
    for i, (action, obs) in enumerate(steps):
        if action.kind == "PortScan" and isinstance(obs, Observation):
            for port in obs.open_ports:
                open_provider.setdefault(port, i)
    kept_ports = {
        steps[i][0].params["port"]
        for i in keep
        if steps[i][0].kind in ("ServiceDetect", "VulnDetect")
    }
    for port in kept_ports:
        provider = open_provider.get(port)
        if provider is not None:
            needed_ports.setdefault(provider, []).append(port)

    narrowed = {}
    for i in list(keep):
        action = steps[i][0]
        if action.kind != "PortScan":
            continue
        ports = needed_ports.get(i)
        if ports:
            narrowed[i] = port_scan(action.subject, sorted(ports))
        else:
            keep.discard(i)
    return narrowed


_PRIV_RANK = {None: 0, "user": 1, "root": 2}


def _truncate(kept: list, limit: int) -> list:
    """Shrink an over-long chain by dropping whole dependency units in order
    of what they cost to lose: service branches with no detected
    vulnerability first, then post-exploitation steps, then detected-but-
    unexploited branches, and compromise branches only as a last resort
    (lowest privilege first). Within a tier, latest first."""
    while len(kept) > limit:
        branches = _branches(kept)
        victim = None
        no_vuln = [b for b in branches if not b["vulns"]]
        vuln_only = [b for b in branches if b["vulns"] and not b["successes"]]
        success = [b for b in branches if b["successes"]]
        posts = [k for k, (_, a, _) in enumerate(kept) if a.kind == "PostExploit"]
        if no_vuln:
            victim = no_vuln[-1]["port"]
        elif posts:
            del kept[posts[-1]]
            continue
        elif vuln_only:
            victim = vuln_only[-1]["port"]
        elif success:
            success.sort(key=lambda b: (b["privilege"], b["pos"]))
            victim = success[0]["port"]
        else:
            kept = kept[:limit]
            break
        kept = _drop_branch(kept, victim)
    return kept


def _branches(kept: list) -> list[dict]:
    """Per-port dependency branches in discovery order."""
    out: dict[int, dict] = {}
    exploit_port: dict[str, int] = {}
    for pos, (_, action, obs) in enumerate(kept):
        port = action.params.get("port")
        if action.kind == "ServiceDetect":
            out.setdefault(port, {"port": port, "pos": pos, "vulns": set(),
                                  "successes": [], "privilege": 0})
        elif action.kind == "VulnDetect" and port in out:
            if isinstance(obs, Observation):
                out[port]["vulns"].update(obs.vulns)
        elif action.kind == "Exploit" and port in out:
            exploit_port[action.params.get("exploit")] = port
            if isinstance(obs, ExploitOutcome) and obs.success:
                out[port]["successes"].append(action.params.get("exploit"))
                out[port]["privilege"] = max(
                    out[port]["privilege"], _PRIV_RANK.get(obs.privilege, 1)
                )
    return [out[p] for p in sorted(out, key=lambda p: out[p]["pos"])]


def _drop_branch(kept: list, victim: int) -> list:
    branch_exploits = {
        a.params.get("exploit")
        for _, a, _ in kept
        if a.kind == "Exploit" and a.params.get("port") == victim
    }
    survivors = []
    for entry in kept:
        _, action, _ = entry
        if action.kind in ("ServiceDetect", "VulnDetect", "Exploit") and (
            action.params.get("port") == victim
        ):
            continue
        if action.kind == "PostExploit" and action.params.get("exploit") in branch_exploits:
            continue
        if action.kind == "PortScan":
            remaining = [
                (lo, hi) for lo, hi in action.params["ports"] if not lo <= victim <= hi
            ]
            if not remaining:
                continue
            entry = (entry[0], port_scan(action.subject, remaining), entry[2])
        survivors.append(entry)
    return survivors


class ChainPolicy:
    """Replays a fixed chain of actions verbatim (pruning-soundness checks)."""

    def __init__(self, chain: tuple[Action, ...]):
        self.name = "chain"
        self.chain = chain

    def actions(self, view: SessionView) -> Iterator[Action]:
        yield from self.chain


def execute_chain(
    network: Network,
    vector: AttackVector,
    seed: int,
    mode: str = "PT",
) -> SessionTrace:
    """Re-execute a pruned chain with the original session seed."""
    return run_session(network, ChainPolicy(vector.chain), mode, seed=seed)

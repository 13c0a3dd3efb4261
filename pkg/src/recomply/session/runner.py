"""Session executor: drives a policy against a network, producing a trace.

The runner owns all mutable session state (current pivot, observation
registry, compromise set) and exposes it to the policy through a SessionView.
Policies yield actions from a generator and read results from the view
between yields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Protocol

from ..netmodel.model import (
    EXTERNAL,
    CompromisedSet,
    ExploitOutcome,
    Network,
    Observation,
    PreconditionViolated,
    RngContext,
)
from ..netmodel.simulate import execute_exploit, execute_probe
from .actions import Action, action_cost
from .trace import SessionTrace, TraceStep, coverage_of

DEFAULT_BUDGET = 10_000_000.0


class PolicyError(RuntimeError):
    """The policy emitted an ill-formed or mode-forbidden action."""


class Policy(Protocol):
    name: str

    def actions(self, view: "SessionView") -> Iterator[Action]: ...


@dataclass
class SessionView:
    """Read view of session state for policies.

    Inventory (machine ids, declared asset values, subnets) models the asset
    list an auditor receives up front; everything else is built from probe
    observations, never from hidden ground truth.
    """

    network: Network
    mode: str
    seed: int
    budget: float
    pivot: str = EXTERNAL
    spent: float = 0.0
    machine_status: dict[str, str] = field(default_factory=dict)
    open_ports: dict[str, set[int]] = field(default_factory=dict)
    filtered_ranges: dict[str, tuple] = field(default_factory=dict)
    scanned: dict[str, list] = field(default_factory=dict)
    services: dict[tuple[str, int], tuple[str, str]] = field(default_factory=dict)
    checked_ports: set[tuple[str, int]] = field(default_factory=set)
    detected: dict[str, dict[str, int]] = field(default_factory=dict)  # m -> vuln -> port
    exploit_results: dict[tuple[str, str], ExploitOutcome] = field(default_factory=dict)
    compromised: CompromisedSet = field(default_factory=CompromisedSet)

    @property
    def inventory(self) -> list[tuple[str, int, str]]:
        return [(m.id, m.value, m.subnet) for m in self.network.machines]

    @property
    def machine_ids(self) -> list[str]:
        return [m.id for m in self.network.machines]

    @property
    def catalog(self):
        return self.network.catalog

    @property
    def budget_left(self) -> float:
        return self.budget - self.spent

    def detected_vulns(self, machine_id: str) -> dict[str, int]:
        return self.detected.get(machine_id, {})

    def record(self, action: Action, outcome) -> None:
        subject = action.subject
        if action.kind == "Ping" and isinstance(outcome, Observation):
            self.machine_status[subject] = outcome.value
        elif action.kind == "PortScan" and isinstance(outcome, Observation):
            self.open_ports.setdefault(subject, set()).update(outcome.open_ports)
            merged = list(self.filtered_ranges.get(subject, ())) + list(outcome.filtered_ranges)
            self.filtered_ranges[subject] = tuple(merged)
            self.scanned.setdefault(subject, []).append(action.params["ports"])
        elif action.kind == "ServiceDetect" and isinstance(outcome, Observation):
            if outcome.value == "TRUE" and outcome.service:
                self.services[(subject, action.params["port"])] = outcome.service
        elif action.kind == "VulnDetect" and isinstance(outcome, Observation):
            self.checked_ports.add((subject, action.params["port"]))
            for vuln in outcome.vulns:
                self.detected.setdefault(subject, {})[vuln] = action.params["port"]
        elif action.kind == "Exploit" and isinstance(outcome, ExploitOutcome):
            self.exploit_results[(subject, action.params["exploit"])] = outcome


def run_session(
    network: Network,
    policy: Policy,
    mode: str,
    *,
    budget: float = DEFAULT_BUDGET,
    seed: int = 0,
    network_ref: dict | None = None,
    on_step=None,
) -> SessionTrace:
    """Run one compliance session to completion, Done or budget exhaustion.

    `on_step(count)` is invoked after every recorded step (progress hooks).
    """
    if mode not in ("VA", "PT"):
        raise ValueError(f"mode must be VA or PT, not {mode!r}")
    if budget <= 0:
        raise ValueError("budget must be positive")

    rng = RngContext(seed)
    view = SessionView(network=network, mode=mode, seed=seed, budget=budget)
    trace = SessionTrace(
        mode=mode,
        policy_name=getattr(policy, "name", policy.__class__.__name__),
        network_ref=network_ref or {"seed": network.seed, "size": len(network.machines)},
        seed=seed,
        budget=budget,
    )

    ordinal = 0
    for action in policy.actions(view):
        if not isinstance(action, Action):
            raise PolicyError(f"policy yielded {action!r}, not an Action")
        if mode == "VA" and action.kind in ("Exploit", "PostExploit"):
            raise PolicyError(f"{action.kind} is forbidden in VA mode")
        cost = action_cost(action)
        if view.spent + cost > budget:
            trace.budget_exhausted = True
            break
        outcome = _execute(network, view, action, rng)
        view.record(action, outcome)
        view.spent += cost
        trace.steps.append(TraceStep(ordinal, view.pivot, action, outcome, cost))
        ordinal += 1
        if on_step is not None:
            on_step(ordinal)
        if action.kind == "Stop":
            break

    trace.compromised = view.compromised.entries()
    trace.coverage = coverage_of(trace, network)
    return trace


def _execute(network: Network, view: SessionView, action: Action, rng: RngContext):
    kind, subject, params = action.kind, action.subject, action.params
    if kind == "Ping":
        return execute_probe(network, view.pivot, subject, "ping", rng)
    if kind == "PortScan":
        return execute_probe(
            network, view.pivot, subject, "port_scan", rng, ports=params["ports"]
        )
    if kind == "ServiceDetect":
        port = params["port"]
        if port not in view.open_ports.get(subject, set()):
            raise PreconditionViolated(
                f"service detection on {subject}:{port} before an open-port finding"
            )
        return execute_probe(
            network, view.pivot, subject, "service_detect", rng,
            port=port, variant=params.get("variant", 0),
        )
    if kind == "VulnDetect":
        port = params["port"]
        if (subject, port) not in view.services:
            raise PreconditionViolated(
                f"vulnerability check on {subject}:{port} before service detection"
            )
        return execute_probe(
            network, view.pivot, subject, "vuln_check", rng,
            port=port, variant=params.get("variant", 0),
        )
    if kind == "Exploit":
        return execute_exploit(
            network, view.pivot, subject, params["exploit"], rng,
            detected=set(view.detected_vulns(subject)),
            compromised=view.compromised,
        )
    if kind == "PostExploit":
        if subject not in view.compromised:
            raise PreconditionViolated(f"post-exploitation on uncompromised {subject}")
        return ExploitOutcome(params.get("module", ""), subject, "SUCCESS")
    if kind == "ChangePivot":
        new_pivot = params["pivot"]
        if new_pivot != EXTERNAL and new_pivot not in view.compromised:
            raise PolicyError(f"pivot {new_pivot!r} is not compromised")
        view.pivot = new_pivot
        return None
    if kind == "Stop":
        return None
    raise PolicyError(f"unhandled action kind {kind!r}")

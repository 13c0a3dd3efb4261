"""Session traces: costed, replayable records of one compliance session.

File form is UTF-8 JSON-lines: one header line with session metadata, then
one line per step, all with sorted keys and compact separators so identical
sessions serialize to identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..netmodel.model import ExploitOutcome, Network, Observation
from .actions import Action, EXPLOITATION_PHASES


@dataclass(frozen=True)
class TraceStep:
    ordinal: int
    pivot: str
    action: Action
    observation: Observation | ExploitOutcome | None
    cost: float

    def to_dict(self) -> dict:
        return {
            "ordinal": self.ordinal,
            "pivot": self.pivot,
            "action": self.action.to_dict(),
            "observation": self.observation.to_dict() if self.observation else None,
            "cost": self.cost,
        }


@dataclass
class SessionTrace:
    mode: str  # VA | PT
    policy_name: str
    network_ref: dict
    seed: int
    budget: float
    steps: list[TraceStep] = field(default_factory=list)
    budget_exhausted: bool = False
    compromised: list[tuple[str, str]] = field(default_factory=list)
    coverage: float = 0.0

    @property
    def total_cost(self) -> float:
        return sum(step.cost for step in self.steps)

    def to_jsonl(self) -> str:
        header = {
            "kind": "header",
            "version": 1,
            "mode": self.mode,
            "policy": self.policy_name,
            "network_ref": self.network_ref,
            "seed": self.seed,
            "budget": self.budget,
            "budget_exhausted": self.budget_exhausted,
            "total_cost": self.total_cost,
            "coverage": self.coverage,
            "compromised": [list(c) for c in self.compromised],
            "steps": len(self.steps),
        }
        lines = [_dumps(header)]
        lines.extend(_dumps({"kind": "step", **step.to_dict()}) for step in self.steps)
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_trace(path: str | Path) -> SessionTrace:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0])
    trace = SessionTrace(
        mode=header["mode"],
        policy_name=header["policy"],
        network_ref=header["network_ref"],
        seed=header["seed"],
        budget=header["budget"],
        budget_exhausted=header["budget_exhausted"],
        compromised=[tuple(c) for c in header["compromised"]],
        coverage=header["coverage"],
    )
    for line in lines[1:]:
        data = json.loads(line)
        obs_data = data["observation"]
        observation = None
        if obs_data is not None:
            if "exploit_id" in obs_data:
                observation = ExploitOutcome(
                    obs_data["exploit_id"], obs_data["target"],
                    obs_data["value"], obs_data.get("privilege"),
                )
            else:
                observation = Observation(
                    probe=obs_data["probe"],
                    target=obs_data["target"],
                    value=obs_data["value"],
                    port=obs_data.get("port"),
                    open_ports=tuple(obs_data.get("open_ports", ())),
                    filtered_ranges=tuple(tuple(r) for r in obs_data.get("filtered_ranges", ())),
                    service=tuple(obs_data["service"]) if obs_data.get("service") else None,
                    vulns=tuple(obs_data.get("vulns", ())),
                )
        trace.steps.append(
            TraceStep(
                ordinal=data["ordinal"],
                pivot=data["pivot"],
                action=Action.from_dict(data["action"]),
                observation=observation,
                cost=data["cost"],
            )
        )
    return trace


def assessed_machines(trace: SessionTrace) -> set[str]:
    """Machines fully assessed by the trace.

    Fully assessed means: pinged, every service the trace discovered on the
    machine was vulnerability-checked, and in PT mode every vulnerability the
    trace detected saw at least one exploit attempt.
    """
    pinged: set[str] = set()
    discovered: set[tuple[str, int]] = set()
    checked: set[tuple[str, int]] = set()
    detected: set[tuple[str, str]] = set()
    attempted: set[tuple[str, str]] = set()

    for step in trace.steps:
        act, obs = step.action, step.observation
        if act.kind == "Ping" and obs is not None:
            pinged.add(act.subject)
        elif act.kind == "ServiceDetect" and isinstance(obs, Observation) and obs.value == "TRUE":
            discovered.add((act.subject, act.params["port"]))
        elif act.kind == "VulnDetect" and obs is not None:
            checked.add((act.subject, act.params["port"]))
            if isinstance(obs, Observation):
                detected.update((act.subject, v) for v in obs.vulns)
        elif act.kind == "Exploit":
            attempted.add((act.subject, act.params["vuln"]))

    out = set()
    for machine in pinged:
        services_ok = all(
            (m, port) in checked for (m, port) in discovered if m == machine
        )
        exploits_ok = trace.mode != "PT" or all(
            (m, v) in attempted for (m, v) in detected if m == machine
        )
        if services_ok and exploits_ok:
            out.add(machine)
    return out


def coverage_of(trace: SessionTrace, network: Network) -> float:
    """Fraction of the network's machines fully assessed by the trace."""
    if not network.machines:
        return 0.0
    ids = {m.id for m in network.machines}
    return len(assessed_machines(trace) & ids) / len(ids)


def exploitation_steps(trace: SessionTrace) -> list[TraceStep]:
    return [s for s in trace.steps if s.action.phase in EXPLOITATION_PHASES]

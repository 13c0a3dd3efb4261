"""Action vocabulary for compliance sessions and the session cost model.

Costs are abstract time units; only ratios between policies are meaningful.
The table preserves the qualitative ordering of real tooling (exploitation
far dearer than probing, per-port scanning cheapest per unit).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..netmodel.simulate import normalize_ranges, ranges_count

KIND_PHASE = {
    "Ping": "reconnaissance",
    "PortScan": "scanning",
    "ServiceDetect": "service_detection",
    "VulnDetect": "vulnerability_assessment",
    "Exploit": "exploitation",
    "PostExploit": "post_exploitation",
    "ChangePivot": "reconnaissance",
    "Stop": "reconnaissance",
}

EXPLOITATION_PHASES = ("exploitation", "post_exploitation")

BASE_COST = {
    "Ping": 1.0,
    "ServiceDetect": 2.0,
    "VulnDetect": 3.0,
    "Exploit": 10.0,
    "PostExploit": 8.0,
    "ChangePivot": 5.0,
    "Stop": 0.0,
}

PORT_SCAN_COST_PER_PORT = 0.01


@dataclass(frozen=True)
class Action:
    kind: str
    subject: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KIND_PHASE:
            raise ValueError(f"unknown action kind {self.kind!r}")

    @property
    def phase(self) -> str:
        return KIND_PHASE[self.kind]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "subject": self.subject, "params": _params_dict(self.params)}

    @classmethod
    def from_dict(cls, data: dict) -> "Action":
        params = dict(data.get("params", {}))
        if "ports" in params:
            params["ports"] = normalize_ranges(tuple(p) if isinstance(p, list) else p for p in params["ports"])
        return cls(data["kind"], data["subject"], params)


def _params_dict(params: dict) -> dict:
    out = {}
    for key, value in sorted(params.items()):
        if key == "ports":
            out[key] = [list(r) for r in value]
        else:
            out[key] = value
    return out


def encode_action(action: Action) -> str:
    """Canonical string encoding, the deterministic tie-break order for chains."""
    return json.dumps(action.to_dict(), sort_keys=True, separators=(",", ":"))


def port_scan(subject: str, ports) -> Action:
    return Action("PortScan", subject, {"ports": normalize_ranges(ports)})


def action_cost(action: Action) -> float:
    """Pure cost function of (kind, params)."""
    if action.kind == "PortScan":
        return PORT_SCAN_COST_PER_PORT * ranges_count(action.params["ports"])
    return BASE_COST[action.kind]

"""Experiment specifications and the default desk-scale suite."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class NetworkParams:
    seed: int
    size: int
    profile: str

    def as_tuple(self) -> tuple[int, int, str]:
        return (self.seed, self.size, self.profile)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    networks: tuple[NetworkParams, ...]
    mode: str = "PT"
    policies: tuple[str, ...] = ("esascf",)
    change_fraction: float | None = None
    repetitions: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.mode not in ("VA", "PT"):
            raise ValueError(f"bad mode {self.mode!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "networks": [list(n.as_tuple()) for n in self.networks],
            "mode": self.mode,
            "policies": list(self.policies),
            "change_fraction": self.change_fraction,
            "repetitions": self.repetitions,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        return cls(
            name=data["name"],
            networks=tuple(
                NetworkParams(int(s), int(z), p) for s, z, p in data["networks"]
            ),
            mode=data.get("mode", "PT"),
            policies=tuple(data.get("policies", ("esascf",))),
            change_fraction=data.get("change_fraction"),
            repetitions=int(data.get("repetitions", 1)),
        )


def load_spec(path: str | Path) -> ExperimentSpec:
    return ExperimentSpec.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_spec(spec: ExperimentSpec, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# 12 generated networks spanning the three profile bands; 250 stays supported
# but out of the default suite for runtime.
_DESK_SIZES = [
    (2, "small"), (10, "small"), (25, "small"), (50, "small"),
    (75, "medium"), (100, "medium"), (120, "large"), (150, "large"),
]
_DESK_EXTRA = [(25, "small"), (75, "medium"), (120, "large"), (150, "large")]


def desk_suite(base_seed: int = 1000) -> tuple[NetworkParams, ...]:
    networks = [
        NetworkParams(base_seed + i, size, profile)
        for i, (size, profile) in enumerate(_DESK_SIZES)
    ]
    networks.extend(
        NetworkParams(base_seed + 100 + i, size, profile)
        for i, (size, profile) in enumerate(_DESK_EXTRA)
    )
    return tuple(networks)


def default_comparison_spec(base_seed: int = 1000) -> ExperimentSpec:
    return ExperimentSpec(
        name="desk-comparison",
        networks=desk_suite(base_seed),
        mode="PT",
        policies=("blind", "expert", "esascf"),
        change_fraction=0.25,
        repetitions=1,
    )

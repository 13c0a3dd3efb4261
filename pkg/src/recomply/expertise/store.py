"""Persistent expertise memory: an append-only JSON-lines log of records.

Each line is one full record state; a status change appends a superseding
line for the same record id (last writer wins by line order). Readers always
see a consistent snapshot; a compaction pass rewrites the log keeping only
the latest line per record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..rules import Rule, RuleBase, format_rulebase, parse_rulebase
from ..session.actions import Action
from .extract import AttackVector
from .fingerprint import jaccard


class NotPending(ValueError):
    """Review decision on a record that is not awaiting review."""


@dataclass(frozen=True)
class Accepted:
    record_id: str


@dataclass(frozen=True)
class Superseded:
    by: str


@dataclass(frozen=True)
class ExpertiseRecord:
    record_id: str
    vector: AttackVector
    likelihood: float
    rules: tuple[Rule, ...]
    provenance: dict
    status: str = "pending"  # pending | validated | rejected
    audit: tuple[dict, ...] = ()

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "target": self.vector.target,
            "chain": [a.to_dict() for a in self.vector.chain],
            "fingerprint": sorted(self.vector.fingerprint),
            "outcome": self.vector.outcome,
            "likelihood": self.likelihood,
            "rules": format_rulebase(RuleBase(self.rules)) if self.rules else "",
            "provenance": self.provenance,
            "status": self.status,
            "audit": list(self.audit),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExpertiseRecord":
        vector = AttackVector(
            target=data["target"],
            chain=tuple(Action.from_dict(a) for a in data["chain"]),
            fingerprint=frozenset(data["fingerprint"]),
            outcome=data["outcome"],
        )
        rules = parse_rulebase(data["rules"]).rules if data.get("rules") else ()
        return cls(
            record_id=data["record_id"],
            vector=vector,
            likelihood=float(data["likelihood"]),
            rules=rules,
            provenance=dict(data.get("provenance", {})),
            status=data["status"],
            audit=tuple(data.get("audit", ())),
        )


@dataclass
class ExpertiseStore:
    path: Path | None = None
    _records: dict[str, ExpertiseRecord] = field(default_factory=dict)
    _order: list[str] = field(default_factory=list)
    _counter: int = 0

    @classmethod
    def open(cls, path: str | Path) -> "ExpertiseStore":
        store = cls(path=Path(path))
        if store.path.exists():
            for line in store.path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = ExpertiseRecord.from_dict(json.loads(line))
                if record.record_id not in store._records:
                    store._order.append(record.record_id)
                store._records[record.record_id] = record
            store._counter = max(
                (int(rid[1:]) for rid in store._records if rid[1:].isdigit()),
                default=0,
            )
        return store

    def _append_line(self, record: ExpertiseRecord) -> None:
        if self.path is None:
            return
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":")) + "\n")

    def next_id(self) -> str:
        self._counter += 1
        return f"r{self._counter:06d}"

    def add(self, record: ExpertiseRecord) -> ExpertiseRecord:
        if record.record_id in self._records:
            raise ValueError(f"record {record.record_id} already present")
        self._records[record.record_id] = record
        self._order.append(record.record_id)
        self._append_line(record)
        return record

    def get(self, record_id: str) -> ExpertiseRecord | None:
        return self._records.get(record_id)

    def records(self, status: str | None = None) -> list[ExpertiseRecord]:
        out = [self._records[rid] for rid in self._order]
        if status is not None:
            out = [r for r in out if r.status == status]
        return out

    def review_decide(self, record_id: str, decision: str, reviewer: str) -> ExpertiseRecord:
        """Approve or reject a pending record, appending an audit entry."""
        if decision not in ("approve", "reject"):
            raise ValueError(f"decision must be approve or reject, not {decision!r}")
        record = self._records.get(record_id)
        if record is None:
            raise KeyError(f"no record {record_id!r}")
        if record.status != "pending":
            raise NotPending(f"record {record_id} is {record.status}, not pending")
        new_status = "validated" if decision == "approve" else "rejected"
        entry = {"reviewer": reviewer, "decision": decision,
                 "timestamp": record.provenance.get("timestamp", "")}
        updated = replace(record, status=new_status, audit=record.audit + (entry,))
        self._records[record_id] = updated
        self._append_line(updated)
        return updated

    def match_context(self, fingerprint: frozenset[str], threshold: float) -> list[str]:
        """Validated record ids at or above the similarity threshold, ranked
        by (similarity, likelihood) descending, ties by record id."""
        if not 0.0 <= threshold <= 1.0:
            raise ValueError("threshold outside [0, 1]")
        scored = []
        for record in self.records("validated"):
            sim = jaccard(fingerprint, record.vector.fingerprint)
            if sim >= threshold:
                scored.append((-sim, -record.likelihood, record.record_id))
        return [rid for _, _, rid in sorted(scored)]

    def best_validated(self, fingerprint: frozenset[str], threshold: float) -> ExpertiseRecord | None:
        """The validated record a candidate must beat: highest likelihood
        among sufficiently similar ones."""
        best = None
        for record in self.records("validated"):
            if jaccard(fingerprint, record.vector.fingerprint) >= threshold:
                if best is None or (record.likelihood, record.record_id) > (
                    best.likelihood, best.record_id
                ):
                    best = record
        return best

    def best_validated_likelihood(self, fingerprint: frozenset[str], threshold: float = 1.0) -> float:
        best = self.best_validated(fingerprint, threshold)
        return best.likelihood if best else 0.0

    def by_target(self, target: str) -> ExpertiseRecord | None:
        """Latest validated record captured from this exact machine."""
        hits = [
            r for r in self.records("validated") if r.vector.target == target
        ]
        return hits[-1] if hits else None

    def summary(self) -> dict:
        counts = {"pending": 0, "validated": 0, "rejected": 0}
        feature_tally: dict[str, int] = {}
        for record in self.records():
            counts[record.status] = counts.get(record.status, 0) + 1
            if record.status == "validated":
                for feat in record.vector.fingerprint:
                    feature_tally[feat] = feature_tally.get(feat, 0) + 1
        top = sorted(feature_tally.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
        return {
            "counts": counts,
            "records": len(self._records),
            "top_features": [{"feature": f, "count": c} for f, c in top],
        }

    def compact(self) -> int:
        """Rewrite the log with one line per record; returns lines written."""
        if self.path is None:
            return 0
        lines = [
            json.dumps(self._records[rid].to_dict(), sort_keys=True, separators=(",", ":"))
            for rid in self._order
        ]
        self.path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        return len(lines)


def validate_against_store(
    candidate: tuple[AttackVector, float],
    store: ExpertiseStore,
    similarity_threshold: float = 0.6,
    *,
    rules: tuple[Rule, ...] = (),
    provenance: dict | None = None,
) -> Accepted | Superseded:
    """Accept the candidate iff it strictly exceeds the best sufficiently
    similar validated record; accepted candidates enter the store pending."""
    vector, likelihood = candidate
    best = store.best_validated(vector.fingerprint, similarity_threshold)
    if best is not None and likelihood <= best.likelihood:
        return Superseded(by=best.record_id)
    record = ExpertiseRecord(
        record_id=store.next_id(),
        vector=AttackVector(  # evidence is capture-time scaffolding, not persisted
            vector.target, vector.chain, vector.fingerprint, vector.outcome
        ),
        likelihood=likelihood,
        rules=rules,
        provenance=provenance or {},
    )
    store.add(record)
    return Accepted(record_id=record.record_id)

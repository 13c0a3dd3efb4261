"""End-to-end expertise capture: trace -> vectors -> pruned chains ->
generalized rules -> store submission -> optional auto-approval."""

from __future__ import annotations

from datetime import datetime, timezone

from ..netmodel.model import Network
from ..session.trace import SessionTrace
from .extract import EmptyAfterPruning, capture_vectors, extract_optimal_vector
from .fingerprint import ExtractionConfig
from .generalize import generalize_to_rules
from .store import Accepted, ExpertiseStore, validate_against_store


def capture_and_store(
    trace: SessionTrace,
    network: Network,
    store: ExpertiseStore,
    *,
    cfg: ExtractionConfig | None = None,
    similarity_threshold: float = 1.0,
    auto_approve: bool = False,
    reviewer: str = "auto",
    session_id: str = "",
    timestamp: str | None = None,
) -> dict:
    """Process a completed session and feed the store; returns tallies.

    Candidates compete for supersession only against records of equivalent
    context (default: identical fingerprints), so distinct machines keep
    their own expertise while true duplicates deduplicate.
    """
    cfg = cfg or ExtractionConfig()
    stamp = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    stats = {"vectors": 0, "accepted": 0, "superseded": 0, "validated": 0}
    for raw in capture_vectors(trace, network):
        stats["vectors"] += 1
        try:
            pruned, likelihood = extract_optimal_vector(raw, network, cfg)
        except EmptyAfterPruning:
            continue
        rules = tuple(generalize_to_rules(pruned, network))
        verdict = validate_against_store(
            (pruned, likelihood),
            store,
            similarity_threshold,
            rules=rules,
            provenance={
                "session": session_id,
                "policy": trace.policy_name,
                "timestamp": stamp,
            },
        )
        if isinstance(verdict, Accepted):
            stats["accepted"] += 1
            if auto_approve:
                store.review_decide(verdict.record_id, "approve", reviewer)
                stats["validated"] += 1
        else:
            stats["superseded"] += 1
    return stats

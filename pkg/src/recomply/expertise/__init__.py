from .extract import (
    AttackVector,
    ChainPolicy,
    EmptyAfterPruning,
    capture_vectors,
    execute_chain,
    extract_optimal_vector,
    likelihood_of,
)
from .fingerprint import ExtractionConfig, fingerprint_of, jaccard
from .generalize import generalize_to_rules
from .pipeline import capture_and_store
from .replay import EsascfPolicy, replay_plan
from .store import (
    Accepted,
    ExpertiseRecord,
    ExpertiseStore,
    NotPending,
    Superseded,
    validate_against_store,
)

__all__ = [
    "Accepted",
    "AttackVector",
    "ChainPolicy",
    "EmptyAfterPruning",
    "EsascfPolicy",
    "ExpertiseRecord",
    "ExpertiseStore",
    "ExtractionConfig",
    "NotPending",
    "Superseded",
    "capture_and_store",
    "capture_vectors",
    "execute_chain",
    "extract_optimal_vector",
    "fingerprint_of",
    "generalize_to_rules",
    "jaccard",
    "likelihood_of",
    "replay_plan",
    "validate_against_store",
]

from .generate import PROFILE_BANDS, canonical_ports, generate_testbed
from .model import (
    EXTERNAL,
    Catalog,
    ChangeSet,
    CompromisedSet,
    Exploit,
    ExploitOutcome,
    FirewallRule,
    InvalidSize,
    Link,
    Machine,
    Network,
    Observation,
    PreconditionViolated,
    RngContext,
    Service,
    UnknownEntity,
    Vulnerability,
)
from .mutate import apply_changeset
from .scenario import (
    ScenarioError,
    load_scenario,
    network_from_dict,
    network_to_dict,
    save_scenario,
)
from .simulate import (
    execute_exploit,
    execute_probe,
    normalize_ranges,
    ranges_count,
    ranges_member,
    reachable,
)

__all__ = [
    "EXTERNAL",
    "Catalog",
    "ChangeSet",
    "CompromisedSet",
    "Exploit",
    "ExploitOutcome",
    "FirewallRule",
    "InvalidSize",
    "Link",
    "Machine",
    "Network",
    "Observation",
    "PROFILE_BANDS",
    "PreconditionViolated",
    "RngContext",
    "ScenarioError",
    "Service",
    "UnknownEntity",
    "Vulnerability",
    "apply_changeset",
    "canonical_ports",
    "execute_exploit",
    "execute_probe",
    "generate_testbed",
    "load_scenario",
    "network_from_dict",
    "network_to_dict",
    "normalize_ranges",
    "ranges_count",
    "ranges_member",
    "reachable",
    "save_scenario",
]

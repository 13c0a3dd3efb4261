from .actions import Action, action_cost, encode_action, port_scan
from .policies import blind_policy, load_core_rules, rule_flow_assess, scripted_expert_policy
from .runner import DEFAULT_BUDGET, Policy, PolicyError, SessionView, run_session
from .trace import (
    SessionTrace,
    TraceStep,
    assessed_machines,
    coverage_of,
    exploitation_steps,
    load_trace,
)

__all__ = [
    "Action",
    "DEFAULT_BUDGET",
    "Policy",
    "PolicyError",
    "SessionTrace",
    "SessionView",
    "TraceStep",
    "action_cost",
    "assessed_machines",
    "blind_policy",
    "coverage_of",
    "encode_action",
    "exploitation_steps",
    "load_core_rules",
    "load_trace",
    "port_scan",
    "rule_flow_assess",
    "run_session",
    "scripted_expert_policy",
]

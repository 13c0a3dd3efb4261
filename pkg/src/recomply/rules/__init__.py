from .engine import match, matches, recommend_next_action
from .model import Activation, Condition, Fact, Rule, RuleBase, WorkingMemory
from .parser import RuleSyntaxError, format_rulebase, parse_rulebase

__all__ = [
    "Activation",
    "Condition",
    "Fact",
    "Rule",
    "RuleBase",
    "RuleSyntaxError",
    "WorkingMemory",
    "format_rulebase",
    "match",
    "matches",
    "parse_rulebase",
    "recommend_next_action",
]

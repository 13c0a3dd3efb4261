"""Forward-chaining matcher and single-step recommender.

Conflict resolution, in order: highest specificity (condition count), then
earliest group in the rule base's hierarchy, then lowest rule index within
the group. Winning activations are refracted per (rule, subject) until a
matched fact changes value.
"""

from __future__ import annotations

from .model import Activation, Condition, Rule, RuleBase, WorkingMemory


def matches(rule: Rule, wm: WorkingMemory, subject: str) -> bool:
    return all(wm.value(subject, c.attribute) == c.value for c in rule.conditions)


def match(rulebase: RuleBase, wm: WorkingMemory, subject: str) -> list[Activation]:
    """All rules whose conditions are fully satisfied by the subject's facts."""
    return [
        Activation(rule, subject, len(rule.conditions))
        for rule in rulebase.rules
        if matches(rule, wm, subject)
    ]


def recommend_next_action(
    rulebase: RuleBase, wm: WorkingMemory, subject: str
) -> Condition | None:
    """Resolve the conflict set and return the winning consequent, or None.

    The winner is recorded as fired (refraction), so an unchanged working
    memory never yields the same activation twice.
    """
    candidates = [
        act for act in match(rulebase, wm, subject) if not wm.is_refracted(act.rule, subject)
    ]
    if not candidates:
        return None
    order = rulebase.group_order()
    winner = min(
        candidates,
        key=lambda act: (-act.specificity, order[act.rule.group], act.rule.index),
    )
    wm.record_fired(winner.rule, subject)
    return winner.rule.consequent

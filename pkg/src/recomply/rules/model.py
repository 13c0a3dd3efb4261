"""Core data model for the production-rule knowledge base and working memory.

Rules are propositional per subject: a condition tests one attribute of the
subject against one symbolic value. Genericity across machines comes from
evaluating the same rule base once per subject, not from pattern variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Condition:
    attribute: str
    value: str

    def __post_init__(self):
        if not self.attribute or not self.value:
            raise ValueError("condition attribute and value must be non-empty symbols")


@dataclass(frozen=True)
class Fact:
    subject: str
    attribute: str
    value: str

    def __post_init__(self):
        if not self.attribute or not self.value:
            raise ValueError("fact attribute and value must be non-empty symbols")


@dataclass(frozen=True)
class Rule:
    group: str
    index: int
    conditions: tuple[Condition, ...]
    consequent: Condition

    def __post_init__(self):
        if not self.conditions:
            raise ValueError(f"rule {self.group}#{self.index} has no conditions")
        attrs = [c.attribute for c in self.conditions]
        if len(set(attrs)) != len(attrs):
            raise ValueError(f"rule {self.group}#{self.index} repeats a condition attribute")

    @property
    def key(self) -> tuple[str, int]:
        return (self.group, self.index)


@dataclass(frozen=True)
class RuleBase:
    rules: tuple[Rule, ...] = ()
    goals: tuple[str, ...] = ()

    def __post_init__(self):
        keys = [r.key for r in self.rules]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (group, index) pair in rule base")

    def group_order(self) -> dict[str, int]:
        """Group name -> ordinal of first appearance, the conflict-resolution hierarchy."""
        order: dict[str, int] = {}
        for rule in self.rules:
            order.setdefault(rule.group, len(order))
        return order

    def groups(self) -> list[str]:
        return list(self.group_order())


@dataclass(frozen=True)
class Activation:
    rule: Rule
    subject: str
    specificity: int

    def __post_init__(self):
        if self.specificity != len(self.rule.conditions):
            raise ValueError("activation specificity must equal the rule's condition count")


@dataclass
class WorkingMemory:
    """Per-session attribute store: one value per (subject, attribute) slot.

    Also tracks refraction: a (rule, subject) activation that was returned by
    the recommender stays suppressed until one of the facts it matched changes
    value. Re-asserting an identical fact does not lift refraction.
    """

    _slots: dict[tuple[str, str], str] = field(default_factory=dict)
    _fired: dict[tuple[str, int, str], frozenset[tuple[str, str]]] = field(default_factory=dict)

    def assert_fact(self, fact: Fact) -> "WorkingMemory":
        slot = (fact.subject, fact.attribute)
        prior = self._slots.get(slot)
        if prior == fact.value:
            return self
        self._slots[slot] = fact.value
        if prior is not None:
            self._invalidate(fact.subject, fact.attribute)
        return self

    def _invalidate(self, subject: str, attribute: str) -> None:
        stale = [
            key
            for key, matched in self._fired.items()
            if key[2] == subject and any(attr == attribute for attr, _ in matched)
        ]
        for key in stale:
            del self._fired[key]

    def value(self, subject: str, attribute: str) -> str | None:
        return self._slots.get((subject, attribute))

    def facts(self, subject: str | None = None) -> list[Fact]:
        return [
            Fact(subj, attr, val)
            for (subj, attr), val in self._slots.items()
            if subject is None or subj == subject
        ]

    def __len__(self) -> int:
        return len(self._slots)

    def is_refracted(self, rule: Rule, subject: str) -> bool:
        return (rule.group, rule.index, subject) in self._fired

    def record_fired(self, rule: Rule, subject: str) -> None:
        matched = frozenset((c.attribute, c.value) for c in rule.conditions)
        self._fired[(rule.group, rule.index, subject)] = matched

    def copy(self) -> "WorkingMemory":
        return WorkingMemory(dict(self._slots), dict(self._fired))

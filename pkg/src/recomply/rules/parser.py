"""Parser and canonical serializer for the rule definition DSL.

Grammar (s-expressions, ';' comments to end of line, whitespace free-form):

    file     := block*
    block    := '(' 'deffacts' SYMBOL item* ')'
    item     := '(' 'rule' ifclause thenclause ')'
              | '(' 'goal' '(' 'determine' SYMBOL ')' ')'
    ifclause := '(' 'if' SYMBOL 'is' SYMBOL ('and' SYMBOL 'is' SYMBOL)* ')'
    thenclause := '(' 'then' SYMBOL 'is' SYMBOL ')'
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Condition, Rule, RuleBase

LPAREN = "("
RPAREN = ")"
SYMBOL = "sym"
EOF = "eof"


class RuleSyntaxError(SyntaxError):
    """Malformed rule DSL input, with a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
                col += 1
        elif ch in "()":
            tokens.append(_Token(LPAREN if ch == "(" else RPAREN, ch, line, col))
            i += 1
            col += 1
        else:
            start, start_col = i, col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            tokens.append(_Token(SYMBOL, text[start:i], line, start_col))
    tokens.append(_Token(EOF, "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token):
        raise RuleSyntaxError(message, tok.line, tok.col)

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            self.fail(f"expected {what}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def expect_keyword(self, word: str) -> _Token:
        tok = self.next()
        if tok.kind != SYMBOL or tok.text != word:
            self.fail(f"expected keyword {word!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def parse_file(self) -> RuleBase:
        rules: list[Rule] = []
        goals: list[str] = []
        group_counts: dict[str, int] = {}
        while self.peek().kind != EOF:
            self.expect(LPAREN, "'('")
            head = self.expect(SYMBOL, "a keyword")
            if head.text != "deffacts":
                self.fail(f"unknown top-level keyword {head.text!r}", head)
            name = self.expect(SYMBOL, "a deffacts name")
            while self.peek().kind == LPAREN:
                self.parse_item(name.text, rules, goals, group_counts)
            self.expect(RPAREN, "')'")
        return RuleBase(tuple(rules), tuple(goals))

    def parse_item(self, group: str, rules, goals, group_counts) -> None:
        self.expect(LPAREN, "'('")
        head = self.expect(SYMBOL, "'rule' or 'goal'")
        if head.text == "rule":
            conditions = self.parse_if_clause()
            consequent = self.parse_then_clause()
            index = group_counts.get(group, 0)
            group_counts[group] = index + 1
            try:
                rules.append(Rule(group, index, tuple(conditions), consequent))
            except ValueError as exc:
                self.fail(str(exc), head)
        elif head.text == "goal":
            self.expect(LPAREN, "'('")
            self.expect_keyword("determine")
            goal = self.expect(SYMBOL, "a goal symbol")
            goals.append(goal.text)
            self.expect(RPAREN, "')'")
        else:
            self.fail(f"unknown keyword {head.text!r}, expected 'rule' or 'goal'", head)
        self.expect(RPAREN, "')'")

    def parse_if_clause(self) -> list[Condition]:
        self.expect(LPAREN, "'(' opening the if clause")
        self.expect_keyword("if")
        conditions = [self.parse_condition()]
        while True:
            tok = self.peek()
            if tok.kind == SYMBOL and tok.text == "and":
                self.next()
                conditions.append(self.parse_condition())
            else:
                break
        self.expect(RPAREN, "')'")
        return conditions

    def parse_then_clause(self) -> Condition:
        self.expect(LPAREN, "'(' opening the then clause")
        self.expect_keyword("then")
        consequent = self.parse_condition()
        self.expect(RPAREN, "')'")
        return consequent

    def parse_condition(self) -> Condition:
        attr = self.expect(SYMBOL, "an attribute symbol")
        self.expect_keyword("is")
        value = self.expect(SYMBOL, "a value symbol")
        return Condition(attr.text, value.text)


def parse_rulebase(text: str) -> RuleBase:
    """Parse DSL source into a RuleBase, preserving source order within groups."""
    return _Parser(text).parse_file()


def format_condition(cond: Condition) -> str:
    return f"{cond.attribute} is {cond.value}"


def format_rulebase(rulebase: RuleBase, goals_group: str = "MAIN::goals") -> str:
    """Serialize to canonical DSL text: one deffacts block per rule group,
    rules in index order, then all goals in a single block."""
    out: list[str] = []
    by_group: dict[str, list[Rule]] = {}
    for rule in rulebase.rules:
        by_group.setdefault(rule.group, []).append(rule)
    for group in rulebase.groups():
        out.append(f"(deffacts {group}")
        for rule in sorted(by_group[group], key=lambda r: r.index):
            conds = " and\n        ".join(format_condition(c) for c in rule.conditions)
            out.append(f"  (rule (if {conds})")
            out.append(f"        (then {format_condition(rule.consequent)}))")
        out[-1] += ")"
        out.append("")
    if rulebase.goals:
        out.append(f"(deffacts {goals_group}")
        for goal in rulebase.goals:
            out.append(f"  (goal (determine {goal}))")
        out[-1] += ")"
        out.append("")
    return "\n".join(out)

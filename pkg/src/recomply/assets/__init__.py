"""Bundled data files (rule corpus)."""

from importlib import resources


def core_rules_text() -> str:
    return (resources.files(__package__) / "core.rules").read_text(encoding="utf-8")

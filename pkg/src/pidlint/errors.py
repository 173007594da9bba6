"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PidlintError(Exception):
    """Base class for every error raised by pidlint."""


class TaxonomyError(PidlintError):
    """Unknown component class or malformed class tree."""


class GraphError(PidlintError):
    """Graph integrity violation: duplicate id, dangling endpoint, missing element."""


class PatternError(PidlintError):
    """Pattern is unusable for matching (empty or disconnected)."""


class ParseError(PidlintError):
    """A document failed to parse. Carries the JSON-path of the offending element."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.message = message
        self.location = location


class RuleValidationError(PidlintError):
    """A rule graph violates its structural invariants."""

    def __init__(self, rule_id: str, violations: list[str]):
        joined = "; ".join(violations)
        super().__init__(f"rule {rule_id!r} is invalid: {joined}")
        self.rule_id = rule_id
        self.violations = list(violations)


class StaleMatchError(PidlintError):
    """A match references elements that no longer exist in the graph."""


class ConvergenceError(PidlintError):
    """A rule kept producing matches past the application cap."""

    def __init__(self, rule_id: str, limit: int):
        super().__init__(
            f"rule {rule_id!r} did not converge within {limit} applications; "
            "the rule likely re-triggers on its own output"
        )
        self.rule_id = rule_id
        self.limit = limit

"""Rule graphs: a pattern annotated with keep/insert/delete actions plus metadata.

The erroneous pattern (keep + delete elements) is what the engine searches
for; the corrected pattern (keep + insert elements) is the erroneous pattern
with the manipulations applied, and doubles as the presence check that stops
a missing-component rule from firing twice.

The built-in library ships as ``*.rule.json`` documents in this directory and
is loaded through the same parser as user rule files, so the data format and
the library cannot drift apart.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..errors import PatternError, RuleValidationError
from ..matching import Condition, Pattern, PatternEdge, PatternNode
from ..model import DEFAULT_TAXONOMY, EDGE_KINDS, Taxonomy

ACTIONS = ("keep", "insert", "delete")
RECOMMENDATION_LEVELS = ("consideration", "suggested", "mandatory")

#: Rank used for threshold filtering: apply rules at or above the threshold.
RECOMMENDATION_RANK = {level: i for i, level in enumerate(RECOMMENDATION_LEVELS)}


@dataclass
class RuleMeta:
    id: str
    milestone: str
    description: str
    explanation: str
    recommendation: str
    missing_component: bool
    source: str
    order: int


@dataclass
class RuleNode:
    key: str
    cls: str
    action: str
    conditions: Tuple[Condition, ...] = ()


@dataclass
class RuleEdge:
    key: str
    source_key: str
    target_key: str
    kind: str
    action: str
    conditions: Tuple[Condition, ...] = ()
    copy_attributes_from: Optional[str] = None


@dataclass
class RuleGraph:
    meta: RuleMeta
    nodes: List[RuleNode] = field(default_factory=list)
    edges: List[RuleEdge] = field(default_factory=list)

    def node(self, key: str) -> RuleNode:
        for node in self.nodes:
            if node.key == key:
                return node
        raise KeyError(key)

    def edge(self, key: str) -> RuleEdge:
        for edge in self.edges:
            if edge.key == key:
                return edge
        raise KeyError(key)

    def nodes_with_action(self, *actions: str) -> List[RuleNode]:
        return [n for n in self.nodes if n.action in actions]

    def edges_with_action(self, *actions: str) -> List[RuleEdge]:
        return [e for e in self.edges if e.action in actions]


def validate_rule(rule: RuleGraph, taxonomy: Optional[Taxonomy] = None) -> List[str]:
    """Every violated rule invariant, with element keys. Empty list = valid."""
    taxonomy = taxonomy if taxonomy is not None else DEFAULT_TAXONOMY
    out: List[str] = []

    meta = rule.meta
    for name in ("id", "milestone", "description", "explanation", "source"):
        value = getattr(meta, name)
        if not isinstance(value, str) or not value.strip():
            out.append(f"meta.{name} must be a non-empty string")
    if meta.recommendation not in RECOMMENDATION_LEVELS:
        out.append(f"meta.recommendation must be one of {RECOMMENDATION_LEVELS}")
    if not isinstance(meta.missing_component, bool):
        out.append("meta.missingComponent must be a boolean")
    if not isinstance(meta.order, int) or isinstance(meta.order, bool):
        out.append("meta.order must be an integer")

    node_keys: Dict[str, RuleNode] = {}
    for node in rule.nodes:
        if node.key in node_keys:
            out.append(f"duplicate node key {node.key!r}")
        node_keys[node.key] = node
        if node.action not in ACTIONS:
            out.append(f"node {node.key!r} has invalid action {node.action!r}")
        if node.cls not in taxonomy:
            out.append(f"node {node.key!r} has unknown class {node.cls!r}")
        if node.action == "insert" and node.conditions:
            out.append(f"inserted node {node.key!r} must not carry conditions")
        for cond in node.conditions:
            for problem in cond.problems():
                out.append(f"node {node.key!r}: {problem}")

    edge_keys: Dict[str, RuleEdge] = {}
    for edge in rule.edges:
        if edge.key in edge_keys:
            out.append(f"duplicate edge key {edge.key!r}")
        edge_keys[edge.key] = edge
        if edge.action not in ACTIONS:
            out.append(f"edge {edge.key!r} has invalid action {edge.action!r}")
        if edge.kind not in EDGE_KINDS:
            out.append(f"edge {edge.key!r} has invalid kind {edge.kind!r}")
        for endpoint in (edge.source_key, edge.target_key):
            if endpoint not in node_keys:
                out.append(f"edge {edge.key!r} references unknown node key {endpoint!r}")
        if edge.action == "insert" and edge.conditions:
            out.append(f"inserted edge {edge.key!r} must not carry conditions")
        for cond in edge.conditions:
            for problem in cond.problems():
                out.append(f"edge {edge.key!r}: {problem}")

    # Cross constraints between actions.
    for edge in rule.edges:
        src = node_keys.get(edge.source_key)
        tgt = node_keys.get(edge.target_key)
        if src is None or tgt is None:
            continue
        if edge.action == "insert":
            for node in (src, tgt):
                if node.action == "delete":
                    out.append(
                        f"inserted edge {edge.key!r} references deleted node {node.key!r}"
                    )
        else:
            # keep and delete edges exist in the erroneous pattern, so their
            # endpoints must too.
            for node in (src, tgt):
                if node.action == "insert":
                    out.append(
                        f"{edge.action} edge {edge.key!r} references inserted node {node.key!r}"
                    )
        if edge.action == "keep":
            for node in (src, tgt):
                if node.action == "delete":
                    out.append(
                        f"kept edge {edge.key!r} would dangle: endpoint {node.key!r} is deleted"
                    )
        if edge.copy_attributes_from is not None:
            if edge.action != "insert":
                out.append(
                    f"edge {edge.key!r}: copyAttributesFrom is only valid on inserted edges"
                )
            origin = next((e for e in rule.edges if e.key == edge.copy_attributes_from), None)
            if origin is None:
                out.append(
                    f"edge {edge.key!r}: copyAttributesFrom references unknown edge "
                    f"{edge.copy_attributes_from!r}"
                )
            elif origin.action == "insert":
                out.append(
                    f"edge {edge.key!r}: copyAttributesFrom must reference an "
                    f"erroneous-pattern edge, not inserted edge {origin.key!r}"
                )

    # Pattern projections must be non-empty and connected.
    if not out:
        for label, maker in (("erroneous", erroneous_pattern), ("corrected", corrected_pattern)):
            try:
                pattern = maker(rule)
            except PatternError as exc:
                out.append(f"{label} pattern: {exc}")
                continue
            if not pattern.nodes:
                out.append(f"{label} pattern is empty")
            elif not pattern.is_connected():
                out.append(f"{label} pattern is disconnected")
    return out


def _project(rule: RuleGraph, actions: Tuple[str, ...]) -> Pattern:
    nodes = [
        PatternNode(n.key, n.cls, tuple(n.conditions))
        for n in rule.nodes if n.action in actions
    ]
    keys = {n.key for n in nodes}
    edges = [
        PatternEdge(e.key, e.source_key, e.target_key, e.kind, tuple(e.conditions))
        for e in rule.edges
        if e.action in actions and e.source_key in keys and e.target_key in keys
    ]
    return Pattern(nodes, edges)


def erroneous_pattern(rule: RuleGraph) -> Pattern:
    """The pattern whose presence flags a violation (keep + delete elements)."""
    return _project(rule, ("keep", "delete"))


def corrected_pattern(rule: RuleGraph) -> Pattern:
    """The erroneous pattern with manipulations applied (keep + insert elements)."""
    return _project(rule, ("keep", "insert"))


def require_valid(rule: RuleGraph, taxonomy: Optional[Taxonomy] = None) -> RuleGraph:
    violations = validate_rule(rule, taxonomy)
    if violations:
        raise RuleValidationError(rule.meta.id, violations)
    return rule


def builtin_rules_dir() -> Path:
    return Path(str(importlib.resources.files(__package__)))


def builtin_rules() -> List[RuleGraph]:
    """The shipped rule library, loaded from the packaged .rule.json files."""
    from ..ingest import load_rule

    rules = [load_rule(path) for path in sorted(builtin_rules_dir().glob("*.rule.json"))]
    rules.sort(key=lambda r: (r.meta.order, r.meta.id))
    return rules


def load_rules_dir(directory: Path) -> List[RuleGraph]:
    """Load every .rule.json in a directory, sorted by application order."""
    from ..ingest import load_rule

    rules = [load_rule(path) for path in sorted(Path(directory).glob("*.rule.json"))]
    rules.sort(key=lambda r: (r.meta.order, r.meta.id))
    return rules

"""Subgraph monomorphism search for pattern graphs over a PidGraph.

Semantics:

* Non-induced monomorphism: a match may sit inside a denser region of the
  host graph; extra host edges around matched nodes never disqualify it.
* Node-injective and edge-injective: two pattern nodes never map to one
  host node, and two pattern edges never map to one host edge (parallel
  pattern edges require parallel host edges).
* Class subsumption: a pattern node of class C accepts any host node whose
  class is C or a descendant of C. The taxonomy root acts as a wildcard.
* Conditions: attribute predicates on pattern nodes and edges. Evaluation
  is total; a missing attribute or a type-mismatched comparison is False,
  never an error.

The search is a VF2-style recursive extension over a breadth-first pattern
order. Candidates are visited in sorted host-id order, so the result list
is a pure function of graph and pattern content. Distinct assignments that
cover the same host node set and host edge set (pattern automorphisms) are
collapsed to a single representative.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import PatternError
from .model import PidGraph, Scalar, Taxonomy, is_scalar

CONDITION_OPERATORS = ("eq", "ne", "lt", "le", "gt", "ge", "in_set", "in_range")

Operand = Union[Scalar, Sequence[Scalar], Tuple[float, float]]


@dataclass(frozen=True)
class Condition:
    """One attribute predicate: ``attribute <operator> operand``."""

    attribute: str
    operator: str
    operand: object

    def problems(self) -> List[str]:
        """Well-formedness check used by rule validation."""
        out: List[str] = []
        if not self.attribute or not isinstance(self.attribute, str):
            out.append("condition attribute must be a non-empty string")
        if self.operator not in CONDITION_OPERATORS:
            out.append(f"unknown condition operator {self.operator!r}")
            return out
        if self.operator in ("eq", "ne"):
            if not is_scalar(self.operand):
                out.append(f"{self.operator} operand must be a scalar")
        elif self.operator in ("lt", "le", "gt", "ge"):
            if not _is_number(self.operand):
                out.append(f"{self.operator} operand must be a number")
        elif self.operator == "in_set":
            if not isinstance(self.operand, (list, tuple)) or not self.operand:
                out.append("in_set operand must be a non-empty list of scalars")
            elif not all(is_scalar(v) for v in self.operand):
                out.append("in_set operand must contain only scalars")
        elif self.operator == "in_range":
            ok = (isinstance(self.operand, (list, tuple)) and len(self.operand) == 2
                  and all(_is_number(v) for v in self.operand)
                  and self.operand[0] <= self.operand[1])
            if not ok:
                out.append("in_range operand must be a [low, high] pair with low <= high")
        return out


@dataclass
class PatternNode:
    key: str
    cls: str
    conditions: Tuple[Condition, ...] = ()


@dataclass
class PatternEdge:
    key: str
    source_key: str
    target_key: str
    kind: str
    conditions: Tuple[Condition, ...] = ()


class Pattern:
    """A small pattern graph keyed by pattern-local identifiers."""

    def __init__(self, nodes: Iterable[PatternNode], edges: Iterable[PatternEdge]):
        self.nodes: Dict[str, PatternNode] = {}
        self.edges: Dict[str, PatternEdge] = {}
        for node in nodes:
            if node.key in self.nodes:
                raise PatternError(f"duplicate pattern node key {node.key!r}")
            self.nodes[node.key] = node
        for edge in edges:
            if edge.key in self.edges:
                raise PatternError(f"duplicate pattern edge key {edge.key!r}")
            if edge.source_key not in self.nodes or edge.target_key not in self.nodes:
                raise PatternError(f"pattern edge {edge.key!r} references unknown node key")
            self.edges[edge.key] = edge

    def sorted_node_keys(self) -> List[str]:
        return sorted(self.nodes)

    def sorted_edges(self) -> List[PatternEdge]:
        return [self.edges[k] for k in sorted(self.edges)]

    def is_connected(self) -> bool:
        if not self.nodes:
            return False
        adjacency: Dict[str, set] = {k: set() for k in self.nodes}
        for edge in self.edges.values():
            adjacency[edge.source_key].add(edge.target_key)
            adjacency[edge.target_key].add(edge.source_key)
        start = self.sorted_node_keys()[0]
        seen = {start}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for nxt in adjacency[current]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return len(seen) == len(self.nodes)


@dataclass
class Match:
    """Injective assignment of pattern keys to host element ids."""

    node_map: Dict[str, str]
    edge_map: Dict[str, str] = field(default_factory=dict)

    def node_ids(self) -> frozenset:
        return frozenset(self.node_map.values())

    def edge_ids(self) -> frozenset:
        return frozenset(self.edge_map.values())

    def to_dict(self) -> Dict[str, Dict[str, str]]:
        return {
            "nodes": {k: self.node_map[k] for k in sorted(self.node_map)},
            "edges": {k: self.edge_map[k] for k in sorted(self.edge_map)},
        }


def _is_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _family(value: object) -> Optional[str]:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    return None


def _same_family_eq(a: object, b: object) -> bool:
    fa, fb = _family(a), _family(b)
    return fa is not None and fa == fb and a == b


def eval_condition(condition: Condition, attributes: Dict[str, Scalar]) -> bool:
    """Total predicate evaluation: absent attributes and type mismatches are False."""
    if condition.attribute not in attributes:
        return False
    value = attributes[condition.attribute]
    op = condition.operator
    operand = condition.operand
    if op == "eq":
        return _same_family_eq(value, operand)
    if op == "ne":
        fa, fb = _family(value), _family(operand)
        return fa is not None and fa == fb and value != operand
    if op in ("lt", "le", "gt", "ge"):
        if not (_is_number(value) and _is_number(operand)):
            return False
        if op == "lt":
            return value < operand
        if op == "le":
            return value <= operand
        if op == "gt":
            return value > operand
        return value >= operand
    if op == "in_set":
        if not isinstance(operand, (list, tuple)):
            return False
        return any(_same_family_eq(value, item) for item in operand)
    if op == "in_range":
        if not (isinstance(operand, (list, tuple)) and len(operand) == 2):
            return False
        low, high = operand
        if not (_is_number(value) and _is_number(low) and _is_number(high)):
            return False
        return low <= value <= high
    return False


def node_compatible(pattern_node: PatternNode, graph_node, taxonomy: Taxonomy) -> bool:
    if not taxonomy.is_subclass(graph_node.cls, pattern_node.cls):
        return False
    return all(eval_condition(c, graph_node.attributes) for c in pattern_node.conditions)


def edge_compatible(pattern_edge: PatternEdge, graph_edge) -> bool:
    if graph_edge.kind != pattern_edge.kind:
        return False
    return all(eval_condition(c, graph_edge.attributes) for c in pattern_edge.conditions)


def search_order(pattern: Pattern) -> List[str]:
    """Deterministic breadth-first pattern-node order.

    Starts from the smallest key; every later node is adjacent to an earlier
    one, which is what lets the search extend by neighbor pairs.
    """
    adjacency: Dict[str, set] = {k: set() for k in pattern.nodes}
    for edge in pattern.edges.values():
        adjacency[edge.source_key].add(edge.target_key)
        adjacency[edge.target_key].add(edge.source_key)
    start = pattern.sorted_node_keys()[0]
    order = [start]
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for nxt in sorted(adjacency[current]):
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    return order


def find_matches(pattern: Pattern, graph: PidGraph) -> List[Match]:
    """Enumerate every monomorphism of ``pattern`` into ``graph``.

    Raises PatternError for an empty or disconnected pattern. The result is
    duplicate-free (same node-id image and edge-id image collapse to the
    lexicographically least assignment) and ordered by the sorted tuple of
    mapped node ids, then edge ids.
    """
    if not pattern.nodes:
        raise PatternError("pattern must contain at least one node")
    if not pattern.is_connected():
        raise PatternError("pattern must be connected")

    taxonomy = graph.taxonomy
    order = search_order(pattern)
    position = {key: i for i, key in enumerate(order)}
    sorted_keys = pattern.sorted_node_keys()
    sorted_edge_keys = sorted(pattern.edges)

    # Pattern edges become bindable at the step their later endpoint is mapped.
    anchors_at: List[List[PatternEdge]] = [[] for _ in order]
    for edge in pattern.sorted_edges():
        step = max(position[edge.source_key], position[edge.target_key])
        anchors_at[step].append(edge)

    node_map: Dict[str, str] = {}
    edge_map: Dict[str, str] = {}
    used_nodes: set = set()
    used_edges: set = set()
    found: List[Match] = []

    def bind_edges(pending: List[PatternEdge], idx: int, depth: int) -> None:
        if idx == len(pending):
            extend(depth + 1)
            return
        pedge = pending[idx]
        src = node_map[pedge.source_key]
        tgt = node_map[pedge.target_key]
        for gedge in graph.edges_between(src, tgt):
            if gedge.id in used_edges or not edge_compatible(pedge, gedge):
                continue
            edge_map[pedge.key] = gedge.id
            used_edges.add(gedge.id)
            bind_edges(pending, idx + 1, depth)
            used_edges.discard(gedge.id)
            del edge_map[pedge.key]

    def candidate_ids(step: int, key: str) -> List[str]:
        if step == 0:
            return sorted(graph.nodes)
        # Drive candidates from one anchor edge to an already-mapped partner.
        anchor = next(e for e in anchors_at[step]
                      if e.source_key != e.target_key)
        if anchor.source_key == key:
            partner = node_map[anchor.target_key]
            pairs = graph.neighbors(partner, direction="in", kind=anchor.kind)
        else:
            partner = node_map[anchor.source_key]
            pairs = graph.neighbors(partner, direction="out", kind=anchor.kind)
        return sorted({node.id for _, node in pairs})

    def extend(step: int) -> None:
        if step == len(order):
            found.append(Match(dict(node_map), dict(edge_map)))
            return
        key = order[step]
        pnode = pattern.nodes[key]
        for nid in candidate_ids(step, key):
            if nid in used_nodes:
                continue
            if not node_compatible(pnode, graph.nodes[nid], taxonomy):
                continue
            node_map[key] = nid
            used_nodes.add(nid)
            bind_edges(anchors_at[step], 0, step)
            used_nodes.discard(nid)
            del node_map[key]

    extend(0)

    # Collapse automorphic duplicates: identical node-id and edge-id images.
    def assignment_key(match: Match) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
        return (
            tuple(match.node_map[k] for k in sorted_keys),
            tuple(match.edge_map[k] for k in sorted_edge_keys),
        )

    best: Dict[Tuple[frozenset, frozenset], Match] = {}
    for match in found:
        image = (match.node_ids(), match.edge_ids())
        holder = best.get(image)
        if holder is None or assignment_key(match) < assignment_key(holder):
            best[image] = match

    result = list(best.values())
    result.sort(key=lambda m: (tuple(sorted(m.node_map.values())),
                               tuple(sorted(m.edge_map.values())),
                               assignment_key(m)))
    return result

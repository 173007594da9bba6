"""Typed directed-multigraph model for P&ID data.

Nodes are plant components classified against a tree-shaped taxonomy of
component classes. Edges are pipes (direction = material flow) or signals
(direction = information flow). Parallel edges and self-loops are
representable. All query results are sorted by element id so downstream
consumers are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

from .errors import GraphError, TaxonomyError

Scalar = Union[str, int, float, bool]

EDGE_KINDS = ("pipe", "signal")

#: Built-in component class tree, child -> parent. The taxonomy is data:
#: projects with additional classes can load their own tree.
DEFAULT_TAXONOMY_TREE: Dict[str, Optional[str]] = {
    "AnyComponent": None,
    "Equipment": "AnyComponent",
    "Pump": "Equipment",
    "CentrifugalPump": "Pump",
    "ReciprocatingPump": "Pump",
    "Vessel": "Equipment",
    "HeatExchanger": "Equipment",
    "PipingComponent": "AnyComponent",
    "Valve": "PipingComponent",
    "OperatedValve": "Valve",
    "GlobeValve": "OperatedValve",
    "BallValve": "OperatedValve",
    "ButterflyValve": "OperatedValve",
    "GateValve": "OperatedValve",
    "CheckValve": "Valve",
    "SafetyValve": "Valve",
    "DrainValve": "Valve",
    "Strainer": "PipingComponent",
    "Actuator": "AnyComponent",
    "ProcessInstrument": "AnyComponent",
    "LevelInstrument": "ProcessInstrument",
    "PressureInstrument": "ProcessInstrument",
    "TemperatureInstrument": "ProcessInstrument",
    "FlowInstrument": "ProcessInstrument",
}


def is_scalar(value: object) -> bool:
    return isinstance(value, (str, int, float, bool)) and not isinstance(value, type(None))


class Taxonomy:
    """Rooted tree of component classes with a subtype relation.

    Every class except the single root has exactly one parent. The subtype
    relation ``is_subclass`` is reflexive and follows parent links upward.
    """

    def __init__(self, parents: Mapping[str, Optional[str]]):
        self._parents: Dict[str, Optional[str]] = dict(parents)
        self._validate()

    def _validate(self) -> None:
        roots = [name for name, parent in self._parents.items() if parent is None]
        if len(roots) != 1:
            raise TaxonomyError(f"taxonomy must have exactly one root, found {sorted(roots)}")
        self._root = roots[0]
        for name, parent in self._parents.items():
            if parent is not None and parent not in self._parents:
                raise TaxonomyError(f"class {name!r} has unknown parent {parent!r}")
        # Walk every chain to the root; a chain longer than the class count is a cycle.
        limit = len(self._parents)
        for name in self._parents:
            current: Optional[str] = name
            for _ in range(limit + 1):
                if current is None:
                    break
                current = self._parents[current]
            else:
                raise TaxonomyError(f"cycle in taxonomy at class {name!r}")

    @property
    def root(self) -> str:
        return self._root

    def __contains__(self, name: object) -> bool:
        return name in self._parents

    def classes(self) -> List[str]:
        return sorted(self._parents)

    def parent(self, name: str) -> Optional[str]:
        self._require(name)
        return self._parents[name]

    def lineage(self, name: str) -> Iterator[str]:
        """Yield ``name`` and then each ancestor up to the root."""
        self._require(name)
        current: Optional[str] = name
        while current is not None:
            yield current
            current = self._parents[current]

    def is_subclass(self, candidate: str, ancestor: str) -> bool:
        """True iff ``candidate`` equals ``ancestor`` or has it on its parent chain."""
        self._require(candidate)
        self._require(ancestor)
        return any(name == ancestor for name in self.lineage(candidate))

    def _require(self, name: str) -> None:
        if name not in self._parents:
            raise TaxonomyError(f"unknown component class {name!r}")


DEFAULT_TAXONOMY = Taxonomy(DEFAULT_TAXONOMY_TREE)


@dataclass
class PidNode:
    id: str
    cls: str
    tag: Optional[str] = None
    attributes: Dict[str, Scalar] = field(default_factory=dict)

    def copy(self) -> "PidNode":
        return PidNode(self.id, self.cls, self.tag, dict(self.attributes))


@dataclass
class PidEdge:
    id: str
    source: str
    target: str
    kind: str
    attributes: Dict[str, Scalar] = field(default_factory=dict)

    def copy(self) -> "PidEdge":
        return PidEdge(self.id, self.source, self.target, self.kind, dict(self.attributes))


class PidGraph:
    """Directed multigraph of P&ID components.

    Mutation primitives keep referential integrity: removing a node also
    removes its incident edges, and edges can only be added between existing
    nodes. Node ids and edge ids are independent namespaces.
    """

    def __init__(self, taxonomy: Optional[Taxonomy] = None,
                 metadata: Optional[Mapping[str, Scalar]] = None):
        self.taxonomy = taxonomy if taxonomy is not None else DEFAULT_TAXONOMY
        self.metadata: Dict[str, Scalar] = dict(metadata or {})
        self.nodes: Dict[str, PidNode] = {}
        self.edges: Dict[str, PidEdge] = {}

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    # -- mutation primitives ------------------------------------------------

    def add_node(self, node_id: str, cls: str, tag: Optional[str] = None,
                 attributes: Optional[Mapping[str, Scalar]] = None) -> PidNode:
        if node_id in self.nodes:
            raise GraphError(f"duplicate node id {node_id!r}")
        if cls not in self.taxonomy:
            raise TaxonomyError(f"unknown component class {cls!r} for node {node_id!r}")
        attrs = _checked_attributes(attributes, f"node {node_id!r}")
        node = PidNode(node_id, cls, tag, attrs)
        self.nodes[node_id] = node
        return node

    def add_edge(self, edge_id: str, source: str, target: str, kind: str,
                 attributes: Optional[Mapping[str, Scalar]] = None) -> PidEdge:
        if edge_id in self.edges:
            raise GraphError(f"duplicate edge id {edge_id!r}")
        if source not in self.nodes:
            raise GraphError(f"edge {edge_id!r} references unknown source node {source!r}")
        if target not in self.nodes:
            raise GraphError(f"edge {edge_id!r} references unknown target node {target!r}")
        if kind not in EDGE_KINDS:
            raise GraphError(f"edge {edge_id!r} has invalid kind {kind!r}")
        attrs = _checked_attributes(attributes, f"edge {edge_id!r}")
        edge = PidEdge(edge_id, source, target, kind, attrs)
        self.edges[edge_id] = edge
        return edge

    def remove_node(self, node_id: str) -> List[str]:
        """Remove a node and every incident edge. Returns removed edge ids, sorted."""
        if node_id not in self.nodes:
            raise GraphError(f"cannot remove unknown node {node_id!r}")
        incident = sorted(
            eid for eid, e in self.edges.items()
            if e.source == node_id or e.target == node_id
        )
        for eid in incident:
            del self.edges[eid]
        del self.nodes[node_id]
        return incident

    def remove_edge(self, edge_id: str) -> None:
        if edge_id not in self.edges:
            raise GraphError(f"cannot remove unknown edge {edge_id!r}")
        del self.edges[edge_id]

    # -- queries ------------------------------------------------------------

    def node(self, node_id: str) -> PidNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise GraphError(f"unknown node {node_id!r}") from None

    def edge(self, edge_id: str) -> PidEdge:
        try:
            return self.edges[edge_id]
        except KeyError:
            raise GraphError(f"unknown edge {edge_id!r}") from None

    def sorted_nodes(self) -> List[PidNode]:
        return [self.nodes[nid] for nid in sorted(self.nodes)]

    def sorted_edges(self) -> List[PidEdge]:
        return [self.edges[eid] for eid in sorted(self.edges)]

    def edges_between(self, source: str, target: str) -> List[PidEdge]:
        """All parallel edges source -> target, sorted by edge id."""
        return sorted(
            (e for e in self.edges.values() if e.source == source and e.target == target),
            key=lambda e: e.id,
        )

    def neighbors(self, node_id: str, direction: str = "any",
                  kind: Optional[str] = None) -> List[Tuple[PidEdge, PidNode]]:
        """Incident edges with their far-end nodes, sorted by edge id.

        ``direction`` is one of ``in``, ``out``, ``any``. A self-loop appears
        once, with the node itself as the partner.
        """
        if direction not in ("in", "out", "any"):
            raise GraphError(f"invalid direction {direction!r}")
        self.node(node_id)
        result: Dict[str, Tuple[PidEdge, PidNode]] = {}
        for edge in self.edges.values():
            if kind is not None and edge.kind != kind:
                continue
            if direction in ("out", "any") and edge.source == node_id:
                result[edge.id] = (edge, self.nodes[edge.target])
            if direction in ("in", "any") and edge.target == node_id:
                result[edge.id] = (edge, self.nodes[edge.source])
        return [result[eid] for eid in sorted(result)]

    def validate(self) -> List[str]:
        """Integrity check; returns human-readable violations (empty = valid)."""
        problems: List[str] = []
        for nid, node in self.nodes.items():
            if node.id != nid:
                problems.append(f"node key {nid!r} disagrees with node id {node.id!r}")
            if node.cls not in self.taxonomy:
                problems.append(f"node {nid!r} has unknown class {node.cls!r}")
        for eid, edge in self.edges.items():
            if edge.id != eid:
                problems.append(f"edge key {eid!r} disagrees with edge id {edge.id!r}")
            if edge.source not in self.nodes:
                problems.append(f"edge {eid!r} has dangling source {edge.source!r}")
            if edge.target not in self.nodes:
                problems.append(f"edge {eid!r} has dangling target {edge.target!r}")
            if edge.kind not in EDGE_KINDS:
                problems.append(f"edge {eid!r} has invalid kind {edge.kind!r}")
        return problems

    def copy(self) -> "PidGraph":
        dup = PidGraph(self.taxonomy, self.metadata)
        dup.nodes = {nid: node.copy() for nid, node in self.nodes.items()}
        dup.edges = {eid: edge.copy() for eid, edge in self.edges.items()}
        return dup

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PidGraph):
            return NotImplemented
        return (self.nodes == other.nodes and self.edges == other.edges
                and self.metadata == other.metadata)

    def __repr__(self) -> str:
        return f"PidGraph(nodes={self.node_count}, edges={self.edge_count})"


def _checked_attributes(attributes: Optional[Mapping[str, Scalar]],
                        owner: str) -> Dict[str, Scalar]:
    attrs = dict(attributes or {})
    for name, value in attrs.items():
        if not isinstance(name, str):
            raise GraphError(f"{owner}: attribute names must be strings, got {name!r}")
        if not is_scalar(value):
            raise GraphError(
                f"{owner}: attribute {name!r} must be a string, number or boolean"
            )
    return attrs

"""Apply an ordered rule set to a P&ID graph.

The engine loop per rule: enumerate matches of the erroneous pattern, drop
the ones whose correction is already in place (missing-component rules),
apply the first match in deterministic order, and re-match from scratch.
Re-matching after every application sidesteps conflicts between overlapping
matches. A per-rule application cap turns a self-triggering rule into a
diagnosable error instead of a hang.

Suppression semantics: a missing-component match is suppressed when the
corrected pattern is found covering the matched region. Corrected-pattern
pipe edges match directed pipe *runs*: one edge or a chain of pipe edges
whose interior nodes are all piping components (valves, strainers and the
like). The relaxation is what keeps a fully dressed pump quiet: once rules
have spliced a strainer between the suction block valve and the pump, the
block valve no longer pipes directly into the pump, but the protective
layout is obviously present. Interior nodes on the chosen runs count toward
the covered region. Pattern edges that carry conditions, and all signal
edges, still require a direct edge.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .errors import ConvergenceError, PidlintError, StaleMatchError
from .matching import (
    Match,
    Pattern,
    edge_compatible,
    find_matches,
    node_compatible,
    search_order,
)
from .model import PidGraph
from .rules import (
    RECOMMENDATION_RANK,
    RuleGraph,
    corrected_pattern,
    erroneous_pattern,
)

#: Interior nodes of a pipe run must be of this class (or a subclass).
PIPE_RUN_INTERIOR_CLASS = "PipingComponent"

MODES = ("detect", "fix", "interactive")


@dataclass
class EngineConfig:
    recommendation_threshold: str = "consideration"
    milestone_filter: Optional[str] = None
    max_applications_per_rule: int = 100
    mode: str = "detect"

    def __post_init__(self) -> None:
        if self.recommendation_threshold not in RECOMMENDATION_RANK:
            raise PidlintError(
                f"invalid recommendation threshold {self.recommendation_threshold!r}"
            )
        if self.mode not in MODES:
            raise PidlintError(f"invalid engine mode {self.mode!r}")
        if self.max_applications_per_rule < 1:
            raise PidlintError("max_applications_per_rule must be >= 1")


@dataclass
class CorrectionRecord:
    """One applied or proposed rule instance."""

    rule_id: str
    description: str
    explanation: str
    recommendation: str
    status: str  # proposed | applied | rejected
    match: Match
    inserted_node_ids: List[str] = field(default_factory=list)
    inserted_edge_ids: List[str] = field(default_factory=list)
    deleted_node_ids: List[str] = field(default_factory=list)
    deleted_edge_ids: List[str] = field(default_factory=list)

    @property
    def fingerprint(self) -> str:
        """Stable identity of a rule instance: rule id + matched node ids."""
        return self.rule_id + "::" + "+".join(sorted(self.match.node_map.values()))

    @property
    def delta_nodes(self) -> int:
        return len(self.inserted_node_ids) - len(self.deleted_node_ids)

    @property
    def delta_edges(self) -> int:
        return len(self.inserted_edge_ids) - len(self.deleted_edge_ids)

    def to_dict(self) -> dict:
        return {
            "ruleId": self.rule_id,
            "description": self.description,
            "explanation": self.explanation,
            "recommendation": self.recommendation,
            "status": self.status,
            "match": self.match.to_dict(),
            "insertedNodeIds": list(self.inserted_node_ids),
            "insertedEdgeIds": list(self.inserted_edge_ids),
            "deletedNodeIds": list(self.deleted_node_ids),
            "deletedEdgeIds": list(self.deleted_edge_ids),
            "deltaNodes": self.delta_nodes,
            "deltaEdges": self.delta_edges,
            "fingerprint": self.fingerprint,
        }


@dataclass
class GraphDiff:
    """Exact by-id set difference between two graphs.

    Removed elements keep their full records (taken from the before graph)
    so renderers can draw deletions; applying the diff only needs their ids.
    """

    added_nodes: list
    removed_nodes: list
    added_edges: list
    removed_edges: list

    @property
    def removed_node_ids(self) -> List[str]:
        return [n.id for n in self.removed_nodes]

    @property
    def removed_edge_ids(self) -> List[str]:
        return [e.id for e in self.removed_edges]

    @property
    def is_empty(self) -> bool:
        return not (self.added_nodes or self.removed_nodes
                    or self.added_edges or self.removed_edges)

    def apply_to(self, graph: PidGraph) -> PidGraph:
        out = graph.copy()
        for eid in self.removed_edge_ids:
            if eid in out.edges:
                out.remove_edge(eid)
        for nid in self.removed_node_ids:
            out.remove_node(nid)
        for node in self.added_nodes:
            out.add_node(node.id, node.cls, node.tag, dict(node.attributes))
        for edge in self.added_edges:
            out.add_edge(edge.id, edge.source, edge.target, edge.kind,
                         dict(edge.attributes))
        return out

    def to_dict(self) -> dict:
        def node_record(n) -> dict:
            return {"id": n.id, "class": n.cls, "tag": n.tag,
                    "attributes": dict(sorted(n.attributes.items()))}

        def edge_record(e) -> dict:
            return {"id": e.id, "source": e.source, "target": e.target,
                    "kind": e.kind, "attributes": dict(sorted(e.attributes.items()))}

        return {
            "addedNodes": [node_record(n) for n in self.added_nodes],
            "removedNodes": [node_record(n) for n in self.removed_nodes],
            "addedEdges": [edge_record(e) for e in self.added_edges],
            "removedEdges": [edge_record(e) for e in self.removed_edges],
        }


def diff(before: PidGraph, after: PidGraph) -> GraphDiff:
    return GraphDiff(
        added_nodes=[after.nodes[nid].copy()
                     for nid in sorted(set(after.nodes) - set(before.nodes))],
        removed_nodes=[before.nodes[nid].copy()
                       for nid in sorted(set(before.nodes) - set(after.nodes))],
        added_edges=[after.edges[eid].copy()
                     for eid in sorted(set(after.edges) - set(before.edges))],
        removed_edges=[before.edges[eid].copy()
                       for eid in sorted(set(before.edges) - set(after.edges))],
    )


@dataclass
class EngineResult:
    graph: PidGraph
    records: List[CorrectionRecord]
    per_rule_ms: Dict[str, float]
    total_ms: float
    mode: str


# -- suppression ---------------------------------------------------------------


def _pipe_run_candidates(graph: PidGraph, start: str, forward: bool,
                         blocked: Set[str]) -> Set[str]:
    """Node ids reachable from ``start`` over directed pipe runs.

    A run may pass through interior nodes only if they are piping components
    and not in ``blocked``. Every run endpoint qualifies regardless of class.
    """
    taxonomy = graph.taxonomy
    reachable: Set[str] = set()
    frontier = [start]
    expanded = {start}
    while frontier:
        current = frontier.pop()
        direction = "out" if forward else "in"
        for _, node in graph.neighbors(current, direction=direction, kind="pipe"):
            if node.id not in reachable:
                reachable.add(node.id)
            if node.id in expanded or node.id in blocked:
                continue
            if taxonomy.is_subclass(node.cls, PIPE_RUN_INTERIOR_CLASS):
                expanded.add(node.id)
                frontier.append(node.id)
    return reachable


def _pipe_run_masks(graph: PidGraph, source: str, target: str, blocked: Set[str],
                    relevant: FrozenSet[str], cap: int = 12) -> List[FrozenSet[str]]:
    """Distinct ``interiors & relevant`` sets over simple pipe runs source->target."""
    taxonomy = graph.taxonomy
    masks: Set[FrozenSet[str]] = set()

    def walk(current: str, interior: Tuple[str, ...], visited: Set[str]) -> None:
        if len(interior) > cap:
            return
        for _, node in graph.neighbors(current, direction="out", kind="pipe"):
            if node.id == target:
                masks.add(frozenset(interior) & relevant)
                continue
            if node.id in visited or node.id in blocked:
                continue
            if not taxonomy.is_subclass(node.cls, PIPE_RUN_INTERIOR_CLASS):
                continue
            walk(node.id, interior + (node.id,), visited | {node.id})

    walk(source, (), {source})
    return sorted(masks, key=sorted)


def _pattern_covers(pattern: Pattern, graph: PidGraph, target: FrozenSet[str],
                    pinned: Optional[Dict[str, str]] = None) -> bool:
    """True if some pipe-run-relaxed match of ``pattern`` covers ``target``.

    ``pinned`` constrains chosen pattern keys to fixed graph nodes.
    """
    pinned = pinned or {}
    taxonomy = graph.taxonomy
    order = search_order(pattern)
    position = {key: i for i, key in enumerate(order)}
    anchors_at: List[list] = [[] for _ in order]
    for edge in pattern.sorted_edges():
        step = max(position[edge.source_key], position[edge.target_key])
        anchors_at[step].append(edge)

    node_map: Dict[str, str] = {}
    used: Set[str] = set()

    def edge_feasible(pedge) -> bool:
        src = node_map[pedge.source_key]
        tgt = node_map[pedge.target_key]
        if pedge.kind == "pipe" and not pedge.conditions:
            blocked = set(node_map.values()) - {src, tgt}
            return tgt in _pipe_run_candidates(graph, src, True, blocked)
        return any(
            edge_compatible(pedge, ge) for ge in graph.edges_between(src, tgt)
        )

    def covered() -> bool:
        needed = target - set(node_map.values())
        if not needed:
            return True
        # Only relaxed pipe edges can pull interior nodes into the cover.
        options: List[List[FrozenSet[str]]] = []
        for pedge in pattern.sorted_edges():
            if pedge.kind != "pipe" or pedge.conditions:
                continue
            src = node_map[pedge.source_key]
            tgt = node_map[pedge.target_key]
            blocked = set(node_map.values()) - {src, tgt}
            masks = _pipe_run_masks(graph, src, tgt, blocked, frozenset(needed))
            if masks:
                options.append(masks)

        remaining = frozenset(needed)

        def choose(idx: int, missing: FrozenSet[str]) -> bool:
            if not missing:
                return True
            if idx == len(options):
                return False
            return any(choose(idx + 1, missing - mask) for mask in options[idx])

        return choose(0, remaining)

    def candidate_ids(step: int, key: str) -> List[str]:
        if step == 0:
            return sorted(graph.nodes)
        anchor = next(e for e in anchors_at[step] if e.source_key != e.target_key)
        if anchor.source_key == key:
            partner = node_map[anchor.target_key]
            if anchor.kind == "pipe" and not anchor.conditions:
                blocked = set(node_map.values()) - {partner}
                return sorted(_pipe_run_candidates(graph, partner, False, blocked))
            return sorted({n.id for _, n in graph.neighbors(partner, "in", anchor.kind)})
        partner = node_map[anchor.source_key]
        if anchor.kind == "pipe" and not anchor.conditions:
            blocked = set(node_map.values()) - {partner}
            return sorted(_pipe_run_candidates(graph, partner, True, blocked))
        return sorted({n.id for _, n in graph.neighbors(partner, "out", anchor.kind)})

    def extend(step: int) -> bool:
        if step == len(order):
            return covered()
        key = order[step]
        pnode = pattern.nodes[key]
        for nid in candidate_ids(step, key):
            if nid in used:
                continue
            if key in pinned and nid != pinned[key]:
                continue
            if not node_compatible(pnode, graph.nodes[nid], taxonomy):
                continue
            node_map[key] = nid
            used.add(nid)
            ok = all(edge_feasible(pe) for pe in anchors_at[step]) and extend(step + 1)
            used.discard(nid)
            del node_map[key]
            if ok:
                return True
        return False

    return extend(0)


def is_suppressed(rule: RuleGraph, match: Match, graph: PidGraph) -> bool:
    """True when the protective layout of a missing-component rule already exists.

    Checks for a corrected-pattern match whose covered node set (mapped nodes
    plus pipe-run interiors) contains every node of the erroneous match, and
    whose non-wildcard kept nodes (the anchors, e.g. the pump or the vessel)
    map to the same graph nodes as in the erroneous match. Anchor alignment is
    what keeps one pump's isolation from silencing a neighboring pump whose
    nodes merely appear inside the first pump's corrected region; wildcards
    stay free because a correction legitimately shifts them (the suction
    wildcard of a protected pump maps to the strainer itself).
    """
    if not rule.meta.missing_component:
        return False
    target = frozenset(match.node_map.values())
    corrected = corrected_pattern(rule)
    root = graph.taxonomy.root
    pinned = {
        key: match.node_map[key]
        for key, pnode in corrected.nodes.items()
        if key in match.node_map and pnode.cls != root
    }
    return _pattern_covers(corrected, graph, target, pinned)


# -- application ---------------------------------------------------------------


def _fresh_id(taken, stem: str) -> str:
    n = 1
    while f"{stem}:{n}" in taken:
        n += 1
    return f"{stem}:{n}"


def _check_match_fresh(rule: RuleGraph, match: Match, graph: PidGraph) -> None:
    pattern = erroneous_pattern(rule)
    taxonomy = graph.taxonomy
    for key, pnode in pattern.nodes.items():
        nid = match.node_map.get(key)
        if nid is None or nid not in graph.nodes:
            raise StaleMatchError(f"match node {key!r} -> {nid!r} no longer exists")
        if not node_compatible(pnode, graph.nodes[nid], taxonomy):
            raise StaleMatchError(f"match node {key!r} -> {nid!r} is no longer compatible")
    for key, pedge in pattern.edges.items():
        eid = match.edge_map.get(key)
        if eid is None or eid not in graph.edges:
            raise StaleMatchError(f"match edge {key!r} -> {eid!r} no longer exists")
        gedge = graph.edges[eid]
        if (gedge.source != match.node_map[pedge.source_key]
                or gedge.target != match.node_map[pedge.target_key]
                or not edge_compatible(pedge, gedge)):
            raise StaleMatchError(f"match edge {key!r} -> {eid!r} is no longer compatible")


def apply_match(rule: RuleGraph, match: Match,
                graph: PidGraph) -> Tuple[PidGraph, CorrectionRecord]:
    """Execute one rule instance. Returns the updated graph and its record.

    Inserted nodes get ids ``<ruleId>:<class>:<n>`` and inserted edges
    ``<ruleId>:<patternEdgeKey>:<n>``, with ``n`` the smallest integer that
    yields a fresh id, so repeated runs are reproducible byte for byte.
    """
    _check_match_fresh(rule, match, graph)
    out = graph.copy()
    rule_id = rule.meta.id

    # Attribute snapshots must be taken before any deletion.
    attr_source: Dict[str, dict] = {}
    for redge in rule.edges_with_action("keep", "delete"):
        eid = match.edge_map[redge.key]
        attr_source[redge.key] = dict(out.edges[eid].attributes)

    deleted_edge_ids: Set[str] = set()
    for redge in sorted(rule.edges_with_action("delete"), key=lambda e: e.key):
        eid = match.edge_map[redge.key]
        if eid in out.edges:
            out.remove_edge(eid)
            deleted_edge_ids.add(eid)

    deleted_node_ids: List[str] = []
    for rnode in sorted(rule.nodes_with_action("delete"), key=lambda n: n.key):
        nid = match.node_map[rnode.key]
        cascade = out.remove_node(nid)
        deleted_node_ids.append(nid)
        deleted_edge_ids.update(cascade)

    placed: Dict[str, str] = {}
    inserted_node_ids: List[str] = []
    for rnode in sorted(rule.nodes_with_action("insert"), key=lambda n: n.key):
        nid = _fresh_id(out.nodes, f"{rule_id}:{rnode.cls}")
        out.add_node(nid, rnode.cls)
        placed[rnode.key] = nid
        inserted_node_ids.append(nid)

    def endpoint(key: str) -> str:
        return placed.get(key) or match.node_map[key]

    inserted_edge_ids: List[str] = []
    for redge in sorted(rule.edges_with_action("insert"), key=lambda e: e.key):
        attrs = {}
        if redge.copy_attributes_from is not None:
            attrs = dict(attr_source[redge.copy_attributes_from])
        eid = _fresh_id(out.edges, f"{rule_id}:{redge.key}")
        out.add_edge(eid, endpoint(redge.source_key), endpoint(redge.target_key),
                     redge.kind, attrs)
        inserted_edge_ids.append(eid)

    record = CorrectionRecord(
        rule_id=rule_id,
        description=rule.meta.description,
        explanation=rule.meta.explanation,
        recommendation=rule.meta.recommendation,
        status="applied",
        match=match,
        inserted_node_ids=sorted(inserted_node_ids),
        inserted_edge_ids=sorted(inserted_edge_ids),
        deleted_node_ids=sorted(deleted_node_ids),
        deleted_edge_ids=sorted(deleted_edge_ids),
    )
    return out, record


def _open_matches(rule: RuleGraph, graph: PidGraph) -> List[Match]:
    matches = find_matches(erroneous_pattern(rule), graph)
    if rule.meta.missing_component:
        matches = [m for m in matches if not is_suppressed(rule, m, graph)]
    return matches


def run_rule(rule: RuleGraph, graph: PidGraph,
             config: EngineConfig) -> Tuple[PidGraph, List[CorrectionRecord]]:
    """Apply one rule until it no longer matches. Matches are recomputed after
    every application, since an application can invalidate earlier matches."""
    current = graph.copy()
    records: List[CorrectionRecord] = []
    applications = 0
    while True:
        matches = _open_matches(rule, current)
        if not matches:
            return current, records
        if applications >= config.max_applications_per_rule:
            raise ConvergenceError(rule.meta.id, config.max_applications_per_rule)
        current, record = apply_match(rule, matches[0], current)
        records.append(record)
        applications += 1


def detect_rule(rule: RuleGraph, graph: PidGraph) -> List[CorrectionRecord]:
    """Proposals for one rule against a pristine graph (no mutation).

    Each proposal's inserted ids come from an independent dry run, so ids of
    different proposals may coincide; they are previews, not commitments.
    """
    records = []
    for match in _open_matches(rule, graph):
        _, record = apply_match(rule, match, graph)
        record.status = "proposed"
        records.append(record)
    return records


def select_rules(rules: Sequence[RuleGraph], config: EngineConfig) -> List[RuleGraph]:
    threshold = RECOMMENDATION_RANK[config.recommendation_threshold]
    chosen = [
        r for r in rules
        if RECOMMENDATION_RANK[r.meta.recommendation] >= threshold
        and (config.milestone_filter is None
             or r.meta.milestone == config.milestone_filter)
    ]
    chosen.sort(key=lambda r: (r.meta.order, r.meta.id))
    return chosen


def run_all(rules: Sequence[RuleGraph], graph: PidGraph,
            config: EngineConfig) -> EngineResult:
    """Run the selected rules in ascending ``order``.

    In fix mode the returned graph carries all corrections; in detect (and
    interactive) mode the graph is untouched and every record is a proposal
    computed against the pristine input.
    """
    ids = [r.meta.id for r in rules]
    if len(set(ids)) != len(ids):
        raise PidlintError(f"duplicate rule ids in rule set: {sorted(ids)}")

    selected = select_rules(rules, config)
    started = time.perf_counter()
    per_rule_ms: Dict[str, float] = {}
    records: List[CorrectionRecord] = []
    current = graph.copy()

    for rule in selected:
        rule_started = time.perf_counter()
        if config.mode == "fix":
            current, rule_records = run_rule(rule, current, config)
        else:
            rule_records = detect_rule(rule, graph)
        per_rule_ms[rule.meta.id] = (time.perf_counter() - rule_started) * 1000.0
        records.extend(rule_records)

    total_ms = (time.perf_counter() - started) * 1000.0
    result_graph = current if config.mode == "fix" else graph
    return EngineResult(result_graph, records, per_rule_ms, total_ms, config.mode)

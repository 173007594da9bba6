"""Render detection/correction results for humans and machines.

The text rendering is deterministic (same report, same bytes) and carries
no timings; wall-clock numbers live in the JSON rendering only. The DOT
export follows the marked-up drawing convention: insertions red, deletions
blue and dashed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .engine import CorrectionRecord, EngineResult, GraphDiff
from .model import PidGraph
from .rules import RECOMMENDATION_LEVELS

FORMAT_VERSION = "1"


@dataclass
class RunReport:
    mode: str
    recommendation_threshold: str
    milestone_filter: Optional[str]
    graph_metadata: Dict[str, object]
    nodes_before: int
    edges_before: int
    nodes_after: int
    edges_after: int
    records: List[CorrectionRecord] = field(default_factory=list)
    per_rule_ms: Dict[str, float] = field(default_factory=dict)
    total_ms: float = 0.0

    @classmethod
    def from_result(cls, result: EngineResult, before: PidGraph,
                    config) -> "RunReport":
        return cls(
            mode=result.mode,
            recommendation_threshold=config.recommendation_threshold,
            milestone_filter=config.milestone_filter,
            graph_metadata=dict(sorted(before.metadata.items())),
            nodes_before=before.node_count,
            edges_before=before.edge_count,
            nodes_after=result.graph.node_count,
            edges_after=result.graph.edge_count,
            records=list(result.records),
            per_rule_ms={k: round(v, 3) for k, v in sorted(result.per_rule_ms.items())},
            total_ms=round(result.total_ms, 3),
        )

    def summary_counts(self) -> Dict[str, Dict[str, int]]:
        counts: Dict[str, Dict[str, int]] = {}
        for record in self.records:
            by_level = counts.setdefault(record.status, dict.fromkeys(RECOMMENDATION_LEVELS, 0))
            by_level[record.recommendation] += 1
        return counts

    def to_dict(self) -> dict:
        return {
            "formatVersion": FORMAT_VERSION,
            "mode": self.mode,
            "config": {
                "recommendationThreshold": self.recommendation_threshold,
                "milestoneFilter": self.milestone_filter,
            },
            "graph": {
                "metadata": self.graph_metadata,
                "nodesBefore": self.nodes_before,
                "edgesBefore": self.edges_before,
                "nodesAfter": self.nodes_after,
                "edgesAfter": self.edges_after,
            },
            "records": [r.to_dict() for r in self.records],
            "summary": self.summary_counts(),
            "timings": {
                "perRuleMs": dict(self.per_rule_ms),
                "totalMs": self.total_ms,
            },
        }


def _affected(record: CorrectionRecord, graph: Optional[PidGraph]) -> str:
    parts = []
    for key in sorted(record.match.node_map):
        nid = record.match.node_map[key]
        detail = nid
        if graph is not None and nid in graph.nodes:
            node = graph.nodes[nid]
            label = node.tag if node.tag and node.tag != nid else None
            detail = f"{nid} ({node.cls})" if label is None else f"{nid} [{label}] ({node.cls})"
        parts.append(f"{key}={detail}")
    return ", ".join(parts)


def render_text(report: RunReport, graph: Optional[PidGraph] = None) -> str:
    """One block per record, deterministic ordering, no timings."""
    lines: List[str] = []
    title = report.graph_metadata.get("title", "(untitled graph)")
    lines.append(f"P&ID {report.mode} report: {title}")
    milestone = report.milestone_filter or "(all)"
    lines.append(
        f"level threshold: {report.recommendation_threshold} | milestone: {milestone}"
    )
    lines.append(
        f"graph: {report.nodes_before} nodes / {report.edges_before} edges"
        + (f" -> {report.nodes_after} nodes / {report.edges_after} edges"
           if report.mode == "fix" else "")
    )
    lines.append("")

    if not report.records:
        lines.append("No violations found.")
        return "\n".join(lines) + "\n"

    for i, record in enumerate(report.records, start=1):
        lines.append(f"[{i}] rule {record.rule_id} ({record.recommendation}, "
                     f"{record.status}): {record.description}")
        lines.append(f"    explanation: {record.explanation}")
        lines.append(f"    matched: {_affected(record, graph)}")
        if record.inserted_node_ids:
            lines.append(f"    inserted nodes: {', '.join(record.inserted_node_ids)}")
        if record.inserted_edge_ids:
            lines.append(f"    inserted edges: {', '.join(record.inserted_edge_ids)}")
        if record.deleted_node_ids:
            lines.append(f"    deleted nodes: {', '.join(record.deleted_node_ids)}")
        if record.deleted_edge_ids:
            lines.append(f"    deleted edges: {', '.join(record.deleted_edge_ids)}")
        lines.append(f"    delta: nodes {record.delta_nodes:+d}, edges {record.delta_edges:+d}")
        lines.append("")

    counts = report.summary_counts()
    pieces = []
    for status in sorted(counts):
        by_level = counts[status]
        level_text = ", ".join(
            f"{by_level[level]} {level}" for level in reversed(RECOMMENDATION_LEVELS)
            if by_level[level]
        )
        pieces.append(f"{sum(by_level.values())} {status} ({level_text})")
    lines.append("summary: " + "; ".join(pieces))
    return "\n".join(lines) + "\n"


def render_json(report: RunReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: PidGraph, changes: Optional[GraphDiff] = None) -> str:
    """GraphViz rendering; with a diff, insertions are red and deletions blue."""
    added_nodes = {n.id for n in changes.added_nodes} if changes else set()
    added_edges = {e.id for e in changes.added_edges} if changes else set()

    lines = ["digraph pid {", "  rankdir=LR;", "  node [shape=box, fontsize=10];"]

    def node_label(node_id: str, tag: Optional[str], cls: str) -> str:
        head = node_id if not tag or tag == node_id else f"{node_id} [{tag}]"
        return head + "\\n" + cls

    for node in graph.sorted_nodes():
        attrs = [f"label={_quote(node_label(node.id, node.tag, node.cls))}"]
        if node.id in added_nodes:
            attrs.append("color=red")
            attrs.append("fontcolor=red")
        lines.append(f"  {_quote(node.id)} [{', '.join(attrs)}];")

    if changes:
        for node in sorted(changes.removed_nodes, key=lambda n: n.id):
            attrs = [f"label={_quote(node_label(node.id, node.tag, node.cls))}",
                     "color=blue", "fontcolor=blue", "style=dashed"]
            lines.append(f"  {_quote(node.id)} [{', '.join(attrs)}];")

    def edge_line(source: str, target: str, kind: str, extra: List[str]) -> str:
        attrs = []
        if kind == "signal":
            attrs.append("arrowhead=open")
            if not any(a.startswith("style=") for a in extra):
                attrs.append("style=dashed")
        attrs.extend(extra)
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        return f"  {_quote(source)} -> {_quote(target)}{suffix};"

    for edge in graph.sorted_edges():
        extra = ["color=red"] if edge.id in added_edges else []
        lines.append(edge_line(edge.source, edge.target, edge.kind, extra))

    if changes:
        for edge in sorted(changes.removed_edges, key=lambda e: e.id):
            lines.append(edge_line(edge.source, edge.target, edge.kind,
                                   ["color=blue", "style=dashed"]))

    lines.append("}")
    return "\n".join(lines) + "\n"

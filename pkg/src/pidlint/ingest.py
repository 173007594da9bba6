"""Parse and serialize the graph and rule interchange formats.

Graph documents (``*.pidg.json``)::

    {"formatVersion": "1", "metadata": {...},
     "nodes": [{"id", "class", "tag"?, "attributes": {}}],
     "edges": [{"id", "source", "target", "kind", "attributes": {}}]}

Rule documents (``*.rule.json``)::

    {"formatVersion": "1",
     "meta": {"id", "milestone", "description", "explanation",
              "recommendation", "missingComponent", "source", "order"},
     "pattern": {"nodes": [{"key", "class", "action", "conditions": []}],
                 "edges": [{"key", "sourceKey", "targetKey", "kind", "action",
                            "conditions": [], "copyAttributesFrom"?}]}}

Serialization is canonical (elements sorted by id/key, keys sorted), so
serialize -> parse -> serialize is byte-stable. Every parse failure raises
:class:`~pidlint.errors.ParseError` carrying a JSON-path location; malformed
input never escapes as a raw KeyError/TypeError.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

from .errors import ParseError
from .matching import CONDITION_OPERATORS, Condition
from .model import (
    EDGE_KINDS,
    DEFAULT_TAXONOMY,
    PidGraph,
    Scalar,
    Taxonomy,
    is_scalar,
)
from .rules import (
    ACTIONS,
    RECOMMENDATION_LEVELS,
    RuleEdge,
    RuleGraph,
    RuleMeta,
    RuleNode,
    validate_rule,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = "1"

_GRAPH_TOP_KEYS = {"formatVersion", "metadata", "nodes", "edges"}
_RULE_TOP_KEYS = {"formatVersion", "meta", "pattern"}


# -- helpers ------------------------------------------------------------------


def _load_json(text: Union[str, bytes]) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", "$") from None
    except (TypeError, ValueError, UnicodeDecodeError) as exc:
        raise ParseError(f"unreadable document: {exc}", "$") from None


def _require_obj(value: object, location: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError("expected a JSON object", location)
    return value


def _require_list(value: object, location: str) -> list:
    if not isinstance(value, list):
        raise ParseError("expected a JSON array", location)
    return value


def _require_str(obj: dict, key: str, location: str) -> str:
    if key not in obj:
        raise ParseError(f"missing required field {key!r}", location)
    value = obj[key]
    if not isinstance(value, str) or not value:
        raise ParseError(f"field {key!r} must be a non-empty string", f"{location}.{key}")
    return value


def _attributes(obj: dict, location: str) -> Dict[str, Scalar]:
    raw = obj.get("attributes", {})
    raw = _require_obj(raw, f"{location}.attributes")
    out: Dict[str, Scalar] = {}
    for name, value in raw.items():
        if not is_scalar(value):
            raise ParseError(
                "attribute values must be strings, numbers or booleans",
                f"{location}.attributes.{name}",
            )
        out[name] = value
    return out


def _warn_unknown_keys(obj: dict, known: set, what: str) -> None:
    unknown = sorted(set(obj) - known)
    if unknown:
        logger.warning("ignoring unknown %s fields: %s", what, ", ".join(unknown))


def _check_version(obj: dict, location: str) -> None:
    version = obj.get("formatVersion")
    if version is None:
        raise ParseError("missing required field 'formatVersion'", location)
    if version != FORMAT_VERSION:
        raise ParseError(
            f"unsupported formatVersion {version!r} (expected {FORMAT_VERSION!r})",
            f"{location}.formatVersion",
        )


# -- graph documents -----------------------------------------------------------


def parse_graph_document(doc: object, taxonomy: Optional[Taxonomy] = None) -> PidGraph:
    taxonomy = taxonomy if taxonomy is not None else DEFAULT_TAXONOMY
    doc = _require_obj(doc, "$")
    _check_version(doc, "$")
    _warn_unknown_keys(doc, _GRAPH_TOP_KEYS, "graph document")

    metadata_obj = _require_obj(doc.get("metadata", {}), "$.metadata")
    metadata: Dict[str, Scalar] = {}
    for key, value in metadata_obj.items():
        if not is_scalar(value):
            raise ParseError("metadata values must be scalars", f"$.metadata.{key}")
        metadata[key] = value

    graph = PidGraph(taxonomy, metadata)

    for i, item in enumerate(_require_list(doc.get("nodes", []), "$.nodes")):
        location = f"$.nodes[{i}]"
        obj = _require_obj(item, location)
        node_id = _require_str(obj, "id", location)
        cls = _require_str(obj, "class", location)
        if node_id in graph.nodes:
            raise ParseError(f"duplicate node id {node_id!r}", f"{location}.id")
        if cls not in taxonomy:
            raise ParseError(f"unknown component class {cls!r}", f"{location}.class")
        tag = obj.get("tag")
        if tag is not None and not isinstance(tag, str):
            raise ParseError("field 'tag' must be a string", f"{location}.tag")
        graph.add_node(node_id, cls, tag, _attributes(obj, location))

    for i, item in enumerate(_require_list(doc.get("edges", []), "$.edges")):
        location = f"$.edges[{i}]"
        obj = _require_obj(item, location)
        edge_id = _require_str(obj, "id", location)
        source = _require_str(obj, "source", location)
        target = _require_str(obj, "target", location)
        kind = _require_str(obj, "kind", location)
        if edge_id in graph.edges:
            raise ParseError(f"duplicate edge id {edge_id!r}", f"{location}.id")
        if source not in graph.nodes:
            raise ParseError(f"unknown source node {source!r}", f"{location}.source")
        if target not in graph.nodes:
            raise ParseError(f"unknown target node {target!r}", f"{location}.target")
        if kind not in EDGE_KINDS:
            raise ParseError(
                f"edge kind must be one of {list(EDGE_KINDS)}", f"{location}.kind"
            )
        graph.add_edge(edge_id, source, target, kind, _attributes(obj, location))

    return graph


def parse_graph(text: Union[str, bytes], taxonomy: Optional[Taxonomy] = None) -> PidGraph:
    return parse_graph_document(_load_json(text), taxonomy)


def graph_to_document(graph: PidGraph) -> dict:
    nodes = []
    for node in graph.sorted_nodes():
        record: dict = {"id": node.id, "class": node.cls,
                        "attributes": dict(sorted(node.attributes.items()))}
        if node.tag is not None:
            record["tag"] = node.tag
        nodes.append(record)
    edges = [
        {"id": e.id, "source": e.source, "target": e.target, "kind": e.kind,
         "attributes": dict(sorted(e.attributes.items()))}
        for e in graph.sorted_edges()
    ]
    return {
        "formatVersion": FORMAT_VERSION,
        "metadata": dict(sorted(graph.metadata.items())),
        "nodes": nodes,
        "edges": edges,
    }


def serialize_graph(graph: PidGraph) -> str:
    return json.dumps(graph_to_document(graph), indent=2, sort_keys=True,
                      ensure_ascii=False) + "\n"


def load_graph(path: Union[str, Path], taxonomy: Optional[Taxonomy] = None) -> PidGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"), taxonomy)


def save_graph(graph: PidGraph, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize_graph(graph), encoding="utf-8")


# -- rule documents ------------------------------------------------------------


def _parse_condition(item: object, location: str) -> Condition:
    obj = _require_obj(item, location)
    attribute = _require_str(obj, "attribute", location)
    operator = _require_str(obj, "operator", location)
    if operator not in CONDITION_OPERATORS:
        raise ParseError(
            f"operator must be one of {list(CONDITION_OPERATORS)}", f"{location}.operator"
        )
    if "operand" not in obj:
        raise ParseError("missing required field 'operand'", location)
    operand = obj["operand"]
    if isinstance(operand, list):
        operand = tuple(operand)
    condition = Condition(attribute, operator, operand)
    problems = condition.problems()
    if problems:
        raise ParseError("; ".join(problems), location)
    return condition


def parse_rule_document(doc: object, taxonomy: Optional[Taxonomy] = None) -> RuleGraph:
    taxonomy = taxonomy if taxonomy is not None else DEFAULT_TAXONOMY
    doc = _require_obj(doc, "$")
    _check_version(doc, "$")
    _warn_unknown_keys(doc, _RULE_TOP_KEYS, "rule document")

    meta_obj = _require_obj(doc.get("meta"), "$.meta")
    for required in ("id", "milestone", "description", "explanation",
                     "recommendation", "source"):
        _require_str(meta_obj, required, "$.meta")
    recommendation = meta_obj["recommendation"]
    if recommendation not in RECOMMENDATION_LEVELS:
        raise ParseError(
            f"recommendation must be one of {list(RECOMMENDATION_LEVELS)}",
            "$.meta.recommendation",
        )
    missing = meta_obj.get("missingComponent")
    if not isinstance(missing, bool):
        raise ParseError("field 'missingComponent' must be a boolean",
                         "$.meta.missingComponent")
    order = meta_obj.get("order")
    if not isinstance(order, int) or isinstance(order, bool):
        raise ParseError("field 'order' must be an integer", "$.meta.order")

    meta = RuleMeta(
        id=meta_obj["id"],
        milestone=meta_obj["milestone"],
        description=meta_obj["description"],
        explanation=meta_obj["explanation"],
        recommendation=recommendation,
        missing_component=missing,
        source=meta_obj["source"],
        order=order,
    )

    pattern_obj = _require_obj(doc.get("pattern"), "$.pattern")

    nodes: List[RuleNode] = []
    for i, item in enumerate(_require_list(pattern_obj.get("nodes", []), "$.pattern.nodes")):
        location = f"$.pattern.nodes[{i}]"
        obj = _require_obj(item, location)
        key = _require_str(obj, "key", location)
        cls = _require_str(obj, "class", location)
        action = _require_str(obj, "action", location)
        if action not in ACTIONS:
            raise ParseError(f"action must be one of {list(ACTIONS)}", f"{location}.action")
        conditions = tuple(
            _parse_condition(c, f"{location}.conditions[{j}]")
            for j, c in enumerate(_require_list(obj.get("conditions", []),
                                                f"{location}.conditions"))
        )
        nodes.append(RuleNode(key, cls, action, conditions))

    edges: List[RuleEdge] = []
    for i, item in enumerate(_require_list(pattern_obj.get("edges", []), "$.pattern.edges")):
        location = f"$.pattern.edges[{i}]"
        obj = _require_obj(item, location)
        key = _require_str(obj, "key", location)
        source_key = _require_str(obj, "sourceKey", location)
        target_key = _require_str(obj, "targetKey", location)
        kind = _require_str(obj, "kind", location)
        action = _require_str(obj, "action", location)
        if action not in ACTIONS:
            raise ParseError(f"action must be one of {list(ACTIONS)}", f"{location}.action")
        copy_from = obj.get("copyAttributesFrom")
        if copy_from is not None and not isinstance(copy_from, str):
            raise ParseError("field 'copyAttributesFrom' must be a string",
                             f"{location}.copyAttributesFrom")
        conditions = tuple(
            _parse_condition(c, f"{location}.conditions[{j}]")
            for j, c in enumerate(_require_list(obj.get("conditions", []),
                                                f"{location}.conditions"))
        )
        edges.append(RuleEdge(key, source_key, target_key, kind, action,
                              conditions, copy_from))

    # Canonical in-memory order: sorted by key. Makes parse/serialize closed
    # under round trips regardless of file ordering.
    nodes.sort(key=lambda n: n.key)
    edges.sort(key=lambda e: e.key)
    rule = RuleGraph(meta, nodes, edges)
    violations = validate_rule(rule, taxonomy)
    if violations:
        raise ParseError("invalid rule: " + "; ".join(violations), "$.pattern")
    return rule


def parse_rule(text: Union[str, bytes], taxonomy: Optional[Taxonomy] = None) -> RuleGraph:
    return parse_rule_document(_load_json(text), taxonomy)


def load_rule(path: Union[str, Path], taxonomy: Optional[Taxonomy] = None) -> RuleGraph:
    try:
        return parse_rule(Path(path).read_text(encoding="utf-8"), taxonomy)
    except ParseError as exc:
        raise ParseError(f"{Path(path).name}: {exc.message}", exc.location) from None


def _condition_to_document(condition: Condition) -> dict:
    operand = condition.operand
    if isinstance(operand, tuple):
        operand = list(operand)
    return {"attribute": condition.attribute, "operator": condition.operator,
            "operand": operand}


def rule_to_document(rule: RuleGraph) -> dict:
    nodes = []
    for node in sorted(rule.nodes, key=lambda n: n.key):
        nodes.append({
            "key": node.key,
            "class": node.cls,
            "action": node.action,
            "conditions": [_condition_to_document(c) for c in node.conditions],
        })
    edges = []
    for edge in sorted(rule.edges, key=lambda e: e.key):
        record = {
            "key": edge.key,
            "sourceKey": edge.source_key,
            "targetKey": edge.target_key,
            "kind": edge.kind,
            "action": edge.action,
            "conditions": [_condition_to_document(c) for c in edge.conditions],
        }
        if edge.copy_attributes_from is not None:
            record["copyAttributesFrom"] = edge.copy_attributes_from
        edges.append(record)
    return {
        "formatVersion": FORMAT_VERSION,
        "meta": {
            "id": rule.meta.id,
            "milestone": rule.meta.milestone,
            "description": rule.meta.description,
            "explanation": rule.meta.explanation,
            "recommendation": rule.meta.recommendation,
            "missingComponent": rule.meta.missing_component,
            "source": rule.meta.source,
            "order": rule.meta.order,
        },
        "pattern": {"nodes": nodes, "edges": edges},
    }


def serialize_rule(rule: RuleGraph) -> str:
    return json.dumps(rule_to_document(rule), indent=2, sort_keys=True,
                      ensure_ascii=False) + "\n"


# -- demonstration fixture -------------------------------------------------------

# A small pumped-storage unit: feed pump and discharge pump around a buffer
# vessel, a preheater on the feed, a conditioning exchanger on the recycle,
# and pressure/temperature control loops. Both pumps are deliberately left
# unprotected (no strainers, check valves, block valves or drains) and the
# vessel has no level instrument, so the shipped rule set has real work to do.
# Both actuated globe valves sit on DN 80 lines, below the DN 100 bound of
# the globe-valve rule.

_FIXTURE_NODES = (
    # id, class, tag
    ("ACT4701", "Actuator", "ACT4701"),
    ("ACT4702", "Actuator", "ACT4702"),
    ("CV4701", "GlobeValve", "CV4701"),
    ("CV4702", "GlobeValve", "CV4702"),
    ("E4711", "HeatExchanger", "E4711"),
    ("E4712", "HeatExchanger", "E4712"),
    ("FI4711", "FlowInstrument", "FI4711"),
    ("FI4712", "FlowInstrument", "FI4712"),
    ("FI4750", "FlowInstrument", "FI4750"),
    ("FI4790", "FlowInstrument", "FI4790"),
    ("P4711", "CentrifugalPump", "P4711"),
    ("P4712", "CentrifugalPump", "P4712"),
    ("PI4711", "PressureInstrument", "PI4711"),
    ("PI4712", "PressureInstrument", "PI4712"),
    ("PI4713", "PressureInstrument", "PI4713"),
    ("PI4722", "PressureInstrument", "PI4722"),
    ("PI4750", "PressureInstrument", "PI4750"),
    ("PI4790", "PressureInstrument", "PI4790"),
    ("SV4750", "SafetyValve", "SV4750"),
    ("T4750", "Vessel", "T4750"),
    ("TI4711", "TemperatureInstrument", "TI4711"),
    ("TI4712", "TemperatureInstrument", "TI4712"),
    ("TI4713", "TemperatureInstrument", "TI4713"),
    ("TI4750", "TemperatureInstrument", "TI4750"),
    ("TI4790", "TemperatureInstrument", "TI4790"),
    ("V4701", "ButterflyValve", "V4701"),
    ("V4712", "ButterflyValve", "V4712"),
    ("V4713", "ButterflyValve", "V4713"),
    ("V4714", "ButterflyValve", "V4714"),
    ("V4721", "ButterflyValve", "V4721"),
    ("V4722", "ButterflyValve", "V4722"),
    ("V4790", "ButterflyValve", "V4790"),
    ("V4791", "ButterflyValve", "V4791"),
)

_FIXTURE_PIPES = (
    # id, source, target, nominal diameter DN (None = no attribute)
    ("pe01", "V4701", "P4711", 150),   # feed into the charge pump
    ("pe02", "P4711", "E4711", 150),   # charge pump discharge to preheater
    ("pe03", "E4711", "T4750", 150),   # preheater to buffer vessel
    ("pe04", "T4750", "P4712", 150),   # vessel outlet to discharge pump
    ("pe05", "P4712", "V4712", 150),   # discharge pump to routing valve
    ("pe06", "V4712", "V4790", 150),   # product line to battery limit
    ("pe07", "V4712", "E4712", 80),    # recycle branch to conditioner
    ("pe08", "E4712", "CV4701", 80),   # conditioner to recycle control valve
    ("pe09", "CV4701", "T4750", 80),   # recycle return to vessel
    ("pe10", "V4713", "E4711", 50),    # heating medium supply
    ("pe11", "E4711", "V4714", 50),    # heating medium return
    ("pe12", "V4721", "E4712", 50),    # cooling medium supply
    ("pe13", "E4712", "V4722", 50),    # cooling medium return
    ("pe14", "T4750", "SV4750", 80),   # vessel relief line
    ("pe15", "T4750", "CV4702", 80),   # vent to pressure control valve
    ("pe16", "CV4702", "V4791", 80),   # vent to flare battery limit
)

_FIXTURE_SIGNALS = (
    ("sg01", "ACT4701", "CV4701"),   # actuator drives recycle valve
    ("sg02", "ACT4702", "CV4702"),   # actuator drives vent valve
    ("sg03", "T4750", "TI4750"),     # vessel temperature
    ("sg04", "TI4750", "ACT4701"),   # temperature loop closes on recycle valve
    ("sg05", "T4750", "PI4750"),     # vessel pressure
    ("sg06", "PI4750", "ACT4702"),   # pressure loop closes on vent valve
    ("sg07", "P4711", "PI4711"),     # charge pump discharge pressure
    ("sg08", "P4712", "PI4712"),     # discharge pump pressure
    ("sg09", "E4711", "TI4711"),     # preheater outlet temperature
    ("sg10", "E4712", "TI4712"),     # conditioner outlet temperature
    ("sg11", "P4711", "FI4711"),     # charge flow
    ("sg12", "P4712", "FI4712"),     # discharge flow
    ("sg13", "T4750", "TI4713"),     # vessel high-temperature alarm
    ("sg14", "E4711", "PI4713"),     # preheater shell pressure
    ("sg15", "E4712", "PI4722"),     # conditioner shell pressure
    ("sg16", "P4712", "TI4790"),     # discharge pump bearing temperature
    ("sg17", "E4712", "FI4750"),     # recycle flow
    ("sg18", "FI4750", "ACT4701"),   # recycle flow trims the control valve
    ("sg19", "T4750", "PI4790"),     # redundant vessel pressure point
    ("sg20", "V4712", "FI4790"),     # product flow at the routing valve
)


def build_demo_fixture(taxonomy: Optional[Taxonomy] = None) -> PidGraph:
    """Construct the built-in 33-node / 36-edge demonstration plant."""
    graph = PidGraph(taxonomy if taxonomy is not None else DEFAULT_TAXONOMY, {
        "title": "Pumped buffer vessel unit with recycle conditioning",
        "milestone": "issue for design",
        "source": "pidlint built-in demonstration fixture",
    })
    for node_id, cls, tag in _FIXTURE_NODES:
        graph.add_node(node_id, cls, tag)
    for edge_id, source, target, diameter in _FIXTURE_PIPES:
        attrs = {"nominalDiameterDN": diameter} if diameter is not None else {}
        graph.add_edge(edge_id, source, target, "pipe", attrs)
    for edge_id, source, target in _FIXTURE_SIGNALS:
        graph.add_edge(edge_id, source, target, "signal")
    return graph

"""Interactive review service: accept or reject proposed corrections one at a
time, with full re-analysis after every accepted change.

Endpoints (JSON unless noted):

* ``POST /api/sessions``                         create a session from a graph document
* ``GET  /api/sessions/{sid}``                   graph + proposals + journal
* ``GET  /api/sessions/{sid}/proposals``         open proposals only
* ``POST /api/sessions/{sid}/proposals/{pid}/accept``
* ``POST /api/sessions/{sid}/proposals/{pid}/reject``
* ``GET  /api/sessions/{sid}/export?format=pidg|dot|report-json``
* ``GET  /api/rules``                            rule metadata

Error bodies are ``{"error": ..., "location": ...?}``. A proposal that was
already decided or went stale answers 409; unknown ids answer 404.

Sessions are in-memory; pass ``snapshot_dir`` to also mirror each session to
a JSON file after every mutation. Rejecting a proposal pins its fingerprint
(rule id + matched node ids) so the same instance is never proposed again
within the session.
"""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles

from .engine import (
    CorrectionRecord,
    EngineConfig,
    StaleMatchError,
    apply_match,
    detect_rule,
    diff,
    run_all,
)
from .errors import ParseError, PidlintError
from .ingest import graph_to_document, parse_graph_document, serialize_graph
from .matching import Match
from .model import PidGraph
from .report import RunReport, export_dot, render_json
from .rules import RuleGraph, builtin_rules


def _proposal_id(fingerprint: str) -> str:
    return hashlib.sha1(fingerprint.encode("utf-8")).hexdigest()[:12]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class _Session:
    id: str
    graph: PidGraph
    initial_graph: PidGraph
    proposals: List[dict] = field(default_factory=list)
    journal: List[dict] = field(default_factory=list)
    rejected: set = field(default_factory=set)
    issued: set = field(default_factory=set)
    decided: Dict[str, str] = field(default_factory=dict)
    per_rule_ms: Dict[str, float] = field(default_factory=dict)
    total_ms: float = 0.0
    applied_records: List[CorrectionRecord] = field(default_factory=list)


def create_app(rules: Optional[Sequence[RuleGraph]] = None,
               ui_dir: Optional[str] = None,
               snapshot_dir: Optional[str] = None) -> FastAPI:
    rule_set: List[RuleGraph] = list(rules) if rules is not None else builtin_rules()
    rules_by_id = {r.meta.id: r for r in rule_set}
    sessions: Dict[str, _Session] = {}

    app = FastAPI(title="pidlint review service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def error(status: int, message: str, location: Optional[str] = None) -> JSONResponse:
        body = {"error": message}
        if location is not None:
            body["location"] = location
        return JSONResponse(body, status_code=status)

    def analyze(session: _Session) -> None:
        """Recompute open proposals from the current graph."""
        config = EngineConfig(mode="interactive")
        result = run_all(rule_set, session.graph, config)
        session.per_rule_ms = result.per_rule_ms
        session.total_ms = result.total_ms
        proposals = []
        for record in result.records:
            if record.fingerprint in session.rejected:
                continue
            proposals.append(proposal_payload(record, session.graph))
        session.proposals = proposals
        session.issued.update(p["id"] for p in proposals)

    def proposal_payload(record: CorrectionRecord, graph: PidGraph) -> dict:
        rule = rules_by_id[record.rule_id]
        preview_graph, _ = apply_match(rule, record.match, graph)
        insert_nodes = [
            {"id": nid, "class": preview_graph.nodes[nid].cls}
            for nid in record.inserted_node_ids
        ]
        insert_edges = []
        for eid in record.inserted_edge_ids:
            edge = preview_graph.edges[eid]
            insert_edges.append({
                "id": eid, "source": edge.source, "target": edge.target,
                "kind": edge.kind,
                "attributes": dict(sorted(edge.attributes.items())),
            })
        return {
            "id": _proposal_id(record.fingerprint),
            "fingerprint": record.fingerprint,
            "ruleId": record.rule_id,
            "description": record.description,
            "explanation": record.explanation,
            "recommendation": record.recommendation,
            "missingComponent": rule.meta.missing_component,
            "milestone": rule.meta.milestone,
            "match": record.match.to_dict(),
            "preview": {
                "insertNodes": insert_nodes,
                "insertEdges": insert_edges,
                "deleteNodeIds": list(record.deleted_node_ids),
                "deleteEdgeIds": list(record.deleted_edge_ids),
            },
            "delta": {"nodes": record.delta_nodes, "edges": record.delta_edges},
        }

    def snapshot(session: _Session) -> None:
        if snapshot_dir is None:
            return
        path = Path(snapshot_dir) / f"{session.id}.json"
        payload = {
            "sessionId": session.id,
            "graph": graph_to_document(session.graph),
            "journal": session.journal,
            "rejectedFingerprints": sorted(session.rejected),
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")

    def session_or_none(sid: str) -> Optional[_Session]:
        return sessions.get(sid)

    def state_payload(session: _Session) -> dict:
        return {
            "sessionId": session.id,
            "graph": graph_to_document(session.graph),
            "proposals": session.proposals,
            "journal": session.journal,
        }

    @app.post("/api/sessions")
    async def create_session(request: Request):
        body = await request.body()
        try:
            document = json.loads(body)
        except json.JSONDecodeError as exc:
            return error(400, f"invalid JSON: {exc.msg}", "$")
        try:
            graph = parse_graph_document(document)
        except ParseError as exc:
            return error(400, exc.message, exc.location)
        except PidlintError as exc:
            return error(400, str(exc))
        session = _Session(id=uuid.uuid4().hex[:12], graph=graph,
                           initial_graph=graph.copy())
        analyze(session)
        sessions[session.id] = session
        snapshot(session)
        return JSONResponse(state_payload(session), status_code=201)

    @app.get("/api/sessions/{sid}")
    async def get_session(sid: str):
        session = session_or_none(sid)
        if session is None:
            return error(404, f"unknown session {sid!r}")
        return state_payload(session)

    @app.get("/api/sessions/{sid}/proposals")
    async def get_proposals(sid: str):
        session = session_or_none(sid)
        if session is None:
            return error(404, f"unknown session {sid!r}")
        return {"proposals": session.proposals}

    def decide(sid: str, pid: str, decision: str):
        session = session_or_none(sid)
        if session is None:
            return error(404, f"unknown session {sid!r}")
        proposal = next((p for p in session.proposals if p["id"] == pid), None)
        if proposal is None:
            if pid in session.issued:
                return error(409, f"proposal {pid!r} is no longer open")
            return error(404, f"unknown proposal {pid!r}")

        change = None
        if decision == "accepted":
            rule = rules_by_id[proposal["ruleId"]]
            match = Match(dict(proposal["match"]["nodes"]),
                          dict(proposal["match"]["edges"]))
            before = session.graph
            try:
                after, record = apply_match(rule, match, before)
            except StaleMatchError as exc:
                return error(409, f"proposal {pid!r} is stale: {exc}")
            session.graph = after
            session.applied_records.append(record)
            change = diff(before, after).to_dict()
        else:
            session.rejected.add(proposal["fingerprint"])

        session.decided[pid] = decision
        session.journal.append({
            "seq": len(session.journal) + 1,
            "decision": decision,
            "proposalId": pid,
            "ruleId": proposal["ruleId"],
            "fingerprint": proposal["fingerprint"],
            "timestamp": _now(),
        })
        analyze(session)
        snapshot(session)
        payload = state_payload(session)
        payload["diff"] = change
        return payload

    @app.post("/api/sessions/{sid}/proposals/{pid}/accept")
    async def accept(sid: str, pid: str):
        return decide(sid, pid, "accepted")

    @app.post("/api/sessions/{sid}/proposals/{pid}/reject")
    async def reject(sid: str, pid: str):
        return decide(sid, pid, "rejected")

    @app.get("/api/sessions/{sid}/export")
    async def export(sid: str, format: str = "pidg"):
        session = session_or_none(sid)
        if session is None:
            return error(404, f"unknown session {sid!r}")
        if format == "pidg":
            return Response(serialize_graph(session.graph),
                            media_type="application/json")
        if format == "dot":
            changes = diff(session.initial_graph, session.graph)
            return PlainTextResponse(export_dot(session.graph, changes),
                                     media_type="text/vnd.graphviz")
        if format == "report-json":
            report = session_report(session)
            return Response(render_json(report), media_type="application/json")
        return error(400, f"unknown export format {format!r}")

    def session_report(session: _Session) -> RunReport:
        records = list(session.applied_records)
        for proposal in session.proposals:
            rule = rules_by_id[proposal["ruleId"]]
            match = Match(dict(proposal["match"]["nodes"]),
                          dict(proposal["match"]["edges"]))
            _, record = apply_match(rule, match, session.graph)
            record.status = "proposed"
            records.append(record)
        return RunReport(
            mode="interactive",
            recommendation_threshold="consideration",
            milestone_filter=None,
            graph_metadata=dict(sorted(session.initial_graph.metadata.items())),
            nodes_before=session.initial_graph.node_count,
            edges_before=session.initial_graph.edge_count,
            nodes_after=session.graph.node_count,
            edges_after=session.graph.edge_count,
            records=records,
            per_rule_ms=session.per_rule_ms,
            total_ms=session.total_ms,
        )

    @app.get("/api/rules")
    async def get_rules():
        return {
            "rules": [
                {
                    "id": r.meta.id,
                    "order": r.meta.order,
                    "milestone": r.meta.milestone,
                    "description": r.meta.description,
                    "explanation": r.meta.explanation,
                    "recommendation": r.meta.recommendation,
                    "missingComponent": r.meta.missing_component,
                    "source": r.meta.source,
                }
                for r in sorted(rule_set, key=lambda r: (r.meta.order, r.meta.id))
            ]
        }

    resolved_ui = Path(ui_dir) if ui_dir else Path("frontend/dist")
    if resolved_ui.is_dir():
        app.mount("/", StaticFiles(directory=str(resolved_ui), html=True), name="ui")

    return app

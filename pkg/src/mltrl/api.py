"""Local HTTP service over one project directory.

Every response carries the event-log horizon (``seq_horizon``) it was computed
at. Mutating endpoints run through the same store command path as the CLI, so
both produce byte-identical events. Dry runs use the same request body plus
``?dry_run=true``.
"""

from __future__ import annotations

import asyncio
import json
from datetime import datetime
from pathlib import Path

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse

from . import analytics, cards, engine
from .core import UTC, parse_utc
from .engine import ChecklistEntry, ReviewDecision
from .errors import (
    BindFailure,
    Conflict,
    Integrity,
    LintFailure,
    MltrlError,
    NotFound,
    SeqAhead,
    ValidationFailed,
)
from .events import ProjectStore


def _status_for(exc: MltrlError) -> int:
    if isinstance(exc, NotFound):
        return 404
    if isinstance(exc, Conflict):
        return 409
    if isinstance(exc, ValidationFailed):
        return 422
    if isinstance(exc, Integrity):
        return 500
    return 500


def _now_from(body: dict | None) -> datetime:
    if body and body.get("at"):
        return parse_utc(body["at"])
    return datetime.now(UTC)


def create_app(project_dir: Path | str) -> FastAPI:
    store = ProjectStore(project_dir)
    app = FastAPI(title="mltrl", version="0.1.0")

    @app.exception_handler(MltrlError)
    async def _mltrl_error(_request: Request, exc: MltrlError):
        status = _status_for(exc)
        return JSONResponse(
            status_code=status,
            content={"status": status, "code": exc.code, "detail": exc.detail or str(exc)},
        )

    def respond(payload: dict, status_code: int = 200) -> JSONResponse:
        payload["seq_horizon"] = store.horizon()
        return JSONResponse(status_code=status_code, content=payload)

    def state() -> engine.Project:
        return store.current_state()

    def mutate(command, body: dict | None) -> list:
        return store.run_command(command, now=_now_from(body), holder="api")

    # -- reads ------------------------------------------------------------------

    @app.get("/v1/project")
    def get_project():
        current = state()
        try:
            trl = engine.system_trl(current).value
        except MltrlError:
            trl = None
        return respond(
            {
                "id": current.id,
                "name": current.name,
                "system_trl": trl,
                "components": [
                    {
                        "id": c.id,
                        "name": c.name,
                        "level": c.current_level.value,
                        "status": c.status.value,
                    }
                    for c in sorted(current.components.values(), key=lambda c: c.id)
                ],
                "people": [current.people[k].to_dict() for k in sorted(current.people)],
                "stakeholder_roles": sorted(r.value for r in current.stakeholder_roles),
            }
        )

    @app.get("/v1/components")
    def list_components():
        current = state()
        return respond(
            {"components": [current.components[k].to_dict() for k in sorted(current.components)]}
        )

    @app.get("/v1/components/{component_id}")
    def get_component(component_id: str):
        return respond({"component": state().component(component_id).to_dict()})

    @app.get("/v1/components/{component_id}/card")
    def get_card(component_id: str, format: str = Query("json")):
        current = state()
        assembled = cards.assemble_card(current, component_id, prior=_prior_card(component_id))
        if format == "markdown":
            return PlainTextResponse(cards.render_markdown(assembled))
        return respond({"card": assembled.to_dict()})

    def _prior_card(component_id: str) -> cards.TrlCard | None:
        path = store.cards_dir / f"{component_id}.md"
        if not path.is_file():
            return None
        return cards.parse_card(path.read_text(encoding="utf-8"))

    @app.get("/v1/risks")
    def get_risks():
        from .risk import build_matrix

        current = state()
        entries = [current.risks[k].to_dict() for k in sorted(current.risks)]
        matrix = build_matrix(list(current.risks.values()))
        return respond({"risks": entries, "matrix": matrix.to_dict()})

    @app.get("/v1/analytics/time-per-level")
    def analytics_dwells():
        log = store.read_events()
        return respond({"dwells": [d.to_dict() for d in analytics.time_per_level(log)]})

    @app.get("/v1/analytics/paths")
    def analytics_paths():
        log = store.read_events()
        return respond({"paths": analytics.histogram_rows(analytics.path_histogram(log))})

    @app.get("/v1/analytics/okr")
    def analytics_okr(now: str | None = Query(None)):
        log = store.read_events()
        targets = [
            analytics.OkrTarget(
                component_ref=t["component"],
                target_level=int(t["target_level"]),
                deadline=parse_utc(t["deadline"]),
            )
            for t in store.read_config().get("okr_targets", [])
        ]
        moment = parse_utc(now) if now else datetime.now(UTC)
        return respond({"okr": [t.to_dict() for t in analytics.okr_status(log, targets, moment)]})

    @app.get("/v1/analytics/bottlenecks")
    def analytics_bottlenecks():
        log = store.read_events()
        return respond({"bottlenecks": [r.to_dict() for r in analytics.bottleneck_report([log])]})

    # -- event stream --------------------------------------------------------------

    @app.get("/v1/events")
    async def get_events(since: int = Query(0), follow: bool = Query(False)):
        horizon = store.horizon()
        if since > horizon:
            raise SeqAhead(f"since={since} is ahead of horizon {horizon}")
        if not follow:
            events = [e.to_dict() for e in store.read_events() if e.seq > since]
            return respond({"events": events})

        async def tail():
            cursor = since
            while True:
                events = store.read_events()
                for event in events:
                    if event.seq > cursor:
                        cursor = event.seq
                        yield json.dumps(event.to_dict(), sort_keys=True) + "\n"
                await asyncio.sleep(0.2)

        return StreamingResponse(tail(), media_type="application/x-ndjson")

    # -- mutations --------------------------------------------------------------------

    @app.post("/v1/components")
    def post_component(body: dict = Body(...)):
        cell: dict = {}

        def command(current):
            drafts, component_id = engine.register_component(
                current,
                name=body["name"],
                entry_level=int(body["entry_level"]),
                justification=body.get("justification", ""),
                owners=body.get("owners", []),
                override_entry=bool(body.get("override_entry", False)),
            )
            cell["id"] = component_id
            return drafts

        appended = mutate(command, body)
        return respond(
            {"component_id": cell["id"], "seq": appended[-1].seq}, status_code=201
        )

    @app.post("/v1/components/{component_id}/reviews")
    def post_review(component_id: str, body: dict = Body(...)):
        checklist = {
            key: ChecklistEntry(
                passed=bool(value["passed"] if isinstance(value, dict) else value),
                note=value.get("note", "") if isinstance(value, dict) else "",
            )
            for key, value in body.get("checklist", {}).items()
        }
        decision = ReviewDecision(
            kind=body["decision"],
            reasons=tuple(body.get("reasons", [])),
            to_level=body.get("to_level"),
        )
        now = _now_from(body)
        cell: dict = {}

        def command(current):
            drafts, gate = engine.record_review(
                current,
                component_id,
                panel=body.get("panel", []),
                ethics_checklist_ref=body.get("ethics_checklist_ref", ""),
                checklist=checklist,
                decision=decision,
                reviewed_at=now,
                postmortem_done=bool(body.get("postmortem_done", False)),
                expected_gate_level=body.get("gate_level"),
            )
            cell["gate"] = gate
            return drafts

        appended = store.run_command(command, now=now, holder="api")
        return respond({"gate": cell["gate"].to_dict(), "seq": appended[-1].seq})

    @app.post("/v1/components/{component_id}/switchbacks")
    def post_switchback(component_id: str, body: dict = Body(...), dry_run: bool = Query(False)):
        if dry_run:
            result = engine.simulate_switchback(
                state(),
                component_id,
                kind=body["kind"],
                to_level=int(body.get("to_level", body.get("to", -1))),
                reason=body.get("reason", ""),
                review_ref=body.get("review_ref"),
            )
            return respond({"simulation": result.to_dict(), "dry_run": True})

        cell: dict = {}

        def command(current):
            drafts, request, warnings = engine.apply_switchback(
                current,
                component_id,
                kind=body["kind"],
                to_level=int(body.get("to_level", body.get("to", -1))),
                reason=body.get("reason", ""),
                review_ref=body.get("review_ref"),
            )
            cell["request"] = request
            cell["warnings"] = warnings
            return drafts

        appended = mutate(command, body)
        return respond(
            {
                "switchback": cell["request"].to_dict(),
                "warnings": cell["warnings"],
                "seq": appended[-1].seq,
            }
        )

    @app.post("/v1/components/{component_id}/decisions")
    def post_decision(component_id: str, body: dict = Body(...)):
        now = _now_from(body)
        appended = store.run_command(
            lambda current: engine.record_key_decision(
                current,
                component_id,
                level=int(body["level"]),
                choice=body["choice"],
                rationale=body.get("rationale", ""),
                at=now,
            ),
            now=now,
            holder="api",
        )
        return respond({"seq": appended[-1].seq})

    @app.post("/v1/components/{component_id}/deliverables")
    def post_deliverable(component_id: str, body: dict = Body(...)):
        appended = mutate(
            lambda current: engine.set_deliverable(
                current,
                component_id,
                level=int(body["level"]),
                key=body["key"],
                done=bool(body["done"]),
                evidence=body.get("evidence", ""),
                description=body.get("description"),
            ),
            body,
        )
        return respond({"seq": appended[-1].seq})

    @app.post("/v1/components/{component_id}/requirements")
    def post_requirement(component_id: str, body: dict = Body(...)):
        appended = mutate(
            lambda current: engine.add_requirement(
                current,
                component_id,
                requirement_id=body["id"],
                kind=body["kind"],
                statement=body.get("statement", ""),
                verification=body.get("verification", []),
                validation=body.get("validation", []),
            ),
            body,
        )
        return respond({"seq": appended[-1].seq}, status_code=201)

    @app.patch("/v1/components/{component_id}/requirements/{requirement_id}")
    def patch_requirement(component_id: str, requirement_id: str, body: dict = Body(...)):
        appended = mutate(
            lambda current: engine.update_requirement(
                current,
                component_id,
                requirement_id,
                status=body.get("status"),
                add_verification=body.get("add_verification", []),
                add_validation=body.get("add_validation", []),
                verification_done=body.get("verification_done", []),
                validation_done=body.get("validation_done", []),
            ),
            body,
        )
        return respond({"seq": appended[-1].seq})

    @app.post("/v1/risks")
    def post_risk(body: dict = Body(...)):
        cell: dict = {}

        def command(current):
            drafts, risk_id = engine.add_risk(
                current,
                requirement_ref=body["requirement_ref"],
                p_failure=body["p_failure"],
                value=int(body["value"]),
                mitigation=body.get("mitigation", ""),
                risk_id=body.get("id"),
            )
            cell["id"] = risk_id
            return drafts

        appended = mutate(command, body)
        return respond({"risk_id": cell["id"], "seq": appended[-1].seq}, status_code=201)

    @app.post("/v1/components/{component_id}/versions")
    def post_version(component_id: str, body: dict = Body(...)):
        appended = mutate(
            lambda current: engine.bump_component_version(
                current, component_id, part=body["part"], kind=body["kind"]
            ),
            body,
        )
        return respond({"seq": appended[-1].seq})

    @app.post("/v1/components/{component_id}/status")
    def post_status(component_id: str, body: dict = Body(...)):
        appended = mutate(
            lambda current: engine.set_component_status(
                current, component_id, status=body["status"], reason=body.get("reason", "")
            ),
            body,
        )
        return respond({"seq": appended[-1].seq})

    return app


def serve_forever(
    project_dir: Path | str,
    host: str = "127.0.0.1",
    port: int = 7341,
    allow_remote: bool = False,
) -> None:
    """Lint the project, then serve until interrupted."""
    import uvicorn

    if host not in ("127.0.0.1", "localhost", "::1") and not allow_remote:
        raise BindFailure(f"refusing to bind {host!r} without --allow-remote")
    store = ProjectStore(project_dir)
    findings = store.lint()
    if findings:
        raise LintFailure("; ".join(findings))
    uvicorn.run(create_app(project_dir), host=host, port=port, log_level="warning")

"""Git-style command line operating on a project directory.

The project directory is picked up from ``--project-dir``, the
``MLTRL_PROJECT_DIR`` environment variable, or the working directory, in that
order. Exit codes: 0 success, 1 validation or gate failure, 2 I/O or
integrity error. Mutating commands accept ``--at`` to pin the event
timestamp, which keeps scripted histories reproducible.
"""

from __future__ import annotations

import functools
import json
import os
import shlex
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import click

from . import analytics, cards, engine
from .core import UTC, parse_utc
from .engine import ChecklistEntry, ReviewDecision
from .errors import (
    Conflict,
    Integrity,
    MltrlError,
    NotFound,
    ScriptNotFound,
    StepFailed,
    ValidationFailed,
)
from .events import ProjectStore

ENV_PROJECT_DIR = "MLTRL_PROJECT_DIR"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


@dataclass
class CommandResult:
    exit_code: int
    stdout_payload: str
    findings: list = field(default_factory=list)


def _exit_code_for(exc: MltrlError) -> int:
    if isinstance(exc, (Conflict, Integrity)):
        return EXIT_IO
    if isinstance(exc, (ValidationFailed, NotFound)):
        return EXIT_VALIDATION
    return EXIT_IO


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MltrlError as exc:
            click.echo(f"error: {exc.code}: {exc.detail or exc}", err=True)
            raise SystemExit(_exit_code_for(exc))
        except OSError as exc:
            click.echo(f"error: StorageError: {exc}", err=True)
            raise SystemExit(EXIT_IO)

    return wrapper


def project_dir_from(ctx_dir: str | None) -> Path:
    if ctx_dir:
        return Path(ctx_dir)
    env = os.environ.get(ENV_PROJECT_DIR)
    if env:
        return Path(env)
    return Path.cwd()


def _store(ctx_dir: str | None) -> ProjectStore:
    return ProjectStore(project_dir_from(ctx_dir))


def _now(at: str | None) -> datetime:
    return parse_utc(at) if at else datetime.now(UTC)


def _emit_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))


def _opt_project_dir(fn):
    return click.option(
        "--project-dir", default=None, metavar="DIR", help="Project directory."
    )(fn)


def _opt_at(fn):
    return click.option("--at", default=None, metavar="ISO8601", help="Event timestamp (UTC).")(fn)


def _opt_format(fn):
    return click.option(
        "--format", "fmt", type=click.Choice(["table", "json"]), default="table"
    )(fn)


@click.group()
@click.version_option(version="0.1.0", prog_name="mltrl")
def cli():
    """Readiness-level lifecycle tracking for ML technologies."""


# -- init ------------------------------------------------------------------------


@cli.command()
@click.argument("directory", metavar="DIR")
@click.option("--name", default=None, help="Project name (defaults to the directory name).")
@click.option("--config", "config_path", default=None, metavar="PATH",
              help="Seed mltrl.config.json from this file.")
@_opt_at
@handle_errors
def init(directory: str, name: str | None, config_path: str | None, at: str | None):
    """Create a new project directory."""
    target = Path(directory)
    env = os.environ.get(ENV_PROJECT_DIR)
    if not target.is_absolute() and env:
        target = (Path(env) / target).resolve()
    config = None
    if config_path:
        config = json.loads(Path(config_path).read_text(encoding="utf-8"))
    resolved_name = name or target.resolve().name
    store = ProjectStore.init(target, name=resolved_name, now=_now(at), config=config)
    click.echo(f"initialized project {resolved_name!r} at {store.root}")


# -- component -------------------------------------------------------------------


@cli.group()
def component():
    """Register and manage tracked technologies."""


@component.command("add")
@click.option("--name", required=True)
@click.option("--entry-level", type=int, required=True)
@click.option("--justification", default="")
@click.option("--override-entry", is_flag=True, default=False,
              help="Allow entry above the configured maximum level.")
@click.option("--owners", default="", metavar="ID,ID",
              help="Comma-separated person ids.")
@_opt_project_dir
@_opt_at
@handle_errors
def component_add(name, entry_level, justification, override_entry, owners, project_dir, at):
    """Start tracking a technology at its entry level."""
    owner_ids = [o for o in owners.split(",") if o]
    cell: dict = {}

    def command(state):
        drafts, component_id = engine.register_component(
            state, name=name, entry_level=entry_level, justification=justification,
            owners=owner_ids, override_entry=override_entry,
        )
        cell["id"] = component_id
        return drafts

    _store(project_dir).run_command(command, now=_now(at))
    click.echo(f"registered component {cell['id']} at level {entry_level}")


@component.command("resume")
@click.option("--component", "component_id", required=True)
@click.option("--reason", default="")
@_opt_project_dir
@_opt_at
@handle_errors
def component_resume(component_id, reason, project_dir, at):
    """Resume a paused component at its current level."""
    _store(project_dir).run_command(
        lambda state: engine.set_component_status(state, component_id, "active", reason),
        now=_now(at),
    )
    click.echo(f"component {component_id} active")


@component.command("retire")
@click.option("--component", "component_id", required=True)
@click.option("--reason", default="")
@_opt_project_dir
@_opt_at
@handle_errors
def component_retire(component_id, reason, project_dir, at):
    """Retire a component; it stops counting toward the system level."""
    _store(project_dir).run_command(
        lambda state: engine.set_component_status(state, component_id, "retired", reason),
        now=_now(at),
    )
    click.echo(f"component {component_id} retired")


# -- deliverables ------------------------------------------------------------------


@cli.group()
def deliverable():
    """Track gate deliverables."""


@deliverable.command("set")
@click.option("--component", "component_id", required=True)
@click.option("--level", type=int, required=True)
@click.option("--key", required=True)
@click.option("--done", type=click.BOOL, required=True)
@click.option("--evidence", default="", metavar="URI")
@click.option("--description", default=None)
@_opt_project_dir
@_opt_at
@handle_errors
def deliverable_set(component_id, level, key, done, evidence, description, project_dir, at):
    """Mark a deliverable done (with evidence) or reopen it."""
    _store(project_dir).run_command(
        lambda state: engine.set_deliverable(
            state, component_id, level, key, done, evidence, description
        ),
        now=_now(at),
    )
    click.echo(f"deliverable {key}@{level} {'done' if done else 'open'}")


# -- requirements ---------------------------------------------------------------------


@cli.group()
def requirement():
    """Requirements with verification and validation tracking."""


@requirement.command("add")
@click.option("--component", "component_id", required=True)
@click.option("--id", "requirement_id", required=True)
@click.option("--kind", type=click.Choice(["research", "product"]), required=True)
@click.option("--statement", required=True)
@click.option("--verification", multiple=True, help="Verification measure (repeatable).")
@click.option("--validation", multiple=True, help="Validation step (repeatable).")
@_opt_project_dir
@_opt_at
@handle_errors
def requirement_add(component_id, requirement_id, kind, statement, verification, validation,
                    project_dir, at):
    """Add a requirement to a component."""
    _store(project_dir).run_command(
        lambda state: engine.add_requirement(
            state, component_id, requirement_id, kind, statement,
            list(verification), list(validation),
        ),
        now=_now(at),
    )
    click.echo(f"requirement {requirement_id} added")


@requirement.command("update")
@click.option("--component", "component_id", required=True)
@click.option("--id", "requirement_id", required=True)
@click.option("--status", default=None,
              type=click.Choice(["open", "verified", "validated", "complete"]))
@click.option("--add-verification", multiple=True)
@click.option("--add-validation", multiple=True)
@click.option("--verify-done", type=int, multiple=True, metavar="INDEX")
@click.option("--validate-done", type=int, multiple=True, metavar="INDEX")
@_opt_project_dir
@_opt_at
@handle_errors
def requirement_update(component_id, requirement_id, status, add_verification, add_validation,
                       verify_done, validate_done, project_dir, at):
    """Advance a requirement: add V&V items, mark them done, move status."""
    _store(project_dir).run_command(
        lambda state: engine.update_requirement(
            state, component_id, requirement_id, status=status,
            add_verification=list(add_verification), add_validation=list(add_validation),
            verification_done=list(verify_done), validation_done=list(validate_done),
        ),
        now=_now(at),
    )
    click.echo(f"requirement {requirement_id} updated")


# -- risks ---------------------------------------------------------------------------


@cli.group()
def risk():
    """Quantified requirement risks."""


@risk.command("add")
@click.option("--requirement", "requirement_ref", required=True)
@click.option("--p", "p_failure", required=True)
@click.option("--value", type=int, required=True)
@click.option("--mitigation", default="")
@click.option("--id", "risk_id", default=None)
@_opt_project_dir
@_opt_at
@handle_errors
def risk_add(requirement_ref, p_failure, value, mitigation, risk_id, project_dir, at):
    """Attach a p(failure) x value risk to a requirement."""
    cell: dict = {}

    def command(state):
        drafts, rid = engine.add_risk(state, requirement_ref, p_failure, value, mitigation, risk_id)
        cell["id"] = rid
        return drafts

    _store(project_dir).run_command(command, now=_now(at))
    click.echo(f"risk {cell['id']} added")


@risk.command("update")
@click.option("--id", "risk_id", required=True)
@click.option("--p", "p_failure", default=None)
@click.option("--value", type=int, default=None)
@click.option("--status", default=None, type=click.Choice(["open", "mitigated", "accepted"]))
@click.option("--mitigation", default=None)
@_opt_project_dir
@_opt_at
@handle_errors
def risk_update(risk_id, p_failure, value, status, mitigation, project_dir, at):
    """Rescore or resolve a risk entry."""
    _store(project_dir).run_command(
        lambda state: engine.update_risk(state, risk_id, p_failure, value, mitigation, status),
        now=_now(at),
    )
    click.echo(f"risk {risk_id} updated")


@risk.command("matrix")
@_opt_format
@_opt_project_dir
@handle_errors
def risk_matrix(fmt, project_dir):
    """The 5x5 likelihood-by-impact grid over open risks."""
    from .risk import build_matrix, critical_scenarios

    state = _store(project_dir).current_state()
    matrix = build_matrix(list(state.risks.values()))
    if fmt == "json":
        _emit_json({"matrix": matrix.to_dict(), "critical_requirements": critical_scenarios(matrix)})
    else:
        click.echo(matrix.render_text())
        hot = critical_scenarios(matrix)
        if hot:
            click.echo("critical-scenario requirements: " + ", ".join(hot))


# -- decisions -------------------------------------------------------------------------


@cli.group()
def decision():
    """Key decisions at levels 2, 4, 6, and 8."""


@decision.command("record")
@click.option("--component", "component_id", required=True)
@click.option("--level", type=int, required=True)
@click.option("--choice", required=True)
@click.option("--rationale", required=True)
@_opt_project_dir
@_opt_at
@handle_errors
def decision_record(component_id, level, choice, rationale, project_dir, at):
    """Record the level's key decision; graduation is blocked without one."""
    now = _now(at)
    _store(project_dir).run_command(
        lambda state: engine.record_key_decision(state, component_id, level, choice, rationale, now),
        now=now,
    )
    click.echo(f"decision {choice!r} recorded at level {level}")


# -- reviews -----------------------------------------------------------------------------


def _parse_checklist(raw: str) -> dict[str, ChecklistEntry]:
    """Inline JSON or a path to a JSON file: {key: bool | {pass, note}}."""
    text = raw
    if not raw.lstrip().startswith("{"):
        text = Path(raw).read_text(encoding="utf-8")
    data = json.loads(text)
    checklist = {}
    for key, value in data.items():
        if isinstance(value, bool):
            checklist[key] = ChecklistEntry(passed=value)
        else:
            checklist[key] = ChecklistEntry(
                passed=bool(value.get("pass", value.get("passed", False))),
                note=value.get("note", ""),
            )
    return checklist


@cli.group()
def review():
    """Gated reviews."""


@review.command("record")
@click.option("--component", "component_id", required=True)
@click.option("--panel", required=True, metavar="ID,ID,…")
@click.option("--ethics", "ethics_ref", required=True, metavar="URI")
@click.option("--checklist", "checklist_raw", required=True,
              metavar="FILE|JSON", help="Per-deliverable pass/fail map.")
@click.option("--decision", "decision_kind",
              type=click.Choice(["graduate", "hold", "switchback"]), required=True)
@click.option("--to", "to_level", type=int, default=None, help="Switchback target level.")
@click.option("--reason", "reasons", multiple=True)
@click.option("--postmortem-done", is_flag=True, default=False)
@click.option("--gate-level", type=int, default=None,
              help="Fail with StaleGate when the component moved past this level.")
@_opt_format
@_opt_project_dir
@_opt_at
@handle_errors
def review_record(component_id, panel, ethics_ref, checklist_raw, decision_kind, to_level,
                  reasons, postmortem_done, gate_level, fmt, project_dir, at):
    """Record a gated review and apply its decision."""
    checklist = _parse_checklist(checklist_raw)
    decision = ReviewDecision(kind=decision_kind, reasons=tuple(reasons), to_level=to_level)
    now = _now(at)
    cell: dict = {}

    def command(state):
        drafts, gate = engine.record_review(
            state, component_id, panel=[p for p in panel.split(",") if p],
            ethics_checklist_ref=ethics_ref, checklist=checklist, decision=decision,
            reviewed_at=now, postmortem_done=postmortem_done,
            expected_gate_level=gate_level,
        )
        cell["gate"] = gate
        return drafts

    _store(project_dir).run_command(command, now=now)
    gate: engine.GateResult = cell["gate"]
    if fmt == "json":
        _emit_json(gate.to_dict())
    elif gate.outcome == "graduated":
        click.echo(f"graduated to level {gate.new_level}")
    else:
        click.echo(f"review recorded: {gate.outcome}; missing: {', '.join(gate.missing)}")
    if decision_kind == "graduate" and gate.outcome != "graduated":
        raise SystemExit(EXIT_VALIDATION)


# -- switchbacks ------------------------------------------------------------------------


@cli.command()
@click.option("--component", "component_id", required=True)
@click.option("--kind", type=click.Choice(["discovery", "review", "embedded"]), required=True)
@click.option("--to", "to_level", type=int, required=True)
@click.option("--reason", required=True)
@click.option("--review", "review_ref", default=None)
@_opt_project_dir
@_opt_at
@handle_errors
def switchback(component_id, kind, to_level, reason, review_ref, project_dir, at):
    """Dial a component back to a lower level."""
    cell: dict = {}

    def command(state):
        drafts, request, warnings = engine.apply_switchback(
            state, component_id, kind, to_level, reason, review_ref
        )
        cell["request"] = request
        cell["warnings"] = warnings
        return drafts

    _store(project_dir).run_command(command, now=_now(at))
    request: engine.SwitchbackRequest = cell["request"]
    for warning in cell["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"switched back {request.from_level} -> {request.to_level} ({kind})")


# -- simulation ---------------------------------------------------------------------------


@cli.group()
def simulate():
    """Dry runs: inspect outcomes without writing events."""


@simulate.command("graduation")
@click.option("--component", "component_id", required=True)
@_opt_format
@_opt_project_dir
@handle_errors
def simulate_graduation(component_id, fmt, project_dir):
    """What would the gate say right now?"""
    state = _store(project_dir).current_state()
    result = engine.simulate_graduation(state, component_id)
    _print_simulation(result, fmt)


@simulate.command("switchback")
@click.option("--component", "component_id", required=True)
@click.option("--kind", type=click.Choice(["discovery", "review", "embedded"]), required=True)
@click.option("--to", "to_level", type=int, required=True)
@click.option("--reason", default="")
@click.option("--review", "review_ref", default=None)
@_opt_format
@_opt_project_dir
@handle_errors
def simulate_switchback(component_id, kind, to_level, reason, review_ref, fmt, project_dir):
    """Project a switchback: new level, reopened deliverables, system level."""
    state = _store(project_dir).current_state()
    result = engine.simulate_switchback(state, component_id, kind, to_level, reason, review_ref)
    _print_simulation(result, fmt)


def _print_simulation(result: engine.SimulationResult, fmt: str) -> None:
    if fmt == "json":
        _emit_json(result.to_dict())
        return
    if result.error:
        click.echo(f"illegal: {result.error}")
        return
    click.echo(f"outcome: {result.gate.outcome}")
    if result.gate.missing:
        click.echo(f"missing: {', '.join(result.gate.missing)}")
    if result.reopened:
        click.echo(f"reopened: {', '.join(result.reopened)}")
    if result.projected_level is not None:
        click.echo(f"projected level: {result.projected_level}")
    if result.projected_system_trl is not None:
        click.echo(f"projected system trl: {result.projected_system_trl}")


# -- cards -----------------------------------------------------------------------------------


@cli.group()
def card():
    """Report cards."""


def _card_path(store: ProjectStore, component_id: str) -> Path:
    return store.cards_dir / f"{component_id}.md"


def _prior_card(store: ProjectStore, component_id: str) -> cards.TrlCard | None:
    path = _card_path(store, component_id)
    if not path.is_file():
        return None
    return cards.parse_card(path.read_text(encoding="utf-8"))


@card.command("render")
@click.option("--component", "component_id", required=True)
@click.option("--no-write", is_flag=True, default=False, help="Print without saving.")
@_opt_format
@_opt_project_dir
@handle_errors
def card_render(component_id, no_write, fmt, project_dir):
    """Assemble the card from the log and write cards/<id>.md."""
    store = _store(project_dir)
    state = store.current_state()
    assembled = cards.assemble_card(state, component_id, prior=_prior_card(store, component_id))
    text = cards.render_markdown(assembled)
    if not no_write:
        store.cards_dir.mkdir(exist_ok=True)
        _card_path(store, component_id).write_text(text, encoding="utf-8", newline="\n")
    if fmt == "json":
        _emit_json(assembled.to_dict())
    else:
        click.echo(text, nl=False)


@card.command("validate")
@click.option("--component", "component_id", required=True)
@_opt_format
@_opt_project_dir
@handle_errors
def card_validate(component_id, fmt, project_dir):
    """Check the card against the structural rules for its level."""
    store = _store(project_dir)
    state = store.current_state()
    assembled = cards.assemble_card(state, component_id, prior=_prior_card(store, component_id))
    findings = cards.validate_card(assembled)
    if fmt == "json":
        _emit_json({"findings": [f.to_dict() for f in findings]})
    else:
        for finding in findings:
            click.echo(f"{finding.severity}: {finding.code}: {finding.message}")
        if not findings:
            click.echo("card is valid")
    if any(f.severity == "error" for f in findings):
        raise SystemExit(EXIT_VALIDATION)


@card.command("diff")
@click.option("--component", "component_id", required=True)
@_opt_format
@_opt_project_dir
@handle_errors
def card_diff(component_id, fmt, project_dir):
    """Diff the saved card file against a fresh assembly."""
    store = _store(project_dir)
    prior = _prior_card(store, component_id)
    if prior is None:
        click.echo("no saved card to diff against; run card render first", err=True)
        raise SystemExit(EXIT_VALIDATION)
    state = store.current_state()
    assembled = cards.assemble_card(state, component_id, prior=prior)
    changes = cards.diff_cards(prior, assembled)
    if fmt == "json":
        _emit_json({"changes": [c.to_dict() for c in changes]})
    else:
        for change in changes:
            click.echo(f"{change.field}: {change.change}: {change.old!r} -> {change.new!r}")
        if not changes:
            click.echo("no changes")


# -- versions -----------------------------------------------------------------------------------


@cli.group()
def version():
    """Semantic versions of code, model, and data."""


@version.command("bump")
@click.option("--component", "component_id", required=True)
@click.option("--part", type=click.Choice(["code", "model", "data"]), required=True)
@click.option("--kind", type=click.Choice(["major", "minor", "patch"]), required=True)
@_opt_project_dir
@_opt_at
@handle_errors
def version_bump(component_id, part, kind, project_dir, at):
    """Bump one version part."""
    _store(project_dir).run_command(
        lambda state: engine.bump_component_version(state, component_id, part, kind),
        now=_now(at),
    )
    click.echo(f"{part} version bumped ({kind})")


# -- status / report / lint ----------------------------------------------------------------------


@cli.command()
@_opt_format
@_opt_project_dir
@handle_errors
def status(fmt, project_dir):
    """Components, levels, and the system readiness level."""
    store = _store(project_dir)
    state = store.current_state()
    try:
        trl = engine.system_trl(state).value
    except MltrlError:
        trl = None
    rows = [
        {
            "id": c.id,
            "name": c.name,
            "level": c.current_level.value,
            "status": c.status.value,
            "warnings": list(c.warnings),
        }
        for c in sorted(state.components.values(), key=lambda c: c.id)
    ]
    if fmt == "json":
        _emit_json({"components": rows, "system_trl": trl, "seq_horizon": store.horizon()})
        return
    if not rows:
        click.echo("no components registered")
    for row in rows:
        warn = f"  [{', '.join(row['warnings'])}]" if row["warnings"] else ""
        click.echo(f"{row['id']:<24} L{row['level']}  {row['status']}{warn}")
    click.echo(f"system TRL: {trl if trl is not None else '-'}")


@cli.command()
@click.option("--time-per-level", "which", flag_value="time-per-level")
@click.option("--paths", "which", flag_value="paths")
@click.option("--okr", "which", flag_value="okr")
@click.option("--bottlenecks", "which", flag_value="bottlenecks")
@click.option("--now", "now_text", default=None, metavar="ISO8601")
@click.option("--portfolio", "portfolio", multiple=True, metavar="DIR",
              help="Additional project directories (bottleneck reports).")
@_opt_format
@_opt_project_dir
@handle_errors
def report(which, now_text, portfolio, fmt, project_dir):
    """Analytics over the event log."""
    if which is None:
        click.echo("pick one of --time-per-level, --paths, --okr, --bottlenecks", err=True)
        raise SystemExit(EXIT_IO)
    store = _store(project_dir)
    log = store.read_events()
    if which == "time-per-level":
        dwells = [d.to_dict() for d in analytics.time_per_level(log)]
        if fmt == "json":
            _emit_json({"dwells": dwells})
        else:
            for d in dwells:
                dur = f"{d['duration_seconds']:.0f}s" if d["duration_seconds"] is not None else "open"
                click.echo(f"{d['component_ref']:<24} L{d['level']}  {d['entered_at']}  {dur}")
    elif which == "paths":
        rows = analytics.histogram_rows(analytics.path_histogram(log))
        if fmt == "json":
            _emit_json({"paths": rows})
        else:
            for row in rows:
                click.echo(
                    f"{row['from_level']} -> {row['to_level']}  {row['kind']:<10} x{row['count']}"
                )
    elif which == "okr":
        now = parse_utc(now_text) if now_text else datetime.now(UTC)
        targets = [
            analytics.OkrTarget(
                component_ref=t["component"],
                target_level=int(t["target_level"]),
                deadline=parse_utc(t["deadline"]),
            )
            for t in store.read_config().get("okr_targets", [])
        ]
        results = [t.to_dict() for t in analytics.okr_status(log, targets, now)]
        if fmt == "json":
            _emit_json({"okr": results})
        else:
            for row in results:
                click.echo(
                    f"{row['component_ref']:<24} L{row['target_level']} by {row['deadline']}: "
                    f"{row['status']}"
                )
    elif which == "bottlenecks":
        logs = [log]
        for directory in portfolio:
            logs.append(ProjectStore(Path(directory)).read_events())
        rows = [r.to_dict() for r in analytics.bottleneck_report(logs)]
        if fmt == "json":
            _emit_json({"bottlenecks": rows})
        else:
            for row in rows:
                click.echo(
                    f"L{row['level']}  median {row['median_dwell_seconds']:.0f}s  "
                    f"switchback-in rate {row['switchback_in_rate']:.2f}"
                )


@cli.command()
@_opt_format
@_opt_project_dir
@handle_errors
def lint(fmt, project_dir):
    """Verify the event log is canonical and the hash chain intact."""
    findings = _store(project_dir).lint()
    if fmt == "json":
        _emit_json({"findings": findings})
    else:
        for finding in findings:
            click.echo(finding)
        if not findings:
            click.echo("ok")
    if findings:
        raise SystemExit(EXIT_IO)


# -- serve ------------------------------------------------------------------------------------------


@cli.command()
@click.option("--addr", default="127.0.0.1:7341", metavar="HOST:PORT")
@click.option("--allow-remote", is_flag=True, default=False,
              help="Permit binding to a non-loopback address.")
@_opt_project_dir
@handle_errors
def serve(addr, allow_remote, project_dir):
    """Run the HTTP API for the dashboard and external tooling."""
    from .api import serve_forever

    host, _, port_text = addr.partition(":")
    serve_forever(
        project_dir_from(project_dir),
        host=host or "127.0.0.1",
        port=int(port_text or "7341"),
        allow_remote=allow_remote,
    )


# -- scripted scenarios -------------------------------------------------------------------------------


@cli.command("scenario")
@click.argument("action", type=click.Choice(["run"]))
@click.argument("script", metavar="PATH")
@_opt_project_dir
@handle_errors
def scenario(action, script, project_dir):
    """Replay a script of CLI invocations, stopping at the first failure."""
    result = scenario_replay(script, project_dir=project_dir_from(project_dir))
    click.echo(result.stdout_payload, nl=False)


def run(argv: list[str], env: dict[str, str] | None = None) -> CommandResult:
    """Invoke the CLI in-process and capture the outcome."""
    from click.testing import CliRunner

    runner = CliRunner()
    result = runner.invoke(cli, argv, env=env, catch_exceptions=False)
    stdout = result.output
    findings: list = []
    try:
        payload = json.loads(stdout)
        if isinstance(payload, dict) and isinstance(payload.get("findings"), list):
            findings = payload["findings"]
    except (json.JSONDecodeError, ValueError):
        pass
    return CommandResult(exit_code=result.exit_code, stdout_payload=stdout, findings=findings)


def scenario_replay(script_path: str | Path, project_dir: Path | None = None) -> CommandResult:
    """Execute a newline-separated list of CLI invocations in order.

    Lines may reference ``{SCRIPT_DIR}`` and ``{PROJECT_DIR}``; blank lines and
    ``#`` comments are skipped. Raises StepFailed at the first nonzero exit.
    """
    path = Path(script_path)
    if not path.is_file():
        raise ScriptNotFound(str(path))
    project_dir = Path(project_dir) if project_dir else Path.cwd()
    env = {ENV_PROJECT_DIR: str(project_dir)}
    outputs: list[str] = []
    last = CommandResult(exit_code=0, stdout_payload="")
    for line_no, raw_line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        line = line.replace("{SCRIPT_DIR}", str(path.parent.resolve()))
        line = line.replace("{PROJECT_DIR}", str(project_dir))
        argv = shlex.split(line)
        if argv and argv[0] == "mltrl":
            argv = argv[1:]
        last = run(argv, env=env)
        outputs.append(last.stdout_payload)
        if last.exit_code != 0:
            raise StepFailed(line_no, f"{line!r} exited {last.exit_code}")
    return CommandResult(exit_code=0, stdout_payload="".join(outputs), findings=last.findings)


def main() -> None:
    cli(prog_name="mltrl")


if __name__ == "__main__":
    main()

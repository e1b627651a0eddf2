"""Shared builders: in-memory projects driven through the real command layer."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from mltrl import engine
from mltrl.engine import ChecklistEntry, ReviewDecision

FIXTURES = Path(__file__).parent / "fixtures"

PEOPLE = [
    {"id": "lead", "name": "Research Lead", "roles": ["ResearchLead", "Researcher"]},
    {"id": "ana", "name": "Ana", "roles": ["Researcher"]},
    {"id": "ben", "name": "Ben", "roles": ["Researcher"]},
    {"id": "cam", "name": "Cam", "roles": ["AppliedAI"]},
    {"id": "dev", "name": "Dev", "roles": ["Engineering"]},
    {"id": "ifr", "name": "Ifr", "roles": ["Infrastructure"]},
    {"id": "pm", "name": "Pm", "roles": ["ProductManager"]},
    {"id": "qa", "name": "Qa", "roles": ["QA"]},
    {"id": "dom", "name": "Dom", "roles": ["DomainExpert"]},
    {"id": "stk", "name": "Stk", "roles": ["Stakeholder"]},
]

STAKEHOLDER_ROLES = ["ResearchLead", "ProductManager", "QA", "Stakeholder"]

FULL_PANEL = ["lead", "pm", "qa", "stk"]

PANELS = {
    0: ["lead"],
    1: ["ana", "ben"],
    2: ["ana", "ben"],
    3: ["cam", "dev"],
    4: ["pm", "cam"],
    5: ["pm", "lead"],
    6: ["pm", "dev"],
    7: ["ifr", "cam", "qa"],
    8: FULL_PANEL,
    9: FULL_PANEL,
}

DECISION_CHOICES = {2: "proceed_prototype", 4: "proceed", 6: "deployment_setting:cloud", 8: "go"}

BASE_CONFIG = {"people": PEOPLE, "stakeholder_roles": STAKEHOLDER_ROLES}

T0 = datetime(2026, 1, 1, tzinfo=timezone.utc)


class Clock:
    """Deterministic, strictly increasing timestamps."""

    def __init__(self, start: datetime = T0, step: timedelta = timedelta(hours=1)):
        self.now = start
        self.step = step

    def tick(self) -> datetime:
        stamp = self.now
        self.now += self.step
        return stamp


def apply_drafts(state: engine.Project, drafts, at: datetime) -> None:
    for draft in drafts:
        engine.apply_event(state, draft.kind, draft.payload, at)


def run_command(state: engine.Project, drafts_result, at: datetime):
    """Apply command output (drafts or (drafts, extra)) and return the extra."""
    if isinstance(drafts_result, tuple):
        drafts, *rest = drafts_result
    else:
        drafts, rest = drafts_result, []
    apply_drafts(state, drafts, at)
    return rest[0] if rest else None


def make_project(config: dict | None = None) -> engine.Project:
    state = engine.new_project("proj", "proj", T0)
    apply_drafts(state, engine.apply_config(state, config or BASE_CONFIG), T0)
    return state


def register(state: engine.Project, clock: Clock, name: str = "demo model",
             entry_level: int = 0, justification: str = "reused, validated on our data",
             owners: list[str] | None = None, override_entry: bool = False) -> str:
    drafts, component_id = engine.register_component(
        state, name=name, entry_level=entry_level,
        justification=justification if entry_level > 0 else "",
        owners=owners if owners is not None else ["lead"],
        override_entry=override_entry,
    )
    apply_drafts(state, drafts, clock.tick())
    return component_id


def finish_deliverables(state: engine.Project, clock: Clock, component_id: str,
                        level: int) -> None:
    spec = state.level_specs()[level]
    for key in spec.required_deliverables:
        drafts = engine.set_deliverable(
            state, component_id, level, key, True, evidence=f"https://wiki/{level}/{key}"
        )
        apply_drafts(state, drafts, clock.tick())


def record_decision(state: engine.Project, clock: Clock, component_id: str, level: int,
                    choice: str | None = None) -> None:
    at = clock.tick()
    drafts = engine.record_key_decision(
        state, component_id, level, choice or DECISION_CHOICES[level], "gate decision", at
    )
    apply_drafts(state, drafts, at)


def checklist_for(state: engine.Project, level: int, fail: set[str] | None = None,
                  omit: set[str] | None = None) -> dict[str, ChecklistEntry]:
    spec = state.level_specs()[level]
    return {
        key: ChecklistEntry(passed=key not in (fail or set()))
        for key in spec.required_deliverables
        if key not in (omit or set())
    }


def graduate_once(state: engine.Project, clock: Clock, component_id: str,
                  postmortem_done: bool = True) -> engine.GateResult:
    level = state.component(component_id).current_level.value
    at = clock.tick()
    drafts, gate = engine.record_review(
        state, component_id, panel=PANELS[level],
        ethics_checklist_ref=f"https://ethics/{level}",
        checklist=checklist_for(state, level),
        decision=ReviewDecision(kind="graduate"),
        reviewed_at=at, postmortem_done=postmortem_done,
    )
    apply_drafts(state, drafts, at)
    return gate


def add_complete_requirement(state: engine.Project, clock: Clock, component_id: str,
                             requirement_id: str, kind: str = "research") -> None:
    drafts = engine.add_requirement(
        state, component_id, requirement_id, kind, "stated need",
        verification=["measure"], validation=["step"],
    )
    apply_drafts(state, drafts, clock.tick())
    drafts = engine.update_requirement(
        state, component_id, requirement_id, status="complete",
        verification_done=[0], validation_done=[0],
    )
    apply_drafts(state, drafts, clock.tick())


def advance_to(state: engine.Project, clock: Clock, component_id: str, target: int) -> None:
    """March a component up to ``target`` through fully passing gates."""
    def complete_existing(only_research: bool) -> None:
        for rid, req in list(component.requirements.items()):
            if only_research and req.kind.value != "research":
                continue
            if req.status.value != "complete":
                drafts = engine.update_requirement(
                    state, component_id, rid, status="complete",
                    verification_done=list(range(len(req.verification))),
                    validation_done=list(range(len(req.validation))),
                )
                apply_drafts(state, drafts, clock.tick())

    component = state.component(component_id)
    while component.current_level.value < target:
        level = component.current_level.value
        finish_deliverables(state, clock, component_id, level)
        if level == 5:
            complete_existing(only_research=True)
        if level == 8:
            complete_existing(only_research=False)
        if level in DECISION_CHOICES and component.decision_at(level) is None:
            record_decision(state, clock, component_id, level)
        gate = graduate_once(state, clock, component_id)
        assert gate.outcome == "graduated", f"stuck at {level}: {gate.missing}"


def component_at(level: int, entry_level: int = 0) -> tuple[engine.Project, str, Clock]:
    """A fresh project with one fully-gated component sitting at ``level``."""
    state = make_project()
    clock = Clock()
    override = entry_level > 4
    component_id = register(state, clock, entry_level=entry_level, override_entry=override)
    advance_to(state, clock, component_id, level)
    return state, component_id, clock


@pytest.fixture
def project_state() -> engine.Project:
    return make_project()


@pytest.fixture
def clock() -> Clock:
    return Clock()

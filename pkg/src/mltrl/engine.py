"""The lifecycle state machine.

State is only ever changed by folding events (``apply_event``); command
functions validate a request against the current state and return the event
drafts to append. Replaying the same log therefore always rebuilds the same
state, and a dry run is just a command applied to a throwaway copy.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Decimal

from .core import (
    KEY_DECISION_LEVELS,
    BumpKind,
    ComponentStatus,
    DeliverableItem,
    KeyDecision,
    Person,
    ReadinessLevel,
    Requirement,
    RequirementKind,
    RequirementStatus,
    ReviewSummary,
    Role,
    TechComponent,
    Transition,
    VersionPart,
    VersionTriplet,
    VnvItem,
    bump_version,
    canonical_json,
    digest_of,
    format_utc,
    key_decision_choice_ok,
    level_from_int,
    parse_utc,
    requirement_complete,
    role_from_name,
    slugify,
    status_rank,
)
from .errors import (
    ChecklistIncomplete,
    ComponentPaused,
    ComponentRetired,
    DomainError,
    DuplicateComponent,
    DuplicateRequirement,
    DuplicateRisk,
    EmptyProject,
    EntryTooHigh,
    EthicsMissing,
    IllegalEmbeddedPath,
    InvalidChoice,
    InvalidConfig,
    MissingJustification,
    MissingReviewRef,
    NoHigherLevel,
    NotDeployed,
    PanelViolation,
    RequirementLevelBound,
    SkipAttempt,
    StaleGate,
    StatusRegression,
    UnknownComponent,
    UnknownEventKind,
    UnknownPerson,
    UnknownRequirement,
    UnknownReview,
    UnknownRisk,
    UpwardSwitchback,
    WrongLevel,
)
from .levels import LevelSpec, apply_spec_overrides, deliverable_description, validate_panel
from .risk import RiskEntry, RiskStatus

EVENT_KINDS = (
    "EntryRegistered",
    "ReviewRecorded",
    "Graduated",
    "SwitchedBack",
    "KeyDecisionRecorded",
    "DeliverableUpdated",
    "RequirementUpdated",
    "RiskUpdated",
    "VersionBumped",
    "StatusChanged",
    "ConfigOverridden",
)

SWITCHBACK_KINDS = ("discovery", "review", "embedded")

DEFAULT_MAX_ENTRY_LEVEL = 4


@dataclass(frozen=True)
class EventDraft:
    """An event proposed by a command, before seq/hash assignment."""

    kind: str
    component_ref: str | None
    payload: dict


@dataclass(frozen=True)
class GateResult:
    """Outcome of a gate check; graduated iff nothing is missing."""

    outcome: str  # graduated | rejected
    missing: tuple[str, ...] = ()
    new_level: int | None = None

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "missing": list(self.missing),
            "new_level": self.new_level,
        }


@dataclass(frozen=True)
class ReviewDecision:
    kind: str  # graduate | hold | switchback
    reasons: tuple[str, ...] = ()
    to_level: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "reasons": list(self.reasons), "to_level": self.to_level}

    @classmethod
    def from_dict(cls, data: dict) -> "ReviewDecision":
        return cls(
            kind=data["kind"],
            reasons=tuple(data.get("reasons", [])),
            to_level=data.get("to_level"),
        )


@dataclass(frozen=True)
class ChecklistEntry:
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {"passed": self.passed, "note": self.note}


@dataclass(frozen=True)
class ReviewRecord:
    """A gated review: panel, per-deliverable checks, ethics, decision."""

    id: str
    component: str
    gate_level: int
    panel: tuple[str, ...]
    checklist: dict[str, ChecklistEntry]
    ethics_checklist_ref: str
    decision: ReviewDecision
    postmortem_done: bool
    reviewed_at: datetime

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "component": self.component,
            "gate_level": self.gate_level,
            "panel": list(self.panel),
            "checklist": {k: self.checklist[k].to_dict() for k in sorted(self.checklist)},
            "ethics_checklist_ref": self.ethics_checklist_ref,
            "decision": self.decision.to_dict(),
            "postmortem_done": self.postmortem_done,
            "reviewed_at": format_utc(self.reviewed_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReviewRecord":
        return cls(
            id=data["id"],
            component=data["component"],
            gate_level=int(data["gate_level"]),
            panel=tuple(data["panel"]),
            checklist={
                k: ChecklistEntry(passed=bool(v["passed"]), note=v.get("note", ""))
                for k, v in data["checklist"].items()
            },
            ethics_checklist_ref=data["ethics_checklist_ref"],
            decision=ReviewDecision.from_dict(data["decision"]),
            postmortem_done=bool(data.get("postmortem_done", False)),
            reviewed_at=parse_utc(data["reviewed_at"]),
        )


@dataclass(frozen=True)
class SwitchbackRequest:
    kind: str
    component: str
    from_level: int
    to_level: int
    reason: str
    review_ref: str | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "component": self.component,
            "from_level": self.from_level,
            "to_level": self.to_level,
            "reason": self.reason,
            "review_ref": self.review_ref,
        }


@dataclass(frozen=True)
class SimulationResult:
    """Dry-run projection; illegal actions come back as data, not exceptions."""

    gate: GateResult
    reopened: tuple[str, ...] = ()
    projected_level: int | None = None
    projected_system_trl: int | None = None
    warnings: tuple[str, ...] = ()
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "gate": self.gate.to_dict(),
            "reopened": list(self.reopened),
            "projected_level": self.projected_level,
            "projected_system_trl": self.projected_system_trl,
            "warnings": list(self.warnings),
            "error": self.error,
        }


# -- project state ----------------------------------------------------------------


@dataclass
class Project:
    """Aggregate state replayed from the event log."""

    id: str
    name: str
    created_at: datetime
    components: dict[str, TechComponent] = field(default_factory=dict)
    people: dict[str, Person] = field(default_factory=dict)
    stakeholder_roles: frozenset[Role] = frozenset()
    risks: dict[str, RiskEntry] = field(default_factory=dict)
    reviews: dict[str, ReviewRecord] = field(default_factory=dict)
    max_entry_level: int = DEFAULT_MAX_ENTRY_LEVEL
    level_spec_overrides: dict = field(default_factory=dict)
    config_raw: dict = field(default_factory=dict)

    def level_specs(self) -> dict[int, LevelSpec]:
        return apply_spec_overrides(self.level_spec_overrides)

    def component(self, component_id: str) -> TechComponent:
        try:
            return self.components[component_id]
        except KeyError:
            raise UnknownComponent(component_id) from None

    def requirement_owner(self, requirement_id: str) -> TechComponent:
        for comp in self.components.values():
            if requirement_id in comp.requirements:
                return comp
        raise UnknownRequirement(requirement_id)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "created_at": format_utc(self.created_at),
            "components": [self.components[k].to_dict() for k in sorted(self.components)],
            "people": [self.people[k].to_dict() for k in sorted(self.people)],
            "stakeholder_roles": sorted(r.value for r in self.stakeholder_roles),
            "risks": [self.risks[k].to_dict() for k in sorted(self.risks)],
            "reviews": [self.reviews[k].to_dict() for k in sorted(self.reviews)],
            "max_entry_level": self.max_entry_level,
            "level_spec_overrides": self.level_spec_overrides,
            "config_raw": self.config_raw,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Project":
        return cls(
            id=data["id"],
            name=data["name"],
            created_at=parse_utc(data["created_at"]),
            components={c["id"]: TechComponent.from_dict(c) for c in data.get("components", [])},
            people={p["id"]: Person.from_dict(p) for p in data.get("people", [])},
            stakeholder_roles=frozenset(role_from_name(r) for r in data.get("stakeholder_roles", [])),
            risks={r["id"]: RiskEntry.from_dict(r) for r in data.get("risks", [])},
            reviews={r["id"]: ReviewRecord.from_dict(r) for r in data.get("reviews", [])},
            max_entry_level=int(data.get("max_entry_level", DEFAULT_MAX_ENTRY_LEVEL)),
            level_spec_overrides=data.get("level_spec_overrides", {}),
            config_raw=data.get("config_raw", {}),
        )

    def digest(self) -> str:
        return digest_of(self.to_dict())


def new_project(project_id: str, name: str, created_at: datetime) -> Project:
    return Project(id=project_id, name=name, created_at=created_at)


def system_trl(project: Project) -> ReadinessLevel:
    """The system is only as ready as its least-ready active component."""
    levels = [
        c.current_level.value
        for c in project.components.values()
        if c.status is ComponentStatus.ACTIVE
    ]
    if not levels:
        raise EmptyProject("no active components")
    return level_from_int(min(levels))


# -- transition legality ------------------------------------------------------------

# Embedded switchbacks are the predefined paths: 4 -> 2, and 9 -> any level <= 7.
EMBEDDED_PATHS = frozenset({(4, 2)} | {(9, k) for k in range(0, 8)})
DISCOVERY_WARNING_ABOVE = 5


def transition_legal(kind: str, from_level: int, to_level: int) -> tuple[bool, str | None, str | None]:
    """(legal, error_code, warning) for a single requested transition.

    ``kind`` is one of the switchback kinds or "graduation".
    """
    if not (0 <= from_level <= 9 and 0 <= to_level <= 9):
        return False, "OutOfRange", None
    if kind == "graduation":
        if from_level == 9:
            return False, "NoHigherLevel", None
        if to_level == from_level + 1:
            return True, None, None
        return False, "SkipAttempt", None
    if kind not in SWITCHBACK_KINDS:
        return False, "DomainError", None
    if to_level >= from_level:
        return False, "UpwardSwitchback", None
    if kind == "embedded":
        if (from_level, to_level) not in EMBEDDED_PATHS:
            return False, "IllegalEmbeddedPath", None
        return True, None, None
    if kind == "review":
        return True, None, None
    # discovery: always legal downward, but flagged above the R&D levels
    warning = None
    if from_level > DISCOVERY_WARNING_ABOVE:
        warning = f"discovery_switchback_above_level_{DISCOVERY_WARNING_ABOVE}"
    return True, None, warning


# -- gate checks ---------------------------------------------------------------------


def _require_active(component: TechComponent) -> None:
    if component.status is ComponentStatus.RETIRED:
        raise ComponentRetired(component.id)
    if component.status is ComponentStatus.PAUSED:
        raise ComponentPaused(component.id)


def gate_missing(project: Project, component: TechComponent) -> list[str]:
    """Everything a graduation review at the component's level must resolve."""
    level = component.current_level.value
    spec = project.level_specs()[level]
    missing: list[str] = []
    items = component.deliverables.get(level, {})
    for key in spec.required_deliverables:
        item = items.get(key)
        if item is None or item.not_applicable or not item.done:
            missing.append(key)
    if level == 5:
        for req in sorted(component.requirements):
            r = component.requirements[req]
            if r.kind is RequirementKind.RESEARCH and not requirement_complete(r):
                missing.append(req)
    if level == 8:
        for req in sorted(component.requirements):
            if not requirement_complete(component.requirements[req]):
                missing.append(req)
    if level in KEY_DECISION_LEVELS and component.decision_at(level) is None:
        missing.append("key_decision")
    if level == 9:
        missing.append("no_higher_level")
    return missing


def propose_graduation(project: Project, component_id: str) -> GateResult:
    """Dry-run gate check; mutates nothing."""
    component = project.component(component_id)
    _require_active(component)
    missing = gate_missing(project, component)
    if missing:
        return GateResult(outcome="rejected", missing=tuple(missing))
    return GateResult(outcome="graduated", missing=(), new_level=component.current_level.value + 1)


def panel_violations(project: Project, level: ReadinessLevel, panel_ids: list[str],
                     component: TechComponent | None = None) -> list[str]:
    violations: list[str] = []
    panel: list[Person] = []
    for pid in panel_ids:
        person = project.people.get(pid)
        if person is None:
            violations.append(f"unknown_person:{pid}")
        else:
            panel.append(person)
    cadence_set = None
    if component is not None and level.value == 9:
        cadence = component.deliverable(9, "recurring_review_cadence")
        cadence_set = bool(cadence and cadence.done)
    violations.extend(
        validate_panel(level, panel, project.stakeholder_roles, cadence_set=cadence_set)
    )
    return violations


# -- commands -------------------------------------------------------------------------


def register_component(
    project: Project,
    name: str,
    entry_level: int,
    justification: str = "",
    owners: list[str] | None = None,
    override_entry: bool = False,
) -> tuple[list[EventDraft], str]:
    level = level_from_int(entry_level)
    if level.value > project.max_entry_level and not override_entry:
        raise EntryTooHigh(
            f"entry level {level.value} above configured max {project.max_entry_level} "
            "(pass the entry override to force)"
        )
    if level.value > 0 and not justification.strip():
        raise MissingJustification(f"entry at level {level.value} needs a justification")
    component_id = slugify(name)
    if component_id in project.components:
        raise DuplicateComponent(component_id)
    for owner in owners or []:
        if owner not in project.people:
            raise UnknownPerson(owner)
    draft = EventDraft(
        kind="EntryRegistered",
        component_ref=component_id,
        payload={
            "component_id": component_id,
            "name": name,
            "entry_level": level.value,
            "justification": justification,
            "owners": list(owners or []),
        },
    )
    return [draft], component_id


def set_deliverable(
    project: Project,
    component_id: str,
    level: int,
    key: str,
    done: bool,
    evidence: str = "",
    description: str | None = None,
) -> list[EventDraft]:
    component = project.component(component_id)
    if component.status is ComponentStatus.RETIRED:
        raise ComponentRetired(component_id)
    level_from_int(level)
    if done and not evidence:
        raise DomainError(f"deliverable {key!r}: done requires evidence")
    if description is None:
        existing = component.deliverable(level, key)
        description = existing.description if existing else deliverable_description(key)
    return [
        EventDraft(
            kind="DeliverableUpdated",
            component_ref=component_id,
            payload={
                "component_id": component_id,
                "level": level,
                "key": key,
                "done": done,
                "evidence": evidence,
                "description": description,
            },
        )
    ]


def add_requirement(
    project: Project,
    component_id: str,
    requirement_id: str,
    kind: str,
    statement: str,
    verification: list[str] | None = None,
    validation: list[str] | None = None,
) -> list[EventDraft]:
    component = project.component(component_id)
    _require_active(component)
    req_kind = RequirementKind(kind)
    level = component.current_level.value
    if req_kind is RequirementKind.RESEARCH and level > 5:
        raise RequirementLevelBound(
            f"research requirements may only be created at levels <= 5 (component at {level})"
        )
    if req_kind is RequirementKind.PRODUCT and level < 5:
        raise RequirementLevelBound(
            f"product requirements may only be created at levels >= 5 (component at {level})"
        )
    for comp in project.components.values():
        if requirement_id in comp.requirements:
            raise DuplicateRequirement(requirement_id)
    requirement = Requirement(
        id=requirement_id,
        kind=req_kind,
        statement=statement,
        verification=[VnvItem(text=t) for t in verification or []],
        validation=[VnvItem(text=t) for t in validation or []],
        created_at_level=level,
    )
    return [
        EventDraft(
            kind="RequirementUpdated",
            component_ref=component_id,
            payload={"component_id": component_id, "requirement": requirement.to_dict()},
        )
    ]


def update_requirement(
    project: Project,
    component_id: str,
    requirement_id: str,
    status: str | None = None,
    add_verification: list[str] | None = None,
    add_validation: list[str] | None = None,
    verification_done: list[int] | None = None,
    validation_done: list[int] | None = None,
) -> list[EventDraft]:
    component = project.component(component_id)
    _require_active(component)
    if requirement_id not in component.requirements:
        raise UnknownRequirement(requirement_id)
    req = copy.deepcopy(component.requirements[requirement_id])
    for text in add_verification or []:
        req.verification.append(VnvItem(text=text))
    for text in add_validation or []:
        req.validation.append(VnvItem(text=text))
    for idx in verification_done or []:
        try:
            req.verification[idx].done = True
        except IndexError:
            raise DomainError(f"no verification measure #{idx}") from None
    for idx in validation_done or []:
        try:
            req.validation[idx].done = True
        except IndexError:
            raise DomainError(f"no validation step #{idx}") from None
    if status is not None:
        target = RequirementStatus(status)
        if status_rank(target) < status_rank(req.status):
            raise StatusRegression(
                f"requirement {requirement_id}: {req.status.value} -> {target.value} "
                "moves backward; only a switchback may regress status"
            )
        req.check_status_allowed(target)
        req.status = target
    return [
        EventDraft(
            kind="RequirementUpdated",
            component_ref=component_id,
            payload={"component_id": component_id, "requirement": req.to_dict()},
        )
    ]


def add_risk(
    project: Project,
    requirement_ref: str,
    p_failure: Decimal | float | str,
    value: int,
    mitigation: str = "",
    risk_id: str | None = None,
) -> tuple[list[EventDraft], str]:
    project.requirement_owner(requirement_ref)
    if risk_id is None:
        risk_id = f"risk-{len(project.risks) + 1:04d}"
    if risk_id in project.risks:
        raise DuplicateRisk(risk_id)
    entry = RiskEntry(
        id=risk_id,
        requirement_ref=requirement_ref,
        p_failure=Decimal(str(p_failure)),
        value=value,
        mitigation=mitigation,
    )
    draft = EventDraft(kind="RiskUpdated", component_ref=None, payload={"risk": entry.to_dict()})
    return [draft], risk_id


def update_risk(
    project: Project,
    risk_id: str,
    p_failure: Decimal | float | str | None = None,
    value: int | None = None,
    mitigation: str | None = None,
    status: str | None = None,
) -> list[EventDraft]:
    if risk_id not in project.risks:
        raise UnknownRisk(risk_id)
    old = project.risks[risk_id]
    entry = RiskEntry(
        id=risk_id,
        requirement_ref=old.requirement_ref,
        p_failure=Decimal(str(p_failure)) if p_failure is not None else old.p_failure,
        value=value if value is not None else old.value,
        mitigation=mitigation if mitigation is not None else old.mitigation,
        status=RiskStatus(status) if status is not None else old.status,
    )
    return [EventDraft(kind="RiskUpdated", component_ref=None, payload={"risk": entry.to_dict()})]


def record_key_decision(
    project: Project,
    component_id: str,
    level: int,
    choice: str,
    rationale: str,
    at: datetime,
) -> list[EventDraft]:
    component = project.component(component_id)
    if component.status is ComponentStatus.RETIRED:
        raise ComponentRetired(component_id)
    if level not in KEY_DECISION_LEVELS:
        raise WrongLevel(f"no key decision point at level {level}")
    if component.current_level.value != level:
        raise WrongLevel(
            f"component {component_id} is at level {component.current_level.value}, not {level}"
        )
    if not key_decision_choice_ok(level, choice):
        raise InvalidChoice(f"choice {choice!r} not allowed at level {level}")
    decision = KeyDecision(level=level, choice=choice, rationale=rationale, decided_at=at)
    return [
        EventDraft(
            kind="KeyDecisionRecorded",
            component_ref=component_id,
            payload={"component_id": component_id, "decision": decision.to_dict()},
        )
    ]


def bump_component_version(
    project: Project, component_id: str, part: str, kind: str
) -> list[EventDraft]:
    component = project.component(component_id)
    if component.status is ComponentStatus.RETIRED:
        raise ComponentRetired(component_id)
    new_versions = bump_version(component.versions, VersionPart(part), BumpKind(kind))
    return [
        EventDraft(
            kind="VersionBumped",
            component_ref=component_id,
            payload={
                "component_id": component_id,
                "part": part,
                "kind": kind,
                "versions": new_versions.to_dict(),
            },
        )
    ]


def set_component_status(
    project: Project, component_id: str, status: str, reason: str = ""
) -> list[EventDraft]:
    component = project.component(component_id)
    target = ComponentStatus(status)
    if component.status is ComponentStatus.RETIRED:
        raise ComponentRetired(component_id)
    return [
        EventDraft(
            kind="StatusChanged",
            component_ref=component_id,
            payload={"component_id": component_id, "status": target.value, "reason": reason},
        )
    ]


def _switchback_drafts(
    project: Project,
    request: SwitchbackRequest,
    allow_pending_review: str | None = None,
) -> tuple[list[EventDraft], list[str]]:
    """Validate a switchback and return its event drafts plus warnings."""
    component = project.component(request.component)
    _require_active(component)
    if request.from_level != component.current_level.value:
        raise StaleGate(
            f"switchback from level {request.from_level} but component is at "
            f"{component.current_level.value}"
        )
    if request.kind not in SWITCHBACK_KINDS:
        raise DomainError(f"unknown switchback kind {request.kind!r}")
    if request.kind == "review":
        if not request.review_ref:
            raise MissingReviewRef("review switchbacks need a review reference")
        if request.review_ref != allow_pending_review and request.review_ref not in project.reviews:
            raise UnknownReview(request.review_ref)
    legal, error_code, warning = transition_legal(request.kind, request.from_level, request.to_level)
    if not legal:
        if error_code == "UpwardSwitchback":
            raise UpwardSwitchback(
                f"switchback target {request.to_level} must be below {request.from_level}"
            )
        if error_code == "IllegalEmbeddedPath":
            raise IllegalEmbeddedPath(
                f"embedded path {request.from_level}->{request.to_level} is not predefined; "
                "legal embedded paths: 4->2 and 9->k for k<=7"
            )
        raise DomainError(error_code or "illegal transition")
    warnings = [warning] if warning else []
    draft = EventDraft(
        kind="SwitchedBack",
        component_ref=request.component,
        payload={
            "component_id": request.component,
            "kind": request.kind,
            "from_level": request.from_level,
            "to_level": request.to_level,
            "reason": request.reason,
            "review_ref": request.review_ref,
            "warnings": warnings,
        },
    )
    return [draft], warnings


def apply_switchback(
    project: Project,
    component_id: str,
    kind: str,
    to_level: int,
    reason: str,
    review_ref: str | None = None,
) -> tuple[list[EventDraft], SwitchbackRequest, list[str]]:
    component = project.component(component_id)
    request = SwitchbackRequest(
        kind=kind,
        component=component_id,
        from_level=component.current_level.value,
        to_level=to_level,
        reason=reason,
        review_ref=review_ref,
    )
    drafts, warnings = _switchback_drafts(project, request)
    return drafts, request, warnings


def record_change_on_deployed(
    project: Project,
    component_id: str,
    change_description: str,
    to_level: int = 7,
) -> tuple[list[EventDraft], SwitchbackRequest, list[str]]:
    """Changes to a deployed component always cycle back: embedded 9 -> <=7."""
    component = project.component(component_id)
    if component.current_level.value != 9:
        raise NotDeployed(
            f"component {component_id} is at level {component.current_level.value}, not deployed"
        )
    return apply_switchback(
        project,
        component_id,
        kind="embedded",
        to_level=to_level,
        reason=change_description,
    )


def next_review_id(component: TechComponent) -> str:
    return f"rev-{component.id}-l{component.current_level.value}-{len(component.review_history) + 1}"


def record_review(
    project: Project,
    component_id: str,
    panel: list[str],
    ethics_checklist_ref: str,
    checklist: dict[str, ChecklistEntry],
    decision: ReviewDecision,
    reviewed_at: datetime,
    postmortem_done: bool = False,
    review_id: str | None = None,
    expected_gate_level: int | None = None,
) -> tuple[list[EventDraft], GateResult]:
    """Record a gated review; graduate, hold, or delegate to a switchback."""
    component = project.component(component_id)
    _require_active(component)
    gate_level = component.current_level
    if expected_gate_level is not None and expected_gate_level != gate_level.value:
        raise StaleGate(
            f"review prepared for gate {expected_gate_level} but component is at "
            f"{gate_level.value}"
        )
    spec = project.level_specs()[gate_level.value]

    if not ethics_checklist_ref.strip():
        raise EthicsMissing("every review must reference a completed ethics checklist")
    violations = panel_violations(project, gate_level, panel, component=component)
    if violations:
        raise PanelViolation(
            f"panel violates {spec.panel_rule.describe()}: {', '.join(violations)}"
        )
    uncovered = [k for k in spec.required_deliverables if k not in checklist]
    if uncovered:
        raise ChecklistIncomplete(
            f"checklist does not cover required deliverables: {', '.join(uncovered)}"
        )
    if decision.kind == "switchback" and decision.to_level is None:
        raise DomainError("switchback decision needs a target level")

    review_id = review_id or next_review_id(component)

    def build_review(effective_decision: ReviewDecision) -> ReviewRecord:
        return ReviewRecord(
            id=review_id,
            component=component_id,
            gate_level=gate_level.value,
            panel=tuple(panel),
            checklist=dict(checklist),
            ethics_checklist_ref=ethics_checklist_ref,
            decision=effective_decision,
            postmortem_done=postmortem_done,
            reviewed_at=reviewed_at,
        )

    failed = sorted(k for k, entry in checklist.items() if not entry.passed)
    structural = gate_missing(project, component)

    if decision.kind == "graduate":
        missing = sorted(set(structural) | set(failed))
        if "no_higher_level" in missing and gate_level.value == 9 and not (set(missing) - {"no_higher_level"}):
            raise NoHigherLevel("level 9 is terminal; record a switchback instead")
        if missing:
            # a gate that does not graduate is recorded as a hold with the
            # outstanding tasks, so stored Graduate decisions always passed
            result = GateResult(outcome="rejected", missing=tuple(missing))
            review = build_review(ReviewDecision(kind="hold", reasons=tuple(missing)))
            drafts = [_review_draft(review, result, requested=decision.kind)]
            return drafts, result
        result = GateResult(outcome="graduated", new_level=gate_level.value + 1)
        review = build_review(decision)
        drafts = [
            _review_draft(review, result, requested=decision.kind),
            EventDraft(
                kind="Graduated",
                component_ref=component_id,
                payload={
                    "component_id": component_id,
                    "from_level": gate_level.value,
                    "to_level": gate_level.value + 1,
                    "review_ref": review_id,
                },
            ),
        ]
        return drafts, result

    if decision.kind == "hold":
        reasons = decision.reasons or ("hold",)
        result = GateResult(outcome="rejected", missing=tuple(reasons))
        return [_review_draft(build_review(decision), result)], result

    if decision.kind == "switchback":
        request = SwitchbackRequest(
            kind="review",
            component=component_id,
            from_level=gate_level.value,
            to_level=decision.to_level,
            reason="; ".join(decision.reasons) or "review switchback",
            review_ref=review_id,
        )
        sb_drafts, _ = _switchback_drafts(project, request, allow_pending_review=review_id)
        result = GateResult(
            outcome="rejected",
            missing=(f"switchback:{decision.to_level}",),
            new_level=decision.to_level,
        )
        return [_review_draft(build_review(decision), result)] + sb_drafts, result

    raise DomainError(f"unknown review decision {decision.kind!r}")


def _review_draft(review: ReviewRecord, result: GateResult, requested: str | None = None) -> EventDraft:
    payload = {"review": review.to_dict(), "gate_result": result.to_dict()}
    if requested is not None and requested != review.decision.kind:
        payload["requested_decision"] = requested
    return EventDraft(
        kind="ReviewRecorded",
        component_ref=review.component,
        payload=payload,
    )


def apply_graduation(
    project: Project,
    component_id: str,
    review_ref: str,
    target_level: int | None = None,
) -> list[EventDraft]:
    """Graduate by exactly one level on the strength of a recorded review."""
    component = project.component(component_id)
    _require_active(component)
    current = component.current_level.value
    if target_level is not None and target_level != current + 1:
        raise SkipAttempt(
            f"requested {current} -> {target_level}; levels advance one at a time"
        )
    if current == 9:
        raise NoHigherLevel("level 9 is terminal")
    review = project.reviews.get(review_ref)
    if review is None:
        raise UnknownReview(review_ref)
    if review.component != component_id or review.gate_level != current:
        raise StaleGate(f"review {review_ref} does not gate level {current} of {component_id}")
    if review.decision.kind != "graduate":
        raise DomainError(f"review {review_ref} did not decide graduate")
    missing = gate_missing(project, component)
    if missing:
        raise DomainError(f"gate is not clean: missing {', '.join(missing)}")
    return [
        EventDraft(
            kind="Graduated",
            component_ref=component_id,
            payload={
                "component_id": component_id,
                "from_level": current,
                "to_level": current + 1,
                "review_ref": review_ref,
            },
        )
    ]


def apply_config(project: Project, config: dict) -> list[EventDraft]:
    validate_config(config)
    return [EventDraft(kind="ConfigOverridden", component_ref=None, payload={"config": config})]


def validate_config(config: dict) -> None:
    if not isinstance(config, dict):
        raise InvalidConfig("config must be a JSON object")
    known = {"people", "stakeholder_roles", "max_entry_level", "level_specs", "okr_targets"}
    unknown = set(config) - known
    if unknown:
        raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
    seen_people = set()
    for raw in config.get("people", []):
        person = Person.from_dict(raw)
        if person.id in seen_people:
            raise InvalidConfig(f"duplicate person id {person.id!r}")
        seen_people.add(person.id)
    for role in config.get("stakeholder_roles", []):
        role_from_name(role)
    max_entry = config.get("max_entry_level", DEFAULT_MAX_ENTRY_LEVEL)
    if not isinstance(max_entry, int) or not 0 <= max_entry <= 9:
        raise InvalidConfig(f"max_entry_level {max_entry!r} not in 0..9")
    apply_spec_overrides(config.get("level_specs", {}))
    for target in config.get("okr_targets", []):
        if not isinstance(target, dict) or not {"component", "target_level", "deadline"} <= set(target):
            raise InvalidConfig("okr_targets entries need component, target_level, deadline")
        level_from_int(int(target["target_level"]))
        parse_utc(target["deadline"])


def config_changed(project: Project, config: dict) -> bool:
    return canonical_json(config) != canonical_json(project.config_raw)


# -- simulation ------------------------------------------------------------------------


def simulate_graduation(project: Project, component_id: str) -> SimulationResult:
    component = project.component(component_id)
    try:
        gate = propose_graduation(project, component_id)
    except (ComponentRetired, ComponentPaused) as exc:
        return SimulationResult(
            gate=GateResult(outcome="rejected", missing=(exc.code,)), error=exc.code
        )
    if gate.outcome != "graduated":
        return SimulationResult(gate=gate, projected_level=component.current_level.value)
    shadow = copy.deepcopy(project)
    shadow.component(component_id).current_level = level_from_int(gate.new_level)
    return SimulationResult(
        gate=gate,
        projected_level=gate.new_level,
        projected_system_trl=system_trl(shadow).value,
    )


def simulate_switchback(
    project: Project, component_id: str, kind: str, to_level: int, reason: str = "",
    review_ref: str | None = None,
) -> SimulationResult:
    component = project.component(component_id)
    from_level = component.current_level.value
    legal, error_code, warning = transition_legal(kind, from_level, to_level)
    if kind == "review" and legal and not review_ref:
        legal, error_code = False, "MissingReviewRef"
    if not legal:
        return SimulationResult(
            gate=GateResult(outcome="rejected", missing=(error_code,)),
            projected_level=from_level,
            error=error_code,
        )
    reopened = tuple(
        f"{lvl}:{key}"
        for lvl in range(to_level + 1, from_level + 1)
        for key, item in sorted(component.deliverables.get(lvl, {}).items())
        if item.done
    )
    shadow = copy.deepcopy(project)
    shadow.component(component_id).current_level = level_from_int(to_level)
    return SimulationResult(
        gate=GateResult(outcome="graduated", missing=(), new_level=to_level),
        reopened=reopened,
        projected_level=to_level,
        projected_system_trl=system_trl(shadow).value,
        warnings=(warning,) if warning else (),
    )


def simulate_transition(
    project: Project,
    component_id: str,
    action: str | SwitchbackRequest,
) -> SimulationResult:
    """Pure dry run of either a graduation or a switchback request."""
    if action == "graduation":
        return simulate_graduation(project, component_id)
    if isinstance(action, SwitchbackRequest):
        return simulate_switchback(
            project, component_id, action.kind, action.to_level,
            reason=action.reason, review_ref=action.review_ref,
        )
    raise DomainError(f"unknown simulated action {action!r}")


# -- event application (the replay fold) -------------------------------------------------


def apply_event(project: Project, kind: str, payload: dict, at: datetime) -> Project:
    """Fold one recorded event into the state. Mutates and returns ``project``."""
    if kind not in EVENT_KINDS:
        raise UnknownEventKind(kind)
    handler = _APPLIERS[kind]
    handler(project, payload, at)
    component_id = payload.get("component_id")
    if component_id and component_id in project.components:
        project.components[component_id].last_event_at = at
    return project


def _apply_entry(project: Project, payload: dict, at: datetime) -> None:
    level = level_from_int(payload["entry_level"])
    component = TechComponent(
        id=payload["component_id"],
        name=payload["name"],
        entry_level=level,
        current_level=level,
        owners=list(payload.get("owners", [])),
        entry_justification=payload.get("justification", ""),
    )
    specs = project.level_specs()
    for lvl in range(0, level.value):
        component.deliverables[lvl] = {
            key: DeliverableItem(
                key=key,
                description=deliverable_description(key),
                not_applicable=True,
            )
            for key in specs[lvl].required_deliverables
        }
    project.components[component.id] = component


def _apply_review(project: Project, payload: dict, at: datetime) -> None:
    review = ReviewRecord.from_dict(payload["review"])
    project.reviews[review.id] = review
    component = project.components[review.component]
    component.review_history.append(
        ReviewSummary(
            review_id=review.id,
            level=review.gate_level,
            at=review.reviewed_at,
            decision=review.decision.kind,
        )
    )
    if review.postmortem_done:
        component.warnings = [
            w for w in component.warnings if not w.startswith("postmortem_pending:")
        ]


def _apply_graduated(project: Project, payload: dict, at: datetime) -> None:
    component = project.components[payload["component_id"]]
    component.current_level = level_from_int(payload["to_level"])
    component.transitions.append(
        Transition(
            from_level=payload["from_level"],
            to_level=payload["to_level"],
            kind="forward",
            at=at,
        )
    )
    review_ref = payload.get("review_ref")
    review = project.reviews.get(review_ref) if review_ref else None
    if review is not None and not review.postmortem_done:
        component.warnings.append(f"postmortem_pending:{review_ref}")


def _apply_switched_back(project: Project, payload: dict, at: datetime) -> None:
    component = project.components[payload["component_id"]]
    from_level = payload["from_level"]
    to_level = payload["to_level"]
    component.current_level = level_from_int(to_level)
    component.transitions.append(
        Transition(from_level=from_level, to_level=to_level, kind=payload["kind"], at=at)
    )
    for lvl in range(to_level + 1, from_level + 1):
        for item in component.deliverables.get(lvl, {}).values():
            item.done = False
            item.not_applicable = False
        for req in component.requirements.values():
            if req.created_at_level == lvl and req.status is RequirementStatus.COMPLETE:
                req.status = RequirementStatus.VALIDATED


def _apply_key_decision(project: Project, payload: dict, at: datetime) -> None:
    component = project.components[payload["component_id"]]
    decision = KeyDecision.from_dict(payload["decision"])
    component.decisions.append(decision)
    if decision.level == 4 and decision.choice == "pause":
        component.status = ComponentStatus.PAUSED


def _apply_deliverable(project: Project, payload: dict, at: datetime) -> None:
    component = project.components[payload["component_id"]]
    level = payload["level"]
    item = DeliverableItem(
        key=payload["key"],
        description=payload.get("description", ""),
        done=payload["done"],
        evidence=payload.get("evidence", ""),
    )
    component.deliverables.setdefault(level, {})[item.key] = item


def _apply_requirement(project: Project, payload: dict, at: datetime) -> None:
    component = project.components[payload["component_id"]]
    requirement = Requirement.from_dict(payload["requirement"])
    component.requirements[requirement.id] = requirement


def _apply_risk(project: Project, payload: dict, at: datetime) -> None:
    entry = RiskEntry.from_dict(payload["risk"])
    project.risks[entry.id] = entry
    for component in project.components.values():
        req = component.requirements.get(entry.requirement_ref)
        if req is not None:
            req.risk_ref = entry.id


def _apply_version(project: Project, payload: dict, at: datetime) -> None:
    component = project.components[payload["component_id"]]
    component.versions = VersionTriplet.from_dict(payload["versions"])


def _apply_status(project: Project, payload: dict, at: datetime) -> None:
    component = project.components[payload["component_id"]]
    component.status = ComponentStatus(payload["status"])


def _apply_config(project: Project, payload: dict, at: datetime) -> None:
    config = payload["config"]
    for raw in config.get("people", []):
        person = Person.from_dict(raw)
        project.people[person.id] = person
    if "stakeholder_roles" in config:
        project.stakeholder_roles = frozenset(
            role_from_name(r) for r in config["stakeholder_roles"]
        )
    if "max_entry_level" in config:
        project.max_entry_level = config["max_entry_level"]
    if "level_specs" in config:
        project.level_spec_overrides = config["level_specs"]
    project.config_raw = config


_APPLIERS = {
    "EntryRegistered": _apply_entry,
    "ReviewRecorded": _apply_review,
    "Graduated": _apply_graduated,
    "SwitchedBack": _apply_switched_back,
    "KeyDecisionRecorded": _apply_key_decision,
    "DeliverableUpdated": _apply_deliverable,
    "RequirementUpdated": _apply_requirement,
    "RiskUpdated": _apply_risk,
    "VersionBumped": _apply_version,
    "StatusChanged": _apply_status,
    "ConfigOverridden": _apply_config,
}

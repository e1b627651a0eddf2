"""Readiness-level lifecycle tracking for machine learning technologies."""

from .core import (
    BumpKind,
    ComponentStatus,
    DeliverableItem,
    KeyDecision,
    Person,
    ReadinessLevel,
    Requirement,
    RequirementKind,
    RequirementStatus,
    Role,
    TechComponent,
    VersionPart,
    VersionTriplet,
    bump_version,
    level_from_int,
    requirement_complete,
)
from .engine import (
    GateResult,
    Project,
    ReviewDecision,
    ReviewRecord,
    SwitchbackRequest,
    apply_switchback,
    propose_graduation,
    record_review,
    register_component,
    simulate_transition,
    system_trl,
    transition_legal,
)
from .events import LifecycleEvent, ProjectStore, replay_events, verify_events
from .levels import LevelSpec, PanelRule, default_level_specs, validate_panel
from .risk import RiskEntry, RiskMatrix, build_matrix, compute_risk, critical_scenarios, rank_risks

__version__ = "0.1.0"

__all__ = [
    "BumpKind",
    "ComponentStatus",
    "DeliverableItem",
    "GateResult",
    "KeyDecision",
    "LevelSpec",
    "LifecycleEvent",
    "PanelRule",
    "Person",
    "Project",
    "ProjectStore",
    "ReadinessLevel",
    "Requirement",
    "RequirementKind",
    "RequirementStatus",
    "ReviewDecision",
    "ReviewRecord",
    "RiskEntry",
    "RiskMatrix",
    "Role",
    "SwitchbackRequest",
    "TechComponent",
    "VersionPart",
    "VersionTriplet",
    "apply_switchback",
    "build_matrix",
    "bump_version",
    "compute_risk",
    "critical_scenarios",
    "default_level_specs",
    "level_from_int",
    "propose_graduation",
    "rank_risks",
    "record_review",
    "register_component",
    "replay_events",
    "requirement_complete",
    "simulate_transition",
    "system_trl",
    "transition_legal",
    "validate_panel",
    "verify_events",
]

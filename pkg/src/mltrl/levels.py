"""Per-level gate configuration: required deliverables, panel rules, decisions.

The default table below is the built-in review contract for all ten levels.
Projects may extend it through ``mltrl.config.json`` ("level_specs"): overrides
can add required deliverables or replace the data note, but can never drop a
default deliverable or the ethics checklist.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    KEY_DECISION_CHOICES,
    KEY_DECISION_LEVELS,
    Person,
    ReadinessLevel,
    Role,
    level_from_int,
    role_from_name,
)
from .errors import InvalidConfig


@dataclass(frozen=True)
class PanelRule:
    """Who must sit on the gated review panel for a level.

    kinds:
      exactly_roles       every member holds a role from ``roles`` and every
                          role in ``roles`` is represented
      all_members_have    every member holds ``roles``' single role
      must_include_roles  each role in ``roles`` is held by some member
      full_slate          each declared stakeholder role is represented
    """

    kind: str
    roles: frozenset[Role] = frozenset()

    def describe(self) -> str:
        names = ",".join(sorted(r.value for r in self.roles))
        return f"{self.kind}({names})" if self.roles else self.kind

    def to_dict(self) -> dict:
        return {"kind": self.kind, "roles": sorted(r.value for r in self.roles)}

    @classmethod
    def from_dict(cls, data: dict) -> "PanelRule":
        return cls(kind=data["kind"], roles=frozenset(role_from_name(r) for r in data.get("roles", [])))


def exactly_roles(*roles: Role) -> PanelRule:
    return PanelRule("exactly_roles", frozenset(roles))


def all_members_have(role: Role) -> PanelRule:
    return PanelRule("all_members_have", frozenset({role}))


def must_include(*roles: Role) -> PanelRule:
    return PanelRule("must_include_roles", frozenset(roles))


FULL_SLATE = PanelRule("full_slate")


@dataclass(frozen=True)
class LevelSpec:
    """Gate configuration for one readiness level."""

    level: ReadinessLevel
    required_deliverables: tuple[str, ...]
    panel_rule: PanelRule
    key_decision_choices: tuple[str, ...] | None
    data_note: str
    requires_ethics_checklist: bool = True

    def to_dict(self) -> dict:
        return {
            "level": self.level.value,
            "required_deliverables": list(self.required_deliverables),
            "panel_rule": self.panel_rule.to_dict(),
            "key_decision_choices": list(self.key_decision_choices) if self.key_decision_choices else None,
            "data_note": self.data_note,
            "requires_ethics_checklist": self.requires_ethics_checklist,
        }


_DELIVERABLE_DESCRIPTIONS = {
    "research_plan": "Stated principles, hypotheses, data-readiness conclusions, and research plan",
    "trl_card_started": "Report card started for the technology",
    "versioning_initiated": "Semantic versioning in place for code, models, and datasets",
    "experiment_log": "Log of low-level experiments on model or algorithm properties",
    "code_checkpoint_research": "Code attested research-caliber",
    "research_requirements_doc": "Research requirements with verification and validation measures",
    "reproducibility_note": "Analyses documented well enough to reproduce",
    "code_checkpoint_prototype": "Code attested prototype-caliber",
    "test_data_subsets": "Dedicated test subsets and mock data for the test suites",
    "poc_demo": "Demo against at least one application, each with two or more datasets",
    "ethics_checklist": "Completed ethics checklist for data collection and model impact",
    "security_privacy_requirements": "Security and privacy entries in the requirements doc",
    "research_vnv_complete": "All research requirements verified and validated",
    "product_requirements_draft": "Product-driven requirements drafted with V&V measures",
    "capability_statement": "The technology described as a capability of a larger application",
    "code_checkpoint_product": "Code attested product-caliber",
    "sla_slo_entries": "Service-level agreements and objectives recorded",
    "compliance_attestation": "Regulatory compliance reviewed and attested",
    "golden_dataset": "Golden dataset registered to baseline successive models",
    "metamorphic_relations": "Codified list of metamorphic relations for integration tests",
    "data_intervention_tests": "Data-bug intervention tests at pipeline entry and exit points",
    "critical_scenario_tests": "Tests for the critical scenarios the risk matrix highlights",
    "deployment_tests_abs_bluegreen_shadow_canary": "A/B, blue/green, shadow, and canary deployment tests",
    "cicd_stress_record": "CI/CD stress-test record for the overall system",
    "monitoring_config": "Monitoring for data quality, concept drift, and data drift",
    "logging_spec": "Logging of system metadata, model metadata, and the data itself",
    "recurring_review_cadence": "Recurring review cadence set for the deployed system",
}

_DEFAULT_ROWS: list[tuple[int, tuple[str, ...], PanelRule, str]] = [
    (0, ("research_plan", "trl_card_started"),
     exactly_roles(Role.RESEARCH_LEAD),
     "No hard data requirement yet; availability must be assessed before moving past theory."),
    (1, ("versioning_initiated", "experiment_log", "code_checkpoint_research"),
     all_members_have(Role.RESEARCHER),
     "Representative sample data: a subset of real data, synthetic data, or both."),
    (2, ("research_requirements_doc", "reproducibility_note"),
     all_members_have(Role.RESEARCHER),
     "Testbed data: benchmarks, semi-simulated, or simulated sets that expose corner cases."),
    (3, ("code_checkpoint_prototype", "test_data_subsets"),
     must_include(Role.APPLIED_AI, Role.ENGINEERING),
     "Same sources as level 2 plus dedicated default test subsets and mock data."),
    (4, ("poc_demo", "ethics_checklist", "security_privacy_requirements"),
     must_include(Role.PRODUCT_MANAGER),
     "Real, representative data of the use case is required; pipeline mirrors future inference."),
    (5, ("research_vnv_complete", "product_requirements_draft", "capability_statement"),
     must_include(Role.PRODUCT_MANAGER),
     "Same as level 4; plan for pipeline scaling and data governance before productization."),
    (6, ("code_checkpoint_product", "sla_slo_entries", "compliance_attestation"),
     must_include(Role.PRODUCT_MANAGER),
     "Additional robustness data: adversarial and perturbed examples, new source checks."),
    (7, ("golden_dataset", "metamorphic_relations", "data_intervention_tests", "critical_scenario_tests"),
     must_include(Role.INFRASTRUCTURE, Role.APPLIED_AI, Role.QA),
     "Test-suite data plus data governance: how data is obtained, managed, used, secured."),
    (8, ("deployment_tests_abs_bluegreen_shadow_canary", "cicd_stress_record"),
     FULL_SLATE,
     "Automatic logging of data distributions alongside model performance must exist."),
    (9, ("monitoring_config", "logging_spec", "recurring_review_cadence"),
     FULL_SLATE,
     "Log and inspect data alongside models; watch for data policy shifts in the domain."),
]


def deliverable_description(key: str) -> str:
    return _DELIVERABLE_DESCRIPTIONS.get(key, "")


def default_level_specs() -> dict[int, LevelSpec]:
    """The built-in ten-row gate table."""
    specs: dict[int, LevelSpec] = {}
    for value, deliverables, rule, note in _DEFAULT_ROWS:
        choices = tuple(KEY_DECISION_CHOICES[value]) if value in KEY_DECISION_LEVELS else None
        specs[value] = LevelSpec(
            level=level_from_int(value),
            required_deliverables=deliverables,
            panel_rule=rule,
            key_decision_choices=choices,
            data_note=note,
        )
    return specs


def apply_spec_overrides(overrides: dict) -> dict[int, LevelSpec]:
    """Default table plus per-project overrides (additive deliverables only)."""
    specs = default_level_specs()
    for raw_level, patch in sorted(overrides.items()):
        try:
            value = int(raw_level)
        except (TypeError, ValueError):
            raise InvalidConfig(f"level_specs key {raw_level!r} is not a level") from None
        if value not in specs:
            raise InvalidConfig(f"level_specs key {raw_level!r} is not a level")
        if not isinstance(patch, dict):
            raise InvalidConfig(f"level_specs[{raw_level}] must be an object")
        unknown = set(patch) - {"required_deliverables", "data_note"}
        if unknown:
            raise InvalidConfig(
                f"level_specs[{raw_level}]: only required_deliverables and data_note "
                f"may be overridden, got {sorted(unknown)}"
            )
        base = specs[value]
        deliverables = base.required_deliverables
        if "required_deliverables" in patch:
            wanted = tuple(patch["required_deliverables"])
            missing = set(base.required_deliverables) - set(wanted)
            if missing:
                raise InvalidConfig(
                    f"level_specs[{raw_level}]: default deliverables cannot be removed: "
                    f"{sorted(missing)}"
                )
            extras = tuple(k for k in wanted if k not in base.required_deliverables)
            deliverables = base.required_deliverables + extras
        specs[value] = LevelSpec(
            level=base.level,
            required_deliverables=deliverables,
            panel_rule=base.panel_rule,
            key_decision_choices=base.key_decision_choices,
            data_note=patch.get("data_note", base.data_note),
        )
    return specs


# -- panel validation -----------------------------------------------------------

def validate_panel(
    level: ReadinessLevel,
    panel: list[Person],
    stakeholder_roles: frozenset[Role],
    cadence_set: bool | None = None,
) -> list[str]:
    """Violations of the level's panel rule; empty list means the panel passes.

    ``cadence_set`` applies to level 9 only: pass the component's recurring
    review cadence state when it is known, or None to skip that check.
    """
    rule = default_level_specs()[level.value].panel_rule
    violations: list[str] = []
    if not panel:
        return ["empty_panel"]
    member_roles = [set(p.roles) for p in panel]
    union = set().union(*member_roles)

    if rule.kind == "exactly_roles":
        for person, roles in zip(panel, member_roles):
            if not roles & rule.roles:
                violations.append(f"unexpected_member:{person.id}")
        for role in sorted(rule.roles, key=lambda r: r.value):
            if role not in union:
                violations.append(f"missing_role:{role.value}")
    elif rule.kind == "all_members_have":
        (role,) = tuple(rule.roles)
        for person, roles in zip(panel, member_roles):
            if role not in roles:
                violations.append(f"member_lacks_role:{person.id}:{role.value}")
    elif rule.kind == "must_include_roles":
        for role in sorted(rule.roles, key=lambda r: r.value):
            if role not in union:
                violations.append(f"missing_role:{role.value}")
    elif rule.kind == "full_slate":
        if not stakeholder_roles:
            violations.append("stakeholder_roles_undeclared")
        for role in sorted(stakeholder_roles, key=lambda r: r.value):
            if role not in union:
                violations.append(f"missing_role:{role.value}")

    if level.value == 9 and cadence_set is False:
        violations.append("review_cadence_not_set")
    return violations

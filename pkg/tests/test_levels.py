import pytest

from mltrl.core import Person, Role, level_from_int
from mltrl.errors import InvalidConfig
from mltrl.levels import apply_spec_overrides, default_level_specs, validate_panel

from conftest import STAKEHOLDER_ROLES


def _person(pid: str, *roles: Role) -> Person:
    return Person(id=pid, name=pid, roles=frozenset(roles))


STAKEHOLDERS = frozenset(Role(r) for r in STAKEHOLDER_ROLES)


class TestDefaultTable:
    def test_ten_rows(self):
        specs = default_level_specs()
        assert sorted(specs) == list(range(10))

    def test_level_zero_panel_is_research_lead_only(self):
        rule = default_level_specs()[0].panel_rule
        assert rule.kind == "exactly_roles"
        assert rule.roles == frozenset({Role.RESEARCH_LEAD})

    def test_level_eight_choices_go_nogo(self):
        assert default_level_specs()[8].key_decision_choices == ("go", "no-go")

    def test_level_three_requires_prototype_checkpoint(self):
        assert "code_checkpoint_prototype" in default_level_specs()[3].required_deliverables

    def test_ethics_required_everywhere(self):
        assert all(spec.requires_ethics_checklist for spec in default_level_specs().values())

    def test_key_decision_levels_only(self):
        for value, spec in default_level_specs().items():
            assert (spec.key_decision_choices is not None) == (value in (2, 4, 6, 8))

    def test_required_deliverables_table(self):
        expected = {
            0: ("research_plan", "trl_card_started"),
            1: ("versioning_initiated", "experiment_log", "code_checkpoint_research"),
            2: ("research_requirements_doc", "reproducibility_note"),
            3: ("code_checkpoint_prototype", "test_data_subsets"),
            4: ("poc_demo", "ethics_checklist", "security_privacy_requirements"),
            5: ("research_vnv_complete", "product_requirements_draft", "capability_statement"),
            6: ("code_checkpoint_product", "sla_slo_entries", "compliance_attestation"),
            7: ("golden_dataset", "metamorphic_relations", "data_intervention_tests",
                "critical_scenario_tests"),
            8: ("deployment_tests_abs_bluegreen_shadow_canary", "cicd_stress_record"),
            9: ("monitoring_config", "logging_spec", "recurring_review_cadence"),
        }
        for value, keys in expected.items():
            assert default_level_specs()[value].required_deliverables == keys


class TestPanelRules:
    def test_level_one_all_researchers_pass(self):
        panel = [_person("a", Role.RESEARCHER), _person("b", Role.RESEARCHER)]
        assert validate_panel(level_from_int(1), panel, STAKEHOLDERS) == []

    def test_level_seven_missing_infrastructure(self):
        panel = [_person("a", Role.APPLIED_AI), _person("q", Role.QA)]
        violations = validate_panel(level_from_int(7), panel, STAKEHOLDERS)
        assert "missing_role:Infrastructure" in violations

    def test_level_four_missing_product_manager(self):
        panel = [_person("a", Role.APPLIED_AI)]
        violations = validate_panel(level_from_int(4), panel, STAKEHOLDERS)
        assert violations == ["missing_role:ProductManager"]

    def test_level_zero_rejects_non_lead(self):
        panel = [_person("a", Role.RESEARCHER)]
        violations = validate_panel(level_from_int(0), panel, STAKEHOLDERS)
        assert any(v.startswith("unexpected_member") for v in violations)
        assert "missing_role:ResearchLead" in violations

    def test_level_two_mirrors_level_one(self):
        panel = [_person("a", Role.RESEARCHER), _person("x", Role.ENGINEERING)]
        v1 = validate_panel(level_from_int(1), panel, STAKEHOLDERS)
        v2 = validate_panel(level_from_int(2), panel, STAKEHOLDERS)
        assert v1 == v2 != []

    def test_full_slate_needs_every_declared_role(self):
        panel = [
            _person("lead", Role.RESEARCH_LEAD),
            _person("pm", Role.PRODUCT_MANAGER),
            _person("qa", Role.QA),
        ]
        violations = validate_panel(level_from_int(8), panel, STAKEHOLDERS)
        assert violations == ["missing_role:Stakeholder"]

    def test_full_slate_undeclared_stakeholders(self):
        panel = [_person("lead", Role.RESEARCH_LEAD)]
        violations = validate_panel(level_from_int(8), panel, frozenset())
        assert "stakeholder_roles_undeclared" in violations

    def test_empty_panel(self):
        assert validate_panel(level_from_int(3), [], STAKEHOLDERS) == ["empty_panel"]

    def test_level_nine_cadence_flag(self):
        panel = [
            _person("lead", Role.RESEARCH_LEAD),
            _person("pm", Role.PRODUCT_MANAGER),
            _person("qa", Role.QA),
            _person("stk", Role.STAKEHOLDER),
        ]
        assert validate_panel(level_from_int(9), panel, STAKEHOLDERS, cadence_set=True) == []
        assert validate_panel(level_from_int(9), panel, STAKEHOLDERS, cadence_set=False) == [
            "review_cadence_not_set"
        ]


class TestOverrides:
    def test_additive_deliverables(self):
        specs = apply_spec_overrides({"3": {"required_deliverables": [
            "code_checkpoint_prototype", "test_data_subsets", "hazard_review"]}})
        assert specs[3].required_deliverables == (
            "code_checkpoint_prototype", "test_data_subsets", "hazard_review"
        )

    def test_cannot_remove_defaults(self):
        with pytest.raises(InvalidConfig):
            apply_spec_overrides({"3": {"required_deliverables": ["hazard_review"]}})

    def test_cannot_touch_other_fields(self):
        with pytest.raises(InvalidConfig):
            apply_spec_overrides({"3": {"requires_ethics_checklist": False}})

    def test_data_note_override(self):
        specs = apply_spec_overrides({"2": {"data_note": "org-specific note"}})
        assert specs[2].data_note == "org-specific note"
        assert specs[2].required_deliverables == default_level_specs()[2].required_deliverables

    def test_bad_level_key(self):
        with pytest.raises(InvalidConfig):
            apply_spec_overrides({"11": {"data_note": "x"}})

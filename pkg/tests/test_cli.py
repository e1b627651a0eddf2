import json
from pathlib import Path

import pytest

from mltrl import engine
from mltrl.cli import run, scenario_replay
from mltrl.errors import ScriptNotFound, StepFailed
from mltrl.events import ProjectStore

from conftest import BASE_CONFIG, FIXTURES, Clock


def write_config(tmp_path: Path) -> Path:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(BASE_CONFIG), encoding="utf-8")
    return path


def init_project(tmp_path: Path, name="proj") -> tuple[Path, dict]:
    project = tmp_path / name
    env = {"MLTRL_PROJECT_DIR": str(project)}
    result = run(
        ["init", str(project), "--name", name, "--config", str(write_config(tmp_path)),
         "--at", "2026-01-01T00:00:00Z"],
    )
    assert result.exit_code == 0, result.stdout_payload
    return project, env


def cli_ok(argv, env) -> str:
    result = run(argv, env=env)
    assert result.exit_code == 0, result.stdout_payload
    return result.stdout_payload


class TestBasics:
    def test_status_reports_min_level(self, tmp_path):
        project, env = init_project(tmp_path)
        cli_ok(["component", "add", "--name", "alpha", "--entry-level", "3",
                "--justification", "reuse", "--at", "2026-01-01T01:00:00Z"], env)
        cli_ok(["component", "add", "--name", "beta", "--entry-level", "1",
                "--justification", "reuse", "--at", "2026-01-01T02:00:00Z"], env)
        payload = json.loads(cli_ok(["status", "--format", "json"], env))
        assert payload["system_trl"] == 1
        assert {c["id"]: c["level"] for c in payload["components"]} == {"alpha": 3, "beta": 1}

    def test_illegal_embedded_switchback_exit_one_with_legal_paths(self, tmp_path):
        project, env = init_project(tmp_path)
        cli_ok(["component", "add", "--name", "x", "--entry-level", "4",
                "--justification", "reuse", "--at", "2026-01-01T01:00:00Z"], env)
        result = run(["switchback", "--component", "x", "--kind", "embedded", "--to", "3",
                      "--reason", "nope", "--at", "2026-01-01T02:00:00Z"], env=env)
        assert result.exit_code == 1
        assert "4->2" in result.stdout_payload and "9->k" in result.stdout_payload

    def test_lint_detects_tamper_exit_two(self, tmp_path):
        project, env = init_project(tmp_path)
        cli_ok(["component", "add", "--name", "x", "--entry-level", "0",
                "--at", "2026-01-01T01:00:00Z"], env)
        events = project / "events.ndjson"
        raw = bytearray(events.read_bytes())
        raw[len(raw) // 2] ^= 0x01
        events.write_bytes(bytes(raw))
        result = run(["lint"], env=env)
        assert result.exit_code == 2
        assert "chain_broken" in result.stdout_payload

    def test_unknown_command_exit_two(self, tmp_path):
        project, env = init_project(tmp_path)
        result = run(["frobnicate"], env=env)
        assert result.exit_code == 2

    def test_init_twice_fails(self, tmp_path):
        project, env = init_project(tmp_path)
        result = run(["init", str(project), "--at", "2026-01-01T03:00:00Z"])
        assert result.exit_code == 2

    def test_validation_error_exit_one(self, tmp_path):
        project, env = init_project(tmp_path)
        result = run(["component", "add", "--name", "v", "--entry-level", "6",
                      "--justification", "b", "--at", "2026-01-01T01:00:00Z"], env=env)
        assert result.exit_code == 1
        assert "EntryTooHigh" in result.stdout_payload


class TestReads:
    def fixture_project(self, tmp_path):
        target = tmp_path / "np"
        scenario_replay(FIXTURES / "neuropathology.mltrl", project_dir=target)
        return target, {"MLTRL_PROJECT_DIR": str(target)}

    def test_read_commands_append_no_events(self, tmp_path):
        project, env = self.fixture_project(tmp_path)
        store = ProjectStore(project)
        before = store.events_path.read_bytes()
        for argv, codes in (
            (["status"], {0}),
            (["report", "--paths", "--format", "json"], {0}),
            (["report", "--time-per-level", "--format", "json"], {0}),
            (["report", "--bottlenecks", "--format", "json"], {0}),
            (["card", "render", "--component", "neuropathology-vision"], {0}),
            # validation findings are data: exit 1 is fine, events still untouched
            (["card", "validate", "--component", "neuropathology-vision"], {0, 1}),
            (["simulate", "graduation", "--component", "neuropathology-vision"], {0}),
            (["lint"], {0}),
        ):
            result = run(argv, env=env)
            assert result.exit_code in codes, (argv, result.stdout_payload)
        assert store.events_path.read_bytes() == before

    def test_card_edit_then_validate_passes(self, tmp_path):
        project, env = self.fixture_project(tmp_path)
        cli_ok(["card", "render", "--component", "neuropathology-vision"], env)
        card_path = project / "cards" / "neuropathology-vision.md"
        text = card_path.read_text(encoding="utf-8")
        # a human records the real data source in the card document
        text = text.replace(
            "## Data\n",
            "## Data\n\n- slide-archive | 1.2.0 | https://sheets/slides | real\n",
        )
        card_path.write_text(text, encoding="utf-8")
        payload = json.loads(
            cli_ok(["card", "validate", "--component", "neuropathology-vision",
                    "--format", "json"], env)
        )
        assert all(f["severity"] != "error" for f in payload["findings"])

    def test_report_paths_shows_fixture_switchback(self, tmp_path):
        project, env = self.fixture_project(tmp_path)
        payload = json.loads(cli_ok(["report", "--paths", "--format", "json"], env))
        reverse = [r for r in payload["paths"] if r["kind"] != "forward"]
        assert reverse == [{"from_level": 6, "to_level": 4, "kind": "review", "count": 1}]

    def test_card_render_then_diff_no_changes(self, tmp_path):
        project, env = self.fixture_project(tmp_path)
        cli_ok(["card", "render", "--component", "neuropathology-vision"], env)
        payload = json.loads(
            cli_ok(["card", "diff", "--component", "neuropathology-vision",
                    "--format", "json"], env)
        )
        assert payload["changes"] == []

    def test_simulate_switchback_lists_reopened(self, tmp_path):
        project, env = self.fixture_project(tmp_path)
        payload = json.loads(
            cli_ok(["simulate", "switchback", "--component", "neuropathology-vision",
                    "--kind", "embedded", "--to", "7", "--format", "json"], env)
        )
        levels = {item.split(":")[0] for item in payload["reopened"]}
        assert levels == {"8", "9"}
        assert payload["projected_level"] == 7


class TestReports:
    def test_okr_report_reads_targets_from_config(self, tmp_path):
        project, env = init_project(tmp_path)
        cli_ok(["component", "add", "--name", "alpha", "--entry-level", "3",
                "--justification", "reuse", "--at", "2026-01-01T01:00:00Z"], env)
        config = json.loads((project / "mltrl.config.json").read_text(encoding="utf-8"))
        config["okr_targets"] = [
            {"component": "alpha", "target_level": 4, "deadline": "2026-06-01T00:00:00Z"}
        ]
        (project / "mltrl.config.json").write_text(json.dumps(config), encoding="utf-8")
        payload = json.loads(
            cli_ok(["report", "--okr", "--now", "2026-03-01T00:00:00Z", "--format", "json"], env)
        )
        assert payload["okr"] == [{
            "component_ref": "alpha", "target_level": 4,
            "deadline": "2026-06-01T00:00:00Z", "status": "on_track",
        }]

    def test_risk_matrix_grid_output(self, tmp_path):
        project, env = init_project(tmp_path)
        cli_ok(["component", "add", "--name", "alpha", "--entry-level", "0",
                "--at", "2026-01-01T01:00:00Z"], env)
        cli_ok(["requirement", "add", "--component", "alpha", "--id", "r1",
                "--kind", "research", "--statement", "need",
                "--verification", "m", "--validation", "s",
                "--at", "2026-01-01T02:00:00Z"], env)
        cli_ok(["risk", "add", "--requirement", "r1", "--p", "0.9", "--value", "10",
                "--at", "2026-01-01T03:00:00Z"], env)
        payload = json.loads(cli_ok(["risk", "matrix", "--format", "json"], env))
        assert payload["matrix"]["cells"] == {"4,4": ["risk-0001"]}
        assert payload["critical_requirements"] == ["r1"]
        text = cli_ok(["risk", "matrix"], env)
        assert "critical-scenario requirements: r1" in text


class TestScenarios:
    def test_missing_script(self, tmp_path):
        with pytest.raises(ScriptNotFound):
            scenario_replay(tmp_path / "nope.mltrl", project_dir=tmp_path)

    def test_illegal_skip_step_fails_at_line(self, tmp_path):
        script = tmp_path / "bad.mltrl"
        config = write_config(tmp_path)
        script.write_text(
            "\n".join(
                [
                    f"init . --name bad --config {config} --at 2026-01-01T00:00:00Z",
                    "component add --name x --entry-level 0 --at 2026-01-01T01:00:00Z",
                    "# a skip: no level-0 review happened, jump straight to a level-2 decision",
                    "decision record --component x --level 2 --choice both --rationale r "
                    "--at 2026-01-01T02:00:00Z",
                ]
            )
            + "\n",
            encoding="utf-8",
        )
        with pytest.raises(StepFailed) as err:
            scenario_replay(script, project_dir=tmp_path / "bad-proj")
        assert err.value.line == 4

    def test_all_fixture_scripts_replay(self, tmp_path):
        for name in ("neuropathology", "recycling_cv", "etalumis", "cams"):
            result = scenario_replay(FIXTURES / f"{name}.mltrl", project_dir=tmp_path / name)
            assert result.exit_code == 0


class TestThinShell:
    def test_cli_equals_direct_engine_calls(self, tmp_path):
        """The CLI must add nothing: same commands straight into the store."""
        cli_project, env = init_project(tmp_path, name="via-cli")
        stamps = iter(f"2026-01-01T0{i}:00:00Z" for i in range(1, 8))

        t1 = next(stamps)
        cli_ok(["component", "add", "--name", "demo", "--entry-level", "0",
                "--owners", "lead", "--at", t1], env)
        t2 = next(stamps)
        cli_ok(["deliverable", "set", "--component", "demo", "--level", "0",
                "--key", "research_plan", "--done", "true",
                "--evidence", "https://e", "--at", t2], env)
        t3 = next(stamps)
        cli_ok(["requirement", "add", "--component", "demo", "--id", "r1",
                "--kind", "research", "--statement", "need",
                "--verification", "m", "--validation", "s", "--at", t3], env)

        from mltrl.core import parse_utc
        from mltrl.events import ProjectStore

        direct_root = tmp_path / "via-engine"
        store = ProjectStore.init(direct_root, name="via-cli", now=parse_utc("2026-01-01T00:00:00Z"),
                                  config=BASE_CONFIG)
        store.run_command(
            lambda s: engine.register_component(s, "demo", 0, "", owners=["lead"])[0],
            now=parse_utc(t1),
        )
        store.run_command(
            lambda s: engine.set_deliverable(s, "demo", 0, "research_plan", True, "https://e"),
            now=parse_utc(t2),
        )
        store.run_command(
            lambda s: engine.add_requirement(s, "demo", "r1", "research", "need", ["m"], ["s"]),
            now=parse_utc(t3),
        )

        cli_bytes = (cli_project / "events.ndjson").read_bytes()
        direct_bytes = (direct_root / "events.ndjson").read_bytes()
        assert cli_bytes == direct_bytes

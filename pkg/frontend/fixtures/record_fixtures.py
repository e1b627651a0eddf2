"""Record real API responses into JSON fixtures for the dashboard tests.

Builds a two-component project (one deployed, one back at proof-of-concept
after an integration review), then captures the endpoint payloads the
dashboard consumes, including dry-run switchback projections and the event
tail used by the live-graph test.

Run from the repository root:  python3 frontend/fixtures/record_fixtures.py
"""

from __future__ import annotations

import json
import shutil
import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path

from fastapi.testclient import TestClient

from mltrl import engine
from mltrl.api import create_app
from mltrl.engine import ChecklistEntry, ReviewDecision
from mltrl.events import ProjectStore

HERE = Path(__file__).parent

CONFIG = {
    "people": [
        {"id": "lead", "name": "Research Lead", "roles": ["ResearchLead", "Researcher"]},
        {"id": "ana", "name": "Ana", "roles": ["Researcher"]},
        {"id": "ben", "name": "Ben", "roles": ["Researcher"]},
        {"id": "cam", "name": "Cam", "roles": ["AppliedAI"]},
        {"id": "dev", "name": "Dev", "roles": ["Engineering"]},
        {"id": "ifr", "name": "Ifr", "roles": ["Infrastructure"]},
        {"id": "pm", "name": "Pm", "roles": ["ProductManager"]},
        {"id": "qa", "name": "Qa", "roles": ["QA"]},
        {"id": "stk", "name": "Stk", "roles": ["Stakeholder"]},
    ],
    "stakeholder_roles": ["ResearchLead", "ProductManager", "QA", "Stakeholder"],
}

PANELS = {
    0: ["lead"], 1: ["ana", "ben"], 2: ["ana", "ben"], 3: ["cam", "dev"],
    4: ["pm", "cam"], 5: ["pm", "lead"], 6: ["pm", "dev"], 7: ["ifr", "cam", "qa"],
    8: ["lead", "pm", "qa", "stk"], 9: ["lead", "pm", "qa", "stk"],
}

DECISIONS = {2: "proceed_prototype", 4: "proceed", 6: "deployment_setting:cloud", 8: "go"}


class Clock:
    def __init__(self):
        self.now = datetime(2026, 5, 1, tzinfo=timezone.utc)

    def tick(self) -> datetime:
        self.now += timedelta(hours=4)
        return self.now


def run(store: ProjectStore, command, at: datetime):
    return store.run_command(command, now=at)


def finish_level(store: ProjectStore, clock: Clock, cid: str, level: int) -> None:
    state = store.replay()
    for key in state.level_specs()[level].required_deliverables:
        run(store, lambda s, k=key: engine.set_deliverable(
            s, cid, level, k, True, f"https://wiki/{cid}/l{level}/{k}"), clock.tick())
    if level in DECISIONS and store.replay().component(cid).decision_at(level) is None:
        at = clock.tick()
        run(store, lambda s: engine.record_key_decision(
            s, cid, level, DECISIONS[level], "gate decision", at), at)


def review(store: ProjectStore, clock: Clock, cid: str, level: int,
           decision: ReviewDecision) -> None:
    state = store.replay()
    checklist = {
        key: ChecklistEntry(passed=True)
        for key in state.level_specs()[level].required_deliverables
    }
    at = clock.tick()
    run(store, lambda s: engine.record_review(
        s, cid, panel=PANELS[level], ethics_checklist_ref=f"https://ethics/{cid}/l{level}",
        checklist=checklist, decision=decision, reviewed_at=at, postmortem_done=True,
    )[0], at)


def climb(store: ProjectStore, clock: Clock, cid: str, target: int) -> None:
    while store.replay().component(cid).current_level.value < target:
        level = store.replay().component(cid).current_level.value
        finish_level(store, clock, cid, level)
        review(store, clock, cid, level, ReviewDecision(kind="graduate"))


def build_project(root: Path) -> ProjectStore:
    clock = Clock()
    store = ProjectStore.init(root, name="dashboard-fixture", now=clock.tick(), config=CONFIG)
    run(store, lambda s: engine.register_component(
        s, "deployed detector", 0, "", owners=["lead"])[0], clock.tick())
    climb(store, clock, "deployed-detector", 9)
    finish_level(store, clock, "deployed-detector", 9)

    run(store, lambda s: engine.register_component(
        s, "poc ranker", 4, "reused parts, validated on our data", owners=["cam"])[0],
        clock.tick())
    climb(store, clock, "poc-ranker", 7)
    finish_level(store, clock, "poc-ranker", 7)
    review(store, clock, "poc-ranker", 7,
           ReviewDecision(kind="switchback", reasons=("data rework",), to_level=4))
    return store


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp) / "proj"
        store = build_project(root)
        client = TestClient(create_app(root))

        def save(name: str, payload) -> None:
            (HERE / name).write_text(
                json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                encoding="utf-8",
            )

        save("project.json", client.get("/v1/project").json())
        save("components.json", client.get("/v1/components").json())
        save("paths.json", client.get("/v1/analytics/paths").json())
        save("risks.json", client.get("/v1/risks").json())
        save("dwells.json", client.get("/v1/analytics/time-per-level").json())
        save(
            "dryrun_embedded_9_to_7.json",
            client.post(
                "/v1/components/deployed-detector/switchbacks",
                params={"dry_run": "true"},
                json={"kind": "embedded", "to_level": 7, "reason": "what if"},
            ).json(),
        )
        save(
            "dryrun_embedded_4_to_3.json",
            client.post(
                "/v1/components/poc-ranker/switchbacks",
                params={"dry_run": "true"},
                json={"kind": "embedded", "to_level": 3, "reason": "what if"},
            ).json(),
        )

        # live tail: graduate poc-ranker once in a scratch copy of the project
        horizon = store.horizon()
        scratch = Path(tmp) / "scratch"
        shutil.copytree(root, scratch)
        scratch_store = ProjectStore(scratch)
        clock = Clock()
        clock.now = datetime(2026, 7, 1, tzinfo=timezone.utc)
        review(scratch_store, clock, "poc-ranker", 4, ReviewDecision(kind="graduate"))
        tail = [e.to_dict() for e in scratch_store.read_events() if e.seq > horizon]
        save("events_tail.json", {"events": tail, "seq_horizon": scratch_store.horizon()})

    print("fixtures written to", HERE)


if __name__ == "__main__":
    main()

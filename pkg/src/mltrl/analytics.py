"""Meta-review metrics over event logs: dwell times, paths, OKRs, bottlenecks.

Everything here is a pure function of the logs it is handed; "now" is always
an explicit argument so reports are reproducible.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from datetime import datetime

from .core import format_utc, parse_utc
from .events import LifecycleEvent

LEVEL_CHANGING_KINDS = ("Graduated", "SwitchedBack")


@dataclass(frozen=True)
class LevelDwell:
    """One contiguous stay of a component at a level; open until exited."""

    component_ref: str
    level: int
    entered_at: datetime
    exited_at: datetime | None = None

    @property
    def duration_seconds(self) -> float | None:
        if self.exited_at is None:
            return None
        return (self.exited_at - self.entered_at).total_seconds()

    def to_dict(self) -> dict:
        return {
            "component_ref": self.component_ref,
            "level": self.level,
            "entered_at": format_utc(self.entered_at),
            "exited_at": format_utc(self.exited_at) if self.exited_at else None,
            "duration_seconds": self.duration_seconds,
        }


@dataclass(frozen=True)
class OkrTarget:
    component_ref: str
    target_level: int
    deadline: datetime
    status: str = ""  # on_track | achieved | missed

    def to_dict(self) -> dict:
        return {
            "component_ref": self.component_ref,
            "target_level": self.target_level,
            "deadline": format_utc(self.deadline),
            "status": self.status,
        }


@dataclass(frozen=True)
class BottleneckRow:
    level: int
    median_dwell_seconds: float
    switchback_in_rate: float
    dwell_count: int

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "median_dwell_seconds": self.median_dwell_seconds,
            "switchback_in_rate": self.switchback_in_rate,
            "dwell_count": self.dwell_count,
        }


def _level_moves(log: list[LifecycleEvent]):
    """(component, new_level, at, kind, from_level) per level-setting event."""
    for event in log:
        payload = event.payload
        at = parse_utc(event.at)
        if event.kind == "EntryRegistered":
            yield payload["component_id"], payload["entry_level"], at, "entry", None
        elif event.kind == "Graduated":
            yield payload["component_id"], payload["to_level"], at, "forward", payload["from_level"]
        elif event.kind == "SwitchedBack":
            yield payload["component_id"], payload["to_level"], at, payload["kind"], payload["from_level"]


def time_per_level(log: list[LifecycleEvent], exclude_paused: bool = False) -> list[LevelDwell]:
    """One dwell per contiguous stay; switchback re-entries open new dwells.

    With ``exclude_paused`` a pause closes the running dwell and the resume
    opens a fresh one at the same level, so paused stretches accrue no time.
    By default paused time counts toward the level's dwell.
    """
    open_dwells: dict[str, LevelDwell] = {}
    dwells: list[LevelDwell] = []

    def close(component: str, at: datetime) -> None:
        current = open_dwells.pop(component, None)
        if current is not None:
            dwells.append(
                LevelDwell(
                    component_ref=component,
                    level=current.level,
                    entered_at=current.entered_at,
                    exited_at=at,
                )
            )

    def open_at(component: str, level: int, at: datetime) -> None:
        open_dwells[component] = LevelDwell(component_ref=component, level=level, entered_at=at)

    for event in log:
        payload = event.payload
        at = parse_utc(event.at)
        if event.kind == "EntryRegistered":
            close(payload["component_id"], at)
            open_at(payload["component_id"], payload["entry_level"], at)
        elif event.kind in ("Graduated", "SwitchedBack"):
            close(payload["component_id"], at)
            open_at(payload["component_id"], payload["to_level"], at)
        elif exclude_paused and event.kind == "StatusChanged":
            component = payload["component_id"]
            status = payload["status"]
            if status in ("paused", "retired"):
                close(component, at)
            elif status == "active" and component not in open_dwells:
                level = _level_of(log, component, event.seq)
                if level is not None:
                    open_at(component, level, at)
    dwells.extend(open_dwells.values())
    dwells.sort(key=lambda d: (d.component_ref, d.entered_at))
    return dwells


def _level_of(log: list[LifecycleEvent], component: str, before_seq: int) -> int | None:
    """The component's level just before ``before_seq``."""
    level = None
    for event in log:
        if event.seq >= before_seq:
            break
        if event.payload.get("component_id") != component:
            continue
        if event.kind == "EntryRegistered":
            level = event.payload["entry_level"]
        elif event.kind in ("Graduated", "SwitchedBack"):
            level = event.payload["to_level"]
    return level


def path_histogram(log: list[LifecycleEvent]) -> dict[tuple[int, int, str], int]:
    """Counts per (from level, to level, kind); graduations count as forward."""
    counts: dict[tuple[int, int, str], int] = {}
    for _, level, _, kind, from_level in _level_moves(log):
        if kind == "entry":
            continue
        key = (from_level, level, kind)
        counts[key] = counts.get(key, 0) + 1
    return counts


def histogram_rows(counts: dict[tuple[int, int, str], int]) -> list[dict]:
    return [
        {"from_level": f, "to_level": t, "kind": k, "count": counts[(f, t, k)]}
        for f, t, k in sorted(counts)
    ]


def okr_status(
    log: list[LifecycleEvent],
    targets: list[OkrTarget],
    now: datetime,
) -> list[OkrTarget]:
    """Achieved iff a graduation reached the target level before the deadline."""
    results = []
    for target in targets:
        achieved = any(
            event.kind == "Graduated"
            and event.payload["component_id"] == target.component_ref
            and event.payload["to_level"] >= target.target_level
            and parse_utc(event.at) <= target.deadline
            for event in log
        )
        if achieved:
            status = "achieved"
        elif now > target.deadline:
            status = "missed"
        else:
            status = "on_track"
        results.append(
            OkrTarget(
                component_ref=target.component_ref,
                target_level=target.target_level,
                deadline=target.deadline,
                status=status,
            )
        )
    return results


def bottleneck_report(logs: list[list[LifecycleEvent]]) -> list[BottleneckRow]:
    """Levels ranked by median closed dwell desc, ties by switchback-in rate."""
    durations: dict[int, list[float]] = {}
    entries: dict[int, int] = {}
    switchback_ins: dict[int, int] = {}
    for log in logs:
        for dwell in time_per_level(log):
            entries[dwell.level] = entries.get(dwell.level, 0) + 1
            if dwell.duration_seconds is not None:
                durations.setdefault(dwell.level, []).append(dwell.duration_seconds)
        for _, level, _, kind, _ in _level_moves(log):
            if kind in ("discovery", "review", "embedded"):
                switchback_ins[level] = switchback_ins.get(level, 0) + 1

    rows = []
    for level in sorted(entries):
        closed = durations.get(level, [])
        rows.append(
            BottleneckRow(
                level=level,
                median_dwell_seconds=statistics.median(closed) if closed else 0.0,
                switchback_in_rate=switchback_ins.get(level, 0) / entries[level],
                dwell_count=entries[level],
            )
        )
    rows.sort(key=lambda r: (-r.median_dwell_seconds, -r.switchback_in_rate, r.level))
    return rows

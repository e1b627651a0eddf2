"""Append-only, hash-chained persistence; all state is replayed from here.

A project is a directory:

    project.meta.json    project id, name, creation time
    events.ndjson        one canonical-JSON event per line, LF, UTF-8
    snapshots/<seq>.json replay checkpoints
    cards/<id>.md        rendered report cards
    mltrl.config.json    user-editable project configuration
    writer.lock          single-writer lease (holder + expiry)

Each event line is hashed over its canonical body; the chain starts at a
64-zero genesis hash, so any byte of tampering is detectable.
"""

from __future__ import annotations

import json
import os
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable

from . import engine
from .core import UTC, canonical_json, digest_of, format_utc, parse_utc, sha256_hex, slugify
from .errors import (
    ChainBroken,
    InvalidConfig,
    SnapshotStale,
    StorageError,
    WriterConflict,
)

GENESIS_HASH = "0" * 64

META_FILE = "project.meta.json"
EVENTS_FILE = "events.ndjson"
CONFIG_FILE = "mltrl.config.json"
LOCK_FILE = "writer.lock"
SNAPSHOT_DIR = "snapshots"
CARDS_DIR = "cards"

DEFAULT_LEASE_TTL = timedelta(seconds=60)


@dataclass(frozen=True)
class LifecycleEvent:
    """One audit record; ``hash`` covers every other field plus ``prev_hash``."""

    seq: int
    kind: str
    component_ref: str | None
    payload: dict
    at: str
    prev_hash: str
    hash: str

    def body(self) -> dict:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "component_ref": self.component_ref,
            "payload": self.payload,
            "at": self.at,
            "prev_hash": self.prev_hash,
        }

    def to_dict(self) -> dict:
        data = self.body()
        data["hash"] = self.hash
        return data

    def to_line(self) -> str:
        return canonical_json(self.to_dict())

    @staticmethod
    def compute_hash(body: dict) -> str:
        return sha256_hex(canonical_json(body))

    @classmethod
    def build(
        cls,
        seq: int,
        kind: str,
        component_ref: str | None,
        payload: dict,
        at: datetime,
        prev_hash: str,
    ) -> "LifecycleEvent":
        body = {
            "seq": seq,
            "kind": kind,
            "component_ref": component_ref,
            "payload": payload,
            "at": format_utc(at),
            "prev_hash": prev_hash,
        }
        return cls(hash=cls.compute_hash(body), **body)

    @classmethod
    def from_dict(cls, data: dict) -> "LifecycleEvent":
        return cls(
            seq=data["seq"],
            kind=data["kind"],
            component_ref=data.get("component_ref"),
            payload=data["payload"],
            at=data["at"],
            prev_hash=data["prev_hash"],
            hash=data["hash"],
        )


@dataclass(frozen=True)
class IntegrityResult:
    ok: bool
    broken_seq: int | None = None
    detail: str = ""


@dataclass(frozen=True)
class Snapshot:
    as_of_seq: int
    project_state: dict
    digest: str

    def to_dict(self) -> dict:
        return {
            "as_of_seq": self.as_of_seq,
            "project_state": self.project_state,
            "digest": self.digest,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Snapshot":
        return cls(
            as_of_seq=data["as_of_seq"],
            project_state=data["project_state"],
            digest=data["digest"],
        )


def verify_events(events: list[LifecycleEvent]) -> IntegrityResult:
    """Recompute the whole chain over already-parsed events."""
    prev = GENESIS_HASH
    for index, event in enumerate(events):
        expected_seq = index + 1
        if event.seq != expected_seq:
            return IntegrityResult(False, expected_seq, f"seq {event.seq} != {expected_seq}")
        if event.prev_hash != prev:
            return IntegrityResult(False, expected_seq, "previous-hash link broken")
        try:
            recomputed = LifecycleEvent.compute_hash(event.body())
        except (UnicodeError, TypeError, ValueError):
            return IntegrityResult(False, expected_seq, "unhashable event body")
        if recomputed != event.hash:
            return IntegrityResult(False, expected_seq, "hash mismatch")
        prev = event.hash
    return IntegrityResult(True)


def replay_events(
    meta: dict,
    events: list[LifecycleEvent],
    up_to_seq: int | None = None,
) -> engine.Project:
    """Deterministic fold of events through the engine transition function."""
    state = engine.new_project(
        project_id=meta["project_id"],
        name=meta["name"],
        created_at=parse_utc(meta["created_at"]),
    )
    for event in events:
        if up_to_seq is not None and event.seq > up_to_seq:
            break
        engine.apply_event(state, event.kind, event.payload, parse_utc(event.at))
    return state


def snapshot_events(meta: dict, events: list[LifecycleEvent], as_of_seq: int | None = None) -> Snapshot:
    as_of = as_of_seq if as_of_seq is not None else (events[-1].seq if events else 0)
    state = replay_events(meta, events, up_to_seq=as_of).to_dict()
    return Snapshot(as_of_seq=as_of, project_state=state, digest=digest_of(state))


def load_snapshot(snapshot: Snapshot, tail: list[LifecycleEvent]) -> engine.Project:
    """Snapshot plus tail must equal a full replay; digest mismatch is fatal."""
    if digest_of(snapshot.project_state) != snapshot.digest:
        raise SnapshotStale(f"snapshot digest mismatch at seq {snapshot.as_of_seq}")
    state = engine.Project.from_dict(snapshot.project_state)
    for event in tail:
        if event.seq <= snapshot.as_of_seq:
            continue
        engine.apply_event(state, event.kind, event.payload, parse_utc(event.at))
    return state


class ProjectStore:
    """Filesystem adapter for one project directory."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self._lease_holder: str | None = None

    # -- layout ----------------------------------------------------------------

    @property
    def meta_path(self) -> Path:
        return self.root / META_FILE

    @property
    def events_path(self) -> Path:
        return self.root / EVENTS_FILE

    @property
    def config_path(self) -> Path:
        return self.root / CONFIG_FILE

    @property
    def lock_path(self) -> Path:
        return self.root / LOCK_FILE

    @property
    def snapshots_dir(self) -> Path:
        return self.root / SNAPSHOT_DIR

    @property
    def cards_dir(self) -> Path:
        return self.root / CARDS_DIR

    def exists(self) -> bool:
        return self.meta_path.is_file() and self.events_path.is_file()

    @classmethod
    def init(
        cls,
        root: Path | str,
        name: str,
        now: datetime,
        config: dict | None = None,
    ) -> "ProjectStore":
        store = cls(root)
        if store.exists():
            raise StorageError(f"project already initialized at {store.root}")
        store.root.mkdir(parents=True, exist_ok=True)
        store.snapshots_dir.mkdir(exist_ok=True)
        store.cards_dir.mkdir(exist_ok=True)
        meta = {
            "project_id": slugify(name),
            "name": name,
            "created_at": format_utc(now),
        }
        store.meta_path.write_text(canonical_json(meta) + "\n", encoding="utf-8")
        store.events_path.touch()
        if config is not None:
            engine.validate_config(config)
            store.config_path.write_text(
                json.dumps(config, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
                encoding="utf-8",
            )
        return store

    def meta(self) -> dict:
        try:
            return json.loads(self.meta_path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise StorageError(f"not a project directory: {self.root}") from None
        except json.JSONDecodeError as exc:
            raise StorageError(f"corrupt {META_FILE}: {exc}") from None

    def read_config(self) -> dict:
        if not self.config_path.is_file():
            return {}
        try:
            config = json.loads(self.config_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{CONFIG_FILE}: {exc}") from None
        engine.validate_config(config)
        return config

    # -- events ------------------------------------------------------------------

    def read_byte_lines(self) -> list[bytes]:
        if not self.events_path.is_file():
            raise StorageError(f"not a project directory: {self.root}")
        raw = self.events_path.read_bytes()
        if not raw:
            return []
        lines = raw.split(b"\n")
        if lines and lines[-1] == b"":
            lines.pop()  # regular trailing newline
        return lines

    def read_events(self, verify: bool = True) -> list[LifecycleEvent]:
        events = []
        for index, raw_line in enumerate(self.read_byte_lines()):
            seq = index + 1
            try:
                event = LifecycleEvent.from_dict(json.loads(raw_line.decode("utf-8")))
            except (json.JSONDecodeError, KeyError, TypeError, UnicodeError) as exc:
                raise ChainBroken(seq, f"unreadable event line: {exc}") from None
            events.append(event)
        if verify:
            result = verify_events(events)
            if not result.ok:
                raise ChainBroken(result.broken_seq, result.detail)
        return events

    def verify_integrity(self) -> IntegrityResult:
        """Recompute every hash plus the canonical byte form of every line."""
        try:
            raw_lines = self.read_byte_lines()
        except StorageError as exc:
            return IntegrityResult(False, 0, str(exc))
        events: list[LifecycleEvent] = []
        for index, raw_line in enumerate(raw_lines):
            seq = index + 1
            try:
                line = raw_line.decode("utf-8")
                event = LifecycleEvent.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, UnicodeError):
                return IntegrityResult(False, seq, "unreadable event line")
            if event.to_line() != line:
                return IntegrityResult(False, seq, "non-canonical event line")
            events.append(event)
        return verify_events(events)

    def horizon(self) -> int:
        try:
            return len(self.read_byte_lines())
        except StorageError:
            return 0

    def replay(self, up_to_seq: int | None = None) -> engine.Project:
        return replay_events(self.meta(), self.read_events(), up_to_seq=up_to_seq)

    def append(self, drafts: list[engine.EventDraft], now: datetime) -> list[LifecycleEvent]:
        """Append validated drafts; caller must hold the writer lease."""
        if self._lease_holder is None:
            raise WriterConflict("append requires the writer lease")
        events = self.read_events()
        prev_hash = events[-1].hash if events else GENESIS_HASH
        seq = len(events)
        appended = []
        with self.events_path.open("a", encoding="utf-8", newline="") as fh:
            for draft in drafts:
                seq += 1
                event = LifecycleEvent.build(
                    seq=seq,
                    kind=draft.kind,
                    component_ref=draft.component_ref,
                    payload=draft.payload,
                    at=now,
                    prev_hash=prev_hash,
                )
                fh.write(event.to_line() + "\n")
                prev_hash = event.hash
                appended.append(event)
            fh.flush()
            os.fsync(fh.fileno())
        return appended

    # -- writer lease ---------------------------------------------------------------

    @contextmanager
    def writer_lease(
        self,
        holder: str = "local",
        now: datetime | None = None,
        ttl: timedelta = DEFAULT_LEASE_TTL,
        force: bool = False,
    ):
        now = now or datetime.now(UTC)
        self.acquire_lease(holder, now, ttl, force)
        try:
            yield self
        finally:
            self.release_lease(holder)

    def acquire_lease(
        self,
        holder: str,
        now: datetime,
        ttl: timedelta = DEFAULT_LEASE_TTL,
        force: bool = False,
    ) -> None:
        record = canonical_json(
            {"holder": holder, "acquired_at": format_utc(now), "expires_at": format_utc(now + ttl)}
        )
        try:
            fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            current = self._read_lease()
            if current is None:
                raise WriterConflict("writer lease contended") from None
            expired = parse_utc(current["expires_at"]) <= now
            if expired and force:
                self.lock_path.unlink(missing_ok=True)
                return self.acquire_lease(holder, now, ttl, force=False)
            state = "stale" if expired else "active"
            raise WriterConflict(
                f"{state} lease held by {current['holder']!r}"
                + (" (pass force to break a stale lease)" if expired else "")
            ) from None
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(record + "\n")
        self._lease_holder = holder

    def release_lease(self, holder: str) -> None:
        if self._lease_holder == holder:
            self.lock_path.unlink(missing_ok=True)
            self._lease_holder = None

    def _read_lease(self) -> dict | None:
        try:
            return json.loads(self.lock_path.read_text(encoding="utf-8"))
        except (FileNotFoundError, json.JSONDecodeError):
            return None

    # -- command execution -------------------------------------------------------------

    def run_command(
        self,
        command: Callable[[engine.Project], list[engine.EventDraft]],
        now: datetime,
        holder: str = "local",
        force_lease: bool = False,
    ) -> list[LifecycleEvent]:
        """Lease, replay, sync config, validate the command, append, release.

        This is the single mutating code path shared by the CLI and the API,
        which is why the two always produce identical event bytes.
        """
        with self.writer_lease(holder, now=now, force=force_lease):
            state = self.replay()
            drafts: list[engine.EventDraft] = []
            config = self.read_config()
            if config and engine.config_changed(state, config):
                config_drafts = engine.apply_config(state, config)
                for draft in config_drafts:
                    engine.apply_event(state, draft.kind, draft.payload, now)
                drafts.extend(config_drafts)
            drafts.extend(command(state))
            return self.append(drafts, now)

    def current_state(self) -> engine.Project:
        """State at the horizon with any pending config applied in memory."""
        state = self.replay()
        config = self.read_config()
        if config and engine.config_changed(state, config):
            for draft in engine.apply_config(state, config):
                engine.apply_event(state, draft.kind, draft.payload, datetime.now(UTC))
        return state

    # -- snapshots -----------------------------------------------------------------------

    def write_snapshot(self, as_of_seq: int | None = None) -> Snapshot:
        snap = snapshot_events(self.meta(), self.read_events(), as_of_seq)
        path = self.snapshots_dir / f"{snap.as_of_seq}.json"
        self.snapshots_dir.mkdir(exist_ok=True)
        path.write_text(canonical_json(snap.to_dict()) + "\n", encoding="utf-8")
        return snap

    def read_snapshot(self, as_of_seq: int) -> Snapshot:
        path = self.snapshots_dir / f"{as_of_seq}.json"
        try:
            return Snapshot.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except FileNotFoundError:
            raise StorageError(f"no snapshot at seq {as_of_seq}") from None
        except json.JSONDecodeError as exc:
            raise SnapshotStale(f"unreadable snapshot {path.name}: {exc}") from None

    # -- lint ------------------------------------------------------------------------------

    def lint(self) -> list[str]:
        """Byte-exact log check; empty list means the directory is healthy."""
        findings: list[str] = []
        if not self.meta_path.is_file():
            findings.append(f"missing:{META_FILE}")
        if not self.events_path.is_file():
            findings.append(f"missing:{EVENTS_FILE}")
        if findings:
            return findings
        result = self.verify_integrity()
        if not result.ok:
            findings.append(f"chain_broken:{result.broken_seq}:{result.detail}")
            return findings
        try:
            self.read_config()
        except InvalidConfig as exc:
            findings.append(f"bad_config:{exc.detail}")
        try:
            self.replay()
        except Exception as exc:  # replay of a verified log should never fail
            findings.append(f"replay_failed:{exc}")
        return findings

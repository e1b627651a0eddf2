"""Shared domain vocabulary: levels, versions, people, requirements, components.

Every type serializes to plain JSON-native dicts (lower_snake_case keys) via
``to_dict``/``from_dict``; ``canonical_json`` is the byte-exact form used for
hashing and on-disk storage.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal
from enum import Enum
from typing import Any

from .errors import (
    DomainError,
    EvidenceRequired,
    OutOfRange,
    StatusRegression,
)

UTC = timezone.utc

LEVEL_LABELS = {
    0: "First Principles",
    1: "Goal-Oriented Research",
    2: "Proof of Principle Development",
    3: "System Development",
    4: "Proof of Concept Development",
    5: "Machine Learning Capability",
    6: "Application Development",
    7: "Integrations",
    8: "Flight-ready",
    9: "Deployment",
}

MIN_LEVEL = 0
MAX_LEVEL = 9

_SEMVER_RE = re.compile(r"^(\d+)\.(\d+)\.(\d+)$")


def canonical_json(value: Any) -> str:
    """Deterministic JSON: sorted keys, no insignificant whitespace, raw UTF-8."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def digest_of(value: Any) -> str:
    return sha256_hex(canonical_json(value))


def format_utc(dt: datetime) -> str:
    """ISO-8601 with Z suffix; microseconds kept only when nonzero."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=UTC)
    dt = dt.astimezone(UTC)
    return dt.isoformat().replace("+00:00", "Z")


def parse_utc(text: str) -> datetime:
    raw = text.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise DomainError(f"bad timestamp {text!r}: {exc}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC)


# -- readiness levels ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class ReadinessLevel:
    """One of the ten maturity levels; totally ordered by integer value."""

    value: int
    label: str = field(compare=False, default="")

    def __post_init__(self):
        if self.value not in LEVEL_LABELS:
            raise OutOfRange(f"level {self.value} not in 0..9")
        object.__setattr__(self, "label", LEVEL_LABELS[self.value])

    def to_dict(self) -> dict:
        return {"value": self.value, "label": self.label}

    @classmethod
    def from_dict(cls, data: dict) -> "ReadinessLevel":
        return level_from_int(int(data["value"]))


def level_from_int(n: int) -> ReadinessLevel:
    if not isinstance(n, int) or isinstance(n, bool) or n not in LEVEL_LABELS:
        raise OutOfRange(f"level {n!r} not in 0..9")
    return ReadinessLevel(n)


def all_levels() -> list[ReadinessLevel]:
    return [ReadinessLevel(n) for n in range(MIN_LEVEL, MAX_LEVEL + 1)]


# -- semantic versions ---------------------------------------------------------

class VersionPart(str, Enum):
    CODE = "code"
    MODEL = "model"
    DATA = "data"


class BumpKind(str, Enum):
    MAJOR = "major"
    MINOR = "minor"
    PATCH = "patch"


def _check_semver(text: str, what: str) -> str:
    if not _SEMVER_RE.match(text):
        raise DomainError(f"{what} version {text!r} is not major.minor.patch")
    return text


@dataclass(frozen=True)
class VersionTriplet:
    """Semantic versions for the three tracked artifacts of a technology."""

    code: str = "0.0.0"
    model: str = "0.0.0"
    data: str = "0.0.0"

    def __post_init__(self):
        for part in VersionPart:
            _check_semver(getattr(self, part.value), part.value)

    def part(self, part: VersionPart) -> str:
        return getattr(self, part.value)

    def to_dict(self) -> dict:
        return {"code": self.code, "model": self.model, "data": self.data}

    @classmethod
    def from_dict(cls, data: dict) -> "VersionTriplet":
        return cls(code=data["code"], model=data["model"], data=data["data"])


def bump_version(v: VersionTriplet, part: VersionPart, kind: BumpKind) -> VersionTriplet:
    """Bump one part; major/minor bumps reset the lower-order fields to 0."""
    major, minor, patch = (int(x) for x in _SEMVER_RE.match(v.part(part)).groups())
    if kind is BumpKind.MAJOR:
        major, minor, patch = major + 1, 0, 0
    elif kind is BumpKind.MINOR:
        minor, patch = minor + 1, 0
    else:
        patch += 1
    fields = v.to_dict()
    fields[part.value] = f"{major}.{minor}.{patch}"
    return VersionTriplet(**fields)


# -- people --------------------------------------------------------------------

class Role(str, Enum):
    RESEARCH_LEAD = "ResearchLead"
    RESEARCHER = "Researcher"
    APPLIED_AI = "AppliedAI"
    ENGINEERING = "Engineering"
    INFRASTRUCTURE = "Infrastructure"
    PRODUCT_MANAGER = "ProductManager"
    QA = "QA"
    DOMAIN_EXPERT = "DomainExpert"
    STAKEHOLDER = "Stakeholder"
    EXECUTIVE = "Executive"


def role_from_name(name: str) -> Role:
    try:
        return Role(name)
    except ValueError:
        raise DomainError(f"unknown role {name!r}") from None


@dataclass(frozen=True)
class Person:
    id: str
    name: str
    roles: frozenset[Role]

    def __post_init__(self):
        if not self.id:
            raise DomainError("person id must be non-empty")
        if not self.roles:
            raise DomainError(f"person {self.id!r} must have at least one role")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "roles": sorted(r.value for r in self.roles),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Person":
        return cls(
            id=data["id"],
            name=data.get("name", data["id"]),
            roles=frozenset(role_from_name(r) for r in data["roles"]),
        )


# -- requirements ----------------------------------------------------------------

class RequirementKind(str, Enum):
    RESEARCH = "research"
    PRODUCT = "product"


class RequirementStatus(str, Enum):
    OPEN = "open"
    VERIFIED = "verified"
    VALIDATED = "validated"
    COMPLETE = "complete"


_STATUS_ORDER = {
    RequirementStatus.OPEN: 0,
    RequirementStatus.VERIFIED: 1,
    RequirementStatus.VALIDATED: 2,
    RequirementStatus.COMPLETE: 3,
}


def status_rank(status: RequirementStatus) -> int:
    return _STATUS_ORDER[status]


@dataclass
class VnvItem:
    """One verification measure or validation step with its done flag."""

    text: str
    done: bool = False

    def to_dict(self) -> dict:
        return {"text": self.text, "done": self.done}

    @classmethod
    def from_dict(cls, data: dict) -> "VnvItem":
        return cls(text=data["text"], done=bool(data["done"]))


@dataclass
class Requirement:
    """A documented need with verification measures and validation steps."""

    id: str
    kind: RequirementKind
    statement: str
    verification: list[VnvItem] = field(default_factory=list)
    validation: list[VnvItem] = field(default_factory=list)
    risk_ref: str | None = None
    status: RequirementStatus = RequirementStatus.OPEN
    created_at_level: int = 0

    def verification_done(self) -> bool:
        return bool(self.verification) and all(i.done for i in self.verification)

    def validation_done(self) -> bool:
        return bool(self.validation) and all(i.done for i in self.validation)

    def check_status_allowed(self, status: RequirementStatus) -> None:
        """Raise when the target status's preconditions are not met."""
        if status is RequirementStatus.OPEN:
            return
        if not self.verification_done():
            raise StatusRegression(
                f"requirement {self.id}: status {status.value} needs all "
                "verification measures done"
            )
        if status is RequirementStatus.VERIFIED:
            return
        if not self.validation_done():
            raise StatusRegression(
                f"requirement {self.id}: status {status.value} needs all "
                "validation steps done"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "statement": self.statement,
            "verification": [i.to_dict() for i in self.verification],
            "validation": [i.to_dict() for i in self.validation],
            "risk_ref": self.risk_ref,
            "status": self.status.value,
            "created_at_level": self.created_at_level,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Requirement":
        return cls(
            id=data["id"],
            kind=RequirementKind(data["kind"]),
            statement=data["statement"],
            verification=[VnvItem.from_dict(i) for i in data["verification"]],
            validation=[VnvItem.from_dict(i) for i in data["validation"]],
            risk_ref=data.get("risk_ref"),
            status=RequirementStatus(data["status"]),
            created_at_level=int(data.get("created_at_level", 0)),
        )


def requirement_complete(r: Requirement) -> bool:
    """True iff the requirement is Complete under the type invariants."""
    return (
        r.status is RequirementStatus.COMPLETE
        and r.verification_done()
        and r.validation_done()
    )


# -- deliverables, decisions ----------------------------------------------------

@dataclass
class DeliverableItem:
    """A review input tracked by presence, done flag, and evidence URI."""

    key: str
    description: str = ""
    done: bool = False
    evidence: str = ""
    not_applicable: bool = False

    def __post_init__(self):
        if self.done and not self.evidence:
            raise EvidenceRequired(f"deliverable {self.key!r}: done requires evidence")

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "description": self.description,
            "done": self.done,
            "evidence": self.evidence,
            "not_applicable": self.not_applicable,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DeliverableItem":
        return cls(
            key=data["key"],
            description=data.get("description", ""),
            done=bool(data["done"]),
            evidence=data.get("evidence", ""),
            not_applicable=bool(data.get("not_applicable", False)),
        )


KEY_DECISION_LEVELS = (2, 4, 6, 8)

# Allowed choice sets per key-decision level; "deployment_setting:" is an
# open-ended prefix (the setting text follows the colon).
KEY_DECISION_CHOICES: dict[int, list[str]] = {
    2: ["proceed_prototype", "continue_research", "both"],
    4: ["proceed", "pause", "pull_into_other"],
    6: ["deployment_setting:<text>"],
    8: ["go", "no-go"],
}


def key_decision_choice_ok(level: int, choice: str) -> bool:
    if level == 6:
        return choice.startswith("deployment_setting:") and len(choice) > len("deployment_setting:")
    return choice in KEY_DECISION_CHOICES.get(level, [])


@dataclass(frozen=True)
class KeyDecision:
    level: int
    choice: str
    rationale: str
    decided_at: datetime

    def __post_init__(self):
        if self.level not in KEY_DECISION_LEVELS:
            raise DomainError(f"key decisions happen at levels {KEY_DECISION_LEVELS}, not {self.level}")
        if not key_decision_choice_ok(self.level, self.choice):
            raise DomainError(f"choice {self.choice!r} not allowed at level {self.level}")

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "choice": self.choice,
            "rationale": self.rationale,
            "decided_at": format_utc(self.decided_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KeyDecision":
        return cls(
            level=int(data["level"]),
            choice=data["choice"],
            rationale=data.get("rationale", ""),
            decided_at=parse_utc(data["decided_at"]),
        )


# -- components and projects -----------------------------------------------------

class ComponentStatus(str, Enum):
    ACTIVE = "active"
    PAUSED = "paused"
    RETIRED = "retired"


@dataclass(frozen=True)
class Transition:
    """One historical level change: forward graduation or a switchback."""

    from_level: int
    to_level: int
    kind: str  # forward | discovery | review | embedded
    at: datetime

    def to_dict(self) -> dict:
        return {
            "from_level": self.from_level,
            "to_level": self.to_level,
            "kind": self.kind,
            "at": format_utc(self.at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Transition":
        return cls(
            from_level=int(data["from_level"]),
            to_level=int(data["to_level"]),
            kind=data["kind"],
            at=parse_utc(data["at"]),
        )


@dataclass(frozen=True)
class ReviewSummary:
    """Row of a component's review history."""

    review_id: str
    level: int
    at: datetime
    decision: str

    def to_dict(self) -> dict:
        return {
            "review_id": self.review_id,
            "level": self.level,
            "at": format_utc(self.at),
            "decision": self.decision,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReviewSummary":
        return cls(
            review_id=data["review_id"],
            level=int(data["level"]),
            at=parse_utc(data["at"]),
            decision=data["decision"],
        )


@dataclass
class TechComponent:
    """A tracked technology: model, algorithm, pipeline, or module."""

    id: str
    name: str
    entry_level: ReadinessLevel
    current_level: ReadinessLevel
    versions: VersionTriplet = field(default_factory=VersionTriplet)
    owners: list[str] = field(default_factory=list)
    requirements: dict[str, Requirement] = field(default_factory=dict)
    deliverables: dict[int, dict[str, DeliverableItem]] = field(default_factory=dict)
    decisions: list[KeyDecision] = field(default_factory=list)
    status: ComponentStatus = ComponentStatus.ACTIVE
    warnings: list[str] = field(default_factory=list)
    review_history: list[ReviewSummary] = field(default_factory=list)
    transitions: list[Transition] = field(default_factory=list)
    entry_justification: str = ""
    last_event_at: datetime | None = None

    def decision_at(self, level: int) -> KeyDecision | None:
        for d in reversed(self.decisions):
            if d.level == level:
                return d
        return None

    def deliverable(self, level: int, key: str) -> DeliverableItem | None:
        return self.deliverables.get(level, {}).get(key)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "entry_level": self.entry_level.value,
            "current_level": self.current_level.value,
            "versions": self.versions.to_dict(),
            "owners": list(self.owners),
            "requirements": [self.requirements[k].to_dict() for k in sorted(self.requirements)],
            "deliverables": {
                str(level): [items[k].to_dict() for k in sorted(items)]
                for level, items in sorted(self.deliverables.items())
            },
            "decisions": [d.to_dict() for d in self.decisions],
            "status": self.status.value,
            "warnings": list(self.warnings),
            "review_history": [r.to_dict() for r in self.review_history],
            "transitions": [t.to_dict() for t in self.transitions],
            "entry_justification": self.entry_justification,
            "last_event_at": format_utc(self.last_event_at) if self.last_event_at else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TechComponent":
        return cls(
            id=data["id"],
            name=data["name"],
            entry_level=level_from_int(int(data["entry_level"])),
            current_level=level_from_int(int(data["current_level"])),
            versions=VersionTriplet.from_dict(data["versions"]),
            owners=list(data.get("owners", [])),
            requirements={r["id"]: Requirement.from_dict(r) for r in data.get("requirements", [])},
            deliverables={
                int(level): {i["key"]: DeliverableItem.from_dict(i) for i in items}
                for level, items in data.get("deliverables", {}).items()
            },
            decisions=[KeyDecision.from_dict(d) for d in data.get("decisions", [])],
            status=ComponentStatus(data.get("status", "active")),
            warnings=list(data.get("warnings", [])),
            review_history=[ReviewSummary.from_dict(r) for r in data.get("review_history", [])],
            transitions=[Transition.from_dict(t) for t in data.get("transitions", [])],
            entry_justification=data.get("entry_justification", ""),
            last_event_at=parse_utc(data["last_event_at"]) if data.get("last_event_at") else None,
        )


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "component"


def decimal_str(value: Decimal | float | int | str, places: int = 4) -> str:
    """Canonical fixed-point text; risk math stores 4 fractional digits."""
    quant = Decimal(1).scaleb(-places)
    return str(Decimal(str(value)).quantize(quant))

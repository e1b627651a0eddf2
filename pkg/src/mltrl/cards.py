"""Report cards: the level-by-level document that travels with a technology.

Canonical file format: a ``---`` front-matter block (component, level, owners,
reviewers, status, versions, updated) followed by exactly these sections in
order: Summary, Assumptions & Limitations, Data, Ethics, Risks, Review
History. Unknown extra sections are preserved verbatim so organizations can
extend their cards without breaking parsing. Rendering always emits LF line
endings and UTF-8.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from decimal import Decimal

from .core import ReadinessLevel, VersionTriplet, format_utc, level_from_int, parse_utc
from .engine import Project
from .errors import ComponentMismatch, MissingSection, ParseError
from .risk import RiskEntry, rank_risks

SECTION_ORDER = (
    "Summary",
    "Assumptions & Limitations",
    "Data",
    "Ethics",
    "Risks",
    "Review History",
)

FRONT_MATTER_KEYS = (
    "component",
    "level",
    "owners",
    "reviewers",
    "status",
    "version_code",
    "version_model",
    "version_data",
    "updated",
)

_ASSUMPTIONS_MARK = "Assumptions:"
_BIASES_MARK = "Known biases & corner cases:"
_CHECKLIST_MARK = "checklist:"


@dataclass(frozen=True)
class DataSource:
    name: str
    version: str
    datasheet: str
    synthetic: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "version": self.version,
            "datasheet": self.datasheet,
            "synthetic": self.synthetic,
        }


@dataclass(frozen=True)
class RiskSummaryRow:
    id: str
    requirement_ref: str
    p_failure: str
    value: int
    score: str
    status: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "requirement_ref": self.requirement_ref,
            "p_failure": self.p_failure,
            "value": self.value,
            "score": self.score,
            "status": self.status,
        }

    @classmethod
    def from_entry(cls, entry: RiskEntry) -> "RiskSummaryRow":
        return cls(
            id=entry.id,
            requirement_ref=entry.requirement_ref,
            p_failure=str(entry.p_failure),
            value=entry.value,
            score=str(entry.score),
            status=entry.status.value,
        )


@dataclass(frozen=True)
class ReviewRow:
    level: int
    at: datetime
    decision: str

    def to_dict(self) -> dict:
        return {"level": self.level, "at": format_utc(self.at), "decision": self.decision}


@dataclass(frozen=True)
class TrlCard:
    component_ref: str
    level: ReadinessLevel
    owners: tuple[str, ...]
    reviewers: tuple[str, ...]
    dev_status: str
    versions: VersionTriplet
    updated_at: datetime
    summary: str = ""
    assumptions: tuple[str, ...] = ()
    data_sources: tuple[DataSource, ...] = ()
    known_biases_corner_cases: tuple[str, ...] = ()
    ethics_text: str = ""
    ethics_checklist_uri: str = ""
    risks_snapshot: tuple[RiskSummaryRow, ...] = ()
    review_history: tuple[ReviewRow, ...] = ()
    extra_sections: tuple[tuple[str, str], ...] = ()

    def to_dict(self) -> dict:
        return {
            "component_ref": self.component_ref,
            "level": self.level.value,
            "owners": list(self.owners),
            "reviewers": list(self.reviewers),
            "dev_status": self.dev_status,
            "versions": self.versions.to_dict(),
            "updated_at": format_utc(self.updated_at),
            "summary": self.summary,
            "assumptions": list(self.assumptions),
            "data_sources": [s.to_dict() for s in self.data_sources],
            "known_biases_corner_cases": list(self.known_biases_corner_cases),
            "ethics_text": self.ethics_text,
            "ethics_checklist_uri": self.ethics_checklist_uri,
            "risks_snapshot": [r.to_dict() for r in self.risks_snapshot],
            "review_history": [r.to_dict() for r in self.review_history],
            "extra_sections": [[t, b] for t, b in self.extra_sections],
        }


# -- assembly -------------------------------------------------------------------


def assemble_card(
    project: Project,
    component_id: str,
    prior: TrlCard | None = None,
    top_k_risks: int = 5,
) -> TrlCard:
    """Project the event-log state into a card, keeping any human-authored
    narrative sections (summary, assumptions, data, biases, ethics text) from
    ``prior``."""
    component = project.component(component_id)
    if prior is not None and prior.component_ref != component_id:
        raise ComponentMismatch(
            f"prior card is for {prior.component_ref!r}, not {component_id!r}"
        )

    requirement_ids = set(component.requirements)
    risks = [r for r in project.risks.values() if r.requirement_ref in requirement_ids]
    top = rank_risks(risks, top_k_risks)

    reviewers: tuple[str, ...]
    if component.review_history:
        last_review = project.reviews.get(component.review_history[-1].review_id)
        reviewers = tuple(last_review.panel) if last_review else tuple(component.owners)
    else:
        reviewers = tuple(component.owners)

    ethics_uri = ""
    for summary in reversed(component.review_history):
        review = project.reviews.get(summary.review_id)
        if review and review.ethics_checklist_ref:
            ethics_uri = review.ethics_checklist_ref
            break
    if not ethics_uri:
        item = component.deliverable(4, "ethics_checklist")
        ethics_uri = item.evidence if item else ""

    level = component.current_level
    dev_status = f"{component.status.value} (level {level.value}: {level.label})"
    updated_at = component.last_event_at or project.created_at

    return TrlCard(
        component_ref=component_id,
        level=level,
        owners=tuple(component.owners),
        reviewers=reviewers,
        dev_status=dev_status,
        versions=component.versions,
        updated_at=updated_at,
        summary=prior.summary if prior else f"{component.name}: {level.label.lower()} stage.",
        assumptions=prior.assumptions if prior else (),
        data_sources=prior.data_sources if prior else (),
        known_biases_corner_cases=prior.known_biases_corner_cases if prior else (),
        ethics_text=(prior.ethics_text if prior and prior.ethics_text else
                     "Ethics checklist reviewed at every gate."),
        ethics_checklist_uri=ethics_uri or (prior.ethics_checklist_uri if prior else ""),
        risks_snapshot=tuple(RiskSummaryRow.from_entry(e) for e in top),
        review_history=tuple(
            ReviewRow(level=r.level, at=r.at, decision=r.decision)
            for r in component.review_history
        ),
        extra_sections=prior.extra_sections if prior else (),
    )


# -- rendering ------------------------------------------------------------------


def render_markdown(card: TrlCard) -> str:
    lines: list[str] = ["---"]
    lines.append(f"component: {card.component_ref}")
    lines.append(f"level: {card.level.value}")
    lines.append("owners:" + _join_list(card.owners))
    lines.append("reviewers:" + _join_list(card.reviewers))
    lines.append(f"status: {card.dev_status}".rstrip())
    lines.append(f"version_code: {card.versions.code}")
    lines.append(f"version_model: {card.versions.model}")
    lines.append(f"version_data: {card.versions.data}")
    lines.append(f"updated: {format_utc(card.updated_at)}")
    lines.append("---")

    sections: list[tuple[str, list[str]]] = [
        ("Summary", card.summary.splitlines() if card.summary else []),
        ("Assumptions & Limitations", _render_assumptions(card)),
        ("Data", [_render_source(s) for s in card.data_sources]),
        ("Ethics", _render_ethics(card)),
        ("Risks", [_render_risk(r) for r in card.risks_snapshot]),
        ("Review History", [_render_review(r) for r in card.review_history]),
    ]
    sections.extend(
        (title, body.splitlines() if body else []) for title, body in card.extra_sections
    )

    for title, body in sections:
        lines.append("")
        lines.append(f"## {title}")
        if body:
            lines.append("")
            lines.extend(body)
    return "\n".join(lines) + "\n"


def _join_list(items: tuple[str, ...]) -> str:
    return f" {', '.join(items)}" if items else ""


def _render_assumptions(card: TrlCard) -> list[str]:
    body = [_ASSUMPTIONS_MARK]
    body.extend(f"- {a}" for a in card.assumptions)
    body.append(_BIASES_MARK)
    body.extend(f"- {b}" for b in card.known_biases_corner_cases)
    return body


def _render_source(source: DataSource) -> str:
    flag = "synthetic" if source.synthetic else "real"
    return f"- {source.name} | {source.version} | {source.datasheet} | {flag}"


def _render_ethics(card: TrlCard) -> list[str]:
    body = card.ethics_text.splitlines() if card.ethics_text else []
    if body:
        body.append("")
    body.append(f"{_CHECKLIST_MARK} {card.ethics_checklist_uri}".rstrip())
    return body


def _render_risk(row: RiskSummaryRow) -> str:
    return (
        f"- {row.id} | {row.requirement_ref} | p={row.p_failure} | "
        f"value={row.value} | score={row.score} | {row.status}"
    )


def _render_review(row: ReviewRow) -> str:
    return f"- {row.level} | {format_utc(row.at)} | {row.decision}"


# -- parsing --------------------------------------------------------------------


def parse_card(text: str) -> TrlCard:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != "---":
        raise ParseError(1, "card must start with a --- front-matter block")

    fields: dict[str, str] = {}
    index = 1
    while index < len(lines):
        line = lines[index]
        if line.strip() == "---":
            index += 1
            break
        if ":" not in line:
            raise ParseError(index + 1, f"expected key: value, got {line!r}")
        key, _, value = line.partition(":")
        key = key.strip()
        if key not in FRONT_MATTER_KEYS:
            raise ParseError(index + 1, f"unknown front-matter key {key!r}")
        if key in fields:
            raise ParseError(index + 1, f"duplicate front-matter key {key!r}")
        fields[key] = value[1:] if value.startswith(" ") else value
        index += 1
    else:
        raise ParseError(len(lines), "front-matter block never closed")

    missing_keys = [k for k in FRONT_MATTER_KEYS if k not in fields]
    if missing_keys:
        raise ParseError(index, f"front matter missing keys: {', '.join(missing_keys)}")

    sections: list[tuple[str, list[str], int]] = []
    current: tuple[str, list[str], int] | None = None
    for offset, line in enumerate(lines[index:], start=index):
        if line.startswith("## "):
            if current:
                sections.append(current)
            current = (line[3:], [], offset + 1)
        elif current:
            current[1].append(line)
        elif line.strip():
            raise ParseError(offset + 1, f"content before first section: {line!r}")
    if current:
        sections.append(current)

    by_title = {title: (body, line_no) for title, body, line_no in sections}
    for required in SECTION_ORDER:
        if required not in by_title:
            raise MissingSection(required)

    def body_of(title: str) -> list[str]:
        return _strip_blank(by_title[title][0])

    summary = "\n".join(body_of("Summary"))
    assumptions, biases = _parse_assumptions(*by_title["Assumptions & Limitations"])
    data_sources = _parse_data(*by_title["Data"])
    ethics_text, ethics_uri = _parse_ethics(*by_title["Ethics"])
    risks = _parse_risks(*by_title["Risks"])
    history = _parse_history(*by_title["Review History"])
    extras = tuple(
        (title, "\n".join(_strip_blank(body)))
        for title, body, _ in sections
        if title not in SECTION_ORDER
    )

    try:
        level = level_from_int(int(fields["level"]))
    except ValueError:
        raise ParseError(index, f"level {fields['level']!r} is not an integer") from None
    versions = VersionTriplet(
        code=fields["version_code"], model=fields["version_model"], data=fields["version_data"]
    )
    return TrlCard(
        component_ref=fields["component"],
        level=level,
        owners=_split_list(fields["owners"]),
        reviewers=_split_list(fields["reviewers"]),
        dev_status=fields["status"],
        versions=versions,
        updated_at=parse_utc(fields["updated"]),
        summary=summary,
        assumptions=assumptions,
        data_sources=data_sources,
        known_biases_corner_cases=biases,
        ethics_text=ethics_text,
        ethics_checklist_uri=ethics_uri,
        risks_snapshot=risks,
        review_history=history,
        extra_sections=extras,
    )


def _strip_blank(body: list[str]) -> list[str]:
    start, end = 0, len(body)
    while start < end and not body[start].strip():
        start += 1
    while end > start and not body[end - 1].strip():
        end -= 1
    return body[start:end]


def _split_list(value: str) -> tuple[str, ...]:
    value = value.strip()
    return tuple(value.split(", ")) if value else ()


def _parse_assumptions(body: list[str], line_no: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    assumptions: list[str] = []
    biases: list[str] = []
    bucket: list[str] | None = None
    for offset, line in enumerate(_strip_blank(body)):
        if line == _ASSUMPTIONS_MARK:
            bucket = assumptions
        elif line == _BIASES_MARK:
            bucket = biases
        elif line.startswith("- "):
            if bucket is None:
                raise ParseError(line_no + offset, "list item before a marker line")
            bucket.append(line[2:])
        elif line.strip():
            raise ParseError(line_no + offset, f"unexpected line {line!r}")
    return tuple(assumptions), tuple(biases)


def _parse_data(body: list[str], line_no: int) -> tuple[DataSource, ...]:
    sources = []
    for offset, line in enumerate(_strip_blank(body)):
        if not line.startswith("- "):
            raise ParseError(line_no + offset, f"data rows start with '- ': {line!r}")
        parts = line[2:].rsplit(" | ", 3)
        if len(parts) != 4 or parts[3] not in ("real", "synthetic"):
            raise ParseError(
                line_no + offset, "data row format: name | version | datasheet | real|synthetic"
            )
        sources.append(
            DataSource(
                name=parts[0], version=parts[1], datasheet=parts[2],
                synthetic=parts[3] == "synthetic",
            )
        )
    return tuple(sources)


def _parse_ethics(body: list[str], line_no: int) -> tuple[str, str]:
    stripped = _strip_blank(body)
    uri = ""
    uri_index = None
    for offset in range(len(stripped) - 1, -1, -1):
        if stripped[offset].startswith(_CHECKLIST_MARK):
            uri = stripped[offset][len(_CHECKLIST_MARK):].strip()
            uri_index = offset
            break
    if uri_index is None:
        raise ParseError(line_no, "ethics section needs a 'checklist:' line")
    text = "\n".join(_strip_blank(stripped[:uri_index]))
    return text, uri


def _parse_risks(body: list[str], line_no: int) -> tuple[RiskSummaryRow, ...]:
    rows = []
    for offset, line in enumerate(_strip_blank(body)):
        if not line.startswith("- "):
            raise ParseError(line_no + offset, f"risk rows start with '- ': {line!r}")
        parts = line[2:].split(" | ")
        if (
            len(parts) != 6
            or not parts[2].startswith("p=")
            or not parts[3].startswith("value=")
            or not parts[4].startswith("score=")
        ):
            raise ParseError(
                line_no + offset,
                "risk row format: id | requirement | p=… | value=… | score=… | status",
            )
        try:
            rows.append(
                RiskSummaryRow(
                    id=parts[0],
                    requirement_ref=parts[1],
                    p_failure=str(Decimal(parts[2][2:])),
                    value=int(parts[3][6:]),
                    score=str(Decimal(parts[4][6:])),
                    status=parts[5],
                )
            )
        except (ValueError, ArithmeticError) as exc:
            raise ParseError(line_no + offset, f"bad risk row: {exc}") from None
    return tuple(rows)


def _parse_history(body: list[str], line_no: int) -> tuple[ReviewRow, ...]:
    rows = []
    for offset, line in enumerate(_strip_blank(body)):
        if not line.startswith("- "):
            raise ParseError(line_no + offset, f"history rows start with '- ': {line!r}")
        parts = line[2:].split(" | ")
        if len(parts) != 3:
            raise ParseError(line_no + offset, "history row format: level | timestamp | decision")
        try:
            rows.append(ReviewRow(level=int(parts[0]), at=parse_utc(parts[1]), decision=parts[2]))
        except ValueError as exc:
            raise ParseError(line_no + offset, f"bad history row: {exc}") from None
    return tuple(rows)


# -- validation -------------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    severity: str  # error | warning
    code: str
    message: str

    def to_dict(self) -> dict:
        return {"severity": self.severity, "code": self.code, "message": self.message}


def validate_card(card: TrlCard) -> list[Finding]:
    """Structural findings; errors block graduation, warnings do not."""
    findings: list[Finding] = []

    def error(code: str, message: str) -> None:
        findings.append(Finding("error", code, message))

    def warning(code: str, message: str) -> None:
        findings.append(Finding("warning", code, message))

    if not card.owners:
        error("owners_missing", "a card must name at least one owner")
    if not card.reviewers:
        error("reviewers_missing", "a card must name its reviewers")
    if not card.dev_status.strip():
        error("status_missing", "development status must be stated")
    if not card.ethics_text.strip():
        error("ethics_missing", "the ethics section must be filled in at every level")
    if not card.ethics_checklist_uri.strip():
        warning("ethics_checklist_unlinked", "no ethics checklist reference recorded yet")

    if card.level.value >= 1:
        for part in ("code", "model", "data"):
            if getattr(card.versions, part) == "0.0.0":
                warning(f"{part}_unversioned", f"{part} never versioned")

    if card.level.value >= 4:
        real = [s for s in card.data_sources if not s.synthetic]
        if not real:
            error(
                "real_data_required",
                "from level 4 on, at least one non-synthetic data source is required",
            )

    if not card.summary.strip():
        warning("summary_empty", "the summary section is empty")
    return findings


# -- diffing ----------------------------------------------------------------------


@dataclass(frozen=True)
class CardChange:
    field: str
    change: str  # added | removed | changed
    old: str | None
    new: str | None

    def to_dict(self) -> dict:
        return {"field": self.field, "change": self.change, "old": self.old, "new": self.new}


def diff_cards(old: TrlCard, new: TrlCard) -> list[CardChange]:
    """Field-level changes in a stable order."""
    if old.component_ref != new.component_ref:
        raise ComponentMismatch(f"{old.component_ref!r} vs {new.component_ref!r}")

    changes: list[CardChange] = []

    def scalar(name: str, old_value, new_value) -> None:
        if old_value != new_value:
            changes.append(CardChange(name, "changed", str(old_value), str(new_value)))

    def listdiff(name: str, old_items, new_items) -> None:
        old_set, new_set = set(old_items), set(new_items)
        for item in sorted(new_set - old_set):
            changes.append(CardChange(name, "added", None, item))
        for item in sorted(old_set - new_set):
            changes.append(CardChange(name, "removed", item, None))

    scalar("level", old.level.value, new.level.value)
    listdiff("owners", old.owners, new.owners)
    listdiff("reviewers", old.reviewers, new.reviewers)
    scalar("status", old.dev_status, new.dev_status)
    scalar("version_code", old.versions.code, new.versions.code)
    scalar("version_model", old.versions.model, new.versions.model)
    scalar("version_data", old.versions.data, new.versions.data)
    scalar("updated", format_utc(old.updated_at), format_utc(new.updated_at))
    scalar("summary", old.summary, new.summary)
    listdiff("assumptions", old.assumptions, new.assumptions)
    listdiff("data", [_render_source(s)[2:] for s in old.data_sources],
             [_render_source(s)[2:] for s in new.data_sources])
    listdiff("biases", old.known_biases_corner_cases, new.known_biases_corner_cases)
    scalar("ethics_text", old.ethics_text, new.ethics_text)
    scalar("ethics_checklist", old.ethics_checklist_uri, new.ethics_checklist_uri)
    listdiff("risks", [_render_risk(r)[2:] for r in old.risks_snapshot],
             [_render_risk(r)[2:] for r in new.risks_snapshot])
    listdiff("review_history", [_render_review(r)[2:] for r in old.review_history],
             [_render_review(r)[2:] for r in new.review_history])
    listdiff("extra_sections", [t for t, _ in old.extra_sections],
             [t for t, _ in new.extra_sections])
    return changes

"""Seeded random card generator for round-trip properties.

Generated text exercises unicode and multiline content while staying inside
the documented format constraints: single-line list items, no '## ' at line
starts, no trailing whitespace on free-text lines.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone
from decimal import Decimal

from mltrl.cards import DataSource, ReviewRow, RiskSummaryRow, TrlCard
from mltrl.core import VersionTriplet, level_from_int

WORDS = [
    "模型", "данные", "latence", "δίκτυο", "sensor", "piñata", "café", "meteor",
    "σ-algebra", "naïve", "🛰", "über", "manifold", "trænings", "assay", "ωmega",
]

SAFE = "abcdefghijklmnopqrstuvwxyz0123456789"


def _word(rng: random.Random) -> str:
    if rng.random() < 0.4:
        return rng.choice(WORDS)
    return "".join(rng.choice(SAFE) for _ in range(rng.randint(2, 8)))


def _line(rng: random.Random, max_words: int = 6) -> str:
    return " ".join(_word(rng) for _ in range(rng.randint(1, max_words)))


def _text(rng: random.Random, max_lines: int = 3) -> str:
    lines = [_line(rng) for _ in range(rng.randint(0, max_lines))]
    return "\n".join(lines)


def _slug(rng: random.Random) -> str:
    return "-".join("".join(rng.choice(SAFE) for _ in range(rng.randint(2, 6)))
                    for _ in range(rng.randint(1, 3)))


def _version(rng: random.Random) -> str:
    return f"{rng.randint(0, 9)}.{rng.randint(0, 20)}.{rng.randint(0, 40)}"


def _stamp(rng: random.Random) -> datetime:
    base = datetime(2026, 1, 1, tzinfo=timezone.utc)
    stamp = base + timedelta(seconds=rng.randint(0, 10_000_000))
    if rng.random() < 0.3:
        stamp = stamp.replace(microsecond=rng.randint(1, 999_999))
    return stamp


def random_card(rng: random.Random) -> TrlCard:
    level = level_from_int(rng.randint(0, 9))
    sources = tuple(
        DataSource(
            name=_line(rng, 3),
            version=_version(rng),
            datasheet=f"https://sheets/{_slug(rng)}",
            synthetic=rng.random() < 0.5,
        )
        for _ in range(rng.randint(0, 4))
    )
    risks = tuple(
        RiskSummaryRow(
            id=f"risk-{_slug(rng)}",
            requirement_ref=f"req-{_slug(rng)}",
            p_failure=f"{rng.randint(0, 10000) / 10000:.4f}",
            value=rng.randint(1, 10),
            score=f"{rng.randint(0, 100000) / 10000:.4f}",
            status=rng.choice(["open", "mitigated", "accepted"]),
        )
        for _ in range(rng.randint(0, 3))
    )
    history = tuple(
        ReviewRow(level=rng.randint(0, 9), at=_stamp(rng),
                  decision=rng.choice(["graduate", "hold", "switchback"]))
        for _ in range(rng.randint(0, 4))
    )
    extras = tuple(
        (f"Appendix {_slug(rng)}", _text(rng)) for _ in range(rng.randint(0, 2))
    )
    return TrlCard(
        component_ref=_slug(rng),
        level=level,
        owners=tuple(_slug(rng) for _ in range(rng.randint(1, 3))),
        reviewers=tuple(_slug(rng) for _ in range(rng.randint(1, 3))),
        dev_status=_line(rng),
        versions=VersionTriplet(
            code=_version(rng), model=_version(rng), data=_version(rng)
        ),
        updated_at=_stamp(rng),
        summary=_text(rng),
        assumptions=tuple(_line(rng) for _ in range(rng.randint(0, 4))),
        data_sources=sources,
        known_biases_corner_cases=tuple(_line(rng) for _ in range(rng.randint(0, 3))),
        ethics_text=_text(rng, 2) or "reviewed",
        ethics_checklist_uri=f"https://ethics/{_slug(rng)}",
        risks_snapshot=risks,
        review_history=history,
        extra_sections=extras,
    )

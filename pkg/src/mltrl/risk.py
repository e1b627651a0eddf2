"""Quantified requirement risks: score = p(failure) x value, ranked 5x5 matrix.

Probabilities and scores are stored as fixed-point decimals with four
fractional digits so serialized logs never pick up binary-float drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum

from .core import decimal_str
from .errors import DomainError

ONE = Decimal("1")
ZERO = Decimal("0")


class RiskStatus(str, Enum):
    OPEN = "open"
    MITIGATED = "mitigated"
    ACCEPTED = "accepted"


def compute_risk(p_failure: Decimal | float | str, value: int) -> Decimal:
    """Risk score: probability of failure times integer value 1..10."""
    p = Decimal(str(p_failure))
    if not ZERO <= p <= ONE:
        raise DomainError(f"p_failure {p} outside [0,1]")
    if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 10:
        raise DomainError(f"value {value!r} not an integer in 1..10")
    return Decimal(decimal_str(p * value))


@dataclass(frozen=True)
class RiskEntry:
    id: str
    requirement_ref: str
    p_failure: Decimal
    value: int
    mitigation: str = ""
    status: RiskStatus = RiskStatus.OPEN
    score: Decimal = field(init=False, default=ZERO)

    def __post_init__(self):
        object.__setattr__(self, "p_failure", Decimal(decimal_str(self.p_failure)))
        object.__setattr__(self, "score", compute_risk(self.p_failure, self.value))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "requirement_ref": self.requirement_ref,
            "p_failure": decimal_str(self.p_failure),
            "value": self.value,
            "score": decimal_str(self.score),
            "mitigation": self.mitigation,
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RiskEntry":
        return cls(
            id=data["id"],
            requirement_ref=data["requirement_ref"],
            p_failure=Decimal(data["p_failure"]),
            value=int(data["value"]),
            mitigation=data.get("mitigation", ""),
            status=RiskStatus(data.get("status", "open")),
        )


def rank_risks(entries: list[RiskEntry], k: int) -> list[RiskEntry]:
    """Top-k open entries: score desc, then value desc, then id asc."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    open_entries = [e for e in entries if e.status is RiskStatus.OPEN]
    open_entries.sort(key=lambda e: (-e.score, -e.value, e.id))
    return open_entries[:k]


# Default 5x5 binning. Likelihood bins are half-open except the last, which
# closes at 1.0 so no probability is ever unbinned.
LIKELIHOOD_EDGES = [Decimal("0.2"), Decimal("0.4"), Decimal("0.6"), Decimal("0.8")]
IMPACT_BINS = [(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)]
MATRIX_SIZE = 5


def likelihood_bin(p: Decimal) -> int:
    """0-based bin index over [0,0.2), [0.2,0.4), [0.4,0.6), [0.6,0.8), [0.8,1.0]."""
    p = Decimal(str(p))
    if not ZERO <= p <= ONE:
        raise DomainError(f"p_failure {p} outside [0,1]")
    for i, edge in enumerate(LIKELIHOOD_EDGES):
        if p < edge:
            return i
    return MATRIX_SIZE - 1


def impact_bin(value: int) -> int:
    """0-based bin index over {1,2}, {3,4}, {5,6}, {7,8}, {9,10}."""
    for i, (lo, hi) in enumerate(IMPACT_BINS):
        if lo <= value <= hi:
            return i
    raise DomainError(f"value {value!r} not an integer in 1..10")


@dataclass(frozen=True)
class RiskMatrix:
    """5x5 placement of open risk entries by (likelihood bin, impact bin)."""

    cells: dict[tuple[int, int], tuple[str, ...]]
    entries: dict[str, RiskEntry]

    def cell(self, likelihood: int, impact: int) -> tuple[str, ...]:
        return self.cells.get((likelihood, impact), ())

    def to_dict(self) -> dict:
        return {
            "likelihood_bins": ["[0,0.2)", "[0.2,0.4)", "[0.4,0.6)", "[0.6,0.8)", "[0.8,1.0]"],
            "impact_bins": ["1-2", "3-4", "5-6", "7-8", "9-10"],
            "cells": {
                f"{li},{ii}": list(ids)
                for (li, ii), ids in sorted(self.cells.items())
                if ids
            },
        }

    def render_text(self) -> str:
        """Plain-text grid; rows are likelihood bins from high to low."""
        row_labels = ["0.8-1.0", "0.6-0.8", "0.4-0.6", "0.2-0.4", "0.0-0.2"]
        col_labels = ["1-2", "3-4", "5-6", "7-8", "9-10"]
        width = 8
        lines = ["p(fail)  " + "".join(c.ljust(width) for c in col_labels)]
        for row, label in zip(range(MATRIX_SIZE - 1, -1, -1), row_labels):
            cells = [str(len(self.cell(row, col))).ljust(width) for col in range(MATRIX_SIZE)]
            lines.append(label.ljust(9) + "".join(cells))
        return "\n".join(line.rstrip() for line in lines)


def build_matrix(entries: list[RiskEntry]) -> RiskMatrix:
    """Place each open entry in exactly one cell of the default 5x5 grid."""
    cells: dict[tuple[int, int], list[str]] = {}
    index: dict[str, RiskEntry] = {}
    for entry in entries:
        if entry.status is not RiskStatus.OPEN:
            continue
        key = (likelihood_bin(entry.p_failure), impact_bin(entry.value))
        cells.setdefault(key, []).append(entry.id)
        index[entry.id] = entry
    return RiskMatrix(
        cells={key: tuple(sorted(ids)) for key, ids in cells.items()},
        entries=index,
    )


def default_threshold_cells(count: int = 6) -> tuple[tuple[int, int], ...]:
    """The ``count`` cells with the highest likelihood x impact weight.

    Weight of cell (li, ii) is (li+1)*(ii+1); ties resolve toward the
    higher likelihood bin, then the higher impact bin.
    """
    ranked = sorted(
        ((li, ii) for li in range(MATRIX_SIZE) for ii in range(MATRIX_SIZE)),
        key=lambda cell: (-(cell[0] + 1) * (cell[1] + 1), -cell[0], -cell[1]),
    )
    return tuple(ranked[:count])


def critical_scenarios(
    matrix: RiskMatrix,
    threshold_cells: tuple[tuple[int, int], ...] | None = None,
) -> list[str]:
    """Requirement ids referenced from the threshold cells, deduplicated."""
    cells = threshold_cells if threshold_cells is not None else default_threshold_cells()
    seen: list[str] = []
    for cell in cells:
        for risk_id in matrix.cell(*cell):
            ref = matrix.entries[risk_id].requirement_ref
            if ref not in seen:
                seen.append(ref)
    return seen

"""Independent checks of finished arrays.

Nothing here reuses :class:`~higher_index_ca.core.CoverageState`; counts are
recomputed from scratch so they can serve as an oracle for it.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from higher_index_ca.core import CAParams, Interaction, as_array, interaction_count, unrank

logger = logging.getLogger(__name__)

REPORT_LIMIT = 100


def brute_force_counts(array: ArrayLike, params: CAParams) -> NDArray[np.int64]:
    """Coverage count of every rank by direct recount, column set by column set."""
    rows = as_array(array, params)
    block = params.v**params.t
    counts = np.zeros(interaction_count(params), dtype=np.int64)
    powers = params.v ** np.arange(params.t)
    for columns in combinations(range(params.k), params.t):
        base = sum(math.comb(c, j + 1) for j, c in enumerate(columns)) * block
        codes = rows[:, list(columns)] @ powers
        counts[base : base + block] = np.bincount(codes, minlength=block)
    return counts


@dataclass
class CoverageReport:
    params: CAParams
    rows: int
    lam: int
    min_coverage: int
    deficient_count: int
    deficient: list[tuple[Interaction, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.deficient_count == 0

    def __str__(self) -> str:
        verdict = "is" if self.ok else "is NOT"
        lines = [
            f"{self.rows}-row array {verdict} a covering array of index {self.lam} "
            f"(t={self.params.t}, k={self.params.k}, v={self.params.v}); "
            f"minimum coverage {self.min_coverage}"
        ]
        if not self.ok:
            lines.append(
                f"{self.deficient_count} interaction(s) covered fewer than {self.lam} times:"
            )
            lines.extend(f"  {item} covered {count}x" for item, count in self.deficient)
            if self.deficient_count > len(self.deficient):
                lines.append(f"  ... {self.deficient_count - len(self.deficient)} more")
        return "\n".join(lines)


def is_covering_array(
    array: ArrayLike,
    params: CAParams,
    lam: int | None = None,
    limit: int | None = REPORT_LIMIT,
) -> tuple[bool, CoverageReport]:
    """Certify ``array`` at index ``lam`` (default ``params.lam``).

    Shape or symbol problems raise :class:`ArrayShapeError`; a well-formed
    array that misses coverage returns ``False`` with a report listing up to
    ``limit`` deficient interactions (``None`` lists all).
    """
    lam = params.lam if lam is None else lam
    rows = as_array(array, params)
    counts = brute_force_counts(rows, params)
    short = np.flatnonzero(counts < lam)
    logger.debug("%d rows checked at index %d: %d deficient", len(rows), lam, len(short))
    listed = short if limit is None else short[:limit]
    report = CoverageReport(
        params=params,
        rows=len(rows),
        lam=lam,
        min_coverage=int(counts.min()),
        deficient_count=len(short),
        deficient=[(unrank(int(r), params), int(counts[r])) for r in listed],
    )
    return report.ok, report


@dataclass(frozen=True)
class ProfileRow:
    row: int
    newly_covered: int
    cumulative: int


def first_covered_rows(array: ArrayLike, params: CAParams, lam: int) -> NDArray[np.int64]:
    """Row index at which each rank first reaches ``lam`` coverages, -1 if never."""
    rows = as_array(array, params)
    counts = np.zeros(interaction_count(params), dtype=np.int64)
    first = np.full(len(counts), -1, dtype=np.int64)
    block = params.v**params.t
    powers = params.v ** np.arange(params.t)
    offsets = np.array(
        [sum(math.comb(c, j + 1) for j, c in enumerate(cols)) * block
         for cols in combinations(range(params.k), params.t)],
        dtype=np.int64,
    )
    column_sets = np.array(list(combinations(range(params.k), params.t)), dtype=np.intp)
    for index, row in enumerate(rows):
        ranks = offsets + row[column_sets] @ powers
        counts[ranks] += 1
        reached = ranks[counts[ranks] == lam]
        first[reached] = index
    return first


def coverage_profile(array: ArrayLike, params: CAParams, lam: int) -> list[ProfileRow]:
    """Per row: how many interactions first reach ``lam`` coverages there."""
    rows = as_array(array, params)
    first = first_covered_rows(rows, params, lam)
    newly = np.bincount(first[first >= 0], minlength=len(rows))[: len(rows)]
    cumulative = np.cumsum(newly)
    return [
        ProfileRow(row=i, newly_covered=int(n), cumulative=int(c))
        for i, (n, c) in enumerate(zip(newly, cumulative))
    ]


def write_profile_csv(path: Path | str, profile: list[ProfileRow]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["row", "newly_covered", "cumulative"])
        writer.writerows((p.row, p.newly_covered, p.cumulative) for p in profile)
    return path

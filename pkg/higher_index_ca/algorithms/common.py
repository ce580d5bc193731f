"""Pieces shared by every stage algorithm."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from higher_index_ca.core import CoverageState, Row
from higher_index_ca.errors import InvalidParametersError

UNSET = -1


@dataclass(frozen=True)
class StageGoal:
    """Raise guaranteed coverage from ``alpha`` (current) to ``beta`` (desired)."""

    alpha: int
    beta: int

    def __post_init__(self) -> None:
        if not 0 <= self.alpha < self.beta:
            raise InvalidParametersError(
                f"need 0 <= alpha < beta, got alpha={self.alpha}, beta={self.beta}"
            )


@dataclass
class WorkCounter:
    """Machine-independent cost.

    Counts coverage updates (one per interaction touched by an appended row or
    scanned for deficiency), density evaluations (one per interaction cell
    checked against a candidate symbol, one per interaction in an expectation)
    and graph edge visits.
    """

    coverage_updates: int = 0
    interaction_evaluations: int = 0
    edge_visits: int = 0

    @property
    def total(self) -> int:
        return self.coverage_updates + self.interaction_evaluations + self.edge_visits


@dataclass(frozen=True)
class DeficiencyMap:
    """Interactions still short of ``beta``, with how many coverages they lack."""

    ranks: NDArray[np.intp]
    deficits: NDArray[np.int64] = field(repr=False)

    @classmethod
    def from_state(
        cls, state: CoverageState, beta: int, work: WorkCounter | None = None
    ) -> DeficiencyMap:
        all_deficits = state.deficiencies(beta)
        ranks = np.flatnonzero(all_deficits)
        if work is not None:
            work.coverage_updates += len(all_deficits)
        return cls(ranks=ranks, deficits=all_deficits[ranks])

    @classmethod
    def from_dict(cls, deficits: dict[int, int]) -> DeficiencyMap:
        items = sorted((r, d) for r, d in deficits.items() if d > 0)
        return cls(
            ranks=np.array([r for r, _ in items], dtype=np.intp),
            deficits=np.array([d for _, d in items], dtype=np.int64),
        )

    def __len__(self) -> int:
        return len(self.ranks)

    @property
    def units(self) -> int:
        return int(self.deficits.sum())

    def as_dict(self) -> dict[int, int]:
        return {int(r): int(d) for r, d in zip(self.ranks, self.deficits)}


def fill_row(state: CoverageState, fixed: Row) -> Row:
    """Complete a partial row (``UNSET`` cells) with least-frequent symbols."""
    return np.where(fixed != UNSET, fixed, state.least_frequent_symbols())


def emit_row(state: CoverageState, row: Row, work: WorkCounter) -> NDArray[np.intp]:
    ranks = state.append_row(row)
    work.coverage_updates += len(ranks)
    return ranks

"""Density stage: rows chosen symbol by symbol by conditional expectation.

With ``N`` rows still to be built uniformly at random, an interaction lacking
``d`` coverages stays deficient with probability ``P(Bin(N, p) < d)`` where
``p = v**-t``. Each row fixes its columns left to right, taking the symbol
that minimises the sum of these probabilities once the current row is
accounted for exactly.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray
from scipy.stats import binom

from higher_index_ca.algorithms.common import (
    UNSET,
    DeficiencyMap,
    StageGoal,
    WorkCounter,
    emit_row,
)
from higher_index_ca.core import CoverageState

logger = logging.getLogger(__name__)


def _miss_probabilities(deficits: NDArray[np.int64], n: int, p: float) -> NDArray[np.float64]:
    return np.asarray(binom.cdf(deficits - 1, n, p), dtype=np.float64)


def density_expectation(
    deficiencies: DeficiencyMap, n: int, p: float, work: WorkCounter | None = None
) -> float:
    """Expected number of interactions still deficient after ``n`` random rows."""
    if n < 0:
        raise ValueError(f"row budget must be >= 0, got {n}")
    if not 0 < p <= 1:
        raise ValueError(f"probability must lie in (0, 1], got {p}")
    if work is not None:
        work.interaction_evaluations += len(deficiencies)
    if not len(deficiencies):
        return 0.0
    return float(_miss_probabilities(deficiencies.deficits, n, p).sum())


def initial_row_estimate(
    deficiencies: DeficiencyMap, p: float, work: WorkCounter | None = None
) -> int:
    """Smallest N >= 0 with ``density_expectation(deficiencies, N, p) < 1``."""
    if not len(deficiencies):
        return 0
    # E(0) counts every deficient interaction, so the answer is at least 1
    low, high = 0, 1
    while density_expectation(deficiencies, high, p, work) >= 1:
        low, high = high, high * 2
    while high - low > 1:
        middle = (low + high) // 2
        if density_expectation(deficiencies, middle, p, work) < 1:
            high = middle
        else:
            low = middle
    return high


def run_density(state: CoverageState, goal: StageGoal, work: WorkCounter | None = None) -> int:
    """Append density rows until every interaction is covered ``goal.beta`` times."""
    work = work if work is not None else WorkCounter()
    params = state.params
    p = float(params.v) ** -params.t
    deficiency = DeficiencyMap.from_state(state, goal.beta, work)
    budget = initial_row_estimate(deficiency, p, work)
    logger.debug("density %d->%d: %d deficient, initial estimate N=%d",
                 goal.alpha, goal.beta, len(deficiency), budget)

    added = 0
    while len(deficiency):
        row = _choose_row(state, deficiency, max(budget - 1, 0), p, work)
        emit_row(state, row, work)
        added += 1
        deficiency = DeficiencyMap.from_state(state, goal.beta, work)
        budget = initial_row_estimate(deficiency, p, work)
        logger.debug("density row %d: %d units left, N=%d", added, deficiency.units, budget)
    return added


def _choose_row(
    state: CoverageState,
    deficiency: DeficiencyMap,
    rest: int,
    p: float,
    work: WorkCounter,
) -> NDArray[np.int64]:
    params = state.params
    columns = state.table.columns[deficiency.ranks]
    values = state.table.values[deficiency.ranks]
    miss_if_hit = _miss_probabilities(deficiency.deficits - 1, rest, p)
    miss_if_not = _miss_probabilities(deficiency.deficits, rest, p)

    row = np.full(params.k, UNSET, dtype=np.int64)
    alive = np.ones(len(deficiency), dtype=bool)
    unfixed = np.full(len(deficiency), params.t, dtype=np.int64)
    for column in range(params.k):
        involved = columns == column
        touches = involved.any(axis=1)
        wanted = np.where(touches, (values * involved).sum(axis=1), UNSET)
        best_symbol, best_score = 0, np.inf
        for symbol in range(params.v):
            alive_after = alive & (~touches | (wanted == symbol))
            hit = np.where(alive_after, float(params.v) ** -(unfixed - touches), 0.0)
            score = float((hit * miss_if_hit + (1.0 - hit) * miss_if_not).sum())
            work.interaction_evaluations += len(deficiency) * params.t
            if score < best_score:
                best_symbol, best_score = symbol, score
        row[column] = best_symbol
        alive &= ~touches | (wanted == best_symbol)
        unfixed -= touches

    if not alive.any():
        logger.warning("density row retires no deficiency; embedding interaction rank %d",
                       int(deficiency.ranks[0]))
        row[columns[0]] = values[0]
    return row

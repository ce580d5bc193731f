"""Adaptive basic stage: one row per missing coverage of each interaction."""

from __future__ import annotations

import logging

from higher_index_ca.algorithms.common import DeficiencyMap, StageGoal, WorkCounter, emit_row
from higher_index_ca.core import CoverageState

logger = logging.getLogger(__name__)


def run_basic(state: CoverageState, goal: StageGoal, work: WorkCounter | None = None) -> int:
    """Append rows until every interaction is covered at least ``goal.beta`` times.

    Deficiencies are frozen at entry: an interaction lacking ``d`` coverages
    gets exactly ``d`` dedicated rows, even if earlier rows of this stage
    happened to cover it. Cells outside the interaction take the symbol that
    is currently least frequent in their column (ties: smallest symbol).

    Returns the number of rows appended.
    """
    work = work if work is not None else WorkCounter()
    deficiency = DeficiencyMap.from_state(state, goal.beta, work)
    columns = state.table.columns[deficiency.ranks]
    values = state.table.values[deficiency.ranks]

    before = len(state)
    for cols, vals, missing in zip(columns, values, deficiency.deficits):
        for _ in range(int(missing)):
            row = state.least_frequent_symbols()
            row[cols] = vals
            emit_row(state, row, work)
    added = len(state) - before
    logger.debug("basic %d->%d: %d rows for %d deficient interactions",
                 goal.alpha, goal.beta, added, len(deficiency))
    return added

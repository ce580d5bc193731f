"""Stage algorithms, addressed by their single-letter codes.

========  ==========================================  ===============
Code      Algorithm                                   Entry point
========  ==========================================  ===============
``B``     adaptive basic                              :func:`run_basic`
``L``     colouring, largest-first vertex order       :func:`run_coloring`
``S``     colouring, smallest-last vertex order       :func:`run_coloring`
``D``     density (conditional expectation)           :func:`run_density`
========  ==========================================  ===============
"""

from __future__ import annotations

import enum

from higher_index_ca.algorithms.basic import run_basic
from higher_index_ca.algorithms.coloring import (
    Graph,
    IncompatibilityGraph,
    SimpleGraph,
    VertexOrder,
    build_incompatibility_graph,
    greedy_color,
    order_largest_first,
    order_smallest_last,
    rows_from_coloring,
    run_coloring,
)
from higher_index_ca.algorithms.common import UNSET, DeficiencyMap, StageGoal, WorkCounter
from higher_index_ca.algorithms.density import (
    density_expectation,
    initial_row_estimate,
    run_density,
)
from higher_index_ca.core import CoverageState


class Algorithm(str, enum.Enum):
    BASIC = "B"
    LARGEST_FIRST = "L"
    SMALLEST_LAST = "S"
    DENSITY = "D"

    @classmethod
    def from_code(cls, code: str) -> Algorithm:
        try:
            return cls(code.strip().upper())
        except ValueError:
            codes = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown algorithm {code!r}; expected one of {codes}") from None

    def __str__(self) -> str:
        return self.value


def run_stage(
    algorithm: Algorithm,
    state: CoverageState,
    goal: StageGoal,
    work: WorkCounter | None = None,
) -> int:
    """Run one stage in place and return the number of rows it appended."""
    if algorithm is Algorithm.BASIC:
        return run_basic(state, goal, work)
    if algorithm is Algorithm.LARGEST_FIRST:
        return run_coloring(state, goal, VertexOrder.LARGEST_FIRST, work)
    if algorithm is Algorithm.SMALLEST_LAST:
        return run_coloring(state, goal, VertexOrder.SMALLEST_LAST, work)
    return run_density(state, goal, work)


__all__ = [
    "UNSET",
    "Algorithm",
    "DeficiencyMap",
    "Graph",
    "IncompatibilityGraph",
    "SimpleGraph",
    "StageGoal",
    "VertexOrder",
    "WorkCounter",
    "build_incompatibility_graph",
    "density_expectation",
    "greedy_color",
    "initial_row_estimate",
    "order_largest_first",
    "order_smallest_last",
    "rows_from_coloring",
    "run_basic",
    "run_coloring",
    "run_density",
    "run_stage",
]

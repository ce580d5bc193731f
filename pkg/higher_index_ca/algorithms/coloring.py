"""Higher-index incompatibility graph and greedy colouring stages.

Each vertex is a pair (interaction, slot) standing for one missing coverage of
that interaction. Two vertices are adjacent when their interactions share a
column with different values, or when they are two slots of the same
interaction. A proper colouring with c colours gives c rows that cover every
missing unit, one row per colour.
"""

from __future__ import annotations

import enum
import logging
from abc import ABC, abstractmethod
from collections.abc import Iterable, Iterator, Sequence

import numpy as np
from numpy.typing import NDArray

from higher_index_ca.algorithms.common import (
    UNSET,
    DeficiencyMap,
    StageGoal,
    WorkCounter,
    emit_row,
    fill_row,
)
from higher_index_ca.core import CoverageState
from higher_index_ca.errors import ColoringConflictError

logger = logging.getLogger(__name__)


class VertexOrder(str, enum.Enum):
    LARGEST_FIRST = "largest_first"
    SMALLEST_LAST = "smallest_last"


class Graph(ABC):
    """Undirected simple graph on vertices ``0 .. order - 1``."""

    @property
    @abstractmethod
    def order(self) -> int: ...

    @abstractmethod
    def degrees(self) -> NDArray[np.int64]: ...

    @abstractmethod
    def neighbors(self, vertex: int) -> NDArray[np.intp]: ...

    def adjacent(self, u: int, w: int) -> bool:
        return bool(np.any(self.neighbors(u) == w))

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.order):
            for w in self.neighbors(u):
                if u < w:
                    yield u, int(w)


class SimpleGraph(Graph):
    """A graph given by an explicit edge list."""

    def __init__(self, order: int, edges: Iterable[tuple[int, int]] = ()) -> None:
        self._adjacency: list[set[int]] = [set() for _ in range(order)]
        for u, w in edges:
            if u == w:
                raise ValueError(f"self-loop on vertex {u}")
            self._adjacency[u].add(w)
            self._adjacency[w].add(u)

    @property
    def order(self) -> int:
        return len(self._adjacency)

    def degrees(self) -> NDArray[np.int64]:
        return np.array([len(adj) for adj in self._adjacency], dtype=np.int64)

    def neighbors(self, vertex: int) -> NDArray[np.intp]:
        return np.array(sorted(self._adjacency[vertex]), dtype=np.intp)


class IncompatibilityGraph(Graph):
    """Vertices sorted by ascending (rank, slot); adjacency is implicit.

    ``conflict[i, j]`` records whether deficient interactions ``i`` and ``j``
    disagree on a shared column; vertex adjacency expands it by slots.
    """

    def __init__(
        self,
        ranks: NDArray[np.intp],
        columns: NDArray[np.intp],
        values: NDArray[np.intp],
        first_slot: NDArray[np.int64],
        beta: int,
        k: int,
    ) -> None:
        self.ranks = ranks
        self.columns = columns
        self.values = values
        self.multiplicity = (beta - first_slot).astype(np.int64)
        self.vertex_interaction = np.repeat(np.arange(len(ranks)), self.multiplicity)
        starts = np.cumsum(self.multiplicity) - self.multiplicity
        self.vertex_slot = (
            np.arange(len(self.vertex_interaction))
            - np.repeat(starts, self.multiplicity)
            + np.repeat(first_slot, self.multiplicity)
        )
        self.conflict = self._conflicts(columns, values, k)

    @staticmethod
    def _conflicts(
        columns: NDArray[np.intp], values: NDArray[np.intp], k: int
    ) -> NDArray[np.bool_]:
        m = len(columns)
        assignment = np.full((m, k), UNSET, dtype=np.int64)
        if m:
            assignment[np.arange(m)[:, None], columns] = values
        conflict = np.zeros((m, m), dtype=bool)
        for column in range(k):
            fixed = np.flatnonzero(assignment[:, column] != UNSET)
            symbols = assignment[fixed, column]
            conflict[np.ix_(fixed, fixed)] |= symbols[:, None] != symbols[None, :]
        return conflict

    @property
    def order(self) -> int:
        return len(self.vertex_interaction)

    @property
    def vertices(self) -> list[tuple[int, int]]:
        return [
            (int(self.ranks[i]), int(s))
            for i, s in zip(self.vertex_interaction, self.vertex_slot)
        ]

    def degrees(self) -> NDArray[np.int64]:
        per_interaction = self.conflict.astype(np.int64) @ self.multiplicity + self.multiplicity - 1
        return per_interaction[self.vertex_interaction]

    def neighbors(self, vertex: int) -> NDArray[np.intp]:
        i = self.vertex_interaction[vertex]
        mask = self.conflict[i][self.vertex_interaction] | (self.vertex_interaction == i)
        mask[vertex] = False
        return np.flatnonzero(mask)


def build_incompatibility_graph(
    state: CoverageState, goal: StageGoal, work: WorkCounter | None = None
) -> IncompatibilityGraph:
    """One vertex per slot s with max(alpha, count) <= s < beta."""
    deficiency = DeficiencyMap.from_state(state, goal.beta, work)
    ranks = deficiency.ranks
    graph = IncompatibilityGraph(
        ranks=ranks,
        columns=state.table.columns[ranks],
        values=state.table.values[ranks],
        first_slot=np.maximum(goal.alpha, state.counts[ranks]),
        beta=goal.beta,
        k=state.params.k,
    )
    if work is not None:
        work.edge_visits += int(graph.degrees().sum())
    return graph


def order_largest_first(graph: Graph, work: WorkCounter | None = None) -> list[int]:
    """Non-increasing degree; ties by ascending vertex index."""
    degrees = graph.degrees()
    if work is not None:
        work.edge_visits += int(degrees.sum())
    return [int(v) for v in np.argsort(-degrees, kind="stable")]


def order_smallest_last(graph: Graph, work: WorkCounter | None = None) -> list[int]:
    """Repeatedly remove a minimum-degree vertex; the reversed removal order.

    Ties go to the smallest vertex index.
    """
    degrees = graph.degrees().copy()
    removed = np.zeros(graph.order, dtype=bool)
    ceiling = np.iinfo(np.int64).max
    removal: list[int] = []
    for _ in range(graph.order):
        vertex = int(np.argmin(np.where(removed, ceiling, degrees)))
        removed[vertex] = True
        removal.append(vertex)
        remaining = graph.neighbors(vertex)
        remaining = remaining[~removed[remaining]]
        degrees[remaining] -= 1
        if work is not None:
            work.edge_visits += len(remaining)
    removal.reverse()
    return removal


def greedy_color(
    graph: Graph, ordering: Sequence[int], work: WorkCounter | None = None
) -> NDArray[np.int64]:
    """Colour vertices in ``ordering``, each with the smallest colour unused by its neighbours."""
    if sorted(ordering) != list(range(graph.order)):
        raise ValueError("ordering must be a permutation of the vertices")
    colors = np.full(graph.order, -1, dtype=np.int64)
    for vertex in ordering:
        neighbors = graph.neighbors(vertex)
        used = colors[neighbors]
        used = used[(used >= 0) & (used <= len(neighbors))]
        taken = np.zeros(len(neighbors) + 1, dtype=bool)
        taken[used] = True
        colors[vertex] = int(np.argmin(taken))
        if work is not None:
            work.edge_visits += len(neighbors)
    return colors


def rows_from_coloring(
    state: CoverageState,
    graph: IncompatibilityGraph,
    coloring: NDArray[np.int64],
    work: WorkCounter | None = None,
) -> int:
    """Emit one row per colour, in ascending colour order."""
    work = work if work is not None else WorkCounter()
    if graph.order == 0:
        return 0
    by_color = np.argsort(coloring, kind="stable")
    bounds = np.searchsorted(coloring[by_color], np.arange(int(coloring.max()) + 2))
    for color in range(len(bounds) - 1):
        fixed = np.full(state.params.k, UNSET, dtype=np.int64)
        for vertex in by_color[bounds[color] : bounds[color + 1]]:
            i = graph.vertex_interaction[vertex]
            cols, vals = graph.columns[i], graph.values[i]
            current = fixed[cols]
            if np.any((current != UNSET) & (current != vals)):
                raise ColoringConflictError(
                    f"colour {color}: vertex {graph.vertices[vertex]} clashes with its class"
                )
            fixed[cols] = vals
        emit_row(state, fill_row(state, fixed), work)
    return len(bounds) - 1


def run_coloring(
    state: CoverageState,
    goal: StageGoal,
    order_kind: VertexOrder | str = VertexOrder.SMALLEST_LAST,
    work: WorkCounter | None = None,
) -> int:
    work = work if work is not None else WorkCounter()
    graph = build_incompatibility_graph(state, goal, work)
    if graph.order == 0:
        return 0
    if VertexOrder(order_kind) is VertexOrder.LARGEST_FIRST:
        ordering = order_largest_first(graph, work)
    else:
        ordering = order_smallest_last(graph, work)
    coloring = greedy_color(graph, ordering, work)
    added = rows_from_coloring(state, graph, coloring, work)
    logger.debug("coloring (%s) %d->%d: %d vertices, %d colours",
                 VertexOrder(order_kind).value, goal.alpha, goal.beta, graph.order, added)
    return added

"""Parameters, interaction ranking and incremental coverage bookkeeping.

Interactions are always of size exactly ``t``: in a uniform array, covering
every t-way interaction lambda times covers every smaller one at least lambda
times as well.

Canonical order of interactions: column sets in colexicographic order (the
combinatorial number system), and inside one column set the value tuples in
base-v little-endian order. With this order

    rank = colex_rank(columns) * v**t + sum(values[j] * v**j)
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from higher_index_ca.errors import (
    ArrayShapeError,
    IndexOverflowError,
    InteractionError,
    InvalidParametersError,
)

logger = logging.getLogger(__name__)

Row = NDArray[np.int64]

_MAX_INDEX = int(np.iinfo(np.intp).max)


@dataclass(frozen=True)
class CAParams:
    """Target array CA_lam(N; t, k, v)."""

    t: int
    k: int
    v: int
    lam: int = 1

    def __post_init__(self) -> None:
        for name in ("t", "k", "v", "lam"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InvalidParametersError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not 1 <= self.t <= self.k:
            raise InvalidParametersError(f"need 1 <= t <= k, got t={self.t}, k={self.k}")
        if self.v < 2:
            raise InvalidParametersError(f"need v >= 2, got v={self.v}")
        if self.lam < 1:
            raise InvalidParametersError(f"need lambda >= 1, got lambda={self.lam}")

    def with_lambda(self, lam: int) -> CAParams:
        return replace(self, lam=lam)

    def __str__(self) -> str:
        return f"t={self.t},k={self.k},v={self.v},lambda={self.lam}"


def interaction_count(params: CAParams) -> int:
    """Number of t-way interactions, C(k, t) * v**t."""
    count = math.comb(params.k, params.t) * params.v**params.t
    if count > _MAX_INDEX:
        raise IndexOverflowError(
            f"{count} interactions for {params} exceed the native index width ({_MAX_INDEX})"
        )
    return count


@dataclass(frozen=True)
class Interaction:
    """An assignment of values to ``t`` distinct columns, columns ascending."""

    entries: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> Interaction:
        return cls(tuple((int(column), int(value)) for column, value in pairs))

    @property
    def columns(self) -> tuple[int, ...]:
        return tuple(column for column, _ in self.entries)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(value for _, value in self.entries)

    def validate(self, params: CAParams) -> None:
        if len(self.entries) != params.t:
            raise InteractionError(f"{self} has {len(self.entries)} entries, expected t={params.t}")
        columns = self.columns
        if any(b <= a for a, b in zip(columns, columns[1:])):
            raise InteractionError(f"{self}: columns must be distinct and ascending")
        if columns[0] < 0 or columns[-1] >= params.k:
            raise InteractionError(f"{self}: columns must lie in [0, {params.k})")
        if any(not 0 <= value < params.v for value in self.values):
            raise InteractionError(f"{self}: values must lie in [0, {params.v})")

    def __str__(self) -> str:
        return "{" + ",".join(f"({c},{x})" for c, x in self.entries) + "}"


class InteractionTable:
    """Precomputed canonical ordering for one (t, k, v).

    ``column_sets`` lists the C(k, t) column sets in colex order; every rank
    ``r`` belongs to column set ``r // v**t``.
    """

    def __init__(self, t: int, k: int, v: int) -> None:
        self.t = t
        self.k = k
        self.v = v
        self.block = v**t
        combos = sorted(combinations(range(k), t), key=lambda cols: cols[::-1])
        self.column_sets = np.array(combos, dtype=np.intp).reshape(len(combos), t)
        self.powers = v ** np.arange(t, dtype=np.intp)
        self.offsets = np.arange(len(combos), dtype=np.intp) * self.block
        self.count = len(combos) * self.block

    @property
    def per_row(self) -> int:
        """Interactions contained in one row, C(k, t)."""
        return len(self.column_sets)

    @cached_property
    def columns(self) -> NDArray[np.intp]:
        """Column tuple of every rank, shape (count, t)."""
        return np.repeat(self.column_sets, self.block, axis=0)

    @cached_property
    def values(self) -> NDArray[np.intp]:
        """Value tuple of every rank, shape (count, t)."""
        codes = np.arange(self.block, dtype=np.intp)
        digits = (codes[:, None] // self.powers[None, :]) % self.v
        return np.tile(digits, (self.per_row, 1))

    def ranks_in_row(self, row: Row) -> NDArray[np.intp]:
        return self.offsets + row[self.column_sets] @ self.powers

    def ranks_in_rows(self, rows: NDArray[np.int64]) -> NDArray[np.intp]:
        """Ranks covered by each row, shape (N, C(k, t))."""
        return self.offsets[None, :] + rows[:, self.column_sets] @ self.powers


@lru_cache(maxsize=64)
def _table(t: int, k: int, v: int) -> InteractionTable:
    return InteractionTable(t, k, v)


def interaction_table(params: CAParams) -> InteractionTable:
    interaction_count(params)
    return _table(params.t, params.k, params.v)


def rank(interaction: Interaction, params: CAParams) -> int:
    """Position of ``interaction`` in the canonical order."""
    interaction.validate(params)
    combo = sum(math.comb(column, j + 1) for j, column in enumerate(interaction.columns))
    code = sum(value * params.v**j for j, value in enumerate(interaction.values))
    return combo * params.v**params.t + code


def unrank(r: int, params: CAParams) -> Interaction:
    """Inverse of :func:`rank`."""
    count = interaction_count(params)
    if not 0 <= r < count:
        raise InteractionError(f"rank {r} outside [0, {count})")
    combo, code = divmod(int(r), params.v**params.t)
    columns: list[int] = []
    column = params.k - 1
    for j in range(params.t, 0, -1):
        while math.comb(column, j) > combo:
            column -= 1
        columns.append(column)
        combo -= math.comb(column, j)
        column -= 1
    columns.reverse()
    values = [(code // params.v**j) % params.v for j in range(params.t)]
    return Interaction(tuple(zip(columns, values)))


def as_row(symbols: ArrayLike, params: CAParams) -> Row:
    """Validate ``symbols`` as one row of a (k, v) array."""
    row = np.asarray(symbols, dtype=np.int64)
    if row.shape != (params.k,):
        raise ArrayShapeError(f"row has shape {row.shape}, expected ({params.k},)")
    if row.size and (row.min() < 0 or row.max() >= params.v):
        raise ArrayShapeError(f"row symbols must lie in [0, {params.v})")
    return row


def as_array(rows: ArrayLike, params: CAParams) -> NDArray[np.int64]:
    """Validate a whole N x k array; an empty input gives a 0 x k array."""
    array = np.asarray(rows, dtype=np.int64)
    if array.size == 0:
        return np.zeros((0, params.k), dtype=np.int64)
    if array.ndim != 2 or array.shape[1] != params.k:
        raise ArrayShapeError(f"array has shape {array.shape}, expected (N, {params.k})")
    if array.min() < 0 or array.max() >= params.v:
        raise ArrayShapeError(f"array symbols must lie in [0, {params.v})")
    return array


def row_covers(row: Sequence[int] | Row, interaction: Interaction) -> bool:
    return all(row[column] == value for column, value in interaction.entries)


class CoverageState:
    """Rows built so far, with per-interaction coverage counts.

    Append-only and single-writer: counts never decrease. Read-only queries
    may be shared between threads, mutation may not.
    """

    def __init__(self, params: CAParams) -> None:
        self.params = params
        self.table = interaction_table(params)
        self.counts = np.zeros(self.table.count, dtype=np.int64)
        self.col_freq = np.zeros((params.k, params.v), dtype=np.int64)
        self.coverage_updates = 0
        self._rows: list[Row] = []
        self._columns = np.arange(params.k)

    @classmethod
    def from_array(cls, params: CAParams, rows: ArrayLike) -> CoverageState:
        """Recount coverage for a stored array in one vectorised pass."""
        array = as_array(rows, params)
        state = cls(params)
        if len(array):
            ranks = state.table.ranks_in_rows(array)
            state.counts += np.bincount(ranks.ravel(), minlength=state.table.count)
            for column in range(params.k):
                state.col_freq[column] += np.bincount(array[:, column], minlength=params.v)
            state.coverage_updates += ranks.size
            state._rows.extend(array.copy())
        return state

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def array(self) -> NDArray[np.int64]:
        if not self._rows:
            return np.zeros((0, self.params.k), dtype=np.int64)
        return np.vstack(self._rows)

    def append_row(self, symbols: ArrayLike) -> NDArray[np.intp]:
        """Append one row and return the ranks it covers."""
        row = as_row(symbols, self.params)
        ranks = self.table.ranks_in_row(row)
        # a row covers each of its C(k, t) interactions exactly once
        self.counts[ranks] += 1
        self.col_freq[self._columns, row] += 1
        self.coverage_updates += len(ranks)
        self._rows.append(row.copy())
        return ranks

    def min_coverage(self) -> int:
        return int(self.counts.min()) if self.counts.size else 0

    def deficiencies(self, beta: int) -> NDArray[np.int64]:
        """max(0, beta - count) for every rank."""
        return np.maximum(0, beta - self.counts)

    def least_frequent_symbols(self) -> Row:
        """Per column, the symbol seen least often so far (ties: smallest)."""
        return np.argmin(self.col_freq, axis=1).astype(np.int64)

    def copy(self) -> CoverageState:
        clone = CoverageState(self.params)
        clone.counts = self.counts.copy()
        clone.col_freq = self.col_freq.copy()
        clone.coverage_updates = self.coverage_updates
        clone._rows = list(self._rows)
        return clone

"""Multi-stage construction: run stage algorithms in sequence, reusing prefixes.

A selection such as ``D:1,S:1,D:3`` builds an index-1 array with density,
raises it to index 2 by colouring, then to index 5 by density again. Every
stage algorithm is deterministic, so the array after any prefix of stages
depends only on (params, prefix) and can be cached. A prefix served from the
cache is charged the cost it took to build it originally.
"""

from __future__ import annotations

import csv
import enum
import logging
import math
import threading
import time
from collections import OrderedDict
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations, product
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray

from higher_index_ca.algorithms import Algorithm, StageGoal, WorkCounter, run_stage
from higher_index_ca.core import CAParams, CoverageState
from higher_index_ca.errors import SelectionError

logger = logging.getLogger(__name__)

DEFAULT_CACHE_SIZE = 4096

Stage = tuple[Algorithm, int]


class TimeMode(str, enum.Enum):
    """Which cost measure feeds reports and fitness."""

    WALL = "wall"
    WORK = "work"


@dataclass(frozen=True)
class StageSelection:
    """Ordered stages ``(algorithm, index)``; indexes add up to the target lambda."""

    stages: tuple[Stage, ...]

    def __post_init__(self) -> None:
        if not self.stages:
            raise SelectionError("a selection needs at least one stage")
        normalized = []
        for position, (algorithm, index) in enumerate(self.stages, start=1):
            if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or index < 1:
                raise SelectionError(f"stage {position} ({algorithm}:{index}): index must be >= 1")
            normalized.append((Algorithm(algorithm), int(index)))
        object.__setattr__(self, "stages", tuple(normalized))

    @classmethod
    def of(cls, *stages: tuple[Algorithm | str, int]) -> StageSelection:
        return cls(tuple((Algorithm.from_code(str(a)), i) for a, i in stages))

    @classmethod
    def parse(cls, text: str) -> StageSelection:
        """Parse ``"D:1,S:1,D:3"``."""
        stages: list[Stage] = []
        for position, chunk in enumerate(text.split(","), start=1):
            code, sep, index = chunk.strip().partition(":")
            if not sep:
                raise SelectionError(f"stage {position} {chunk.strip()!r}: expected CODE:INDEX")
            try:
                stages.append((Algorithm.from_code(code), int(index)))
            except ValueError as exc:
                raise SelectionError(f"stage {position} {chunk.strip()!r}: {exc}") from None
        return cls(tuple(stages))

    @property
    def lam(self) -> int:
        return sum(index for _, index in self.stages)

    def __len__(self) -> int:
        return len(self.stages)

    def check(self, params: CAParams) -> None:
        if self.lam != params.lam:
            raise SelectionError(
                f"selection {self} sums to index {self.lam}, target is lambda={params.lam}"
            )

    def __str__(self) -> str:
        return ",".join(f"{a.value}:{i}" for a, i in self.stages)


@dataclass(frozen=True)
class StageRecord:
    algorithm: Algorithm
    index: int
    rows_added: int
    seconds: float
    work: int
    cumulative_index: int
    cached: bool = False

    def cost(self, time_mode: TimeMode | str) -> float:
        return self.seconds if TimeMode(time_mode) is TimeMode.WALL else float(self.work)


@dataclass
class ExecutionRecord:
    selection: StageSelection
    params: CAParams
    array: NDArray[np.int64] = field(repr=False)
    per_stage: list[StageRecord]
    cache_hits: int = 0

    @property
    def final_rows(self) -> int:
        return len(self.array)

    @property
    def seconds(self) -> float:
        return sum(stage.seconds for stage in self.per_stage)

    @property
    def work(self) -> int:
        return sum(stage.work for stage in self.per_stage)

    @property
    def fresh_stages(self) -> int:
        return sum(not stage.cached for stage in self.per_stage)

    def cost(self, time_mode: TimeMode | str) -> float:
        return self.seconds if TimeMode(time_mode) is TimeMode.WALL else float(self.work)

    def as_dict(self) -> dict[str, Any]:
        return {
            "params": {"t": self.params.t, "k": self.params.k, "v": self.params.v,
                       "lambda": self.params.lam},
            "selection": str(self.selection),
            "final_rows": self.final_rows,
            "seconds": self.seconds,
            "work": self.work,
            "cache_hits": self.cache_hits,
            "per_stage": [
                {
                    "algorithm": stage.algorithm.value,
                    "index": stage.index,
                    "rows_added": stage.rows_added,
                    "seconds": stage.seconds,
                    "work": stage.work,
                    "cumulative_index": stage.cumulative_index,
                    "cached": stage.cached,
                }
                for stage in self.per_stage
            ],
        }


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0
    fresh_stage_runs: int = 0
    evictions: int = 0


@dataclass(frozen=True)
class _Snapshot:
    array: NDArray[np.integer]
    stages: tuple[StageRecord, ...]


class PrefixCache:
    """LRU map from (params, stage prefix) to the array that prefix builds.

    Lookups and insertions are serialised by a lock; two threads may still
    compute the same prefix, and the later insertion wins.
    """

    def __init__(self, capacity: int = DEFAULT_CACHE_SIZE) -> None:
        if capacity < 0:
            raise ValueError(f"cache capacity must be >= 0, got {capacity}")
        self.capacity = capacity
        self._entries: OrderedDict[tuple[CAParams, tuple[Stage, ...]], _Snapshot] = OrderedDict()
        self._lock = threading.Lock()
        self._stats = CacheStats()

    def __len__(self) -> int:
        return len(self._entries)

    def stats(self) -> CacheStats:
        with self._lock:
            return replace(self._stats)

    def longest_prefix(
        self, params: CAParams, selection: StageSelection
    ) -> tuple[int, _Snapshot | None]:
        with self._lock:
            for length in range(len(selection), 0, -1):
                key = (params, selection.stages[:length])
                snapshot = self._entries.get(key)
                if snapshot is not None:
                    self._entries.move_to_end(key)
                    self._stats.hits += 1
                    return length, snapshot
            self._stats.misses += 1
            return 0, None

    def put(
        self,
        params: CAParams,
        prefix: tuple[Stage, ...],
        array: NDArray[np.int64],
        stages: Sequence[StageRecord],
    ) -> None:
        with self._lock:
            self._stats.fresh_stage_runs += 1
            if self.capacity == 0:
                return
            compact = array.astype(np.min_scalar_type(params.v - 1))
            key = (params, prefix)
            self._entries[key] = _Snapshot(compact, tuple(stages))
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)
                self._stats.evictions += 1
                if self._stats.evictions == 1:
                    logger.warning("prefix cache full at %d entries; evicting", self.capacity)


def execute(
    selection: StageSelection,
    params: CAParams,
    cache: PrefixCache | None = None,
) -> ExecutionRecord:
    """Build the array for ``selection``, starting from the longest cached prefix."""
    selection.check(params)
    reused, snapshot = (0, None) if cache is None else cache.longest_prefix(params, selection)
    if snapshot is not None:
        state = CoverageState.from_array(params, snapshot.array)
        records = [replace(stage, cached=True) for stage in snapshot.stages]
        logger.debug("cache hit: %s reuses %d stage(s)", selection, reused)
    else:
        state = CoverageState(params)
        records = []

    alpha = sum(index for _, index in selection.stages[:reused])
    for position in range(reused, len(selection)):
        algorithm, index = selection.stages[position]
        goal = StageGoal(alpha, alpha + index)
        work = WorkCounter()
        started = time.perf_counter()
        added = run_stage(algorithm, state, goal, work)
        elapsed = time.perf_counter() - started
        alpha = goal.beta
        records.append(StageRecord(algorithm, index, added, elapsed, work.total, alpha))
        logger.info("%s stage %d %s(%d): index %d->%d, +%d rows, %d work units",
                    params, position + 1, algorithm.value, index, goal.alpha, goal.beta,
                    added, work.total)
        if cache is not None:
            cache.put(params, selection.stages[: position + 1], state.array, records)

    return ExecutionRecord(
        selection=selection,
        params=params,
        array=state.array,
        per_stage=records,
        cache_hits=reused,
    )


def enumerate_selections(
    lam: int,
    max_stages: int,
    algorithms: Iterable[Algorithm | str] = tuple(Algorithm),
) -> list[StageSelection]:
    """Every composition of ``lam`` into at most ``max_stages`` parts, times
    every assignment of algorithms to the parts.

    There are ``sum(C(lam - 1, m - 1) * len(algorithms)**m)`` of them.
    """
    if lam < 1 or max_stages < 1:
        raise SelectionError(f"need lambda >= 1 and max_stages >= 1, got {lam}, {max_stages}")
    codes = [Algorithm.from_code(str(a)) for a in algorithms]
    selections = []
    for parts in range(1, min(max_stages, lam) + 1):
        for cuts in combinations(range(1, lam), parts - 1):
            bounds = (0, *cuts, lam)
            indexes = [b - a for a, b in zip(bounds, bounds[1:])]
            for assignment in product(codes, repeat=parts):
                selections.append(StageSelection(tuple(zip(assignment, indexes))))
    return selections


def expected_selection_count(lam: int, max_stages: int, algorithms: int) -> int:
    return sum(
        math.comb(lam - 1, parts - 1) * algorithms**parts
        for parts in range(1, min(max_stages, lam) + 1)
    )


@dataclass(frozen=True)
class SweepRow:
    """Statistics over all selections with ``ns`` stages.

    The N averages are rounded to the nearest integer.
    """

    ns: int
    min_n: int
    max_n: int
    avg_n: int
    median_n: int
    stddev_n: int
    min_t: float
    max_t: float
    avg_t: float
    median_t: float
    stddev_t: float


SWEEP_FIELDS = [
    "ns", "min_n", "max_n", "avg_n", "median_n", "stddev_n",
    "min_t", "max_t", "avg_t", "median_t", "stddev_t",
]


@dataclass
class SweepReport:
    params: CAParams
    time_mode: TimeMode
    rows: list[SweepRow]
    records: list[ExecutionRecord] = field(repr=False)

    @property
    def fresh_stage_runs(self) -> int:
        return sum(record.fresh_stages for record in self.records)

    def best(self) -> ExecutionRecord:
        return min(self.records, key=lambda r: (r.final_rows, r.cost(self.time_mode)))


def summarize(records: Sequence[ExecutionRecord], time_mode: TimeMode | str) -> list[SweepRow]:
    """Group records by stage count (population standard deviation)."""
    by_count: dict[int, list[ExecutionRecord]] = {}
    for record in records:
        by_count.setdefault(len(record.selection), []).append(record)
    rows = []
    for ns in sorted(by_count):
        n = np.array([r.final_rows for r in by_count[ns]], dtype=np.float64)
        t = np.array([r.cost(time_mode) for r in by_count[ns]], dtype=np.float64)
        rows.append(
            SweepRow(
                ns=ns,
                min_n=int(n.min()),
                max_n=int(n.max()),
                avg_n=round(float(n.mean())),
                median_n=round(float(np.median(n))),
                stddev_n=round(float(n.std())),
                min_t=float(t.min()),
                max_t=float(t.max()),
                avg_t=float(t.mean()),
                median_t=float(np.median(t)),
                stddev_t=float(t.std()),
            )
        )
    return rows


def sweep_stats(
    params: CAParams,
    max_stages: int | None = None,
    algorithms: Iterable[Algorithm | str] = tuple(Algorithm),
    cache: PrefixCache | None = None,
    time_mode: TimeMode | str = TimeMode.WORK,
    jobs: int = 1,
) -> SweepReport:
    """Execute every selection for ``params.lam`` and summarise by stage count."""
    selections = enumerate_selections(params.lam, max_stages or params.lam, algorithms)
    logger.info("sweeping %d selections for %s", len(selections), params)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda s: execute(s, params, cache), selections))
    else:
        records = []
        for done, selection in enumerate(selections, start=1):
            records.append(execute(selection, params, cache))
            if done % 250 == 0:
                logger.info("swept %d/%d selections", done, len(selections))
    mode = TimeMode(time_mode)
    return SweepReport(params=params, time_mode=mode, rows=summarize(records, mode),
                       records=records)


def write_sweep_csv(path: Path | str, rows: Sequence[SweepRow]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_FIELDS)
        for row in rows:
            writer.writerow(getattr(row, name) for name in SWEEP_FIELDS)
    return path

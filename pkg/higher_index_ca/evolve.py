"""Two-objective genetic search over stage selections.

An individual is a stage selection; its fitness is ``(N, T)``: rows of the
array it builds and the cost of building it. Survival is NSGA-II: parents and
offspring are pooled, sorted into non-dominated fronts, and truncated by
crowding distance.
"""

from __future__ import annotations

import csv
import json
import logging
import random
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pymoo.util.nds.non_dominated_sorting import NonDominatedSorting

from higher_index_ca.algorithms import Algorithm
from higher_index_ca.core import CAParams
from higher_index_ca.errors import ConfigError
from higher_index_ca.multistage import (
    PrefixCache,
    Stage,
    StageSelection,
    TimeMode,
    execute,
)

logger = logging.getLogger(__name__)

ALGORITHMS: tuple[Algorithm, ...] = tuple(Algorithm)

Fitness = tuple[int, float]


@dataclass(frozen=True)
class Individual:
    selection: StageSelection
    fitness: Fitness | None = None

    @property
    def stages(self) -> tuple[Stage, ...]:
        return self.selection.stages

    @property
    def lam(self) -> int:
        return self.selection.lam

    def __str__(self) -> str:
        return str(self.selection)


def _individual(stages: Sequence[Stage]) -> Individual:
    return Individual(StageSelection(tuple(stages)))


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 300
    generations: int = 100
    seed: int = 0
    mutation_probability: float = 0.3
    crossover_probability: float = 0.9
    time_mode: TimeMode = TimeMode.WORK
    max_stages_cap: int | None = None
    record_generations: tuple[int, ...] = (1, 10, 50, 100)
    jobs: int = 1

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "time_mode", TimeMode(self.time_mode))
        except ValueError:
            raise ConfigError(
                f"time_mode must be 'wall' or 'work', got {self.time_mode!r}"
            ) from None
        object.__setattr__(self, "record_generations", tuple(sorted(set(self.record_generations))))
        if self.population_size < 2:
            raise ConfigError(f"population_size must be >= 2, got {self.population_size}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        for name in ("mutation_probability", "crossover_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        if self.max_stages_cap is not None and self.max_stages_cap < 1:
            raise ConfigError(f"max_stages_cap must be >= 1, got {self.max_stages_cap}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")

    def records(self, generation: int) -> bool:
        """Generation 0 is the initial population; the final generation is always kept."""
        return (
            generation == 0
            or generation in self.record_generations
            or generation == self.generations
        )


# --- genetic operators -----------------------------------------------------


def random_individual(
    lam: int, rng: random.Random, max_stages_cap: int | None = None
) -> Individual:
    """Uniform stage count, uniform composition of ``lam``, uniform algorithms."""
    cap = min(lam, max_stages_cap or lam)
    parts = rng.randint(1, cap)
    bounds = [0, *sorted(rng.sample(range(1, lam), parts - 1)), lam]
    return _individual(
        [(rng.choice(ALGORITHMS), b - a) for a, b in zip(bounds, bounds[1:])]
    )


def mutate_append(ind: Individual, rng: random.Random) -> Individual:
    """Split a new stage off an index > 1; with all indexes 1, replace a stage."""
    stages = list(ind.stages)
    algorithm = rng.choice(ALGORITHMS)
    donors = [i for i, (_, index) in enumerate(stages) if index > 1]
    if donors:
        i = rng.choice(donors)
        donor, index = stages[i]
        delta = rng.randint(1, index - 1)
        stages[i] = (donor, index - delta)
        stages.append((algorithm, delta))
    else:
        del stages[rng.randrange(len(stages))]
        stages.append((algorithm, 1))
    return _individual(stages)


def mutate_swap(ind: Individual, rng: random.Random) -> Individual:
    if len(ind.stages) < 2:
        return Individual(ind.selection)
    stages = list(ind.stages)
    i, j = rng.sample(range(len(stages)), 2)
    stages[i], stages[j] = stages[j], stages[i]
    return _individual(stages)


def mutate_index_transfer(ind: Individual, rng: random.Random) -> Individual:
    stages = list(ind.stages)
    donors = [i for i, (_, index) in enumerate(stages) if index > 1]
    if len(stages) < 2 or not donors:
        return Individual(ind.selection)
    i = rng.choice(donors)
    j = rng.choice([x for x in range(len(stages)) if x != i])
    delta = rng.randint(1, stages[i][1] - 1)
    stages[i] = (stages[i][0], stages[i][1] - delta)
    stages[j] = (stages[j][0], stages[j][1] + delta)
    return _individual(stages)


def mutate_modify(ind: Individual, rng: random.Random) -> Individual:
    stages = list(ind.stages)
    i = rng.randrange(len(stages))
    old, index = stages[i]
    stages[i] = (rng.choice([a for a in ALGORITHMS if a is not old]), index)
    return _individual(stages)


def mutate_join(ind: Individual, rng: random.Random) -> Individual:
    """Merge two stages into one, placed at the earlier position."""
    if len(ind.stages) < 2:
        return Individual(ind.selection)
    stages = list(ind.stages)
    i, j = sorted(rng.sample(range(len(stages)), 2))
    merged = (rng.choice([stages[i][0], stages[j][0]]), stages[i][1] + stages[j][1])
    del stages[j]
    stages[i] = merged
    return _individual(stages)


MUTATIONS: tuple[Callable[[Individual, random.Random], Individual], ...] = (
    mutate_append,
    mutate_swap,
    mutate_index_transfer,
    mutate_modify,
    mutate_join,
)


def mutate(ind: Individual, rng: random.Random) -> Individual:
    return rng.choice(MUTATIONS)(ind, rng)


def crossover(p1: Individual, p2: Individual, rng: random.Random) -> Individual:
    """Take ``a`` stages of ``p1`` and ``b`` of ``p2`` (a + b <= lambda), shuffle,
    then repair the indexes back to lambda.

    With lambda = 1 no such pair exists and a parent is cloned.
    """
    lam = p1.lam
    pairs = [
        (a, b)
        for a in range(1, len(p1.stages) + 1)
        for b in range(1, len(p2.stages) + 1)
        if a + b <= lam
    ]
    if not pairs:
        return Individual(rng.choice([p1, p2]).selection)
    a, b = rng.choice(pairs)
    stages = rng.sample(list(p1.stages), a) + rng.sample(list(p2.stages), b)
    rng.shuffle(stages)
    algorithms = [algorithm for algorithm, _ in stages]
    indexes = [index for _, index in stages]
    while sum(indexes) > lam:
        indexes[rng.choice([i for i, index in enumerate(indexes) if index > 1])] -= 1
    while sum(indexes) < lam:
        indexes[rng.randrange(len(indexes))] += 1
    return _individual(list(zip(algorithms, indexes)))


# --- fitness and ranking ---------------------------------------------------


def evaluate(
    ind: Individual,
    params: CAParams,
    cache: PrefixCache | None = None,
    time_mode: TimeMode | str = TimeMode.WORK,
) -> Individual:
    record = execute(ind.selection, params, cache)
    return Individual(ind.selection, (record.final_rows, record.cost(time_mode)))


def crowding_distance(points: ArrayLike) -> NDArray[np.float64]:
    """Crowding distance of each point within one front; boundary points get inf."""
    points = np.asarray(points, dtype=np.float64)
    n, objectives = points.shape
    distance = np.zeros(n, dtype=np.float64)
    if n <= 2:
        distance[:] = np.inf
        return distance
    for m in range(objectives):
        order = np.argsort(points[:, m], kind="stable")
        column = points[order, m]
        span = column[-1] - column[0]
        distance[order[0]] = distance[order[-1]] = np.inf
        if span > 0:
            distance[order[1:-1]] += (column[2:] - column[:-2]) / span
    return distance


def nondominated_sort(fitness: ArrayLike) -> list[NDArray[np.intp]]:
    """Fronts of point indexes, best first; each front ordered by crowding, descending."""
    points = np.asarray(fitness, dtype=np.float64).reshape(-1, 2)
    if not len(points):
        return []
    fronts = NonDominatedSorting().do(points)
    ordered = []
    for front in fronts:
        front = np.sort(np.asarray(front, dtype=np.intp))
        crowding = crowding_distance(points[front])
        ordered.append(front[np.argsort(-crowding, kind="stable")])
    return ordered


def _survive(
    population: Sequence[Individual], size: int
) -> tuple[list[Individual], NDArray[np.int64], NDArray[np.float64]]:
    points = np.array([ind.fitness for ind in population], dtype=np.float64)
    survivors: list[int] = []
    ranks: list[int] = []
    crowding: list[float] = []
    for rank, front in enumerate(nondominated_sort(points)):
        distances = crowding_distance(points[front])
        by_distance = np.argsort(-distances, kind="stable")
        for position in by_distance[: size - len(survivors)]:
            survivors.append(int(front[position]))
            ranks.append(rank)
            crowding.append(float(distances[position]))
        if len(survivors) == size:
            break
    return (
        [population[i] for i in survivors],
        np.array(ranks, dtype=np.int64),
        np.array(crowding, dtype=np.float64),
    )


def _tournament(
    rng: random.Random, ranks: NDArray[np.int64], crowding: NDArray[np.float64]
) -> int:
    i, j = rng.randrange(len(ranks)), rng.randrange(len(ranks))
    if (ranks[j], -crowding[j]) < (ranks[i], -crowding[i]):
        return j
    return i


# --- reporting -------------------------------------------------------------


@dataclass(frozen=True)
class FrontMember:
    n: int
    t: float
    selection: StageSelection

    def as_dict(self) -> dict[str, Any]:
        return {"n": self.n, "t": self.t, "selection": str(self.selection)}


@dataclass(frozen=True)
class ParetoFront:
    """Non-dominated points of one generation, sorted by N then T."""

    generation: int
    members: tuple[FrontMember, ...]

    @classmethod
    def of(cls, generation: int, population: Sequence[Individual]) -> ParetoFront:
        points = np.array([ind.fitness for ind in population], dtype=np.float64)
        first = nondominated_sort(points)[0]
        unique = {
            str(population[i].selection): population[i] for i in first
        }
        members = sorted(
            (FrontMember(ind.fitness[0], ind.fitness[1], ind.selection)
             for ind in unique.values() if ind.fitness is not None),
            key=lambda m: (m.n, m.t, str(m.selection)),
        )
        return cls(generation, tuple(members))

    @property
    def lowest_n(self) -> FrontMember:
        return min(self.members, key=lambda m: (m.n, m.t))

    @property
    def lowest_t(self) -> FrontMember:
        return min(self.members, key=lambda m: (m.t, m.n))


@dataclass
class GAResult:
    params: CAParams
    config: GAConfig
    fronts: list[ParetoFront] = field(default_factory=list)
    evaluations: int = 0

    def best(self) -> list[dict[str, Any]]:
        return [
            {
                "generation": front.generation,
                "lowest_n": front.lowest_n.as_dict(),
                "lowest_t": front.lowest_t.as_dict(),
            }
            for front in self.fronts
        ]


class _Evaluator:
    """Evaluates individuals once per distinct selection."""

    def __init__(self, params: CAParams, config: GAConfig, cache: PrefixCache) -> None:
        self.params = params
        self.config = config
        self.cache = cache
        self.known: dict[StageSelection, Fitness] = {}
        # wall-clock costs are only faithful when stages run one at a time
        self.jobs = config.jobs if config.time_mode is TimeMode.WORK else 1

    def __call__(self, population: Sequence[Individual]) -> list[Individual]:
        fresh = list(dict.fromkeys(
            ind.selection for ind in population if ind.selection not in self.known
        ))

        def run(selection: StageSelection) -> Individual:
            return evaluate(Individual(selection), self.params, self.cache, self.config.time_mode)

        if self.jobs > 1 and len(fresh) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                evaluated = list(pool.map(run, fresh))
        else:
            evaluated = [run(s) for s in fresh]
        for ind in evaluated:
            assert ind.fitness is not None
            self.known[ind.selection] = ind.fitness
        return [Individual(ind.selection, self.known[ind.selection]) for ind in population]


def run_ga(
    params: CAParams, config: GAConfig, cache: PrefixCache | None = None
) -> GAResult:
    """Evolve selections for ``params`` and record Pareto fronts.

    Offspring come from binary tournaments on (front rank, crowding); each is a
    crossover child with ``crossover_probability``, otherwise a clone, then
    mutated with ``mutation_probability``.
    """
    rng = random.Random(config.seed)
    evaluator = _Evaluator(params, config, cache if cache is not None else PrefixCache())
    result = GAResult(params, config)

    population = evaluator([
        random_individual(params.lam, rng, config.max_stages_cap)
        for _ in range(config.population_size)
    ])
    population, ranks, crowding = _survive(population, config.population_size)
    _record(result, 0, population)

    for generation in range(1, config.generations + 1):
        offspring = []
        for _ in range(config.population_size):
            p1 = population[_tournament(rng, ranks, crowding)]
            p2 = population[_tournament(rng, ranks, crowding)]
            if rng.random() < config.crossover_probability:
                child = crossover(p1, p2, rng)
            else:
                child = Individual(p1.selection)
            if rng.random() < config.mutation_probability:
                child = mutate(child, rng)
            offspring.append(child)
        population, ranks, crowding = _survive(
            list(population) + evaluator(offspring), config.population_size
        )

        _record(result, generation, population)
    result.evaluations = len(evaluator.known)
    return result


def _record(result: GAResult, generation: int, population: Sequence[Individual]) -> None:
    if not result.config.records(generation):
        return
    front = ParetoFront.of(generation, population)
    result.fronts.append(front)
    logger.info("generation %d: front of %d, lowest N %d (%s), lowest T %g (%s)",
                generation, len(front.members), front.lowest_n.n,
                front.lowest_n.selection, front.lowest_t.t, front.lowest_t.selection)


def write_front_csv(path: Path | str, fronts: Sequence[ParetoFront]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["generation", "n", "t", "selection"])
        for front in fronts:
            for m in front.members:
                writer.writerow([front.generation, m.n, format_cost(m.t), str(m.selection)])
    return path


def format_cost(cost: float) -> str:
    """Work units print as integers, seconds with full precision."""
    return str(int(cost)) if float(cost).is_integer() else repr(float(cost))


def write_best_json(path: Path | str, result: GAResult) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(result.best(), indent=2) + "\n", encoding="utf-8")
    return path

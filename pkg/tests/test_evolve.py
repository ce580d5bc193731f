"""Tests for the genetic operators, non-dominated sorting and the GA loop."""

import csv
import json
import random
from collections import Counter

import numpy as np
import pytest

from higher_index_ca import evolve
from higher_index_ca.algorithms import Algorithm
from higher_index_ca.core import CAParams
from higher_index_ca.errors import ConfigError
from higher_index_ca.evolve import (
    GAConfig,
    Individual,
    ParetoFront,
    crossover,
    crowding_distance,
    evaluate,
    format_cost,
    mutate,
    mutate_append,
    mutate_index_transfer,
    mutate_join,
    mutate_modify,
    mutate_swap,
    nondominated_sort,
    random_individual,
    run_ga,
    write_best_json,
    write_front_csv,
)
from higher_index_ca.multistage import PrefixCache, StageSelection, execute


def ind(text: str) -> Individual:
    return Individual(StageSelection.parse(text))


def assert_valid(individual: Individual, lam: int):
    assert individual.lam == lam
    assert len(individual.stages) >= 1
    assert all(index >= 1 for _, index in individual.stages)


def dominates(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


class TestRandomIndividual:
    def test_lambda_one(self):
        rng = random.Random(0)
        for _ in range(100):
            individual = random_individual(1, rng)
            assert len(individual.stages) == 1
            assert_valid(individual, 1)

    def test_covers_every_shape(self):
        """Every stage count and algorithm shows up for lambda = 3."""
        rng = random.Random(1)
        seen = set()
        for _ in range(10_000):
            individual = random_individual(3, rng)
            assert_valid(individual, 3)
            seen.update((len(individual.stages), a) for a, _ in individual.stages)
        assert seen == {(m, a) for m in (1, 2, 3) for a in Algorithm}

    def test_stage_cap(self):
        rng = random.Random(2)
        assert all(len(random_individual(6, rng, 2).stages) <= 2 for _ in range(500))


class TestMutations:
    def test_append_splits_single_stage(self):
        rng = random.Random(0)
        for _ in range(50):
            child = mutate_append(ind("D:5"), rng)
            (first, left), (_, right) = child.stages
            assert first is Algorithm.DENSITY
            assert 1 <= right <= 4 and left + right == 5

    def test_append_all_ones_replaces(self):
        rng = random.Random(0)
        for _ in range(50):
            child = mutate_append(ind("B:1,L:1"), rng)
            assert len(child.stages) == 2
            assert child.stages[-1][1] == 1
            assert_valid(child, 2)

    def test_swap(self):
        assert str(mutate_swap(ind("D:1,S:4"), random.Random(0))) == "S:4,D:1"
        assert str(mutate_swap(ind("D:5"), random.Random(0))) == "D:5"

    def test_swap_preserves_stages(self):
        rng = random.Random(4)
        parent = ind("D:1,S:2,B:1,L:1")
        for _ in range(1000):
            assert sorted(mutate_swap(parent, rng).stages) == sorted(parent.stages)

    def test_index_transfer(self):
        rng = random.Random(0)
        outcomes = {str(mutate_index_transfer(ind("D:3,S:2"), rng)) for _ in range(200)}
        assert outcomes == {"D:2,S:3", "D:1,S:4", "D:4,S:1"}

    def test_index_transfer_noops(self):
        rng = random.Random(0)
        assert str(mutate_index_transfer(ind("D:1,S:1,B:1"), rng)) == "D:1,S:1,B:1"
        assert str(mutate_index_transfer(ind("D:3"), rng)) == "D:3"

    def test_modify(self):
        rng = random.Random(0)
        outcomes = {str(mutate_modify(ind("B:5"), rng)) for _ in range(200)}
        assert outcomes == {"L:5", "S:5", "D:5"}

    def test_join(self):
        rng = random.Random(0)
        outcomes = {str(mutate_join(ind("D:2,S:3"), rng)) for _ in range(100)}
        assert outcomes == {"D:5", "S:5"}
        assert str(mutate_join(ind("B:2"), rng)) == "B:2"

    def test_join_keeps_earlier_position(self):
        rng = random.Random(3)
        for _ in range(100):
            child = mutate_join(ind("B:1,L:1,S:1"), rng)
            assert len(child.stages) == 2
            assert_valid(child, 3)

    def test_lambda_one_survives_every_operator(self):
        rng = random.Random(0)
        for operator in evolve.MUTATIONS:
            assert_valid(operator(ind("S:1"), rng), 1)

    def test_operator_frequency(self, monkeypatch):
        """Each of the five operators is picked about a fifth of the time."""
        calls = Counter()

        def counting(operator):
            def wrapped(individual, rng):
                calls[operator.__name__] += 1
                return operator(individual, rng)

            return wrapped

        monkeypatch.setattr(evolve, "MUTATIONS", tuple(counting(op) for op in evolve.MUTATIONS))
        rng = random.Random(7)
        draws = 20_000
        for _ in range(draws):
            mutate(ind("D:2,S:3"), rng)
        assert len(calls) == 5
        for count in calls.values():
            assert count / draws == pytest.approx(0.2, abs=0.02)


class TestCrossover:
    def test_single_stage_parents(self):
        rng = random.Random(0)
        for _ in range(50):
            child = crossover(ind("D:5"), ind("B:5"), rng)
            assert len(child.stages) == 2
            assert sorted(a.value for a, _ in child.stages) == ["B", "D"]
            assert_valid(child, 5)

    def test_lambda_one_clones(self):
        rng = random.Random(0)
        outcomes = {str(crossover(ind("D:1"), ind("B:1"), rng)) for _ in range(50)}
        assert outcomes == {"D:1", "B:1"}

    def test_child_size_bounded(self):
        rng = random.Random(5)
        p1, p2 = ind("D:1,S:1,B:1,L:2"), ind("L:4,B:1")
        for _ in range(500):
            child = crossover(p1, p2, rng)
            assert 2 <= len(child.stages) <= 5
            assert_valid(child, 5)


def test_operator_closure():
    """10^5 random operator applications never produce an invalid individual."""
    rng = random.Random(2024)
    population = {lam: [random_individual(lam, rng) for _ in range(8)] for lam in range(1, 7)}
    for _ in range(100_000):
        lam = rng.randint(1, 6)
        pool = population[lam]
        if rng.random() < 0.5:
            child = mutate(rng.choice(pool), rng)
        else:
            child = crossover(rng.choice(pool), rng.choice(pool), rng)
        assert_valid(child, lam)
        pool[rng.randrange(len(pool))] = child


class TestRanking:
    def test_small_example(self):
        fronts = nondominated_sort([(1, 2), (2, 1), (2, 2)])
        assert [sorted(f.tolist()) for f in fronts] == [[0, 1], [2]]

    def test_identical_points(self):
        fronts = nondominated_sort([(3, 3)] * 5)
        assert len(fronts) == 1 and sorted(fronts[0].tolist()) == [0, 1, 2, 3, 4]

    def test_empty(self):
        assert nondominated_sort(np.empty((0, 2))) == []

    def test_brute_force_agreement(self):
        """Fronts match repeated peeling of non-dominated points on 200 random points."""
        rng = np.random.default_rng(9)
        points = [tuple(p) for p in rng.integers(0, 30, size=(200, 2)).tolist()]
        remaining = set(range(len(points)))
        expected = []
        while remaining:
            front = {
                i for i in remaining
                if not any(dominates(points[j], points[i]) for j in remaining if j != i)
            }
            expected.append(front)
            remaining -= front
        actual = [set(f.tolist()) for f in nondominated_sort(points)]
        assert actual == expected

    def test_front_ordered_by_crowding(self):
        points = np.array([(0, 4), (1, 3), (2, 1), (4, 0)], dtype=float)
        front = nondominated_sort(points)[0]
        assert set(front[:2].tolist()) == {0, 3}
        assert front[2:].tolist() == [2, 1]

    def test_crowding_distance(self):
        distance = crowding_distance([(0, 4), (1, 3), (2, 1), (4, 0)])
        assert np.isinf(distance[0]) and np.isinf(distance[3])
        assert distance[1] == pytest.approx(1.25)
        assert distance[2] == pytest.approx(1.5)
        assert np.isinf(crowding_distance([(1, 1), (2, 0)])).all()


class TestEvaluate:
    def test_basic_fitness(self):
        params = CAParams(2, 10, 2, 5)
        cache = PrefixCache()
        scored = evaluate(ind("B:5"), params, cache)
        assert scored.fitness[0] == 900
        assert scored.fitness[1] == float(execute(StageSelection.parse("B:5"), params).work)
        assert evaluate(ind("B:5"), params, cache).fitness == scored.fitness

    def test_rows_at_least_lambda(self):
        scored = evaluate(ind("D:1,S:1"), CAParams(2, 4, 3, 2))
        assert scored.fitness[0] >= 2


class TestGAConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"population_size": 1},
            {"generations": 0},
            {"mutation_probability": 1.5},
            {"crossover_probability": -0.1},
            {"time_mode": "cpu"},
            {"max_stages_cap": 0},
            {"jobs": 0},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            GAConfig(**kwargs)

    def test_records(self):
        config = GAConfig(generations=30)
        assert [g for g in range(31) if config.records(g)] == [0, 1, 10, 30]


class TestRunGA:
    SMALL = CAParams(2, 4, 3, 3)

    def test_degenerate_population(self):
        result = run_ga(self.SMALL, GAConfig(population_size=2, generations=1, seed=3))
        assert [front.generation for front in result.fronts] == [0, 1]
        assert result.fronts[0].members
        assert result.evaluations >= 1

    def test_initial_population_recorded(self):
        """The first front shows the random population before any breeding."""
        config = GAConfig(population_size=6, generations=2, seed=7, record_generations=())
        result = run_ga(self.SMALL, config)
        assert [f.generation for f in result.fronts] == [0, 2]
        start = result.fronts[0]
        assert all(sum(i for _, i in m.selection.stages) == 3 for m in start.members)
        assert result.fronts[1].lowest_n.n <= start.lowest_n.n

    def test_reproducible(self):
        config = GAConfig(population_size=8, generations=4, seed=11, record_generations=(1, 2))
        first = run_ga(self.SMALL, config)
        second = run_ga(self.SMALL, config)
        assert first.fronts == second.fronts
        assert [f.generation for f in first.fronts] == [0, 1, 2, 4]

    def test_fronts_nondominated_and_elitist(self):
        config = GAConfig(population_size=10, generations=6, seed=5, record_generations=(1, 2, 3))
        result = run_ga(self.SMALL, config)
        for front in result.fronts:
            points = [(m.n, m.t) for m in front.members]
            for a in points:
                assert not any(dominates(b, a) for b in points)
            assert points == sorted(points)
        lowest_n = [front.lowest_n.n for front in result.fronts]
        lowest_t = [front.lowest_t.t for front in result.fronts]
        assert all(b <= a for a, b in zip(lowest_n, lowest_n[1:]))
        assert all(b <= a for a, b in zip(lowest_t, lowest_t[1:]))

    def test_parallel_matches_serial(self):
        serial = run_ga(self.SMALL, GAConfig(population_size=8, generations=3, seed=2))
        parallel = run_ga(self.SMALL, GAConfig(population_size=8, generations=3, seed=2, jobs=3))
        assert serial.fronts == parallel.fronts

    def test_outputs(self, tmp_path):
        result = run_ga(self.SMALL, GAConfig(population_size=4, generations=2, seed=1))
        csv_path = write_front_csv(tmp_path / "fronts.csv", result.fronts)
        with open(csv_path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["generation", "n", "t", "selection"]
        assert len(rows) == 1 + sum(len(front.members) for front in result.fronts)
        StageSelection.parse(rows[1][3])

        best = json.loads(write_best_json(tmp_path / "best.json", result).read_text())
        assert [entry["generation"] for entry in best] == [0, 1, 2]
        assert set(best[0]["lowest_n"]) == {"n", "t", "selection"}

    def test_front_of_duplicates(self):
        population = [
            Individual(StageSelection.parse("B:1"), (10, 5.0)),
            Individual(StageSelection.parse("B:1"), (10, 5.0)),
            Individual(StageSelection.parse("D:1"), (8, 9.0)),
            Individual(StageSelection.parse("S:1"), (12, 9.0)),
        ]
        front = ParetoFront.of(1, population)
        assert [str(m.selection) for m in front.members] == ["D:1", "B:1"]
        assert front.lowest_n.n == 8 and front.lowest_t.t == 5.0

    @pytest.mark.slow
    def test_desk_scale_search(self):
        """Population 50 for 30 generations beats the single density stage on rows
        and finds a selection at most a quarter of its cost."""
        params = CAParams(2, 10, 2, 5)
        result = run_ga(params, GAConfig(population_size=50, generations=30, seed=0))
        final = result.fronts[-1]
        assert final.generation == 30
        assert final.lowest_n.n <= 26
        density_only = execute(StageSelection.parse("D:5"), params)
        assert final.lowest_t.t <= 0.25 * density_only.work


def test_format_cost():
    assert format_cost(1200.0) == "1200"
    assert format_cost(0.25) == "0.25"

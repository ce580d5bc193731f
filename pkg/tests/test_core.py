"""Tests for parameters, interaction ranking and coverage bookkeeping."""

import math
from itertools import combinations

import numpy as np
import pytest

from higher_index_ca.core import (
    CAParams,
    CoverageState,
    Interaction,
    interaction_count,
    interaction_table,
    rank,
    row_covers,
    unrank,
)
from higher_index_ca.errors import (
    ArrayShapeError,
    IndexOverflowError,
    InteractionError,
    InvalidParametersError,
)
from higher_index_ca.verify import brute_force_counts


class TestCAParams:
    def test_valid_params(self):
        """Fields are stored as plain ints and lambda defaults to 1."""
        params = CAParams(t=2, k=np.int64(4), v=3)
        assert (params.t, params.k, params.v, params.lam) == (2, 4, 3, 1)
        assert isinstance(params.k, int)

    @pytest.mark.parametrize(
        "t,k,v,lam",
        [(0, 4, 2, 1), (5, 4, 2, 1), (2, 4, 1, 1), (2, 4, 2, 0), (True, 4, 2, 1)],
    )
    def test_invalid_params(self, t, k, v, lam):
        """Out-of-range or non-integer fields are rejected."""
        with pytest.raises(InvalidParametersError):
            CAParams(t=t, k=k, v=v, lam=lam)

    def test_with_lambda(self):
        """with_lambda changes only the index."""
        params = CAParams(2, 10, 2, 5)
        assert params.with_lambda(1) == CAParams(2, 10, 2, 1)


class TestInteractionCount:
    @pytest.mark.parametrize(
        "t,k,v,expected",
        [
            (2, 4, 3, 54),
            (2, 10, 2, 180),
            (2, 18, 2, 612),
            (2, 10, 3, 405),
            (2, 20, 2, 760),
            (3, 10, 2, 960),
            (4, 10, 2, 3360),
        ],
    )
    def test_counts(self, t, k, v, expected):
        """C(k, t) * v**t."""
        assert interaction_count(CAParams(t, k, v)) == expected

    def test_overflow(self):
        """Counts beyond the native index width are refused."""
        with pytest.raises(IndexOverflowError):
            interaction_count(CAParams(t=30, k=60, v=10))


class TestRanking:
    def test_known_rank(self):
        """{(2,2),(3,2)} at t=2, k=4, v=3 is rank 53."""
        params = CAParams(2, 4, 3)
        interaction = Interaction.of([(2, 2), (3, 2)])
        assert rank(interaction, params) == 53
        assert unrank(53, params) == interaction

    def test_first_rank(self):
        """The all-zero interaction on the first columns comes first."""
        params = CAParams(3, 6, 2)
        assert rank(Interaction.of([(0, 0), (1, 0), (2, 0)]), params) == 0

    def test_bijection(self):
        """unrank then rank is the identity over the whole range."""
        params = CAParams(3, 6, 3)
        for r in range(interaction_count(params)):
            assert rank(unrank(r, params), params) == r

    def test_unrank_out_of_range(self):
        params = CAParams(2, 4, 3)
        with pytest.raises(InteractionError):
            unrank(54, params)
        with pytest.raises(InteractionError):
            unrank(-1, params)

    @pytest.mark.parametrize(
        "pairs",
        [
            [(0, 0)],  # wrong size
            [(1, 0), (0, 0)],  # not ascending
            [(0, 0), (4, 0)],  # column out of range
            [(0, 0), (1, 3)],  # value out of range
        ],
    )
    def test_malformed_interaction(self, pairs):
        with pytest.raises(InteractionError):
            rank(Interaction.of(pairs), CAParams(2, 4, 3))

    def test_table_matches_rank(self):
        """The vectorised table ranks a row exactly like rank()."""
        params = CAParams(3, 7, 3)
        table = interaction_table(params)
        row = np.array([2, 0, 1, 1, 2, 0, 2])
        expected = sorted(
            rank(Interaction.of((c, int(row[c])) for c in cols), params)
            for cols in combinations(range(params.k), params.t)
        )
        assert sorted(table.ranks_in_row(row).tolist()) == expected
        assert table.per_row == math.comb(7, 3)

    def test_table_columns_and_values(self):
        """Per-rank column and value tuples agree with unrank()."""
        params = CAParams(2, 5, 3)
        table = interaction_table(params)
        for r in (0, 7, 31, 89):
            interaction = unrank(r, params)
            assert tuple(table.columns[r]) == interaction.columns
            assert tuple(table.values[r]) == interaction.values


class TestRowCovers:
    def test_row_covers(self):
        interaction = Interaction.of([(1, 2), (3, 0)])
        assert row_covers([0, 2, 1, 0], interaction)
        assert not row_covers([0, 2, 1, 1], interaction)


class TestCoverageState:
    def test_empty_state(self):
        """A fresh state has no rows and minimum coverage 0."""
        state = CoverageState(CAParams(2, 4, 3))
        assert len(state) == 0
        assert state.min_coverage() == 0
        assert state.array.shape == (0, 4)

    def test_append_row(self):
        """One row covers exactly C(k, t) interactions once."""
        state = CoverageState(CAParams(2, 4, 3))
        ranks = state.append_row([0, 1, 2, 0])
        assert len(ranks) == 6
        assert state.counts.sum() == 6
        assert set(np.flatnonzero(state.counts)) == set(ranks.tolist())
        assert state.coverage_updates == 6

    def test_append_row_rejects_bad_rows(self):
        state = CoverageState(CAParams(2, 4, 3))
        with pytest.raises(ArrayShapeError):
            state.append_row([0, 1, 2])
        with pytest.raises(ArrayShapeError):
            state.append_row([0, 1, 2, 3])
        assert len(state) == 0

    def test_fixture_reaches_index_one(self, fig1):
        """The 9-row fixture covers each of its 54 pairs exactly once."""
        params, array = fig1
        state = CoverageState.from_array(params, array)
        assert state.min_coverage() == 1
        assert state.counts.max() == 1

    def test_column_frequencies(self):
        state = CoverageState(CAParams(2, 3, 2))
        state.append_row([0, 1, 1])
        state.append_row([0, 0, 1])
        assert state.col_freq.tolist() == [[2, 0], [1, 1], [0, 2]]
        assert state.least_frequent_symbols().tolist() == [1, 0, 0]

    def test_incremental_matches_oracle(self):
        """Incremental counts equal a from-scratch recount on 100 random arrays."""
        rng = np.random.default_rng(7)
        for trial in range(100):
            params = CAParams(t=int(rng.integers(1, 4)), k=8, v=int(rng.integers(2, 4)))
            array = rng.integers(0, params.v, size=(20, params.k))
            state = CoverageState(params)
            for row in array:
                state.append_row(row)
            assert np.array_equal(state.counts, brute_force_counts(array, params)), trial
            assert np.array_equal(
                state.counts, CoverageState.from_array(params, array).counts
            ), trial

    def test_copy_is_independent(self):
        state = CoverageState(CAParams(2, 4, 3))
        state.append_row([0, 0, 0, 0])
        clone = state.copy()
        clone.append_row([1, 1, 1, 1])
        assert len(state) == 1 and len(clone) == 2
        assert state.counts.sum() == 6

    def test_deficiencies(self):
        state = CoverageState(CAParams(2, 2, 2))
        state.append_row([0, 0])
        assert state.deficiencies(2).tolist() == [1, 2, 2, 2]

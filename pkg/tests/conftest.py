"""Shared fixture arrays and oracles."""

from __future__ import annotations

from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from higher_index_ca.arrayio import read_array
from higher_index_ca.core import CAParams

FIXTURES = Path(__file__).parent.parent / "data" / "fixtures"


def load_fixture(name: str) -> tuple[CAParams, np.ndarray]:
    return read_array(FIXTURES / name)


def naive_min_coverage(array: np.ndarray, params: CAParams) -> int:
    """Minimum coverage over all t-way interactions, counted with plain tuples."""
    rows = [tuple(int(x) for x in row) for row in array]
    lowest = None
    for columns in combinations(range(params.k), params.t):
        seen: dict[tuple[int, ...], int] = {}
        for row in rows:
            key = tuple(row[c] for c in columns)
            seen[key] = seen.get(key, 0) + 1
        total = params.v**params.t
        counts = list(seen.values()) + [0] * (total - len(seen))
        low = min(counts)
        lowest = low if lowest is None else min(lowest, low)
    return lowest if lowest is not None else 0


@pytest.fixture
def fig1():
    """The 9-row strength-2 array over four ternary factors."""
    return load_fixture("ca1_9_2_4_3.txt")


@pytest.fixture
def fig2_left():
    return load_fixture("ca5_27_2_18_2.txt")


@pytest.fixture
def fig2_right():
    return load_fixture("ca5_29_2_18_2.txt")

"""
Cost growth of single stage algorithms.

Runs a one-stage selection for increasing numbers of factors k and fits the
measured cost, or the number of graph edges visited, against a few growth
models, using the interaction count C(k, t) * v**t as the problem size n.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from higher_index_ca.algorithms import Algorithm, StageGoal, WorkCounter, run_stage
from higher_index_ca.core import CAParams, CoverageState, interaction_count
from higher_index_ca.multistage import StageSelection, TimeMode, execute

logger = logging.getLogger(__name__)

# Ordered simplest first; ties within RELATIVE_EPS keep the simpler model.
MODELS: list[tuple[str, Callable[[np.ndarray], np.ndarray]]] = [
    ("O(1) (Constant)", lambda n: np.ones_like(n)),
    ("O(log n) (Logarithmic)", lambda n: np.log(n)),
    ("O(n) (Linear)", lambda n: n),
    ("O(n log n) (Linearithmic)", lambda n: n * np.log(n)),
    ("O(n^2) (Quadratic)", lambda n: n**2),
]

RELATIVE_EPS = 0.05
METRICS = ("cost", "edges")


def measure_stage_cost(
    algorithm: Algorithm | str,
    t: int,
    v: int,
    lam: int,
    k: int,
    time_mode: TimeMode | str = TimeMode.WORK,
) -> float:
    """Cost of the selection ``algorithm(lam)`` from an empty array."""
    params = CAParams(t=t, k=k, v=v, lam=lam)
    selection = StageSelection.of((Algorithm.from_code(str(algorithm)), lam))
    return execute(selection, params).cost(time_mode)


def measure_stage_work(algorithm: Algorithm | str, t: int, v: int, lam: int, k: int) -> WorkCounter:
    """Work breakdown of one ``algorithm(lam)`` stage from an empty array."""
    work = WorkCounter()
    state = CoverageState(CAParams(t=t, k=k, v=v, lam=lam))
    run_stage(Algorithm.from_code(str(algorithm)), state, StageGoal(0, lam), work)
    return work


def _rmse(
    sizes: np.ndarray, costs: np.ndarray, model: Callable[[np.ndarray], np.ndarray]
) -> float | None:
    """
    Least-squares fit of cost = a * f(n) + b.

    Returns:
        RMSE of the fit, or None when the model does not explain growth
        (non-positive slope).
    """
    x = model(sizes)
    if np.ptp(x) == 0:
        return float(np.sqrt(np.mean((costs - costs.mean()) ** 2)))
    design = np.column_stack([x, np.ones_like(x)])
    (a, b), *_ = np.linalg.lstsq(design, costs, rcond=None)
    if a <= 1e-12:
        return None
    return float(np.sqrt(np.mean((costs - (a * x + b)) ** 2)))


def detect_growth(sizes, costs) -> tuple[str | None, float | None]:
    """
    Pick the growth model that best explains ``costs`` over ``sizes``.

    Returns:
        tuple: (model name, rmse) or (None, None) with fewer than 3 points.
    """
    if len(costs) < 3:
        return (None, None)
    n = np.asarray(sizes, dtype=np.float64)
    y = np.asarray(costs, dtype=np.float64)
    y = y / max(float(y.min()), 1e-9)

    best_fit, best_score = None, math.inf
    for name, model in MODELS:
        rmse = _rmse(n, y, model)
        if rmse is None:
            continue
        if best_fit is None or rmse < best_score - RELATIVE_EPS * best_score:
            best_fit, best_score = name, rmse
    if best_fit is None:
        return (None, None)
    return best_fit, best_score


@dataclass(frozen=True)
class GrowthPoint:
    k: int
    interactions: int
    cost: float
    work: int
    edge_visits: int

    @property
    def edge_share(self) -> float:
        return self.edge_visits / self.work if self.work else 0.0


@dataclass(frozen=True)
class GrowthReport:
    algorithm: Algorithm
    time_mode: TimeMode
    points: list[GrowthPoint]
    model: str | None
    rmse: float | None
    metric: str = "cost"

    def __str__(self) -> str:
        unit = "seconds" if self.time_mode is TimeMode.WALL else "work units"
        lines = [
            f"{'k':<6} | {'interactions':<14} | {'cost (' + unit + ')':<20} | "
            f"{'edge visits':<12} | {'edge share':<10}",
            "-" * 76,
        ]
        lines.extend(
            f"{p.k:<6} | {p.interactions:<14} | {p.cost:<20g} | {p.edge_visits:<12} | "
            f"{p.edge_share:<10.1%}"
            for p in self.points
        )
        lines.append("-" * 76)
        if self.model is None:
            lines.append("Insufficient data to estimate growth.")
        else:
            lines.append(f"Estimated growth ({self.metric}): {self.model}")
            lines.append(f"RMSE: {self.rmse:.3f}")
        return "\n".join(lines)


def estimate_growth(
    algorithm: Algorithm | str,
    t: int,
    v: int,
    lam: int,
    k_values: list[int],
    time_mode: TimeMode | str = TimeMode.WORK,
    metric: str = "cost",
) -> GrowthReport:
    """Measure ``algorithm(lam)`` at each k and fit ``metric`` against the interaction count.

    ``metric`` is ``"cost"`` (seconds or work units) or ``"edges"`` (graph edges
    visited, which dominate the colouring stages as the graph densifies).
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {', '.join(METRICS)}, got {metric!r}")
    code = Algorithm.from_code(str(algorithm))
    mode = TimeMode(time_mode)
    points = []
    for k in k_values:
        work = measure_stage_work(code, t, v, lam, k)
        if mode is TimeMode.WORK:
            cost = float(work.total)
        else:
            cost = measure_stage_cost(code, t, v, lam, k, mode)
        size = interaction_count(CAParams(t=t, k=k, v=v, lam=lam))
        logger.info("%s(%d) at t=%d, k=%d, v=%d: cost %g, %d edge visits",
                    code.value, lam, t, k, v, cost, work.edge_visits)
        points.append(GrowthPoint(k, size, cost, work.total, work.edge_visits))
    values = [p.cost if metric == "cost" else p.edge_visits for p in points]
    model, rmse = detect_growth([p.interactions for p in points], values)
    return GrowthReport(code, mode, points, model, rmse, metric)

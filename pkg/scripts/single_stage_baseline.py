#!/usr/bin/env python3
"""Run every single-stage selection and report the lowest-N and lowest-T one.

For each (t, k, v, lambda) row, the selections B(lambda), L(lambda), S(lambda)
and D(lambda) are executed from an empty array.

Usage:
    python scripts/single_stage_baseline.py [--rows 2,10,2,5 ...]
        [--time-mode wall|work] [--out FILE]
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from higher_index_ca.algorithms import Algorithm
from higher_index_ca.config import RunManifest, default_output_dir
from higher_index_ca.core import CAParams
from higher_index_ca.evolve import format_cost
from higher_index_ca.multistage import ExecutionRecord, StageSelection, TimeMode, execute

DEFAULT_ROWS = [
    (2, 10, 2, 5),
    (2, 10, 2, 10),
    (2, 10, 3, 5),
    (2, 20, 2, 5),
    (2, 20, 2, 10),
    (3, 10, 2, 5),
    (4, 10, 2, 5),
]

FIELDS = [
    "t", "k", "v", "lambda",
    "lowest_n", "lowest_n_t", "lowest_n_selection",
    "lowest_t_n", "lowest_t", "lowest_t_selection",
]


def baseline(params: CAParams, time_mode: TimeMode) -> tuple[ExecutionRecord, ExecutionRecord]:
    records = [
        execute(StageSelection.of((algorithm, params.lam)), params) for algorithm in Algorithm
    ]
    lowest_n = min(records, key=lambda r: (r.final_rows, r.cost(time_mode)))
    lowest_t = min(records, key=lambda r: (r.cost(time_mode), r.final_rows))
    return lowest_n, lowest_t


def parse_row(text: str) -> tuple[int, int, int, int]:
    try:
        t, k, v, lam = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected t,k,v,lambda, got {text!r}") from None
    return t, k, v, lam


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", nargs="+", type=parse_row, default=DEFAULT_ROWS,
                        help="Parameter rows as t,k,v,lambda (default: seven table rows)")
    parser.add_argument("--time-mode", choices=[m.value for m in TimeMode],
                        default=TimeMode.WORK.value)
    parser.add_argument("--out", help="CSV to write (default: <output dir>/baseline.csv)")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    mode = TimeMode(args.time_mode)
    out = Path(args.out or default_output_dir() / "baseline.csv")
    out.parent.mkdir(parents=True, exist_ok=True)

    print(f"{'t,k,v,lambda':<14} | {'Lowest N':<22} | {'Lowest T':<26}")
    print("-" * 68)
    with open(out, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(FIELDS)
        for t, k, v, lam in args.rows:
            params = CAParams(t=t, k=k, v=v, lam=lam)
            low_n, low_t = baseline(params, mode)
            writer.writerow([
                t, k, v, lam,
                low_n.final_rows, format_cost(low_n.cost(mode)), str(low_n.selection),
                low_t.final_rows, format_cost(low_t.cost(mode)), str(low_t.selection),
            ])
            label = f"{t},{k},{v},{lam}"
            print(f"{label:<14} | {low_n.final_rows:<6} {str(low_n.selection):<15} | "
                  f"{format_cost(low_t.cost(mode)):<12} {str(low_t.selection):<13}")
            sys.stdout.flush()

    RunManifest(command="baseline", time_mode=mode.value, outputs=[str(out)],
                extra={"rows": [list(row) for row in args.rows]}).write_beside(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

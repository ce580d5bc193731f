"""Array text format.

Line 1 holds ``N k v t lambda``; each of the next N lines holds the k symbols
of one row. Fields are separated by single spaces, lines end with ``\\n`` and
carry no trailing whitespace.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from higher_index_ca.core import CAParams, as_array
from higher_index_ca.errors import ArrayFormatError, ArrayShapeError, InvalidParametersError


def format_array(array: NDArray[np.int64], params: CAParams) -> str:
    array = as_array(array, params)
    lines = [f"{len(array)} {params.k} {params.v} {params.t} {params.lam}"]
    lines.extend(" ".join(str(int(symbol)) for symbol in row) for row in array)
    return "\n".join(lines) + "\n"


_FIELDS = re.compile(r"-?\d+(?: -?\d+)*")


def _split(line: str, number: int) -> list[int]:
    if not _FIELDS.fullmatch(line):
        raise ArrayFormatError(
            f"line {number}: expected integers separated by single spaces, got {line!r}"
        )
    return [int(field) for field in line.split(" ")]


def parse_array(text: str) -> tuple[CAParams, NDArray[np.int64]]:
    if not text.strip():
        raise ArrayFormatError("empty input: missing 'N k v t lambda' header")
    if not text.endswith("\n"):
        raise ArrayFormatError("missing newline at end of input")
    lines = text[:-1].split("\n")
    header = _split(lines[0], 1)
    if len(header) != 5:
        raise ArrayFormatError(f"bad header {lines[0]!r}: expected 'N k v t lambda'")
    n, k, v, t, lam = header
    try:
        params = CAParams(t=t, k=k, v=v, lam=lam)
    except InvalidParametersError as exc:
        raise ArrayFormatError(f"bad header {lines[0]!r}: {exc}") from exc
    if n < 0:
        raise ArrayFormatError(f"bad header {lines[0]!r}: negative row count")

    body = lines[1:]
    if len(body) != n:
        raise ArrayFormatError(f"header declares {n} rows, found {len(body)} lines")
    rows = []
    for number, line in enumerate(body, start=2):
        row = _split(line, number)
        if len(row) != k:
            raise ArrayFormatError(f"line {number}: {len(row)} symbols, expected {k}")
        rows.append(row)
    try:
        array = as_array(np.array(rows, dtype=np.int64).reshape(n, k), params)
    except ArrayShapeError as exc:
        raise ArrayFormatError(str(exc)) from exc
    return params, array


def read_array(path: Path | str) -> tuple[CAParams, NDArray[np.int64]]:
    # newline="" keeps "\r" visible to the parser
    with open(path, encoding="utf-8", newline="") as f:
        return parse_array(f.read())


def write_array(path: Path | str, array: NDArray[np.int64], params: CAParams) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_array(array, params))
    return path

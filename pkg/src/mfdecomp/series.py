"""Price and return series containers, CSV ingestion and log returns."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d sequence, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def exact_mean_std(values, ddof: int = 1) -> tuple[float, float]:
    """Mean and standard deviation with an ``n - ddof`` denominator.

    Both are accumulated with ``math.fsum`` so the result does not depend on
    the order of the values; a permuted copy gives bit-identical statistics.
    The std is 0 when fewer than ``ddof + 1`` values are given.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n == 0:
        raise ValueError("empty sequence")
    mu = math.fsum(values) / n
    if n <= ddof:
        return mu, 0.0
    dev = values - mu
    return mu, math.sqrt(math.fsum(dev * dev) / (n - ddof))


@dataclass(frozen=True)
class PriceSeries:
    values: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        values = _frozen_array(self.values)
        object.__setattr__(self, "values", values)
        if len(values) < 2:
            raise ValueError(f"a price series needs at least 2 values, got {len(values)}")
        bad = np.flatnonzero(~(values > 0))
        if bad.size:
            i = int(bad[0])
            raise ValueError(f"price at index {i} is not strictly positive: {values[i]!r}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(values):
                raise ValueError("labels and values differ in length")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ReturnSeries:
    """Immutable return series with cached sample mean and std."""

    values: np.ndarray
    mean: float = field(init=False)
    std: float = field(init=False)

    def __post_init__(self):
        values = _frozen_array(self.values)
        if len(values) == 0:
            raise ValueError("empty return series")
        if not np.all(np.isfinite(values)):
            raise ValueError("return series contains non-finite values")
        object.__setattr__(self, "values", values)
        mu, sd = exact_mean_std(values)
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "std", sd)

    @property
    def length(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def scaled(self, c: float) -> "ReturnSeries":
        return ReturnSeries(self.values * c)


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """r(t) = ln[P(t) / P(t-1)]; one value shorter than ``prices``."""
    p = prices.values
    return ReturnSeries(np.log(p[1:] / p[:-1]))


def _sniff_delimiter(line: str) -> str:
    return ";" if line.count(";") > line.count(",") else ","


def _parse_float(cell: str) -> float | None:
    try:
        return float(cell.strip())
    except ValueError:
        return None


def ingest_csv(path: str | Path, column: str | int = -1) -> PriceSeries:
    """Read one price column from a delimited text file.

    Parameters
    ----------
    path : path-like
        UTF-8 file with comma- or semicolon-separated records. The delimiter
        and the presence of a header row are decided from the first line.
    column : str or int
        Column name (requires a header) or zero-based index. Negative indices
        count from the end; the default picks the last column.

    Returns
    -------
    PriceSeries
        Prices in file order, labelled with the first column when it is not
        the price column.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    # row numbers are 1-based file line numbers
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise ValueError(f"{path}: file is empty")
    delim = _sniff_delimiter(rows[0][1])
    parsed = [(lineno, next(csv.reader([ln], delimiter=delim))) for lineno, ln in rows]

    first = [c.strip() for c in parsed[0][1]]
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        has_header = True
        if column not in first:
            raise ValueError(f"{path}: column {column!r} not in header {first}")
        idx = first.index(column)
    else:
        idx = int(column)
        try:
            has_header = _parse_float(first[idx]) is None
        except IndexError:
            raise ValueError(f"{path}: column index {idx} out of range on line {parsed[0][0]}") from None

    body = parsed[1:] if has_header else parsed
    values, labels = [], []
    for lineno, cells in body:
        try:
            cell = cells[idx]
        except IndexError:
            raise ValueError(f"{path}: row {lineno} has no column {idx}") from None
        v = _parse_float(cell)
        if v is None:
            raise ValueError(f"{path}: cannot parse {cell!r} at row {lineno}")
        if not v > 0:
            raise ValueError(f"{path}: non-positive price {cell!r} at row {lineno}")
        values.append(v)
        labels.append(cells[0].strip() if len(cells) > 1 and idx % len(cells) != 0 else "")
    if not values:
        raise ValueError(f"{path}: column {column!r} is empty")
    use_labels = tuple(labels) if any(labels) else None
    log.info("read %d prices from %s", len(values), path)
    return PriceSeries(np.array(values), use_labels)

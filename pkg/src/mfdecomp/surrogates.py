"""Surrogate series: shuffles, truncation, rank-order remapping and IAAFT."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .generators import DistributionSpec, sample
from .series import ReturnSeries

KINDS = ("shuffle", "truncate", "rank_remap", "iaaft")


@dataclass(frozen=True)
class SurrogateSpec:
    """Declarative surrogate transformation.

    ``params`` by kind: truncate -> ``{"M": float}``; rank_remap ->
    ``{"dist": DistributionSpec}``; iaaft -> ``{"iterations": int}`` (default 20).
    """

    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown surrogate kind {self.kind!r}")
        if self.kind == "truncate" and not self.params.get("M", 0) > 0:
            raise ValueError("truncate needs M > 0")
        if self.kind == "iaaft" and self.params.get("iterations", 20) < 1:
            raise ValueError("iaaft needs iterations >= 1")
        if self.kind == "rank_remap" and not isinstance(self.params.get("dist"), DistributionSpec):
            raise ValueError("rank_remap needs a DistributionSpec under params['dist']")


def shuffle(series: ReturnSeries, seed) -> ReturnSeries:
    if series.length < 2:
        raise ValueError("shuffle needs at least 2 values")
    rng = np.random.default_rng(seed)
    return ReturnSeries(rng.permutation(series.values))


def truncate(series: ReturnSeries, M: float, seed) -> tuple[ReturnSeries, int]:
    """Replace every |r| > M sigma by a random draw from the values at or below it.

    Returns the truncated series and the number of replaced positions.
    """
    if not M > 0:
        raise ValueError(f"M must be positive, got {M}")
    r = series.values
    thresh = M * series.std
    keep = np.abs(r) <= thresh
    if not keep.any():
        raise ValueError(f"no value lies within M * sigma for M = {M}")
    over = np.flatnonzero(~keep)
    if not over.size:
        return series, 0
    rng = np.random.default_rng(seed)
    pool = r[keep]
    out = r.copy()
    out[over] = pool[rng.integers(0, len(pool), size=over.size)]
    return ReturnSeries(out), int(over.size)


def rank_remap(series: ReturnSeries, raw_sample) -> ReturnSeries:
    """Reorder ``raw_sample`` to the rank pattern of ``series``, then rescale.

    The i-th smallest raw value goes where the i-th smallest return sits (ties
    in the returns resolved by position). The result is centred and scaled to
    the series' sample mean and standard deviation.
    """
    raw = np.asarray(raw_sample, dtype=float)
    if raw.shape != (series.length,):
        raise ValueError(f"raw sample length {raw.size} != series length {series.length}")
    x = np.empty_like(raw)
    x[np.argsort(series.values, kind="stable")] = np.sort(raw)
    tmp = ReturnSeries(x)
    if tmp.std == 0:
        return ReturnSeries(np.full(series.length, series.mean))
    return ReturnSeries((x - tmp.mean) * (series.std / tmp.std) + series.mean)


def spectral_error(values: np.ndarray, target_power: np.ndarray) -> float:
    """Relative L2 distance between the one-sided power spectrum of ``values`` and a target."""
    power = np.abs(np.fft.rfft(values)) ** 2
    norm = np.linalg.norm(target_power)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(power - target_power) / norm)


def iaaft(series: ReturnSeries, iterations: int = 20, seed=0) -> tuple[ReturnSeries, np.ndarray]:
    """Iterated amplitude-adjusted Fourier transform surrogate.

    Fourier amplitudes are taken from the original series; each iteration
    imposes them on the current iterate and then restores the original values
    by rank. Returns the surrogate and the per-iteration spectral error
    (see :func:`spectral_error`) measured after the rank step.
    """
    n = series.length
    if n < 4:
        raise ValueError("iaaft needs at least 4 values")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    r = series.values
    amp = np.abs(np.fft.rfft(r))
    target = amp**2
    sorted_vals = np.sort(r)
    rng = np.random.default_rng(seed)
    cur = rng.permutation(r)
    trace = np.empty(iterations)
    for k in range(iterations):
        spec = np.fft.rfft(cur)
        y = np.fft.irfft(amp * np.exp(1j * np.angle(spec)), n)
        cur = np.empty(n)
        cur[np.argsort(y, kind="stable")] = sorted_vals
        trace[k] = spectral_error(cur, target)
    trace.setflags(write=False)
    return ReturnSeries(cur), trace


def apply(series: ReturnSeries, spec: SurrogateSpec, seed=None) -> ReturnSeries:
    """Run the surrogate described by ``spec``; ``seed`` overrides ``spec.seed``."""
    seed = spec.seed if seed is None else seed
    if spec.kind == "shuffle":
        return shuffle(series, seed)
    if spec.kind == "truncate":
        return truncate(series, spec.params["M"], seed)[0]
    if spec.kind == "rank_remap":
        return rank_remap(series, sample(spec.params["dist"], series.length, seed))
    return iaaft(series, spec.params.get("iterations", 20), seed)[0]

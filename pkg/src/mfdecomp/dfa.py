"""Multifractal DFA with random box sampling.

For each scale ``s`` a single set of ``n_boxes`` windows with uniformly random
starts is drawn, the profile is detrended by a least-squares polynomial inside
every window, and the resulting local fluctuations are combined into q-order
power means. The same windows serve every q, so F(q, s) is non-decreasing in q.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .series import ReturnSeries

log = logging.getLogger(__name__)

# cache-sized blocks of windows; much faster than one large gather
_CHUNK_ELEMS = 65_536


def default_q_grid(q_min: float = -5.0, q_max: float = 5.0, step: float = 0.25) -> tuple[float, ...]:
    n = int(round((q_max - q_min) / step))
    return tuple(float(v) for v in np.round(q_min + step * np.arange(n + 1), 10))


def log_scale_grid(s_min: int = 30, s_max: int = 3000, count: int = 30) -> tuple[int, ...]:
    grid = np.unique(np.round(np.geomspace(s_min, s_max, count)).astype(int))
    return tuple(int(s) for s in grid)


@dataclass(frozen=True)
class DfaConfig:
    q_grid: tuple[float, ...] = field(default_factory=default_q_grid)
    s_grid: tuple[int, ...] = field(default_factory=log_scale_grid)
    n_boxes: int = 2000
    poly_order: int = 2
    seed: int = 0

    def __post_init__(self):
        q = tuple(float(v) for v in self.q_grid)
        s = tuple(int(v) for v in self.s_grid)
        object.__setattr__(self, "q_grid", q)
        object.__setattr__(self, "s_grid", s)
        if any(b <= a for a, b in zip(q, q[1:])):
            raise ValueError("q_grid must be strictly increasing")
        if 0.0 not in q or 2.0 not in q:
            raise ValueError("q_grid must contain 0 and 2")
        if not s or any(b <= a for a, b in zip(s, s[1:])):
            raise ValueError("s_grid must be non-empty and strictly increasing")
        if self.n_boxes < 1:
            raise ValueError("n_boxes must be >= 1")
        if self.poly_order < 0:
            raise ValueError("poly_order must be >= 0")
        if s[0] < self.poly_order + 2:
            raise ValueError(f"scale {s[0]} too small for polynomial order {self.poly_order}")

    def validate(self, n: int) -> None:
        if self.s_grid[-1] > n - 1:
            raise ValueError(f"scale {self.s_grid[-1]} exceeds series length - 1 = {n - 1}")

    def with_scales(self, s_min: int, s_max: int, count: int = 30) -> "DfaConfig":
        return replace(self, s_grid=log_scale_grid(s_min, s_max, count))


@dataclass(frozen=True)
class FluctuationSurface:
    """F(q, s) with rows indexed by ``config.q_grid`` and columns by ``config.s_grid``."""

    f_values: np.ndarray
    config: DfaConfig
    dropped_zeros: np.ndarray  # per scale: zero local fluctuations left out of q <= 0 moments

    @property
    def q_grid(self) -> np.ndarray:
        return np.asarray(self.config.q_grid)

    @property
    def s_grid(self) -> np.ndarray:
        return np.asarray(self.config.s_grid)


@dataclass(frozen=True)
class HqCurve:
    q_grid: np.ndarray
    h: np.ndarray
    fit_r2: np.ndarray

    def at(self, q: float) -> float:
        idx = np.flatnonzero(np.isclose(self.q_grid, q, rtol=0, atol=1e-12))
        if not idx.size:
            raise KeyError(f"q = {q} not on the grid")
        return float(self.h[idx[0]])


def profile(series: ReturnSeries) -> np.ndarray:
    """Cumulative sum of the mean-subtracted returns."""
    if series.length < 2:
        raise ValueError("profile needs at least 2 returns")
    return np.cumsum(series.values - series.mean)


def sample_boxes(n: int, s: int, n_boxes: int, seed: int) -> np.ndarray:
    """Draw ``n_boxes`` zero-based window starts uniformly from ``[0, n - s]``.

    The generator is seeded by the pair ``(seed, s)`` so every scale gets its
    own reproducible stream.
    """
    if s > n - 1:
        raise ValueError(f"scale {s} exceeds series length - 1 = {n - 1}")
    if s < 1 or n_boxes < 1:
        raise ValueError("scale and n_boxes must be positive")
    rng = np.random.default_rng([seed, s])
    return rng.integers(0, n - s + 1, size=n_boxes)


def _detrend_basis(s: int, poly_order: int) -> np.ndarray:
    # orthonormal columns spanning polynomials of degree <= poly_order on s points
    u = np.linspace(-1.0, 1.0, s) if s > 1 else np.zeros(1)
    vander = np.polynomial.legendre.legvander(u, poly_order)
    q, _ = np.linalg.qr(vander)
    return q


def _box_fluctuations(prof: np.ndarray, starts: np.ndarray, s: int, poly_order: int) -> np.ndarray:
    if s <= poly_order + 1:
        raise ValueError(f"box of size {s} is degenerate for polynomial order {poly_order}")
    basis = _detrend_basis(s, poly_order)
    windows = sliding_window_view(prof, s)
    out = np.empty(len(starts))
    step = max(1, _CHUNK_ELEMS // s)
    for lo in range(0, len(starts), step):
        block = windows[starts[lo:lo + step]]
        resid = block - (block @ basis) @ basis.T
        out[lo:lo + step] = np.sqrt(np.einsum("ij,ij->i", resid, resid) / s)
    return out


def local_fluctuation(prof, start: int, s: int, poly_order: int) -> float:
    """RMS residual of a degree-``poly_order`` least-squares fit on ``prof[start:start+s]``."""
    prof = np.asarray(prof, dtype=float)
    if start < 0 or start + s > len(prof):
        raise ValueError(f"box [{start}, {start + s - 1}] outside profile of length {len(prof)}")
    return float(_box_fluctuations(prof, np.array([start]), s, poly_order)[0])


def power_means(fi: np.ndarray, q_grid) -> tuple[np.ndarray, int]:
    """Power means of the local fluctuations for every q, in the log domain.

    Zero fluctuations are excluded from the q <= 0 means (their negative
    moments diverge); the number excluded is returned alongside.
    """
    fi = np.asarray(fi, dtype=float)
    pos = fi[fi > 0]
    n_zero = len(fi) - len(pos)
    if not len(pos):
        raise ValueError("all local fluctuations are zero")
    log_pos = np.log(pos)
    out = np.empty(len(q_grid))
    for k, q in enumerate(q_grid):
        if q == 0:
            out[k] = np.exp(np.mean(log_pos))
            continue
        # zeros add nothing to positive moments but still count towards n
        n = len(fi) if q > 0 else len(pos)
        z = q * log_pos
        zmax = z.max()
        out[k] = np.exp((zmax + np.log(np.sum(np.exp(z - zmax))) - np.log(n)) / q)
    return out, n_zero


def fluctuation_function(series: ReturnSeries, config: DfaConfig | None = None) -> FluctuationSurface:
    config = config or DfaConfig()
    n = series.length
    config.validate(n)
    prof = profile(series)
    q_grid = config.q_grid
    surface = np.empty((len(q_grid), len(config.s_grid)))
    dropped = np.zeros(len(config.s_grid), dtype=int)
    for j, s in enumerate(config.s_grid):
        starts = sample_boxes(n, s, config.n_boxes, config.seed)
        fi = _box_fluctuations(prof, starts, s, config.poly_order)
        try:
            surface[:, j], dropped[j] = power_means(fi, q_grid)
        except ValueError:
            raise ValueError(f"all boxes degenerate at scale s = {s}") from None
    if dropped.any():
        log.info("dropped %d zero local fluctuations from q<=0 moments", int(dropped.sum()))
    surface.setflags(write=False)
    dropped.setflags(write=False)
    return FluctuationSurface(surface, config, dropped)


def fit_scaling(surface: FluctuationSurface, s_range: tuple[int, int] | None = None) -> HqCurve:
    """Least-squares slopes of ln F(q, s) against ln s, one per q.

    ``s_range`` optionally restricts the fit to scales inside ``[lo, hi]``.
    """
    s = surface.s_grid
    cols = np.ones(len(s), dtype=bool)
    if s_range is not None:
        cols = (s >= s_range[0]) & (s <= s_range[1])
    if cols.sum() < 3:
        raise ValueError(f"need at least 3 scales to fit, got {int(cols.sum())}")
    x = np.log(s[cols])
    y = np.log(surface.f_values[:, cols])
    xc = x - x.mean()
    yc = y - y.mean(axis=1, keepdims=True)
    sxx = xc @ xc
    slope = (yc @ xc) / sxx
    ss_tot = np.einsum("ij,ij->i", yc, yc)
    resid = yc - slope[:, None] * xc
    ss_res = np.einsum("ij,ij->i", resid, resid)
    with np.errstate(invalid="ignore", divide="ignore"):
        r2 = np.where(ss_tot > 0, 1.0 - ss_res / ss_tot, 1.0)
    return HqCurve(surface.q_grid.copy(), slope, np.clip(r2, 0.0, 1.0))


def generalized_hurst(series: ReturnSeries, config: DfaConfig | None = None) -> HqCurve:
    return fit_scaling(fluctuation_function(series, config))


def dfa_hurst(series: ReturnSeries, config: DfaConfig | None = None) -> float:
    """Ordinary DFA exponent H = h(2)."""
    config = replace(config or DfaConfig(), q_grid=(0.0, 2.0))
    return fit_scaling(fluctuation_function(series, config)).at(2.0)

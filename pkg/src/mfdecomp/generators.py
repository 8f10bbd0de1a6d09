"""Seeded samplers and synthetic benchmark series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

FAMILIES = ("gaussian", "laplace", "double_weibull", "student_t")


@dataclass(frozen=True)
class DistributionSpec:
    family: str
    beta: float = 1.0
    gamma: float = 3.0
    mu: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "double_weibull" and not 0 < self.beta <= 1:
            raise ValueError(f"double_weibull needs 0 < beta <= 1, got {self.beta}")
        if self.family == "student_t" and not self.gamma > 2:
            raise ValueError(f"student_t needs gamma > 2 for finite variance, got {self.gamma}")

    @property
    def label(self) -> str:
        if self.family == "double_weibull":
            return f"double_weibull(beta={self.beta:g})"
        if self.family == "student_t":
            return f"student_t(gamma={self.gamma:g})"
        return self.family


def _open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    # strictly inside (0, 1) so inverse CDFs stay finite
    return (rng.integers(0, 2**53, size=n) + 0.5) / 2.0**53


def sample(dist: DistributionSpec, n: int, seed) -> np.ndarray:
    """Draw ``n`` i.i.d. values from ``dist``, reproducibly in ``seed``.

    The heavy-tailed families are drawn by inverse transform from one stream
    of uniforms, so equal seeds give comonotone samples across shape values.
    Double-Weibull draws are a fair sign times (Exp(1)) ** (1 / beta),
    i.e. density (beta / 2) |x - mu|**(beta - 1) exp(-|x - mu|**beta).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if dist.family == "gaussian":
        x = rng.standard_normal(n)
    elif dist.family == "laplace":
        x = rng.laplace(0.0, 1.0, n)
    elif dist.family == "double_weibull":
        u = _open_uniform(rng, n)
        # u < 1/2 -> negative side; reuse the remaining resolution for the magnitude
        v = np.where(u < 0.5, 2.0 * u, 2.0 * u - 1.0)
        w = (-np.log(v)) ** (1.0 / dist.beta)
        x = np.where(u < 0.5, -w, w)
    else:
        x = stats.t.ppf(_open_uniform(rng, n), dist.gamma)
    return x + dist.mu


@dataclass(frozen=True)
class Cascade:
    values: np.ndarray
    p: float
    levels: int

    def tau(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return -np.log2(self.p**q + (1 - self.p) ** q)

    def h(self, q) -> np.ndarray:
        """Analytic generalized Hurst exponents, (1 + tau(q)) / q; undefined at q = 0."""
        q = np.asarray(q, dtype=float)
        return (1.0 + self.tau(q)) / q

    def alpha(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        a, b = self.p**q, (1 - self.p) ** q
        return -(a * math.log(self.p) + b * math.log(1 - self.p)) / ((a + b) * math.log(2))

    def f(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return q * self.alpha(q) - self.tau(q)


def binomial_cascade(p: float, levels: int) -> Cascade:
    """Deterministic binomial measure on 2**levels cells.

    Cell ``i`` carries ``p**(levels - k) * (1 - p)**k`` with ``k`` the number of
    set bits in ``i``; the cells sum to one.
    """
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not 1 <= levels <= 20:
        raise ValueError(f"levels must be in [1, 20], got {levels}")
    idx = np.arange(2**levels, dtype=np.int64)
    ones = np.zeros_like(idx)
    for bit in range(levels):
        ones += (idx >> bit) & 1
    values = p ** (levels - ones) * (1 - p) ** ones
    values.setflags(write=False)
    return Cascade(values, p, levels)


def fgn_autocovariance(H: float, n: int) -> np.ndarray:
    k = np.arange(n, dtype=float)
    return 0.5 * (np.abs(k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))


def fgn(H: float, n: int, seed) -> np.ndarray:
    """Unit-variance fractional Gaussian noise by circulant embedding (Davies-Harte)."""
    if not 0 < H < 1:
        raise ValueError(f"H must lie in (0, 1), got {H}")
    if n < 2 or n & (n - 1):
        raise ValueError(f"n must be a power of 2, got {n}")
    acov = fgn_autocovariance(H, n + 1)
    row = np.concatenate([acov, acov[-2:0:-1]])  # length 2n
    eig = np.fft.fft(row).real
    if eig.min() < -1e-10 * eig.max():
        raise ValueError("circulant embedding is not non-negative definite")
    eig = np.clip(eig, 0.0, None)
    m = len(row)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    y = np.fft.fft(np.sqrt(eig / m) * z)
    return y.real[:n]

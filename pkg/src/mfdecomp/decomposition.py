"""Magnitude/sign decomposition and the volatility-memory nonlinearity check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dfa import DfaConfig, dfa_hurst
from .series import ReturnSeries, exact_mean_std
from .surrogates import iaaft, shuffle

# flag when the raw magnitude exponent sits this many ensemble stds above the IAAFT mean
NONLINEARITY_SIGMAS = 3.0


@dataclass(frozen=True)
class MagnitudeSignPair:
    magnitude: ReturnSeries
    sign: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.magnitude.values * self.sign


def magnitude_sign(series: ReturnSeries) -> MagnitudeSignPair:
    sign = np.sign(series.values).astype(np.int8)
    sign.setflags(write=False)
    return MagnitudeSignPair(ReturnSeries(np.abs(series.values)), sign)


@dataclass(frozen=True)
class NonlinearityReport:
    hurst_raw: float
    hurst_magnitude: float
    hurst_sign: float
    shuffle_magnitude_mean: float
    shuffle_magnitude_std: float
    iaaft_magnitude_mean: float
    iaaft_magnitude_std: float
    n_surrogates: int
    nonlinear: bool


def flags_nonlinearity(h_magnitude: float, iaaft_mean: float, iaaft_std: float,
                       n_sigmas: float = NONLINEARITY_SIGMAS) -> bool:
    return h_magnitude > iaaft_mean + n_sigmas * iaaft_std


def nonlinearity_report(series: ReturnSeries, config: DfaConfig | None = None,
                        n_surrogates: int = 100, seed: int = 0,
                        iterations: int = 20) -> NonlinearityReport:
    """DFA exponents of the returns, their magnitudes and surrogate magnitudes.

    Surrogate ``i`` (1-based) is generated with seed ``(seed, i)``.
    """
    if n_surrogates < 1:
        raise ValueError("n_surrogates must be >= 1")
    config = config or DfaConfig()
    pair = magnitude_sign(series)
    h_raw = dfa_hurst(series, config)
    h_mag = dfa_hurst(pair.magnitude, config)
    signs = ReturnSeries(pair.sign.astype(float))
    h_sign = dfa_hurst(signs, config) if signs.std > 0 else float("nan")
    h_shuf, h_iaaft = [], []
    for i in range(1, n_surrogates + 1):
        sh = shuffle(series, [seed, i])
        h_shuf.append(dfa_hurst(magnitude_sign(sh).magnitude, config))
        ia, _ = iaaft(series, iterations, [seed, i])
        h_iaaft.append(dfa_hurst(magnitude_sign(ia).magnitude, config))
    ms, ss = exact_mean_std(h_shuf, ddof=0)
    mi, si = exact_mean_std(h_iaaft, ddof=0)
    return NonlinearityReport(h_raw, h_mag, h_sign, ms, ss, mi, si, n_surrogates,
                              flags_nonlinearity(h_mag, mi, si))


"""Mass exponents, Legendre transform and spectrum comparison."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .dfa import HqCurve

log = logging.getLogger(__name__)

CONCAVITY_TOL = 1e-6


@dataclass(frozen=True)
class TauCurve:
    q_grid: np.ndarray
    tau: np.ndarray
    h: np.ndarray


@dataclass(frozen=True)
class SingularitySpectrum:
    """Singularity spectrum on the interior points of the moment grid.

    ``f`` is kept as computed; negative values are legitimate and are not
    clipped.
    """

    q_grid: np.ndarray
    alpha: np.ndarray
    f: np.ndarray
    tau: np.ndarray
    width: float
    alpha_at_q0: float
    concave: bool = True

    def at_q0_index(self) -> int:
        return int(np.argmin(np.abs(self.q_grid)))


def tau_from_h(hq: HqCurve) -> TauCurve:
    q = np.asarray(hq.q_grid, dtype=float)
    if not np.any(q == 0):
        raise ValueError("q grid must contain 0")
    h = np.asarray(hq.h, dtype=float)
    return TauCurve(q, q * h - 1.0, h)


def concavity_defects(q: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Second divided differences of tau at the interior grid points."""
    d1 = np.diff(tau) / np.diff(q)
    return 2.0 * np.diff(d1) / (q[2:] - q[:-2])


def legendre(tau: TauCurve) -> SingularitySpectrum:
    """Legendre transform of tau(q) by central differences.

    alpha(q) = dtau/dq is taken as the centred difference of tau, which equals
    h(q) + q h'(q) to second order, and f = q alpha - tau = q (alpha - h) + 1.
    The two end points of the grid have no centred difference and are dropped.
    A tau that fails the concavity check is reported through ``concave``.
    """
    q, t, h = tau.q_grid, tau.tau, tau.h
    if len(q) < 3:
        raise ValueError("need at least 3 grid points for the Legendre transform")
    alpha = (t[2:] - t[:-2]) / (q[2:] - q[:-2])
    qi, ti, hi = q[1:-1], t[1:-1], h[1:-1]
    f = qi * (alpha - hi) + 1.0
    concave = bool(np.all(concavity_defects(q, t) <= CONCAVITY_TOL))
    if not concave:
        log.debug("tau(q) is not concave on the grid; spectrum may fold")
    i0 = int(np.argmin(np.abs(qi)))
    return SingularitySpectrum(
        q_grid=qi.copy(),
        alpha=alpha,
        f=f,
        tau=ti.copy(),
        width=float(alpha.max() - alpha.min()),
        alpha_at_q0=float(alpha[i0]),
        concave=concave,
    )


def spectrum_from_h(hq: HqCurve) -> SingularitySpectrum:
    return legendre(tau_from_h(hq))


def spectrum_width(spec: SingularitySpectrum) -> float:
    return float(spec.alpha.max() - spec.alpha.min())


@dataclass(frozen=True)
class ShiftReport:
    delta_alpha: float
    hurst_gap: float
    mismatch: float
    max_deviation: float
    overlap: bool


def shift_diagnostic(spec_a: SingularitySpectrum, spec_b: SingularitySpectrum,
                     h_a: float, h_b: float) -> ShiftReport:
    """Compare two spectra that should differ by a horizontal shift.

    ``delta_alpha`` is alpha_a(q=0) - alpha_b(q=0). The second spectrum is
    moved right by that amount and ``max_deviation`` is the largest
    |f_a(alpha) - f_b(alpha - delta_alpha)| over the overlapping alpha range,
    with f_b linearly interpolated.
    """
    if len(spec_a.q_grid) != len(spec_b.q_grid) or not np.allclose(spec_a.q_grid, spec_b.q_grid):
        raise ValueError("spectra must share the same q grid")
    delta = spec_a.alpha_at_q0 - spec_b.alpha_at_q0
    gap = h_a - h_b
    order = np.argsort(spec_b.alpha, kind="stable")
    ab = spec_b.alpha[order] + delta
    fb = spec_b.f[order]
    inside = (spec_a.alpha >= ab[0]) & (spec_a.alpha <= ab[-1])
    if not inside.any():
        return ShiftReport(delta, gap, delta - gap, float("nan"), False)
    dev = np.abs(spec_a.f[inside] - np.interp(spec_a.alpha[inside], ab, fb))
    return ShiftReport(delta, gap, delta - gap, float(dev.max()), True)

"""Seeded surrogate ensembles, parameter sweeps and result files."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .decomposition import NonlinearityReport, nonlinearity_report
from .dfa import DfaConfig, generalized_hurst
from .generators import DistributionSpec
from .series import ReturnSeries, exact_mean_std
from .spectrum import ShiftReport, SingularitySpectrum, shift_diagnostic, spectrum_from_h
from .surrogates import SurrogateSpec, apply

log = logging.getLogger(__name__)

EXPERIMENTS = ("spectrum", "shuffle_compare", "truncation_sweep", "distribution_sweep",
               "iaaft_compare", "decomposition")


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    n = int(round((stop - start) / step))
    return tuple(float(v) for v in np.round(start + step * np.arange(n + 1), 10))


@dataclass(frozen=True)
class ExperimentPlan:
    experiment: str = "spectrum"
    ensemble_size: int = 100
    dfa: DfaConfig = field(default_factory=DfaConfig)
    m_grid: tuple[float, ...] = field(default_factory=lambda: tuple(np.linspace(1.0, 13.0, 25).tolist()))
    beta_grid: tuple[float, ...] = field(default_factory=lambda: _grid(0.45, 0.95, 0.05))
    gamma_grid: tuple[float, ...] = field(default_factory=lambda: _grid(3.0, 9.0, 0.5))
    iaaft_iterations: int = 20
    seed: int = 0
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.ensemble_size < 1:
            raise ValueError("ensemble_size must be >= 1")
        if self.iaaft_iterations < 1:
            raise ValueError("iaaft_iterations must be >= 1")
        for name in ("m_grid", "beta_grid", "gamma_grid"):
            grid = tuple(float(v) for v in getattr(self, name))
            if not grid:
                raise ValueError(f"{name} is empty")
            object.__setattr__(self, name, grid)
        if min(self.m_grid) <= 0:
            raise ValueError("M values must be positive")
        if min(self.beta_grid) <= 0 or max(self.beta_grid) > 1:
            raise ValueError("beta values must lie in (0, 1]")
        if min(self.gamma_grid) <= 2:
            raise ValueError("gamma values must exceed 2")

    def echo(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Analysis:
    """MF-DFA result for a single series."""

    h2: float
    spectrum: SingularitySpectrum

    def block(self) -> dict:
        s = self.spectrum
        return {
            "q": s.q_grid, "alpha": s.alpha, "f": s.f,
            "alpha_std": np.zeros_like(s.alpha), "f_std": np.zeros_like(s.f),
            "dalpha": s.width, "h2": self.h2, "alpha_q0": s.alpha_at_q0, "concave": s.concave,
        }


def analyze(series: ReturnSeries, config: DfaConfig) -> Analysis:
    hq = generalized_hurst(series, config)
    return Analysis(hq.at(2.0), spectrum_from_h(hq))


@dataclass(frozen=True)
class EnsembleResult:
    """Per-q mean/std of the spectra of ``count`` surrogate realizations (population std)."""

    q_grid: np.ndarray
    alpha_mean: np.ndarray
    alpha_std: np.ndarray
    f_mean: np.ndarray
    f_std: np.ndarray
    width_mean: float
    width_std: float
    h2_mean: float
    h2_std: float
    count: int
    spectra: tuple[SingularitySpectrum, ...] = field(repr=False)
    h2: np.ndarray = field(repr=False)

    @property
    def widths(self) -> np.ndarray:
        return np.array([s.width for s in self.spectra])

    def mean_spectrum(self) -> SingularitySpectrum:
        i0 = int(np.argmin(np.abs(self.q_grid)))
        return SingularitySpectrum(
            q_grid=self.q_grid, alpha=self.alpha_mean, f=self.f_mean,
            tau=self.q_grid * self.alpha_mean - self.f_mean,
            width=float(self.alpha_mean.max() - self.alpha_mean.min()),
            alpha_at_q0=float(self.alpha_mean[i0]),
            concave=all(s.concave for s in self.spectra),
        )

    def block(self) -> dict:
        ms = self.mean_spectrum()
        return {
            "q": self.q_grid, "alpha": self.alpha_mean, "f": self.f_mean,
            "alpha_std": self.alpha_std, "f_std": self.f_std,
            "dalpha": ms.width, "dalpha_mean": self.width_mean, "dalpha_std": self.width_std,
            "h2_mean": self.h2_mean, "h2_std": self.h2_std, "alpha_q0": ms.alpha_at_q0,
            "realizations": self.count,
        }


def aggregate(spectra: Sequence[SingularitySpectrum], h2: Sequence[float]) -> EnsembleResult:
    """Order-independent ensemble statistics (exact summation)."""
    if not spectra:
        raise ValueError("no realizations to aggregate")
    q = spectra[0].q_grid
    alpha = np.array([s.alpha for s in spectra])
    f = np.array([s.f for s in spectra])
    col = lambda m: np.array([exact_mean_std(m[:, k], ddof=0) for k in range(m.shape[1])]).T
    am, asd = col(alpha)
    fm, fsd = col(f)
    wm, wsd = exact_mean_std([s.width for s in spectra], ddof=0)
    hm, hsd = exact_mean_std(h2, ddof=0)
    return EnsembleResult(q, am, asd, fm, fsd, wm, wsd, hm, hsd, len(spectra),
                          tuple(spectra), np.asarray(h2, dtype=float))


def realization_seed(seed: int, i: int, step: int = 0) -> list[int]:
    return [seed, i] if step == 0 else [seed, i, step]


def run_ensemble(series: ReturnSeries, spec: SurrogateSpec | Sequence[SurrogateSpec],
                 plan: ExperimentPlan) -> EnsembleResult:
    """Apply the surrogate ``plan.ensemble_size`` times and aggregate the spectra.

    Realization ``i`` (1-based) uses seed ``(plan.seed, i)``. A sequence of
    specs is applied as a chain, step ``k > 0`` seeded ``(plan.seed, i, k)``.
    """
    chain = (spec,) if isinstance(spec, SurrogateSpec) else tuple(spec)
    spectra, h2 = [], []
    for i in range(1, plan.ensemble_size + 1):
        try:
            x = series
            for k, step in enumerate(chain):
                x = apply(x, step, realization_seed(plan.seed, i, k))
            res = analyze(x, plan.dfa)
        except Exception as exc:
            raise RuntimeError(f"realization {i} failed: {exc}") from exc
        spectra.append(res.spectrum)
        h2.append(res.h2)
    return aggregate(spectra, h2)


@dataclass(frozen=True)
class SweepRow:
    param: float
    width_mean: float
    width_std: float
    ensemble: EnsembleResult


def truncation_sweep(series: ReturnSeries, plan: ExperimentPlan) -> list[tuple[float, EnsembleResult, EnsembleResult]]:
    """For each M: ensembles of truncated data and of shuffled truncated data, sorted by M."""
    rows = []
    for M in sorted(plan.m_grid):
        log.info("truncation sweep: M = %g", M)
        trunc = SurrogateSpec("truncate", {"M": M})
        try:
            trun = run_ensemble(series, trunc, plan)
            shtr = run_ensemble(series, (trunc, SurrogateSpec("shuffle")), plan)
        except RuntimeError as exc:
            raise RuntimeError(f"M = {M}: {exc}") from exc
        rows.append((M, trun, shtr))
    return rows


def distribution_sweep(series: ReturnSeries, plan: ExperimentPlan, family: str) -> list[SweepRow]:
    """Rank-remap ensembles over the beta grid (double_weibull) or gamma grid (student_t)."""
    if family == "double_weibull":
        dists = [(b, DistributionSpec("double_weibull", beta=b)) for b in plan.beta_grid]
    elif family == "student_t":
        dists = [(g, DistributionSpec("student_t", gamma=g)) for g in plan.gamma_grid]
    else:
        dists = [(0.0, DistributionSpec(family))]
    rows = []
    for param, dist in dists:
        log.info("distribution sweep: %s", dist.label)
        ens = run_ensemble(series, SurrogateSpec("rank_remap", {"dist": dist}), plan)
        rows.append(SweepRow(param, ens.width_mean, ens.width_std, ens))
    return rows


@dataclass(frozen=True)
class IaaftComparison:
    original: Analysis
    iaaft: EnsembleResult
    shuffled: EnsembleResult
    shift: ShiftReport


def iaaft_compare(series: ReturnSeries, plan: ExperimentPlan) -> IaaftComparison:
    original = analyze(series, plan.dfa)
    log.info("iaaft ensemble")
    surr = run_ensemble(series, SurrogateSpec("iaaft", {"iterations": plan.iaaft_iterations}), plan)
    log.info("shuffle ensemble")
    shuf = run_ensemble(series, SurrogateSpec("shuffle"), plan)
    shift = shift_diagnostic(surr.mean_spectrum(), shuf.mean_spectrum(), surr.h2_mean, shuf.h2_mean)
    return IaaftComparison(original, surr, shuf, shift)


def run_experiment(series: ReturnSeries, plan: ExperimentPlan, family: str | None = None) -> dict:
    """Run ``plan.experiment`` and return the JSON-ready document."""
    doc = {"experiment": plan.experiment, "plan": plan.echo(), "n": series.length}
    exp = plan.experiment
    if exp == "spectrum":
        doc["original"] = analyze(series, plan.dfa).block()
    elif exp == "shuffle_compare":
        doc["original"] = analyze(series, plan.dfa).block()
        doc["shuffled"] = run_ensemble(series, SurrogateSpec("shuffle"), plan).block()
    elif exp == "truncation_sweep":
        rows = truncation_sweep(series, plan)
        doc["table"] = [{"M": M, "dalpha_trun": t.width_mean, "dalpha_trun_std": t.width_std,
                         "dalpha_shtr": s.width_mean, "dalpha_shtr_std": s.width_std}
                        for M, t, s in rows]
    elif exp == "distribution_sweep":
        family = family or "double_weibull"
        key = {"double_weibull": "beta", "student_t": "gamma"}.get(family, "param")
        rows = distribution_sweep(series, plan, family)
        doc["family"] = family
        doc["table"] = [{key: r.param, "dalpha": r.width_mean, "dalpha_std": r.width_std} for r in rows]
        doc["spectra"] = [dict(r.ensemble.block(), **{key: r.param}) for r in rows]
    elif exp == "iaaft_compare":
        cmp_ = iaaft_compare(series, plan)
        doc["original"] = cmp_.original.block()
        doc["iaaft"] = cmp_.iaaft.block()
        doc["shuffled"] = cmp_.shuffled.block()
        doc["shift"] = asdict(cmp_.shift)
    else:
        rep = nonlinearity_report(series, plan.dfa, plan.ensemble_size, plan.seed, plan.iaaft_iterations)
        doc["report"] = asdict(rep)
    return doc


# -- output -------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(_fmt(x)) if np.isfinite(x) else None
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(float(v)) for v in row])
    return buf.getvalue()


def _spectrum_columns(prefix: str, block: dict) -> dict[str, Sequence[float]]:
    sfx = f"_{prefix}" if prefix else ""
    return {f"alpha{sfx}": block["alpha"], f"f{sfx}": block["f"],
            f"alpha{sfx}_std": block["alpha_std"], f"f{sfx}_std": block["f_std"]}


def csv_tables(doc: dict) -> dict[str, str]:
    """Plot-data CSV projections of an experiment document, keyed by file name."""
    exp = doc["experiment"]
    if exp == "spectrum":
        b = doc["original"]
        return {"spectrum.csv": _csv_text(["q", "alpha", "f", "alpha_std", "f_std"],
                                          zip(b["q"], b["alpha"], b["f"], b["alpha_std"], b["f_std"]))}
    if exp in ("shuffle_compare", "iaaft_compare"):
        names = [("orig", "original"), ("surr", "iaaft"), ("shuf", "shuffled")]
        cols = {"q": doc["original"]["q"]}
        for short, key in names:
            if key in doc:
                cols.update(_spectrum_columns(short, doc[key]))
        return {f"{exp}.csv": _csv_text(list(cols), zip(*cols.values()))}
    if exp == "truncation_sweep":
        header = ["M", "dalpha_trun", "dalpha_trun_std", "dalpha_shtr", "dalpha_shtr_std"]
        return {"truncation.csv": _csv_text(header, [[r[h] for h in header] for r in doc["table"]])}
    if exp == "distribution_sweep":
        key = next(k for k in doc["table"][0] if k not in ("dalpha", "dalpha_std"))
        header = [key, "dalpha", "dalpha_std"]
        stem = {"double_weibull": "weibull", "student_t": "student"}.get(doc["family"], doc["family"])
        return {f"{stem}.csv": _csv_text(header, [[r[h] for h in header] for r in doc["table"]])}
    rep = doc["report"]
    rows = [
        ("raw", rep["hurst_raw"], 0.0),
        ("magnitude", rep["hurst_magnitude"], 0.0),
        ("sign", rep["hurst_sign"], 0.0),
        ("shuffle_magnitude", rep["shuffle_magnitude_mean"], rep["shuffle_magnitude_std"]),
        ("iaaft_magnitude", rep["iaaft_magnitude_mean"], rep["iaaft_magnitude_std"]),
    ]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "hurst", "hurst_std"])
    for name, h, sd in rows:
        w.writerow([name, _fmt(h), _fmt(sd)])
    return {"decomposition.csv": buf.getvalue()}


def output_stem(doc: dict) -> str:
    if doc["experiment"] == "distribution_sweep":
        return {"double_weibull": "weibull", "student_t": "student"}.get(doc["family"], doc["family"])
    return {"truncation_sweep": "truncation"}.get(doc["experiment"], doc["experiment"])


def emit(doc: dict, output_dir: str | Path) -> list[Path]:
    """Write ``<stem>.json`` and its CSV companions; nothing is left behind on failure."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {f"{output_stem(doc)}.json": dumps(doc), **csv_tables(doc)}
    tmp_paths: list[Path] = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out)
            tmp_paths.append(Path(tmp))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        final = []
        for tmp, name in zip(tmp_paths, files):
            os.replace(tmp, out / name)
            final.append(out / name)
        return final
    except BaseException:
        for tmp in tmp_paths:
            tmp.unlink(missing_ok=True)
        raise

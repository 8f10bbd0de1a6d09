"""Command-line driver: ``mfdecomp <experiment> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from .dfa import DfaConfig, default_q_grid, log_scale_grid
from .generators import FAMILIES, DistributionSpec, binomial_cascade, fgn, sample
from .harness import ExperimentPlan, emit, run_experiment
from .series import ReturnSeries, ingest_csv, log_returns

log = logging.getLogger("mfdecomp")

# subcommand -> (experiment, distribution family)
COMMANDS = {
    "spectrum": ("spectrum", None),
    "shuffle-compare": ("shuffle_compare", None),
    "truncation-sweep": ("truncation_sweep", None),
    "weibull-sweep": ("distribution_sweep", "double_weibull"),
    "student-sweep": ("distribution_sweep", "student_t"),
    "iaaft-compare": ("iaaft_compare", None),
    "decompose": ("decomposition", None),
}

CI_ENSEMBLE = 10


def parse_grid(text: str) -> tuple[float, ...]:
    """``"1,2,5"`` or ``"start:stop:step"`` (inclusive)."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        n = int(round((stop - start) / step))
        return tuple(float(v) for v in np.round(start + step * np.arange(n + 1), 10))
    return tuple(float(v) for v in text.split(",") if v.strip())


def generate_series(text: str, seed: int) -> ReturnSeries:
    """Build a synthetic return series from ``family:k=v,...:n``.

    Families: the sampler families, plus ``fgn`` (param ``H``) and ``cascade``
    (param ``p``; ``n`` must be a power of two).
    """
    try:
        family, params, n = text.split(":")
        n = int(n)
    except ValueError:
        raise ValueError(f"bad --generate value {text!r}; expected family:params:n") from None
    kv = {}
    for item in filter(None, params.split(",")):
        k, _, v = item.partition("=")
        kv[k.strip()] = float(v)
    gen_seed = [seed, 0]
    if family == "fgn":
        return ReturnSeries(fgn(kv.get("H", 0.5), n, gen_seed))
    if family == "cascade":
        levels = int(round(math.log2(n)))
        if 2**levels != n:
            raise ValueError("cascade length must be a power of two")
        return ReturnSeries(binomial_cascade(kv.get("p", 0.3), levels).values)
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    return ReturnSeries(sample(DistributionSpec(family, **kv), n, gen_seed))


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="CSV", help="price file; log returns are analysed")
    src.add_argument("--generate", metavar="FAMILY:PARAMS:N", help="synthetic return series")
    p.add_argument("--column", default="-1", help="price column name or zero-based index (default: last)")
    p.add_argument("--q-min", type=float, default=-5.0)
    p.add_argument("--q-max", type=float, default=5.0)
    p.add_argument("--q-step", type=float, default=0.25)
    p.add_argument("--s-min", type=int, default=30)
    p.add_argument("--s-max", type=int, default=3000)
    p.add_argument("--s-count", type=int, default=30)
    p.add_argument("--boxes", type=int, default=2000)
    p.add_argument("--poly-order", type=int, default=2)
    p.add_argument("--ensemble", type=int, default=None, help="realizations per ensemble (default 100)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iaaft-iters", type=int, default=20)
    p.add_argument("--ci", action="store_true", help=f"reduced profile: ensembles of {CI_ENSEMBLE}")
    p.add_argument("--out", default="results", metavar="DIR")
    p.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfdecomp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "truncation-sweep":
            sp.add_argument("--m-grid", type=parse_grid, default=None, help="e.g. 1:13:1 or 1,2,4")
        if name == "weibull-sweep":
            sp.add_argument("--beta-grid", type=parse_grid, default=None)
        if name == "student-sweep":
            sp.add_argument("--gamma-grid", type=parse_grid, default=None)
    return parser


def plan_from_args(args) -> ExperimentPlan:
    experiment, _ = COMMANDS[args.command]
    dfa = DfaConfig(
        q_grid=default_q_grid(args.q_min, args.q_max, args.q_step),
        s_grid=log_scale_grid(args.s_min, args.s_max, args.s_count),
        n_boxes=args.boxes,
        poly_order=args.poly_order,
        seed=args.seed,
    )
    ensemble = args.ensemble or (CI_ENSEMBLE if args.ci else 100)
    kw = {}
    for flag in ("m_grid", "beta_grid", "gamma_grid"):
        if getattr(args, flag, None) is not None:
            kw[flag] = getattr(args, flag)
    source = {"csv": args.input, "column": args.column} if args.input else {"generate": args.generate}
    return ExperimentPlan(experiment=experiment, ensemble_size=ensemble, dfa=dfa,
                          iaaft_iterations=args.iaaft_iters, seed=args.seed, source=source, **kw)


def load_series(args) -> ReturnSeries:
    if args.input:
        column = int(args.column) if args.column.lstrip("-").isdigit() else args.column
        prices = ingest_csv(args.input, column)
        log.info("read %d prices from %s", len(prices), args.input)
        return log_returns(prices)
    return generate_series(args.generate, args.seed)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        plan = plan_from_args(args)
        series = load_series(args)
        doc = run_experiment(series, plan, COMMANDS[args.command][1])
        paths = emit(doc, args.out)
    except (ValueError, OSError, RuntimeError, KeyError) as exc:
        print(f"mfdecomp: error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({"experiment": plan.experiment, "files": [str(p) for p in paths]}))
    return 0


if __name__ == "__main__":
    sys.exit(main())

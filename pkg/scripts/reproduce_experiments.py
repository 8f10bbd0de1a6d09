"""Run every experiment on one input and collect the outputs in one directory.

    python3 scripts/reproduce_experiments.py --input djia.csv --out runs/djia
    python3 scripts/reproduce_experiments.py --out runs/synthetic --ci

Without ``--input`` the base series is a Student-t (gamma = 3) return series of
length 30000, except for the IAAFT comparison which uses fGn with H = 0.6.
"""

import argparse
import sys
import time

from mfdecomp.cli import main

EXPERIMENTS = ("spectrum", "shuffle-compare", "truncation-sweep", "weibull-sweep",
               "student-sweep", "iaaft-compare", "decompose")

SYNTHETIC = "student_t:gamma=3:30000"
SYNTHETIC_CORRELATED = "fgn:H=0.6:32768"


def run(args) -> int:
    for exp in EXPERIMENTS:
        if args.input:
            source = ["--input", args.input] + (["--column", args.column] if args.column else [])
        else:
            source = ["--generate", SYNTHETIC_CORRELATED if exp == "iaaft-compare" else SYNTHETIC]
        argv = [exp, *source, "--seed", str(args.seed), "--out", args.out, "-q"]
        if args.ci:
            argv.append("--ci")
        t0 = time.perf_counter()
        code = main(argv)
        print(f"{exp}: exit {code} in {time.perf_counter() - t0:.0f}s", file=sys.stderr)
        if code:
            return code
    return 0


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--input", help="price CSV (default: synthetic series)")
    p.add_argument("--column")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="runs")
    p.add_argument("--ci", action="store_true", help="ensembles of 10")
    sys.exit(run(p.parse_args()))

"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 NotUniform verdict (``test`` only),
1 runtime failure.

Numbers accept ``inf``, fractions such as ``1/3`` and decimals.  A decimal
written with five or more fractional digits that sits within one unit of its
last digit of a fraction with denominator <= 12 is read as that fraction, so
``0.333333`` means 1/3 and ``1.3333333`` means 4/3.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bounds import (
    curve_points,
    learn_necessary_m,
    learn_sufficient_m,
    test_sufficient_m,
    testing_necessary_m,
)
from .core import (
    INF,
    DiscreteDistribution,
    SampleSource,
    heavy_coordinate_dist,
    lp_distance,
    make_uniform,
    random_paninski_member,
    read_distribution,
    read_histogram,
    sparse_uniform_member,
    write_distribution,
)
from .harness import (
    Adversary,
    ExperimentConfig,
    Problem,
    csv_text,
    estimate_failure_rate,
    verify_collision_moments,
)
from .learner import LearnParams, learn
from .testers import Outcome, TestParams, run_tester, test_uniformity, test_uniformity_majority

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_NOT_UNIFORM = 0, 1, 2, 3

SNAP_MIN_DIGITS = 5
SNAP_MAX_DENOMINATOR = 12


class UsageError(Exception):
    pass


def parse_number(text: str) -> float:
    """Read ``inf``, ``a/b`` or a decimal, snapping long repeating decimals to fractions."""
    s = text.strip().lower()
    if s in ("inf", "infinity", "+inf"):
        return INF
    try:
        if "/" in s:
            return float(Fraction(s))
        value = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    digits = len(s.split(".", 1)[1]) if "." in s and "e" not in s else 0
    if digits >= SNAP_MIN_DIGITS:
        near = value.limit_denominator(SNAP_MAX_DENOMINATOR)
        if near != value and abs(near - value) < Fraction(1, 10**digits):
            return float(near)
    return float(value)


def _distribution(spec: str, n: int, eps: float, p: float, seed: int) -> DiscreteDistribution:
    adv = Adversary.parse(spec)
    if adv.kind == "uniform":
        return make_uniform(n)
    if adv.kind == "heavy":
        return heavy_coordinate_dist(n, eps)
    if adv.kind == "paninski":
        return random_paninski_member(n, eps, p, seed)
    if adv.kind == "sparse":
        return sparse_uniform_member(n, eps, p, seed)
    dist = read_distribution(adv.path)
    if dist.n != n:
        raise ValueError(f"{adv.path} has {dist.n} coordinates, --n is {n}")
    return dist


# ---------------------------------------------------------------------------
# subcommands


def cmd_sample_size(args) -> int:
    if args.problem == "test":
        TestParams(args.p, args.n, args.eps, args.delta)
        fn = test_sufficient_m if args.kind == "sufficient" else testing_necessary_m
    else:
        LearnParams(args.p, args.n, args.eps, args.delta)
        fn = learn_sufficient_m if args.kind == "sufficient" else learn_necessary_m
    rep = fn(args.p, args.n, args.eps, args.delta)
    if args.problem == "test" and args.kind == "sufficient" and rep.formula_id.startswith("collision"):
        m = max(2, rep.m_ceil)
    else:
        m = rep.m_ceil
    print(m)
    if args.verbose:
        print(f"m_real={rep.m:.10g} regime={rep.regime.value} kind={rep.kind.value} formula={rep.formula_id}")
    return EXIT_OK


def cmd_test(args) -> int:
    params = TestParams(args.p, args.n, args.eps, args.delta)
    if args.hist:
        verdict = run_tester(params, read_histogram(args.hist))
    else:
        source = SampleSource(_distribution(args.dist, args.n, args.eps, args.p, args.seed), args.seed)
        if args.majority:
            verdict = test_uniformity_majority(params, source)
        else:
            verdict = test_uniformity(params, source, m=args.m)
    line = (f"{verdict.outcome.value} statistic={verdict.statistic:.10g} "
            f"threshold={verdict.threshold:.10g} m={verdict.m_used}")
    _write(line + "\n", args.out)
    return EXIT_OK if verdict.outcome is Outcome.UNIFORM else EXIT_NOT_UNIFORM


def cmd_learn(args) -> int:
    params = LearnParams(args.p, args.n, args.eps, args.delta)
    dist = _distribution(args.dist, args.n, args.eps, args.p, args.seed)
    est, m = learn(params, SampleSource(dist, args.seed))
    d = lp_distance(est, dist, args.p)
    print(f"m={m} distance={d:.10g} within_eps={'yes' if d <= args.eps else 'no'}", file=sys.stderr)
    _write(write_distribution(est), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cls = TestParams if args.problem == "test" else LearnParams
    config = ExperimentConfig(
        Problem(args.problem), cls(args.p, args.n, args.eps, args.delta),
        Adversary.parse(args.adversary), args.trials, args.seed, args.m,
    )
    report = estimate_failure_rate(config, workers=args.workers)
    _write(csv_text(report), args.out)
    return EXIT_OK


def cmd_curves(args) -> int:
    if args.n_min < 2 or args.n_max < args.n_min:
        raise UsageError("need 2 <= --n-min <= --n-max")
    if args.num:
        grid = np.unique(np.round(np.geomspace(args.n_min, args.n_max, args.num)).astype(np.int64))
        n_values = [int(v) for v in grid]
    else:
        n_values = range(args.n_min, args.n_max + 1)
    TestParams(args.p, args.n_min, args.eps, args.delta)
    _write(csv_text(curve_points(args.p, args.eps, n_values, args.delta)), args.out)
    return EXIT_OK


def cmd_verify_moments(args) -> int:
    dist = _distribution(args.dist, args.n, args.eps, args.p, args.seed)
    rep = verify_collision_moments(dist, args.m, args.trials, args.seed)
    text = (
        "n,m,trials,empirical_mean,predicted_mean,empirical_variance,predicted_variance,mean_z,variance_rel_error\n"
        f"{rep.n},{rep.m},{rep.trials},{rep.empirical_mean:.10g},{rep.predicted_mean:.10g},"
        f"{rep.empirical_variance:.10g},{rep.predicted_variance:.10g},{rep.mean_z:.10g},{rep.variance_rel_error:.10g}\n"
    )
    _write(text, args.out)
    return EXIT_OK


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# parser


def _shared(sp, p_default=None, need_n=True):
    sp.add_argument("--p", type=parse_number, required=p_default is None, default=p_default,
                    help="exponent p >= 1, decimal, fraction or inf")
    if need_n:
        sp.add_argument("--n", type=int, required=True, help="support size")
    sp.add_argument("--eps", type=parse_number, required=True)
    sp.add_argument("--delta", type=parse_number, required=True,
                    help="failure probability; 0.333333 and 1/3 both mean one third")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpdist", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample-size", help="print a sufficient or necessary sample size")
    _shared(sp)
    sp.add_argument("--problem", choices=["test", "learn"], required=True)
    sp.add_argument("--kind", choices=["sufficient", "necessary"], default="sufficient")
    sp.add_argument("--verbose", action="store_true", help="also print pre-ceiling m and formula id")
    sp.set_defaults(func=cmd_sample_size)

    sp = sub.add_parser("test", help="run the uniformity tester once")
    _shared(sp)
    sp.add_argument("--dist", default="uniform", help="uniform|paninski|heavy|sparse|file:<path>")
    sp.add_argument("--hist", default=None, help="histogram file to test instead of sampling")
    sp.add_argument("--m", type=int, default=None, help="override the sample budget")
    sp.add_argument("--majority", action="store_true", help="amplify with the majority vote")
    sp.set_defaults(func=cmd_test)

    sp = sub.add_parser("learn", help="learn a distribution; writes the estimate")
    _shared(sp)
    sp.add_argument("--dist", default="uniform", help="uniform|paninski|heavy|sparse|file:<path>")
    sp.set_defaults(func=cmd_learn)

    sp = sub.add_parser("experiment", help="Monte-Carlo failure rate as CSV")
    _shared(sp)
    sp.add_argument("--problem", choices=["test", "learn"], default="test")
    sp.add_argument("--adversary", default="uniform", help="uniform|paninski|heavy|sparse|file:<path>")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("curves", help="testing sample-size curves m(n) as CSV")
    _shared(sp, need_n=False)
    sp.add_argument("--n-min", type=int, required=True)
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--num", type=int, default=None, help="log-spaced points instead of every integer")
    sp.set_defaults(func=cmd_curves)

    sp = sub.add_parser("verify-moments", help="Monte-Carlo collision moments against closed forms")
    _shared(sp, p_default=2.0)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--trials", type=int, default=200_000)
    sp.add_argument("--dist", default="uniform", help="uniform|paninski|heavy|sparse|file:<path>")
    sp.set_defaults(func=cmd_verify_moments)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"lpdist {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"lpdist {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()

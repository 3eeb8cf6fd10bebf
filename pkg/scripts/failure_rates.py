"""Empirical failure rates of the testers and learner on their standard adversaries.

Each row is one experiment; every one should sit at or below delta within
its 3-sigma half-width.  Output: failure_rates.csv in --outdir.
"""
import argparse
from pathlib import Path

from lpdist.core import INF, mix64
from lpdist.harness import ExperimentConfig, Problem, emit_csv, estimate_failure_rate
from lpdist.learner import LearnParams
from lpdist.testers import TestParams

THIRD = 1 / 3


def configs(trials, seed):
    runs = [
        (Problem.TEST, TestParams(2, 100, 0.2, THIRD), "uniform"),
        (Problem.TEST, TestParams(2, 100, 0.2, THIRD), "sparse"),
        (Problem.TEST, TestParams(2, 20, 0.2, THIRD), "paninski"),
        (Problem.TEST, TestParams(1.5, 1000, 0.1, THIRD), "uniform"),
        (Problem.TEST, TestParams(1.5, 1000, 0.1, THIRD), "paninski"),
        (Problem.TEST, TestParams(3, 500, 0.2, THIRD), "heavy"),
        (Problem.TEST, TestParams(INF, 50, 0.05, THIRD), "uniform"),
        (Problem.TEST, TestParams(INF, 50, 0.05, THIRD), "heavy"),
        (Problem.TEST, TestParams(INF, 10**5, 0.05, THIRD), "uniform"),
        (Problem.TEST, TestParams(INF, 10**5, 0.05, THIRD), "heavy"),
        (Problem.LEARN, LearnParams(2, 1000, 0.1, THIRD), "uniform"),
        (Problem.LEARN, LearnParams(1.5, 10**4, 0.2, 0.5), "uniform"),
        (Problem.LEARN, LearnParams(1, 100, 0.2, 0.1), "heavy"),
    ]
    for i, (problem, params, adv) in enumerate(runs):
        yield ExperimentConfig(problem, params, adv, trials, mix64(seed, i))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    reports = []
    for cfg in configs(args.trials, args.seed):
        rep = estimate_failure_rate(cfg, workers=args.workers)
        reports.append(rep)
        ok = rep.failure_rate <= cfg.params.delta + rep.ci_halfwidth
        print(f"{cfg.problem.value:5s} p={cfg.params.p:<6.4g} n={cfg.params.n:<7d} {str(cfg.adversary):9s} "
              f"m={rep.m:<7d} rate={rep.failure_rate:.4f} +- {rep.ci_halfwidth:.4f} "
              f"{'ok' if ok else 'ABOVE DELTA'} ({rep.wall_time:.2f}s)")
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(reports, out / "failure_rates.csv")
    print(f"wrote {out / 'failure_rates.csv'}")


if __name__ == "__main__":
    main()

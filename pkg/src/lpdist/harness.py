"""Monte-Carlo failure-rate experiments, collision-moment checks and CSV output."""
from __future__ import annotations

import csv
import enum
import io
import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .bounds import CurvePoint
from .core import (
    AliasTable,
    DiscreteDistribution,
    SampleSource,
    heavy_coordinate_dist,
    is_inf,
    lp_distance,
    make_rng,
    make_uniform,
    mix64,
    paninski_alpha,
    random_paninski_member,
    read_distribution,
    sparse_support_size,
    sparse_uniform_member,
)
from .learner import LearnParams, empirical_distribution, learn_sample_size
from .testers import (
    TestParams,
    Verdict,
    collision_count,
    linf_plan,
    planned_m,
    run_tester,
    test_uniformity_linf,
)

SEED_NOTE = "trial i draws with seed mix64(master_seed, i) (SplitMix64 finaliser)"

EXPERIMENT_HEADER = [
    "problem", "p", "n", "eps", "delta", "m", "trials", "seed", "adversary", "failure_rate", "ci_halfwidth",
]
CURVE_HEADER = ["p", "n", "eps", "delta", "m_sufficient", "m_necessary", "regime"]

FAR_DISTANCE_RTOL = 1e-9


class Problem(str, enum.Enum):
    TEST = "test"
    LEARN = "learn"
    MOMENTS = "moments"  # collision moments; run through verify_collision_moments


@dataclass(frozen=True)
class Adversary:
    """Where the samples come from: uniform, paninski, heavy, sparse or file:<path>."""

    kind: str
    path: str | None = None

    @classmethod
    def parse(cls, text: str) -> "Adversary":
        if text.startswith("file:"):
            return cls("file", text[5:])
        if text not in ("uniform", "paninski", "heavy", "sparse"):
            raise ValueError(f"unknown adversary {text!r}")
        return cls(text)

    def __str__(self) -> str:
        return f"file:{self.path}" if self.kind == "file" else self.kind

    @property
    def randomized(self) -> bool:
        return self.kind in ("paninski", "sparse")


@dataclass(frozen=True)
class ExperimentConfig:
    problem: Problem
    params: TestParams | LearnParams
    adversary: Adversary
    trials: int
    master_seed: int
    m_override: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "problem", Problem(self.problem))
        if isinstance(self.adversary, str):
            object.__setattr__(self, "adversary", Adversary.parse(self.adversary))
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.m_override is not None and self.m_override < 1:
            raise ValueError(f"m override must be >= 1, got {self.m_override}")


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    m: int
    failures: int
    failure_rate: float
    ci_halfwidth: float
    seed_note: str = SEED_NOTE
    wall_time: float = field(default=0.0, compare=False)

    @property
    def trials(self) -> int:
        return self.config.trials


def ci_halfwidth(rate: float, trials: int) -> float:
    """Three binomial standard errors."""
    return 3.0 * math.sqrt(rate * (1.0 - rate) / trials)


# ---------------------------------------------------------------------------
# adversaries


class IncompatibleAdversary(ValueError):
    pass


def _check_adversary(config: ExperimentConfig) -> DiscreteDistribution | None:
    """Validate the adversary against problem and regime.

    Returns the fixed distribution for deterministic adversaries, None for
    randomized families (drawn per trial).
    """
    prm = config.params
    kind = config.adversary.kind
    if config.problem is Problem.TEST and not isinstance(prm, TestParams):
        raise IncompatibleAdversary("problem 'test' needs TestParams")
    if config.problem is Problem.LEARN and not isinstance(prm, LearnParams):
        raise IncompatibleAdversary("problem 'learn' needs LearnParams")
    if kind == "uniform":
        return make_uniform(prm.n)
    if kind == "heavy":
        if 1.0 / prm.n + prm.eps > 1:
            raise IncompatibleAdversary(f"heavy: needs 1/n + eps <= 1, got n={prm.n}, eps={prm.eps}")
        return heavy_coordinate_dist(prm.n, prm.eps)
    if kind == "paninski":
        if not 1 <= prm.p <= 2:
            raise IncompatibleAdversary(f"paninski: needs 1 <= p <= 2, got p={prm.p}")
        a = paninski_alpha(prm.n, prm.eps, prm.p)
        if a > 1 + 1e-12:
            raise IncompatibleAdversary(
                f"paninski: needs eps * n^(1/q) <= 1, got {a:.6g} (n={prm.n}, eps={prm.eps}, p={prm.p})"
            )
        if config.problem is Problem.TEST and prm.n % 2:
            raise IncompatibleAdversary("paninski: odd n leaves the member closer than eps to uniform")
        return None
    if kind == "sparse":
        if not 1 < prm.p <= 2:
            raise IncompatibleAdversary(f"sparse: needs 1 < p <= 2, got p={prm.p}")
        n_hat = sparse_support_size(prm.eps, prm.p)
        if 2 * n_hat > prm.n:
            raise IncompatibleAdversary(f"sparse: n_hat = {n_hat} exceeds n/2; needs n >= 1/eps^q")
        return None
    if kind == "file":
        dist = read_distribution(config.adversary.path)
        if dist.n != prm.n:
            raise IncompatibleAdversary(f"file: distribution has {dist.n} coordinates, n = {prm.n}")
        if config.problem is Problem.TEST:
            d = lp_distance(dist, make_uniform(prm.n), prm.p)
            if 1e-12 < d < prm.eps * (1 - FAR_DISTANCE_RTOL):
                raise IncompatibleAdversary(
                    f"file: lp distance to uniform {d:.6g} is neither 0 nor >= eps; no correct verdict"
                )
        return dist
    raise IncompatibleAdversary(f"unknown adversary kind {kind!r}")


def _trial_distribution(config: ExperimentConfig, seed: int) -> DiscreteDistribution:
    prm = config.params
    member_seed = mix64(seed, 0xADD)
    if config.adversary.kind == "paninski":
        return random_paninski_member(prm.n, prm.eps, prm.p, member_seed)
    return sparse_uniform_member(prm.n, prm.eps, prm.p, member_seed)


def _expected_uniform(config: ExperimentConfig, dist: DiscreteDistribution) -> bool:
    return lp_distance(dist, make_uniform(dist.n), config.params.p) <= 1e-12


def _default_tester(params: TestParams, source: SampleSource, m: int) -> Verdict:
    return run_tester(params, source.draw(m))


# ---------------------------------------------------------------------------
# experiments


def experiment_m(config: ExperimentConfig) -> int:
    if config.m_override is not None:
        return int(config.m_override)
    if config.problem is Problem.TEST:
        return planned_m(config.params)
    if config.problem is Problem.LEARN:
        return learn_sample_size(config.params)[0]
    raise ValueError("moment checks take m explicitly")


def estimate_failure_rate(
    config: ExperimentConfig,
    tester: Callable[[TestParams, SampleSource, int], Verdict] | None = None,
    workers: int = 1,
) -> ExperimentReport:
    """Run ``config.trials`` seeded instances and count wrong answers.

    Testing fails on a wrong verdict; learning fails when ||A_hat - A||_p > eps.
    ``tester(params, source, m)`` replaces the default tester (for stubs).
    Results do not depend on ``workers``.
    """
    if config.problem is Problem.MOMENTS:
        raise IncompatibleAdversary("collision moments are checked with verify_collision_moments")
    fixed = _check_adversary(config)
    m = experiment_m(config)
    if config.problem is Problem.TEST and m < 2 and not is_inf(config.params.p):
        raise ValueError("the collision tester needs m >= 2")
    tester = tester or _default_tester
    table = AliasTable(fixed) if fixed is not None else None
    truth_uniform = _expected_uniform(config, fixed) if fixed is not None else False
    prm = config.params
    if config.problem is Problem.TEST and is_inf(prm.p) and tester is _default_tester:
        plan = linf_plan(prm.n, prm.eps, prm.delta, m=m)

        def tester(params, source, m_, _plan=plan):
            return test_uniformity_linf(params, source.draw(m_), _plan)

    def one(i: int) -> int:
        seed = mix64(config.master_seed, i)
        tab = table if table is not None else AliasTable(_trial_distribution(config, seed))
        source = SampleSource(tab, seed)
        if config.problem is Problem.TEST:
            verdict = tester(prm, source, m)
            return int(verdict.uniform != truth_uniform)
        est = empirical_distribution(source.draw(m))
        return int(lp_distance(est, tab.dist, prm.p) > prm.eps)

    start = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            failures = sum(pool.map(one, range(config.trials)))
    else:
        failures = sum(one(i) for i in range(config.trials))
    rate = failures / config.trials
    return ExperimentReport(
        config, m, failures, rate, ci_halfwidth(rate, config.trials),
        wall_time=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# collision moments


@dataclass(frozen=True)
class MomentReport:
    n: int
    m: int
    trials: int
    empirical_mean: float
    predicted_mean: float
    empirical_variance: float
    predicted_variance: float

    @property
    def mean_standard_error(self) -> float:
        return math.sqrt(self.predicted_variance / self.trials)

    @property
    def mean_z(self) -> float:
        se = self.mean_standard_error
        return 0.0 if se == 0 else (self.empirical_mean - self.predicted_mean) / se

    @property
    def variance_rel_error(self) -> float:
        if self.predicted_variance == 0:
            return abs(self.empirical_variance)
        return abs(self.empirical_variance / self.predicted_variance - 1.0)


def collision_moments(dist: DiscreteDistribution, m: int) -> tuple[float, float]:
    """Closed-form mean and variance of the collision count for m draws."""
    a = dist.probs
    s2 = float(np.sum(a**2))
    s3 = float(np.sum(a**3))
    pairs = math.comb(m, 2)
    triples = math.comb(m, 3)
    return pairs * s2, pairs * (s2 - s2**2) + 6 * triples * (s3 - s2**2)


def exact_collision_moments(dist: DiscreteDistribution, m: int) -> tuple[float, float]:
    """Mean and variance of the collision count by enumerating all n^m sample sequences."""
    n = dist.n
    if n**m > 2_000_000:
        raise ValueError(f"n^m = {n**m} sequences is too many to enumerate")
    mean = second = 0.0
    for seq in itertools.product(range(n), repeat=m):
        prob = math.prod(dist.probs[i] for i in seq)
        c = sum(1 for j, k in itertools.combinations(range(m), 2) if seq[j] == seq[k])
        mean += prob * c
        second += prob * c * c
    return mean, second - mean * mean


def _collision_counts_batch(table: AliasTable, m: int, trials: int, rng) -> np.ndarray:
    n = table.n
    draws = table.draw((trials, m), rng)
    flat = draws + (np.arange(trials) * n)[:, None]
    counts = np.bincount(flat.ravel(), minlength=trials * n).reshape(trials, n)
    return np.sum(counts * (counts - 1) // 2, axis=1)


def verify_collision_moments(dist: DiscreteDistribution, m: int, trials: int, seed: int) -> MomentReport:
    if m < 2:
        raise ValueError(f"collisions need m >= 2, got {m}")
    table = AliasTable(dist)
    rng = make_rng(seed)
    chunk = max(1, 2_000_000 // max(dist.n, m))
    parts = []
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        parts.append(_collision_counts_batch(table, m, k, rng))
        done += k
    c = np.concatenate(parts).astype(float)
    mean, var = collision_moments(dist, m)
    return MomentReport(dist.n, m, trials, float(c.mean()), mean, float(c.var(ddof=1)), var)


# ---------------------------------------------------------------------------
# CSV


def _fmt(x) -> str:
    if isinstance(x, float):
        if is_inf(x):
            return "inf"
        return f"{x:.10g}"
    return str(x)


def experiment_row(report: ExperimentReport) -> list[str]:
    c = report.config
    prm = c.params
    return [
        c.problem.value, _fmt(prm.p), str(prm.n), _fmt(prm.eps), _fmt(prm.delta), str(report.m),
        str(c.trials), str(c.master_seed), str(c.adversary),
        _fmt(report.failure_rate), _fmt(report.ci_halfwidth),
    ]


def curve_row(pt: CurvePoint) -> list[str]:
    return [_fmt(float(pt.p)), str(pt.n), _fmt(float(pt.eps)), _fmt(float(pt.delta)),
            _fmt(float(pt.m_sufficient)), _fmt(float(pt.m_necessary)), pt.regime]


def csv_text(rows: ExperimentReport | Sequence[ExperimentReport] | Sequence[CurvePoint],
             header: list[str] | None = None) -> str:
    if isinstance(rows, ExperimentReport):
        rows = [rows]
    rows = list(rows)
    if header is None:
        header = CURVE_HEADER if rows and isinstance(rows[0], CurvePoint) else EXPERIMENT_HEADER
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(experiment_row(r) if isinstance(r, ExperimentReport) else curve_row(r))
    return buf.getvalue()


def emit_csv(rows, path: str | Path, header: list[str] | None = None) -> None:
    """Write experiment reports or curve points to ``path``.

    An empty list needs ``header`` to pick the format; it defaults to the
    curve header.
    """
    if header is None and not isinstance(rows, ExperimentReport) and not list(rows):
        header = CURVE_HEADER
    Path(path).write_text(csv_text(rows, header), encoding="utf-8")

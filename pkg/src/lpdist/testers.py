"""Uniformity testers: collision counting, majority vote, and the linf bucketing tester."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    INF,
    SampleHistogram,
    SampleSource,
    apparent_support,
    at_most,
    ceil_count,
    check_exponent,
    conjugate,
    inv,
    is_inf,
)

# failure probability of each repetition inside the majority vote
INNER_DELTA = 0.2


class Outcome(str, enum.Enum):
    UNIFORM = "uniform"
    NOT_UNIFORM = "not uniform"


class Regime(str, enum.Enum):
    SMALL_N = "SmallN"
    LARGE_N = "LargeN"
    ALL_N = "AllN"


@dataclass(frozen=True)
class TestParams:
    p: float
    n: int
    eps: float
    delta: float

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        object.__setattr__(self, "p", check_exponent(self.p))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must be in (0, 1), got {self.eps}")
        if not 0 < self.delta < 0.5:
            raise ValueError(f"testing needs 0 < delta < 0.5, got {self.delta}")

    @property
    def q(self) -> float:
        return conjugate(self.p)


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    statistic: float
    threshold: float
    m_used: int

    @property
    def uniform(self) -> bool:
        return self.outcome is Outcome.UNIFORM


@dataclass(frozen=True)
class LinfTestPlan:
    regime: Regime
    n_hat: float
    group_boundaries: tuple  # (start, stop) half-open coordinate ranges
    t: float
    m: int

    @property
    def group_starts(self) -> np.ndarray:
        return np.array([start for start, _ in self.group_boundaries], dtype=np.int64)


# ---------------------------------------------------------------------------
# collision tester


def collision_count(hist: SampleHistogram) -> int:
    """Number of sample pairs landing on the same coordinate, sum_i C(X_i, 2)."""
    c = hist.counts.astype(object) if hist.m > 3_000_000_000 else hist.counts
    return int(np.sum(c * (c - 1) // 2))


def collision_threshold(m: int, n: int, delta: float) -> float:
    if m < 2:
        raise ValueError(f"collision threshold needs m >= 2, got {m}")
    pairs_over_n = math.comb(int(m), 2) / n
    return pairs_over_n + math.sqrt(pairs_over_n / delta)


def collision_test_m_real(p: float, n: int, eps: float, delta: float) -> tuple[float, Regime]:
    """Pre-ceiling collision-tester budget and the regime it came from."""
    p = check_exponent(p)
    if p > 2:
        raise ValueError(f"collision budget is stated for p <= 2, got {p}; use p = 2 for p > 2")
    q = conjugate(p)
    scale = 9.0 / delta
    if at_most(n, apparent_support(eps, q)):
        # sqrt(n) / (eps n^(1/q))^2 as one power of n, so p = 4/3 gives exactly n^0
        return scale * n ** (0.5 - 2 * inv(q)) / eps / eps, Regime.SMALL_N
    return scale * 0.5 * math.sqrt((2.0 / eps) ** q), Regime.LARGE_N


def collision_test_m(p: float, n: int, eps: float, delta: float) -> int:
    m, _ = collision_test_m_real(p, n, eps, delta)
    return max(2, ceil_count(m))


def test_uniformity_collisions(params: TestParams, hist: SampleHistogram) -> Verdict:
    if hist.n != params.n:
        raise ValueError(f"histogram has {hist.n} coordinates, expected n = {params.n}")
    c = collision_count(hist)
    t = collision_threshold(hist.m, params.n, params.delta)
    outcome = Outcome.UNIFORM if c <= t else Outcome.NOT_UNIFORM
    return Verdict(outcome, float(c), t, hist.m)


test_uniformity_collisions.__test__ = False


def collision_budget(params: TestParams, delta: float | None = None) -> int:
    """Collision-tester budget; p > 2 reuses the p = 2 budget."""
    delta = params.delta if delta is None else delta
    p = min(params.p, 2.0)
    return collision_test_m(p, params.n, params.eps, delta)


# ---------------------------------------------------------------------------
# majority vote


def majority_vote_plan(delta: float) -> int:
    """Repetitions k = ceil(160 ln(1/delta) / 9), each at failure probability 0.2."""
    if not 0 < delta < 0.5:
        raise ValueError(f"testing needs 0 < delta < 0.5, got {delta}")
    return max(1, ceil_count(160.0 * math.log(1.0 / delta) / 9.0))


def majority_outcome(votes_not_uniform: int, k: int) -> Outcome:
    # ties go to NotUniform
    return Outcome.NOT_UNIFORM if 2 * votes_not_uniform >= k else Outcome.UNIFORM


def test_uniformity_majority(params: TestParams, source: SampleSource) -> Verdict:
    """Majority of k independent collision tests run at failure probability 0.2.

    Repetition j draws from stream j of ``source``.  The verdict's statistic is
    the number of NotUniform votes and its threshold is k/2.
    """
    if is_inf(params.p):
        raise ValueError("majority vote wraps the collision tester; p must be finite")
    k = majority_vote_plan(params.delta)
    inner = TestParams(params.p, params.n, params.eps, INNER_DELTA)
    m = collision_budget(inner)
    against = 0
    for j in range(k):
        if not test_uniformity_collisions(inner, source.draw(m, stream=j)).uniform:
            against += 1
    return Verdict(majority_outcome(against, k), float(against), k / 2, k * m)


test_uniformity_majority.__test__ = False


# ---------------------------------------------------------------------------
# linf tester


def alpha(x: float, delta: float) -> float:
    """(1/x) * (1 + ln(2x) / ln(1/delta)), strictly decreasing for x >= 2."""
    return (1.0 + math.log(2.0 * x) / math.log(1.0 / delta)) / x


def solve_nhat(eps: float, delta: float, rtol: float = 1e-12) -> float:
    """Bucket parameter n_hat >= 2 with eps = 2 alpha(n_hat), by bisection."""
    if eps >= 2 * alpha(2.0, delta):
        raise ValueError(
            f"eps = {eps} >= 2 alpha(2) = {2 * alpha(2.0, delta):.6g}: no bucket count >= 2 fits"
        )
    lo, hi = 2.0, 4.0
    while 2 * alpha(hi, delta) > eps:
        lo, hi = hi, hi * 2
    # bisect in log space; alpha spans many decades for tiny eps
    for _ in range(400):
        mid = math.sqrt(lo * hi)
        if 2 * alpha(mid, delta) > eps:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    x = lo if abs(2 * alpha(lo, delta) - eps) <= abs(2 * alpha(hi, delta) - eps) else hi
    if abs(2 * alpha(x, delta) - eps) > rtol * eps:
        raise ArithmeticError(f"bisection for n_hat did not reach rtol {rtol}")
    return x


def linf_groups(n: int, n_hat: float) -> tuple:
    size = max(1, int(math.floor(n / n_hat)))
    return tuple((s, min(s + size, n)) for s in range(0, n, size))


def linf_plan(n: int, eps: float, delta: float, m: int | None = None) -> LinfTestPlan:
    """Regime, groups and threshold; ``m`` overrides the sample budget."""
    if eps <= 2 * alpha(n, delta):
        m_plan = ceil_count(23.0 * math.log(2 * n / delta) / (n * eps**2))
        m = m_plan if m is None else int(m)
        t = math.sqrt(3.0 * (m / n) * math.log(2 * n / delta))
        groups = tuple((i, i + 1) for i in range(n))
        return LinfTestPlan(Regime.SMALL_N, float(n), groups, t, m)
    m_plan = ceil_count(35.0 * math.log(1.0 / delta) / eps)
    m = m_plan if m is None else int(m)
    n_hat = solve_nhat(eps, delta)
    t = math.sqrt(3.0 * m * eps * math.log(1.0 / delta))
    return LinfTestPlan(Regime.LARGE_N, n_hat, linf_groups(n, n_hat), t, m)


def linf_test_m(n: int, eps: float, delta: float) -> tuple[int, LinfTestPlan]:
    plan = linf_plan(n, eps, delta)
    return plan.m, plan


def test_uniformity_linf(
    params: TestParams, hist: SampleHistogram, plan: LinfTestPlan | None = None
) -> Verdict:
    """Bucketing linf tester.

    SmallN: uniform iff every count lies in m/n +- t (statistic = largest
    deviation, threshold = t).  LargeN: not uniform iff some group total
    reaches m*eps - t (statistic = largest group total).
    """
    if not is_inf(params.p):
        raise ValueError(f"the linf tester needs p = inf, got {params.p}")
    if hist.n != params.n:
        raise ValueError(f"histogram has {hist.n} coordinates, expected n = {params.n}")
    if plan is None or plan.m != hist.m:
        plan = linf_plan(params.n, params.eps, params.delta, m=hist.m)
    m, n = hist.m, params.n
    if plan.regime is Regime.SMALL_N:
        dev = float(np.max(np.abs(hist.counts - m / n)))
        outcome = Outcome.UNIFORM if dev <= plan.t else Outcome.NOT_UNIFORM
        return Verdict(outcome, dev, plan.t, m)
    totals = np.add.reduceat(hist.counts, plan.group_starts)
    top = float(totals.max())
    cut = m * params.eps - plan.t
    outcome = Outcome.NOT_UNIFORM if top >= cut else Outcome.UNIFORM
    return Verdict(outcome, top, cut, m)


test_uniformity_linf.__test__ = False


# ---------------------------------------------------------------------------
# front end


def planned_m(params: TestParams) -> int:
    if is_inf(params.p):
        return linf_plan(params.n, params.eps, params.delta).m
    return collision_budget(params)


def run_tester(params: TestParams, hist: SampleHistogram) -> Verdict:
    """Apply the tester that ``test_uniformity`` would use to a given histogram."""
    if is_inf(params.p):
        return test_uniformity_linf(params, hist)
    return test_uniformity_collisions(params, hist)


def test_uniformity(params: TestParams, source: SampleSource, m: int | None = None) -> Verdict:
    """Dispatch on p: collision tester (p <= 2 own budget, 2 < p < inf the p = 2
    budget) or the bucketing tester for p = inf.  ``m`` overrides the budget."""
    if source.n != params.n:
        raise ValueError(f"source has {source.n} coordinates, expected n = {params.n}")
    m = planned_m(params) if m is None else int(m)
    return run_tester(params, source.draw(m))


test_uniformity.__test__ = False

__all__ = [
    "INF",
    "INNER_DELTA",
    "LinfTestPlan",
    "Outcome",
    "Regime",
    "TestParams",
    "Verdict",
    "alpha",
    "collision_budget",
    "collision_count",
    "collision_test_m",
    "collision_test_m_real",
    "collision_threshold",
    "linf_groups",
    "linf_plan",
    "linf_test_m",
    "majority_outcome",
    "majority_vote_plan",
    "planned_m",
    "run_tester",
    "solve_nhat",
    "test_uniformity",
    "test_uniformity_collisions",
    "test_uniformity_linf",
    "test_uniformity_majority",
]

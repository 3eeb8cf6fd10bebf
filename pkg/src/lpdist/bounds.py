"""Sample-complexity calculators: sufficient and necessary sample sizes,
the packing/entropy/Fano chain behind the learning lower bound, and the
testing curves m(n) for fixed p and eps."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .core import (
    apparent_support,
    at_most,
    ceil_count,
    check_exponent,
    conjugate,
    inv,
    is_inf,
)
from .learner import LearnParams, learn_bounds
from .testers import Regime, alpha, collision_test_m_real

TWO_PI_E = 2 * math.pi * math.e


class Kind(str, enum.Enum):
    SUFFICIENT = "Sufficient"
    NECESSARY = "Necessary"


@dataclass(frozen=True)
class BoundReport:
    m: float  # pre-ceiling
    regime: Regime
    kind: Kind
    formula_id: str

    @property
    def m_ceil(self) -> int:
        return ceil_count(self.m)


@dataclass(frozen=True)
class PackingBound:
    n_hat: int
    log_size: float  # ln of the lower bound on |S|


# ---------------------------------------------------------------------------
# testing


def test_sufficient_m(p: float, n: int, eps: float, delta: float) -> BoundReport:
    """Pre-ceiling tester budget for any p (collision tester, or bucketing at p = inf)."""
    p = check_exponent(p)
    if is_inf(p):
        if eps <= 2 * alpha(n, delta):
            m = 23.0 * math.log(2 * n / delta) / (n * eps**2)
            return BoundReport(m, Regime.SMALL_N, Kind.SUFFICIENT, "linf-bucketing-small")
        m = 35.0 * math.log(1.0 / delta) / eps
        return BoundReport(m, Regime.LARGE_N, Kind.SUFFICIENT, "linf-bucketing-large")
    m, regime = collision_test_m_real(min(p, 2.0), n, eps, delta)
    fid = "collision" if p <= 2 else "collision-l2-budget"
    return BoundReport(m, regime, Kind.SUFFICIENT, f"{fid}-{'small' if regime is Regime.SMALL_N else 'large'}")


test_sufficient_m.__test__ = False


def test_necessary_m(p: float, n: int, eps: float, delta: float) -> BoundReport:
    """Necessary tester samples for 1 <= p <= 2."""
    p = check_exponent(p)
    if p > 2:
        raise ValueError(f"this lower bound is stated for p <= 2, got {p}; see linf_test_necessary_m")
    q = conjugate(p)
    if at_most(n, apparent_support(eps, q)):
        m = math.sqrt(math.log(1 + (1 - 2 * delta) ** 2)) * n ** (0.5 - 2 * inv(q)) / eps / eps
        return BoundReport(m, Regime.SMALL_N, Kind.NECESSARY, "paired-family-small")
    m = math.sqrt(2 * (1 - 2 * delta)) * math.sqrt((2 * eps) ** (-q))
    return BoundReport(m, Regime.LARGE_N, Kind.NECESSARY, "sparse-family-large")


test_necessary_m.__test__ = False


def linf_test_necessary_m(n: int, eps: float, delta: float) -> BoundReport:
    """Necessary tester samples valid for every p (proved for linf)."""
    first = 0.5 * math.log(1 + n * (1 - 2 * delta) ** 2) / (n * eps**2)
    if n >= 1 / eps:
        second = 0.5 * (1 - 2 * delta) / eps
        if second > first:
            return BoundReport(second, Regime.LARGE_N, Kind.NECESSARY, "heavy-coordinate")
    return BoundReport(first, Regime.ALL_N, Kind.NECESSARY, "heavy-permutations")


# ---------------------------------------------------------------------------
# identification game


def packing_log_size(n_hat: int, p: float, eps: float) -> float:
    """ln of Gamma(1 + (n_hat-1)/p) / ((n_hat-1)! (4 eps Gamma(1 + 1/p))^(n_hat-1))."""
    if n_hat < 2:
        raise ValueError(f"need n_hat >= 2, got {n_hat}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    p = check_exponent(p)
    k = n_hat - 1
    r = inv(p)
    return math.lgamma(1 + k * r) - math.lgamma(n_hat) - k * (math.log(4 * eps) + math.lgamma(1 + r))


def packing_log_size_stirling(n_hat: int, p: float, eps: float) -> float:
    """Stirling form: ln(e^(p/12) / sqrt(p) * (1 / (4 (n_hat-1)^(1/q) eps))^(n_hat-1))."""
    p = check_exponent(p)
    if is_inf(p):
        raise ValueError("the Stirling packing form needs p < inf")
    k = n_hat - 1
    return p / 12 - 0.5 * math.log(p) - k * math.log(4 * k ** inv(conjugate(p)) * eps)


def packing_log_size_floor(eps: float) -> float:
    """ln(1/(5 eps)): the n_hat = 2 floor valid for every p."""
    return -math.log(5 * eps)


def packing_bound(n_hat: int, p: float, eps: float, method: str = "gamma") -> PackingBound:
    if method == "gamma":
        return PackingBound(n_hat, packing_log_size(n_hat, p, eps))
    if method == "stirling":
        return PackingBound(n_hat, packing_log_size_stirling(n_hat, p, eps))
    if method == "floor":
        if n_hat != 2:
            raise ValueError("the 1/(5 eps) floor only holds for n_hat = 2")
        return PackingBound(2, packing_log_size_floor(eps))
    raise ValueError(f"unknown packing method {method!r}")


def samples_entropy_bound(n_hat: int, m: float) -> float:
    """((n_hat-1)/2) ln(2 pi e m / n_hat) in nats; the O(n_hat/m) slack is dropped."""
    if m <= 0 or n_hat < 2:
        raise ValueError(f"need m > 0 and n_hat >= 2, got m={m}, n_hat={n_hat}")
    return 0.5 * (n_hat - 1) * math.log(TWO_PI_E * m / n_hat)


def fano_failure_lower_bound(log_size: float, entropy: float) -> float:
    if log_size <= 0:
        raise ValueError(f"log |S| must be positive, got {log_size}")
    return min(1.0, max(0.0, 1.0 - (entropy + 1.0) / log_size))


def identification_n_hat(n: int, p: float, eps: float) -> int:
    star = apparent_support(eps, conjugate(p))
    if at_most(n, star):
        return int(n)
    return max(2, ceil_count(star))


def identification_lower_m(
    n: int, p: float, eps: float, delta: float, packing: str = "gamma"
) -> BoundReport:
    """(n_hat / (2 pi e)) * exp(2 (1 - delta) ln|S| / (n_hat - 1)).

    This is where the entropy bound meets (1 - delta) ln|S|; the Omega hides
    nothing else once the O(1/m) residual is dropped.
    """
    p = check_exponent(p)
    if is_inf(p):
        raise ValueError("the identification bound here needs p < inf")
    n_hat = identification_n_hat(n, p, eps)
    pb = packing_bound(n_hat, p, eps, packing)
    m = n_hat / TWO_PI_E * math.exp(2 * (1 - delta) * pb.log_size / (n_hat - 1))
    regime = Regime.SMALL_N if n_hat == n else Regime.LARGE_N
    return BoundReport(m, regime, Kind.NECESSARY, f"identification-{packing}-proof-constant")


def coin_learning_lower_m(eps: float, delta: float) -> float:
    return math.log(1 + 2 * (1 - 2 * delta) ** 2) / (16 * eps**2)


def learn_necessary_m(p: float, n: int, eps: float, delta: float) -> BoundReport:
    p = check_exponent(p)
    best = BoundReport(coin_learning_lower_m(eps, delta), Regime.ALL_N, Kind.NECESSARY, "biased-coin")
    if not is_inf(p):
        game = identification_lower_m(n, p, eps, delta)
        if game.m > best.m:
            best = game
    return best


def learn_sufficient_m(p: float, n: int, eps: float, delta: float) -> BoundReport:
    bounds = {k: v for k, v in learn_bounds(LearnParams(p, n, eps, delta)).items() if math.isfinite(v)}
    fid = min(bounds, key=bounds.get)
    regime = Regime.LARGE_N if fid.endswith("-large") else (Regime.SMALL_N if fid.endswith("-small") else Regime.ALL_N)
    return BoundReport(bounds[fid], regime, Kind.SUFFICIENT, fid)


# ---------------------------------------------------------------------------
# curves


class CurvePoint(NamedTuple):
    p: float
    n: int
    eps: float
    delta: float
    m_sufficient: float
    m_necessary: float
    regime: str


def testing_necessary_m(p: float, n: int, eps: float, delta: float) -> BoundReport:
    """The lower bound matched to each p: paired/sparse family for p <= 2, heavy coordinate above."""
    if p <= 2:
        return test_necessary_m(p, n, eps, delta)
    return linf_test_necessary_m(n, eps, delta)


testing_necessary_m.__test__ = False


def curve_points(p: float, eps: float, n_values: Iterable[int], delta: float) -> list[CurvePoint]:
    rows = []
    for n in n_values:
        suff = test_sufficient_m(p, int(n), eps, delta)
        nec = testing_necessary_m(p, int(n), eps, delta)
        rows.append(CurvePoint(p, int(n), eps, delta, suff.m, nec.m, suff.regime.value))
    return rows

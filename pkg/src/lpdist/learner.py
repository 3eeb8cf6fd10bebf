"""Empirical-frequency learner and its sufficient sample sizes."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    DiscreteDistribution,
    SampleHistogram,
    SampleSource,
    at_most,
    ceil_count,
    check_exponent,
    conjugate,
    inv,
    is_inf,
)


@dataclass(frozen=True)
class LearnParams:
    p: float
    n: int
    eps: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_exponent(self.p))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must be in (0, 1), got {self.eps}")
        if not 0 < self.delta < 1:
            raise ValueError(f"learning needs 0 < delta < 1, got {self.delta}")

    @property
    def q(self) -> float:
        return conjugate(self.p)


def empirical_distribution(hist: SampleHistogram) -> DiscreteDistribution:
    if hist.m < 1:
        raise ValueError("empirical distribution of zero samples")
    return DiscreteDistribution(hist.counts / hist.m)


def _two_regime(n: int, eps: float, q: float, k: float) -> tuple[float, str]:
    """n/(n^(1/q) eps)^2 below (k/eps)^q, (1/4)(k/eps)^q above."""
    if is_inf(q) or q * math.log(k / eps) > 700 or at_most(n, (k / eps) ** q):
        return n ** (1 - 2 * inv(q)) / eps / eps, "small"
    return 0.25 * (k / eps) ** q, "large"


def learn_bounds(params: LearnParams) -> dict[str, float]:
    """Every applicable sufficient sample size (pre-ceiling), keyed by formula id."""
    p, n, eps, delta = params.p, params.n, params.eps, params.delta
    q = params.q
    lnd = math.log(1.0 / delta)
    out: dict[str, float] = {}
    if p >= 2:
        out["l2-markov"] = 1.0 / (delta * eps**2)
        out["l2-logdelta"] = max(4.0 * lnd, 4.0) / eps**2
    if p <= 2:
        base, side = _two_regime(n, eps, q, 2.0)
        out[f"l2-reduction-{side}"] = base / delta
        mean_term, side = _two_regime(n, eps, q, 4.0)
        if side == "small":
            mean_term *= 4.0
        conc = 2.0 ** (2.0 / p + 1.0) * lnd / eps**2
        out[f"lp-logdelta-{side}"] = max(conc, mean_term)
        if p > 1:
            log_m = math.log(3.0 / delta) / (p - 1.0) - q * math.log(eps)
            out["lp-markov"] = math.exp(log_m) if log_m < 700 else math.inf
    return out


def learn_sample_size(params: LearnParams) -> tuple[int, str]:
    """Smallest ceiled sufficient sample size, and the formula that gave it."""
    best = None
    for fid, value in learn_bounds(params).items():
        if not math.isfinite(value):
            continue
        m = ceil_count(value)
        if best is None or m < best[0]:
            best = (m, fid)
    if best is None:
        raise OverflowError(f"no finite sufficient sample size for {params}")
    return best


def learn(params: LearnParams, source: SampleSource) -> tuple[DiscreteDistribution, int]:
    if source.n != params.n:
        raise ValueError(f"source has {source.n} coordinates, expected n = {params.n}")
    m, _ = learn_sample_size(params)
    return empirical_distribution(source.draw(m)), m

"""Distributions, lp geometry, seeded sampling and the constructive families.

Exponents are plain floats; ``INF`` (``math.inf``) marks p = inf or q = inf and
every formula that touches an exponent branches on it explicitly instead of
relying on inf/nan propagation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

INF = math.inf

PROB_SUM_TOL = 1e-9
# Relative slack used when a real-valued sample size is ceiled, so 2700.0000000000005 -> 2700.
CEIL_RTOL = 1e-9

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


# ---------------------------------------------------------------------------
# exponents and small numeric helpers


def is_inf(x: float) -> bool:
    return x == INF


def check_exponent(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent must satisfy p >= 1, got {p!r}")
    return p


def conjugate(p: float) -> float:
    """Hoelder conjugate q with 1/p + 1/q = 1 (1 and inf are conjugates)."""
    p = check_exponent(p)
    if p == 1:
        return INF
    if is_inf(p):
        return 1.0
    q = p / (p - 1)
    # float p = 4/3 gives q = 4.000000000000001; snap rounding noise onto integers
    r = round(q)
    return float(r) if abs(q - r) <= 1e-12 * q else q


def inv(x: float) -> float:
    """1/x under the convention 1/inf = 0."""
    return 0.0 if is_inf(x) else 1.0 / x


def apparent_support(eps: float, q: float) -> float:
    """The regime boundary 1/eps^q (inf when q is inf, since eps < 1)."""
    if is_inf(q) or -q * math.log(eps) > 700:
        return INF
    return eps ** (-q)


def at_most(a: float, b: float) -> bool:
    """a <= b with a relative slack of CEIL_RTOL; b may be inf."""
    if is_inf(b):
        return True
    return a <= b * (1 + CEIL_RTOL)


def ceil_count(x: float) -> int:
    """Ceil a positive real sample size, snapping values within CEIL_RTOL of an integer."""
    if not math.isfinite(x):
        raise OverflowError(f"sample size is not finite: {x!r}")
    r = round(x)
    if abs(x - r) <= CEIL_RTOL * max(1.0, abs(x)):
        return int(r)
    return int(math.ceil(x))


def mix64(master: int, index: int) -> int:
    """Derive a 64-bit seed from (master, index).

    SplitMix64 finaliser applied to master + (index + 1) * golden-gamma.  For a
    fixed master the map is a bijection of ``index`` mod 2^64, so derived seeds
    are pairwise distinct.
    """
    z = (int(master) + (int(index) + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


# ---------------------------------------------------------------------------
# norms


def lp_norm(v: Sequence[float] | np.ndarray, p: float) -> float:
    """(sum |v_i|^p)^(1/p), or max |v_i| for p = inf.

    Entries are scaled by the largest magnitude first so large p neither
    overflows nor underflows.
    """
    p = check_exponent(p)
    a = np.abs(np.asarray(v, dtype=float))
    if a.size == 0:
        raise ValueError("lp_norm of an empty vector")
    top = float(a.max())
    if is_inf(p) or top == 0.0:
        return top
    if p == 1:
        return float(a.sum())
    s = float(np.sum((a / top) ** p))
    return top * s ** (1.0 / p)


def lp_distance(a: "DiscreteDistribution", b: "DiscreteDistribution", p: float) -> float:
    if a.n != b.n:
        raise ValueError(f"support sizes differ: {a.n} vs {b.n}")
    return lp_norm(a.probs - b.probs, p)


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Probability vector over coordinates 0..n-1."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if probs.size < 2:
            raise ValueError(f"support size must be at least 2, got {probs.size}")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError("probabilities must be finite and non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return int(self.probs.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.probs, other.probs))

    def __hash__(self) -> int:
        return hash(self.probs.tobytes())

    def __repr__(self) -> str:
        return f"DiscreteDistribution(n={self.n}, probs={np.array2string(self.probs, threshold=8)})"


@dataclass(frozen=True, eq=False)
class SampleHistogram:
    """Per-coordinate counts of m draws."""

    counts: np.ndarray
    m: int = field(default=-1)

    def __post_init__(self):
        counts = np.array(self.counts).reshape(-1)
        if counts.size and not np.issubdtype(counts.dtype, np.integer):
            if not np.all(counts == np.floor(counts)):
                raise ValueError("histogram counts must be integers")
        counts = counts.astype(np.int64)
        if counts.size < 1:
            raise ValueError("empty histogram")
        if np.any(counts < 0):
            raise ValueError("histogram counts must be non-negative")
        total = int(counts.sum())
        m = total if self.m == -1 else int(self.m)
        if m != total:
            raise ValueError(f"counts sum to {total} but m = {m}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return int(self.counts.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SampleHistogram):
            return NotImplemented
        return self.m == other.m and bool(np.array_equal(self.counts, other.counts))

    def __hash__(self) -> int:
        return hash((self.m, self.counts.tobytes()))


def make_uniform(n: int) -> DiscreteDistribution:
    if n < 2:
        raise ValueError(f"uniform distribution needs n >= 2, got {n}")
    return DiscreteDistribution(np.full(int(n), 1.0 / n))


# ---------------------------------------------------------------------------
# sampling


class AliasTable:
    """Walker/Vose alias table: O(n) build, O(1) per draw."""

    def __init__(self, dist: DiscreteDistribution):
        n = dist.n
        scaled = dist.probs * n
        prob = np.ones(n)
        alias = np.arange(n)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        scaled = scaled.tolist()
        while small and large:
            s = small.pop()
            g = large.pop()
            prob[s] = scaled[s]
            alias[s] = g
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            if scaled[g] < 1.0:
                small.append(g)
            else:
                large.append(g)
        # leftovers are 1 up to rounding
        for i in small + large:
            prob[i] = 1.0
            alias[i] = i
        self.dist = dist
        self.n = n
        self.prob = prob
        self.alias = alias

    def draw(self, size, rng: np.random.Generator) -> np.ndarray:
        """Coordinate indices of ``size`` i.i.d. draws (any array shape)."""
        col = rng.integers(0, self.n, size=size)
        keep = rng.random(size=size) < self.prob[col]
        return np.where(keep, col, self.alias[col])

    def histogram(self, m: int, rng: np.random.Generator) -> SampleHistogram:
        draws = self.draw(int(m), rng)
        return SampleHistogram(np.bincount(draws, minlength=self.n), int(m))


def sample(dist: DiscreteDistribution, m: int, seed: int) -> SampleHistogram:
    """Histogram of m i.i.d. draws from ``dist``; deterministic in ``seed``."""
    if m < 1:
        raise ValueError(f"need m >= 1 draws, got {m}")
    return AliasTable(dist).histogram(m, make_rng(seed))


class SampleSource:
    """Seeded draw access to one distribution.

    ``draw(m, stream)`` returns a fresh histogram whose randomness depends only
    on ``(seed, stream)``, so independent runs (e.g. majority-vote repetitions)
    ask for different streams and get reproducible, independent samples.
    """

    def __init__(self, dist: DiscreteDistribution | AliasTable, seed: int):
        self.table = dist if isinstance(dist, AliasTable) else AliasTable(dist)
        self.seed = int(seed)

    @property
    def dist(self) -> DiscreteDistribution:
        return self.table.dist

    @property
    def n(self) -> int:
        return self.table.n

    def draw(self, m: int, stream: int = 0) -> SampleHistogram:
        if m < 1:
            raise ValueError(f"need m >= 1 draws, got {m}")
        return self.table.histogram(m, make_rng(mix64(self.seed, stream)))


# ---------------------------------------------------------------------------
# thinness and discretisation


def is_thin(dist: DiscreteDistribution, eps: float, p: float) -> bool:
    """True iff max_i A_i <= eps^q, which forces ||A||_p <= eps."""
    p = check_exponent(p)
    if p == 1:
        raise ValueError("thinness is vacuous for p = 1 (q = inf)")
    q = conjugate(p)
    return float(dist.probs.max()) <= eps**q * (1 + 1e-12)


def discretize(dist: DiscreteDistribution, eps: float, p: float) -> DiscreteDistribution:
    """Round ``dist`` onto a grid of step at most eps^q with lp error <= 2 eps.

    The step is 1/K with K = ceil(eps^-q), the coarsest grid no wider than
    eps^q whose multiples can add up to exactly 1.  Entries are floored to the
    grid and the K - sum(floors) leftover units go one each to the coordinates
    with the largest fractional remainders (ties to the lower index).
    """
    p = check_exponent(p)
    if p == 1:
        raise ValueError("discretisation needs p > 1")
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    g = eps ** conjugate(p)
    if g > 1:
        raise ValueError(f"grid step {g} exceeds total mass")
    units = ceil_count(1.0 / g)
    scaled = dist.probs * units
    base = np.floor(scaled + 1e-9)
    rem = np.maximum(scaled - base, 0.0)
    k = base.astype(np.int64)
    leftover = units - int(k.sum())
    if leftover > 0:
        order = np.lexsort((np.arange(dist.n), -rem))
        k[order[:leftover]] += 1
    elif leftover < 0:
        # only reachable through the 1e-9 snap; take back from the smallest remainders
        order = np.lexsort((np.arange(dist.n), rem))
        order = [i for i in order if k[i] > 0]
        k[order[:-leftover]] -= 1
    return DiscreteDistribution(k / units)


# ---------------------------------------------------------------------------
# constructive families


def paninski_alpha(n: int, eps: float, p: float) -> float:
    """Perturbation size eps * n^(1/q) of the paired family."""
    return eps * n ** inv(conjugate(p))


def paninski_member(n: int, eps: float, p: float, coins: Iterable[bool]) -> DiscreteDistribution:
    """Paired member: coordinates (2k, 2k+1) get (1 +- alpha)/n, ordered by coin k.

    A true coin puts the heavier mass on the even coordinate.  For odd n the
    pairs cover the first n-1 coordinates and the last keeps 1/n; the lp
    distance to U_n is then (n-1)^(1/p) * alpha / n rather than exactly eps.
    """
    p = check_exponent(p)
    if not 1 <= p <= 2:
        raise ValueError(f"the paired family is defined for 1 <= p <= 2, got {p}")
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    a = paninski_alpha(n, eps, p)
    if a > 1 + 1e-12:
        raise ValueError(
            f"alpha = eps * n^(1/q) = {a:.6g} > 1; requires n <= 1/eps^q "
            f"= {apparent_support(eps, conjugate(p)):.6g}"
        )
    a = min(a, 1.0)
    coins = np.asarray(list(coins), dtype=bool)
    pairs = n // 2
    if coins.size != pairs:
        raise ValueError(f"need {pairs} coins for n = {n}, got {coins.size}")
    probs = np.full(n, 1.0 / n)
    hi, lo = (1 + a) / n, (1 - a) / n
    probs[0 : 2 * pairs : 2] = np.where(coins, hi, lo)
    probs[1 : 2 * pairs : 2] = np.where(coins, lo, hi)
    return DiscreteDistribution(probs)


def random_paninski_member(n: int, eps: float, p: float, seed: int) -> DiscreteDistribution:
    coins = make_rng(seed).integers(0, 2, size=n // 2).astype(bool)
    return paninski_member(n, eps, p, coins)


def heavy_coordinate_dist(n: int, eps: float) -> DiscreteDistribution:
    """(1/n + eps, 1/n - eps/(n-1), ...): linf distance eps from U_n."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if eps <= 0 or 1.0 / n + eps > 1 + 1e-12:
        raise ValueError(f"eps = {eps} too large for n = {n}: need 1/n + eps <= 1")
    probs = np.full(n, 1.0 / n - eps / (n - 1))
    probs[0] = 1.0 / n + eps
    return DiscreteDistribution(np.clip(probs, 0.0, None))


def sparse_support_size(eps: float, p: float) -> int:
    """n_hat = ceil((1/(2 eps))^q)."""
    q = conjugate(p)
    if is_inf(q):
        raise ValueError("the sparse family needs p > 1")
    return ceil_count((0.5 / eps) ** q)


def sparse_uniform_member(n: int, eps: float, p: float, seed: int) -> DiscreteDistribution:
    """Uniform on n_hat coordinates picked without replacement by ``seed``."""
    p = check_exponent(p)
    if not 1 < p <= 2:
        raise ValueError(f"the sparse family is defined for 1 < p <= 2, got {p}")
    n_hat = sparse_support_size(eps, p)
    if 2 * n_hat > n:
        raise ValueError(f"n_hat = {n_hat} exceeds n/2 = {n / 2}; requires n >= 1/eps^q")
    support = make_rng(seed).choice(n, size=n_hat, replace=False)
    probs = np.zeros(n)
    probs[support] = 1.0 / n_hat
    return DiscreteDistribution(probs)


# ---------------------------------------------------------------------------
# file formats


def _data_lines(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def read_distribution(path: str | Path) -> DiscreteDistribution:
    values = []
    for lineno, line in _data_lines(path):
        try:
            values.append(float(line))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not a probability: {line!r}") from None
    return DiscreteDistribution(np.array(values))


def write_distribution(dist: DiscreteDistribution, path: str | Path | None = None) -> str:
    text = "".join(f"{x!r}\n" for x in dist.probs.tolist())
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_histogram(path: str | Path) -> SampleHistogram:
    counts = []
    for lineno, line in _data_lines(path):
        if not line.isdigit():
            raise ValueError(f"{path}:{lineno}: not a non-negative integer count: {line!r}")
        counts.append(int(line))
    return SampleHistogram(np.array(counts, dtype=np.int64))


def write_histogram(hist: SampleHistogram, path: str | Path | None = None) -> str:
    text = "".join(f"{c}\n" for c in hist.counts.tolist())
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text

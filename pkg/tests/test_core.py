import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpdist.core import (
    INF,
    AliasTable,
    DiscreteDistribution,
    SampleHistogram,
    SampleSource,
    ceil_count,
    conjugate,
    discretize,
    heavy_coordinate_dist,
    is_thin,
    lp_distance,
    lp_norm,
    make_rng,
    make_uniform,
    mix64,
    paninski_member,
    random_paninski_member,
    read_distribution,
    read_histogram,
    sample,
    sparse_support_size,
    sparse_uniform_member,
    write_distribution,
    write_histogram,
)

exponents = st.one_of(st.floats(1.0, 50.0), st.just(INF))


# conjugate ------------------------------------------------------------------


def test_conjugate_examples():
    assert conjugate(2) == 2.0
    assert conjugate(1) == INF
    assert conjugate(INF) == 1.0
    assert conjugate(4 / 3) == 4.0


def test_conjugate_rejects_below_one():
    with pytest.raises(ValueError):
        conjugate(0.99)
    with pytest.raises(ValueError):
        conjugate(float("nan"))


@given(exponents)
def test_conjugate_reciprocals_sum_to_one(p):
    q = conjugate(p)
    inv = lambda x: 0.0 if x == INF else 1.0 / x
    assert inv(p) + inv(q) == pytest.approx(1.0, abs=1e-12)
    if p == INF:
        assert conjugate(q) == INF
    else:
        assert conjugate(q) == pytest.approx(p, rel=1e-9)


# norms ----------------------------------------------------------------------


def test_lp_norm_examples():
    assert lp_norm([0.5, 0.5], 2) == pytest.approx(0.7071067811865476, abs=1e-15)
    assert lp_norm([0.3, -0.4], INF) == 0.4
    assert lp_norm([1, 1, 1, 1], 4 / 3) == pytest.approx(4**0.75, rel=1e-14)
    assert lp_norm([1, 1, 1, 1], 4 / 3) == pytest.approx(2.8284, abs=1e-4)


def test_lp_norm_rejects_empty_and_bad_p():
    with pytest.raises(ValueError):
        lp_norm([], 2)
    with pytest.raises(ValueError):
        lp_norm([1.0], 0.5)


def test_lp_norm_extreme_magnitudes():
    # the max-scaling keeps huge p and tiny entries finite
    assert lp_norm([1e-200, 1e-200], 2) == pytest.approx(math.sqrt(2) * 1e-200, rel=1e-12)
    assert lp_norm([3.0, 4.0], 1000) == pytest.approx(4.0, rel=1e-12)


def test_lp_distance_examples():
    assert lp_distance(make_uniform(4), make_uniform(4), 1.7) == 0
    assert lp_distance(DiscreteDistribution([1, 0]), DiscreteDistribution([0.5, 0.5]), 1) == 1.0
    d = lp_distance(DiscreteDistribution([0.7, 0.3]), DiscreteDistribution([0.5, 0.5]), INF)
    assert d == pytest.approx(0.2, abs=1e-15)


def test_lp_distance_rejects_mismatch():
    with pytest.raises(ValueError):
        lp_distance(make_uniform(3), make_uniform(4), 2)


@settings(max_examples=200)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30), exponents)
def test_lp_norm_nonnegative_and_homogeneous(v, p):
    n = lp_norm(v, p)
    assert n >= 0
    assert lp_norm(np.asarray(v) * -2.5, p) == pytest.approx(2.5 * n, rel=1e-12, abs=1e-300)


# distributions --------------------------------------------------------------


def test_distribution_validation():
    with pytest.raises(ValueError):
        DiscreteDistribution([1.0])
    with pytest.raises(ValueError):
        DiscreteDistribution([0.6, 0.6])
    with pytest.raises(ValueError):
        DiscreteDistribution([1.1, -0.1])
    with pytest.raises(ValueError):
        DiscreteDistribution([np.nan, 1.0])
    DiscreteDistribution([0.5, 0.5 + 5e-10])  # inside the 1e-9 sum tolerance


def test_distribution_is_immutable():
    d = make_uniform(3)
    with pytest.raises(ValueError):
        d.probs[0] = 1.0


def test_make_uniform_examples():
    assert make_uniform(2).probs.tolist() == [0.5, 0.5]
    assert make_uniform(4).probs.tolist() == [0.25] * 4
    u5 = make_uniform(5)
    assert u5.probs.sum() == pytest.approx(1.0, abs=1e-15)
    assert lp_norm(u5.probs, INF) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        make_uniform(1)


def test_histogram_validation():
    h = SampleHistogram([2, 3])
    assert h.m == 5 and h.n == 2
    with pytest.raises(ValueError):
        SampleHistogram([2, 3], 4)
    with pytest.raises(ValueError):
        SampleHistogram([-1, 3])
    with pytest.raises(ValueError):
        SampleHistogram([1.5, 2])


# sampling -------------------------------------------------------------------


def test_sample_point_mass():
    for seed in (0, 1, 2**63):
        assert sample(DiscreteDistribution([1, 0]), 5, seed).counts.tolist() == [5, 0]


def test_sample_binomial_standard_error():
    m = 10**5
    h = sample(make_uniform(2), m, seed=12345)
    assert abs(h.counts[0] / m - 0.5) <= 3 * math.sqrt(0.25 / m)


def test_sample_deterministic():
    d = DiscreteDistribution([0.1, 0.2, 0.3, 0.4])
    assert sample(d, 1000, 99) == sample(d, 1000, 99)
    assert sample(d, 1000, 99) != sample(d, 1000, 100)


def test_sample_marginals_within_four_standard_errors():
    probs = np.array([0.02, 0.08, 0.1, 0.15, 0.25, 0.4])
    m = 10**5
    h = sample(DiscreteDistribution(probs), m, seed=2024)
    se = np.sqrt(probs * (1 - probs) / m)
    assert np.all(np.abs(h.counts / m - probs) <= 4 * se)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=12).filter(lambda v: sum(v) > 0.01))
def test_alias_table_reconstructs_probabilities(weights):
    w = np.array(weights)
    d = DiscreteDistribution(w / w.sum())
    t = AliasTable(d)
    # exact per-column mass: keep with prob[i], else hand the rest to alias[i]
    mass = t.prob / d.n
    np.add.at(mass, t.alias, (1 - t.prob) / d.n)
    np.testing.assert_allclose(mass, d.probs, atol=1e-12)


def test_sample_source_streams():
    src = SampleSource(make_uniform(10), seed=5)
    assert src.draw(100, stream=0) == src.draw(100, stream=0)
    assert src.draw(100, stream=0) != src.draw(100, stream=1)
    assert src.draw(100).m == 100


def test_mix64_is_distinct_over_many_indices():
    seeds = {mix64(42, i) for i in range(100_000)}
    assert len(seeds) == 100_000
    assert all(0 <= s < 2**64 for s in list(seeds)[:100])
    assert mix64(1, 0) != mix64(2, 0)


def test_make_rng_accepts_64bit_seeds():
    make_rng(2**64 - 1).random()
    make_rng(-1).random()


def test_ceil_count_snaps_rounding_noise():
    assert ceil_count(2700.0000000000005) == 2700
    assert ceil_count(1049.6) == 1050
    assert ceil_count(2.0) == 2
    assert ceil_count(2.001) == 3
    with pytest.raises(OverflowError):
        ceil_count(math.inf)


# thinness and discretisation ------------------------------------------------


def test_is_thin_examples():
    assert is_thin(make_uniform(100), 0.2, 2)
    assert lp_norm(make_uniform(100).probs, 2) == pytest.approx(0.1)
    assert not is_thin(make_uniform(2), 0.2, 2)
    u = make_uniform(100)
    assert is_thin(u, 0.1, 2)
    assert lp_norm(u.probs, 2) == pytest.approx(0.1, rel=1e-12)
    with pytest.raises(ValueError):
        is_thin(u, 0.1, 1)


@settings(max_examples=100, deadline=None)
@given(
    st.integers(2, 40),
    st.floats(1.05, 6.0),
    st.floats(0.05, 0.9),
    st.integers(0, 2**32),
)
def test_thin_implies_small_norm(n, p, eps, seed):
    w = make_rng(seed).random(n)
    d = DiscreteDistribution(w / w.sum())
    if is_thin(d, eps, p):
        assert lp_norm(d.probs, p) <= eps * (1 + 1e-12)


def test_discretize_example():
    out = discretize(DiscreteDistribution([0.6, 0.4]), 0.5, 2)
    assert out.probs.tolist() == [0.5, 0.5]
    assert lp_distance(out, DiscreteDistribution([0.6, 0.4]), 2) == pytest.approx(0.1414, abs=1e-4)


def test_discretize_fixed_point():
    a = DiscreteDistribution([0.25, 0.5, 0.25, 0.0])
    assert discretize(a, 0.5, 2) == a


def test_discretize_random_within_two_eps():
    rng = make_rng(7)
    eps, p = 0.3, 1.5
    units = ceil_count(eps ** -conjugate(p))
    for _ in range(100):
        w = rng.random(20)
        a = DiscreteDistribution(w / w.sum())
        out = discretize(a, eps, p)
        assert lp_distance(a, out, p) <= 2 * eps
        k = out.probs * units
        np.testing.assert_allclose(k, np.round(k), atol=1e-9)
        assert out.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_discretize_tie_break_to_lower_index():
    # remainders tie at 0.5 for all three; one leftover unit goes to index 0
    out = discretize(DiscreteDistribution([0.375, 0.375, 0.25]), 0.5, 2)
    assert out.probs.tolist() == [0.5, 0.25, 0.25]


def test_discretize_errors():
    with pytest.raises(ValueError):
        discretize(make_uniform(2), 0.5, 1)
    with pytest.raises(ValueError):
        discretize(make_uniform(2), 1.5, 2)


# constructive families ------------------------------------------------------


def test_paninski_examples():
    a = paninski_member(4, 0.5, 1, [True, True])
    assert a.probs.tolist() == [0.375, 0.125, 0.375, 0.125]
    assert lp_distance(a, make_uniform(4), 1) == pytest.approx(0.5)
    b = paninski_member(4, 0.25, 2, [False, True])
    assert lp_distance(b, make_uniform(4), 2) == pytest.approx(0.25, abs=1e-15)


def test_paninski_rejects_large_alpha():
    with pytest.raises(ValueError, match="n <= 1/eps"):
        paninski_member(100, 0.2, 2, [True] * 50)
    with pytest.raises(ValueError):
        paninski_member(4, 0.1, 2, [True])
    with pytest.raises(ValueError):
        paninski_member(4, 0.1, 3, [True, True])


def test_paninski_odd_n_reports_achieved_distance():
    a = paninski_member(5, 0.1, 2, [True, False])
    assert a.probs[4] == pytest.approx(0.2)
    alpha = 0.1 * math.sqrt(5)
    assert lp_distance(a, make_uniform(5), 2) == pytest.approx(2 * alpha / 5, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 50), st.floats(1.0, 2.0), st.floats(0.01, 1.0), st.integers(0, 2**63))
def test_paninski_member_exact_distance(pairs, p, frac, seed):
    n = 2 * pairs
    q = conjugate(p)
    # choose eps so that alpha = frac <= 1
    eps = frac / n ** (0 if q == INF else 1 / q)
    if not 0 < eps < 1:
        return
    a = random_paninski_member(n, eps, p, seed)
    assert a.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert lp_distance(a, make_uniform(n), p) == pytest.approx(eps, rel=1e-9)


def test_heavy_coordinate_examples():
    a = heavy_coordinate_dist(4, 0.1)
    np.testing.assert_allclose(a.probs, [0.35, 0.21666666666666667, 0.21666666666666667, 0.21666666666666667])
    assert a.probs.sum() == pytest.approx(1.0)
    b = heavy_coordinate_dist(2, 0.2)
    np.testing.assert_allclose(b.probs, [0.7, 0.3])
    assert lp_distance(b, make_uniform(2), INF) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        heavy_coordinate_dist(2, 0.6)


@given(st.integers(2, 10_000), st.floats(1e-4, 0.5))
def test_heavy_coordinate_linf_distance(n, eps):
    if 1 / n + eps > 1:
        return
    a = heavy_coordinate_dist(n, eps)
    assert lp_distance(a, make_uniform(n), INF) == pytest.approx(eps, rel=1e-9)


def test_sparse_examples():
    assert sparse_support_size(0.25, 2) == 4
    a = sparse_uniform_member(64, 0.25, 2, seed=3)
    assert np.count_nonzero(a.probs) == 4
    assert sorted(set(a.probs.tolist())) == [0.0, 0.25]
    assert lp_distance(a, make_uniform(64), 2) >= 0.25
    with pytest.raises(ValueError):
        sparse_uniform_member(6, 0.25, 2, seed=3)
    with pytest.raises(ValueError):
        sparse_uniform_member(64, 0.25, 1, seed=3)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.1, 2.0), st.floats(0.05, 0.45), st.integers(0, 2**63))
def test_sparse_member_far_from_uniform(p, eps, seed):
    n_hat = sparse_support_size(eps, p)
    n = max(2 * n_hat, ceil_count(eps ** -conjugate(p)))
    if n > 200_000:
        return
    a = sparse_uniform_member(n, eps, p, seed)
    assert np.count_nonzero(a.probs) == n_hat
    assert lp_distance(a, make_uniform(n), p) >= eps * (1 - 1e-9)


# file formats ---------------------------------------------------------------


def test_distribution_roundtrip(tmp_path):
    d = DiscreteDistribution([0.1, 0.2, 0.7])
    path = tmp_path / "d.txt"
    write_distribution(d, path)
    assert read_distribution(path) == d
    path.write_text("# header\n0.5\n\n0.5\n", encoding="utf-8")
    assert read_distribution(path) == make_uniform(2)


def test_histogram_roundtrip(tmp_path):
    h = SampleHistogram([3, 0, 7])
    path = tmp_path / "h.txt"
    write_histogram(h, path)
    assert read_histogram(path) == h
    path.write_text("1\n-2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_histogram(path)

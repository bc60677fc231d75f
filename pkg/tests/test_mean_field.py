import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from d3g3.degree_sets import DegreeSet
from d3g3.mean_field import (
    ConjectureViolation,
    RegimeKind,
    SegmentParams,
    argmax_relationship,
    classify_fixed_points,
    collapse_bound,
    default_search_cap,
    fixed_points,
    growth_probability,
    isolated_limit,
    isolated_order_bound,
    monotonic_bounds,
    relationship,
    relationship_delta,
    relationship_profile,
    survival_probability,
    sustainable_interval,
)

mpmath.mp.dps = 40


def mp_survival(m, M, d, n):
    p = mpmath.pi * mpmath.mpf(d) ** 2
    return sum(mpmath.binomial(n - 1, k) * p ** k * (1 - p) ** (n - 1 - k) for k in range(m, min(M, n - 1) + 1))


def scipy_survival(m, M, d, n):
    p = math.pi * d * d
    return float(binom.pmf(np.arange(m, M + 1), n - 1, p).sum())


def brute_crossings(params, cap):
    n = np.arange(cap + 1)
    g = relationship(params, n) - n
    hit = ((g[:-1] <= 0) & (g[1:] > 0)) | ((g[:-1] >= 0) & (g[1:] < 0))
    return n[:-1][hit].tolist()


# -------------------------------------------------------- frozen oracle values
# computed once with mpmath at 40 digits

def test_isolated_survival_value():
    P = SegmentParams(0, 0, 0.1)
    assert survival_probability(P, 10) == pytest.approx(0.7503016690642662, rel=1e-13)
    assert survival_probability(P, 10) == pytest.approx((1 - math.pi * 0.01) ** 9, rel=1e-13)


def test_monotonic_bounds_values():
    assert monotonic_bounds(SegmentParams(0, 0, 0.1))[0] == pytest.approx(30.830988618379067, rel=1e-14)
    x_m, x_M = monotonic_bounds(SegmentParams(2, 5, 0.05))
    assert x_m == pytest.approx(380.9718634205488, rel=1e-14)
    assert x_M == pytest.approx(762.9437268410976, rel=1e-14)


@pytest.mark.parametrize(
    "d,ell",
    [(0.1, 15.353379858507855), (0.05, 61.30561604191386), (0.02, 382.971996257332), (0.005, 6127.015038253262)],
)
def test_isolated_limit_values(d, ell):
    lim = isolated_limit(d)
    assert lim.conserved == pytest.approx(ell, rel=1e-12)
    assert lim.order == 2 * lim.conserved


def test_isolated_limit_solves_equilibrium():
    # non-zero root of l = l q^l + l q^(2l-1), found numerically
    for d in (0.1, 0.05, 0.02):
        q = 1 - mpmath.pi * mpmath.mpf(d) ** 2
        root = mpmath.findroot(lambda x: q ** x + q ** (2 * x - 1) - 1, 0.5 / (1 - q))
        assert float(root) == pytest.approx(isolated_limit(d).conserved, rel=1e-12)


def test_isolated_order_bound():
    assert isolated_order_bound(0.05) == pytest.approx(1018.5916357881302, rel=1e-15)
    for bad in (0.0, 0.5, 0.6):
        with pytest.raises(ValueError):
            isolated_order_bound(bad)


# ------------------------------------------------------ survival probability

@pytest.mark.parametrize("m,M,d", [(0, 0, 0.1), (2, 5, 0.05), (20, 60, 0.05), (1, 3, 0.3)])
def test_survival_matches_mpmath(m, M, d):
    P = SegmentParams(m, M, d)
    for n in [1, 2, 3, 10, 50, 200, 1000, 5000, 40000]:
        exact = mp_survival(m, M, d, n)
        got = survival_probability(P, n)
        assert got == pytest.approx(float(exact), rel=1e-12, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(0, 8), st.sampled_from([0.02, 0.05, 0.1, 0.2]))
def test_survival_matches_pmf_sum(m, w, d):
    P = SegmentParams(m, m + w, d)
    n = np.arange(1, 1001)
    got = survival_probability(P, n)
    want = np.array([scipy_survival(m, m + w, d, k) for k in n])
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)


def test_survival_edge_cases():
    assert survival_probability(SegmentParams(0, 3, 0.1), 1) == 1.0
    assert survival_probability(SegmentParams(2, 3, 0.1), 2) == 0.0
    with pytest.raises(ValueError):
        survival_probability(SegmentParams(0, 3, 0.1), 0)
    with pytest.raises(ValueError):
        SegmentParams(3, 2, 0.1)
    with pytest.raises(ValueError):
        SegmentParams(0, 2, 0.6)


def test_survival_large_order_finite():
    P = SegmentParams(65, 145, 0.005)
    v = survival_probability(P, np.array([10 ** 5, 10 ** 6, 5 * 10 ** 6]))
    assert np.all(np.isfinite(v)) and np.all(v >= 0) and np.all(v <= 1)
    assert float(mp_survival(65, 145, 0.005, 10 ** 6)) == pytest.approx(v[1], rel=1e-12)


# ------------------------------------------------------------ relationship

def test_relationship_examples():
    P = SegmentParams(0, 0, 0.1)
    p = math.pi * 0.01
    assert relationship(P, 0) == 0.0
    assert relationship(P, 2) == pytest.approx(4 * (1 - p), rel=1e-15)
    assert relationship(SegmentParams(0, 4, 0.1), 1) == 2.0
    with pytest.raises(ValueError):
        relationship(P, -1)


@pytest.mark.parametrize("m,M,d", [(0, 0, 0.1), (1, 3, 0.05), (3, 8, 0.02), (20, 60, 0.05)])
def test_delta_matches_difference(m, M, d):
    P = SegmentParams(m, M, d)
    n = np.arange(0, 3001)
    f = relationship(P, n)
    for k in range(0, 3000, 7):
        scale = max(abs(f[k]), abs(f[k + 1]), 1e-300)
        assert abs(relationship_delta(P, k) - (f[k + 1] - f[k])) <= 1e-9 * scale + 1e-300


def test_delta_against_mpmath():
    P = SegmentParams(2, 5, 0.05)
    for n in (3, 100, 381, 700, 2000):
        exact = 2 * n * mp_survival(2, 5, 0.05, n)
        nxt = 2 * (n + 1) * mp_survival(2, 5, 0.05, n + 1)
        assert relationship_delta(P, n) == pytest.approx(float(nxt - exact), rel=1e-10)


def test_argmax_is_global():
    for m, M, d in [(0, 0, 0.1), (2, 5, 0.05), (1, 6, 0.1), (3, 5, 0.05)]:
        P = SegmentParams(m, M, d)
        x_M = monotonic_bounds(P)[1]
        n = np.arange(0, int(3 * x_M) + 10)
        f = relationship(P, n)
        assert argmax_relationship(P) == int(n[np.argmax(f)])


def test_argmax_isolated_near_calculus():
    assert abs(argmax_relationship(SegmentParams(0, 0, 0.1)) - 31.328) < 1


# ------------------------------------------------------------ fixed points

GRID = [SegmentParams(m, m + w, d) for m, w, d in itertools.product([0, 1, 3], [0, 2, 5], [0.02, 0.05, 0.1])]


@pytest.mark.parametrize("P", GRID[::4], ids=lambda P: f"{P.m}-{P.M}-{P.d}")
def test_fixed_points_vs_brute(P):
    cap = default_search_cap(P)
    assert fixed_points(P) == brute_crossings(P, cap)


def test_fixed_points_small_cap():
    P = SegmentParams(1, 3, 0.05)
    assert fixed_points(P, 300) == brute_crossings(P, 300)
    assert fixed_points(P, 460) == brute_crossings(P, 460)
    assert fixed_points(P, 460)[-1] == 451


def test_fixed_point_examples():
    assert fixed_points(SegmentParams(0, 0, 0.1)) == [0, 22]
    assert fixed_points(SegmentParams(2, 5, 0.05)) == [0, 217, 703]
    assert fixed_points(SegmentParams(3, 3, 0.05)) == [0]


def test_regime_classification():
    assert classify_fixed_points([0]) is RegimeKind.ONE_FP
    assert classify_fixed_points([0, 4, 9]) is RegimeKind.THREE_FP
    with pytest.raises(ConjectureViolation):
        classify_fixed_points([0, 1, 2, 3])


def test_collapse_bound_vs_scan():
    for P in [SegmentParams(0, 0, 0.1), SegmentParams(2, 5, 0.05), SegmentParams(3, 3, 0.1), SegmentParams(1, 6, 0.02)]:
        N = collapse_bound(P)
        n = np.arange(0, 4 * N + 10)
        f = relationship(P, n)
        above = np.flatnonzero(f >= 1)
        assert N == (above[-1] if above.size else 0)
        assert relationship(P, N + 1) < 1
        assert relationship(P, 4 * N) < relationship(P, 2 * N) < 1


def test_sustainable_interval_three_fp():
    P = SegmentParams(2, 5, 0.05)
    iv = sustainable_interval(P)
    assert (iv.lower, iv.upper) == (217, 1201)
    # f(N_m) <= N_m by the crossing definition; the bound holds just above it
    assert relationship(P, iv.lower) <= iv.lower
    n = np.arange(iv.lower + 1, iv.upper + 1)
    assert np.all(relationship(P, n) >= iv.lower)
    assert relationship(P, iv.upper + 1) < iv.lower
    assert iv.stable == (relationship(P, argmax_relationship(P)) <= iv.upper)


def test_sustainable_interval_absent():
    assert sustainable_interval(SegmentParams(3, 3, 0.05)) is None
    assert sustainable_interval(SegmentParams(0, 0, 0.1)) is None


def test_profile_report():
    prof = relationship_profile(SegmentParams(1, 3, 0.05))
    rep = prof.as_dict()
    assert rep["regime"] == "three_fp" and rep["fixed_points"] == [0, 90, 451]
    assert rep["sustainable_interval"] == [90, 1005]
    assert all(rep["conjectures"].values())


# ------------------------------------------------------------ growth probability

def test_growth_probability_oracle():
    ss = DegreeSet.finite([2])
    sc = DegreeSet.segment(1, 4)
    for n in (3, 50, 200, 1000):
        x = binom.pmf(2, n - 1, math.pi * 0.0025)
        assert growth_probability(ss, sc, 0.05, n) == pytest.approx(1 - (1 - x) ** n, rel=1e-10)


def test_growth_probability_cases():
    assert growth_probability(DegreeSet.finite([1]), DegreeSet.finite([2]), 0.05, 100) == 0.0
    assert growth_probability(DegreeSet.finite([0]), DegreeSet.finite([0]), 0.05, 1) == 1.0
    with pytest.raises(ValueError):
        growth_probability(DegreeSet.naturals(), DegreeSet.naturals(), 0.05, 10)
    with pytest.raises(ValueError):
        growth_probability(DegreeSet.finite([0]), DegreeSet.finite([0]), 0.05, 0)


def test_isolated_golden_ratio_asymptotics():
    phi = (1 + math.sqrt(5)) / 2
    errs = [abs(isolated_limit(d).conserved * math.pi * d * d / math.log(phi) - 1) for d in (0.1, 0.05, 0.02, 0.005)]
    assert errs == sorted(errs, reverse=True)
    assert errs[0] == pytest.approx(2.3e-3, rel=0.05)

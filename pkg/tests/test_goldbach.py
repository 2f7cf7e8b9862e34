import math

import numpy as np
import pytest

from goldbachlab.arithmetic import EvenInput, buchstab_omega
from goldbachlab.circle import mean_value
from goldbachlab.families import FamilyConfig
from goldbachlab.goldbach import (
    EmptyPolytope,
    Polytope,
    SingularRegion,
    classical_R,
    classical_R_brute,
    classical_R_many,
    gamma_estimate,
    mixed_representation,
    mixed_supports,
    prop43_rhs,
    volume_overlap,
)
from goldbachlab.primes import sieve_primes


@pytest.fixture(scope="module")
def table():
    return sieve_primes(2, 10**6)


def test_classical_small_examples():
    l2, l3, l5 = math.log(2), math.log(3), math.log(5)
    r7 = classical_R(7)
    assert r7.raw_count == 3
    assert r7.weighted_count == pytest.approx(3 * l2**2 * l3, rel=1e-12)
    r9 = classical_R(9)
    assert r9.raw_count == 4
    assert r9.weighted_count == pytest.approx(3 * l2**2 * l5 + l3**3, rel=1e-12)
    with pytest.raises(EvenInput):
        classical_R(10)


def test_classical_matches_brute_force_to_2001():
    odd = list(range(7, 2002, 2))
    reps = classical_R_many(odd)
    for N0, rep in zip(odd, reps):
        raw, w = classical_R_brute(N0) if N0 % 50 == 1 or N0 < 200 else (None, None)
        if raw is None:
            continue
        assert rep.raw_count == raw
        assert rep.weighted_count == pytest.approx(w, rel=1e-9)


def test_classical_exact_counts_all_odd_to_2001():
    # integer pair-count oracle: r2(n) by direct counting, summed over the third prime
    N = 2001
    ps = sieve_primes(2, N + 1).primes(2, N + 1)
    ind = np.zeros(N + 1, dtype=np.int64)
    ind[ps] = 1
    r2 = np.convolve(ind, ind)[: N + 1]
    odd = list(range(7, N + 1, 2))
    for N0, rep in zip(odd, classical_R_many(odd)):
        p3 = ps[ps <= N0 - 4]
        assert rep.raw_count == int(r2[N0 - p3].sum())


def test_classical_ratio_near_one():
    rep = classical_R(100_001)
    assert 0.9 < rep.ratio < 1.1
    assert rep.ratio == rep.weighted_count / rep.main_term


def test_mixed_agrees_with_mean_value(table):
    for N0 in (2001, 20_011, 20_107, 200_011):
        cfg = FamilyConfig.from_N0(N0)
        sup = mixed_supports(cfg, table)
        rep = mixed_representation(N0, cfg, table, sup)
        assert rep.weighted_count == mean_value(*sup, N0)
        assert rep.raw_count >= 0
    rep = mixed_representation(20_011, FamilyConfig.from_N0(20_011), table)
    assert rep.raw_count > 0 and rep.weighted_count > 0


def test_mixed_empty_window(table):
    # at k = 3 the window is the single integer 490
    rep = mixed_representation(2001, FamilyConfig.from_N0(2001), table)
    assert rep.raw_count == 0 and rep.weighted_count == 0
    with pytest.raises(EvenInput):
        mixed_representation(2000, FamilyConfig.from_N0(2001), table)


def test_mixed_brute_force(table):
    N0 = 20_107
    cfg = FamilyConfig.from_N0(N0)
    E, c0, Q = mixed_supports(cfg, table)
    raw = sum(1 for p3 in Q.n.tolist() for p2 in c0.n.tolist() if N0 - p2 - p3 in set(E.n.tolist()))
    assert mixed_representation(N0, cfg, table).raw_count == raw


def test_volume_overlap():
    N0, X = 40_001, 10_000
    a, b = N0 / 2 - X / 4, N0 / 2 - X / 8
    assert volume_overlap(N0, X, N0 - (a + b)) == pytest.approx(X / 8)
    assert volume_overlap(N0, X, 0) == 0
    assert volume_overlap(N0, X, N0) == 0
    ys = np.linspace(N0 - 2 * b - 10, N0 - 2 * a + 10, 400_001)
    vals = np.array([volume_overlap(N0, X, y) for y in ys])
    assert np.trapezoid(vals, ys) == pytest.approx((X / 8) ** 2, rel=1e-6)


def test_polytope_membership_and_empty():
    R = Polytope(2, (((1.0, 1.0), -0.5), ((-1.0, -1.0), 0.8)))
    assert R.contains([0.3, 0.3]).all()
    assert not R.contains([0.1, 0.1]).any()
    assert not R.is_empty()
    E = Polytope(1, (((1.0,), -0.7), ((-1.0,), 0.2)))
    assert E.is_empty()
    with pytest.raises(EmptyPolytope):
        gamma_estimate(40_001, 10**4, E, 100)


def test_gamma_tiny_box():
    N0, X = 40_001, 10**4
    u0, h = 0.45, 1e-4
    R = Polytope.box([u0, u0], [u0 + h, u0 + h])
    val, err = gamma_estimate(N0, X, R, 20_000, seed=1)
    y = X ** (2 * u0 + h)
    expect = volume_overlap(N0, X, y) * y * math.log(X) * h * h
    assert val == pytest.approx(expect, rel=0.05)
    assert val >= 0


def test_gamma_stderr_scaling():
    R = Polytope(2, (((1.0, 1.0), -0.85), ((-1.0, -1.0), 0.99)))
    _, e1 = gamma_estimate(40_001, 10**4, R, 20_000, seed=2)
    _, e2 = gamma_estimate(40_001, 10**4, R, 80_000, seed=3)
    assert e2 / e1 == pytest.approx(0.5, rel=0.15)


def test_prop43_closed_form():
    # literal argument 1 - u lies in [1/2, 3/4], outside omega's [1, inf) domain; the closed form uses 1/t
    R = Polytope.box([0.25], [0.5])
    val, err = prop43_rhs(R, lambda u: np.full(len(u), 0.25), 1.0, lambda t: 1.0 / t, 200_000, seed=4)
    assert abs(val - 4 * math.log(3)) < 3 * err
    v2, _ = prop43_rhs(R, lambda u: np.full(len(u), 0.25), 2.5, lambda t: 1.0 / t, 200_000, seed=4)
    assert v2 == pytest.approx(2.5 * val)


def test_prop43_table_and_errors():
    om = buchstab_omega(3.0, 1e-3)
    R = Polytope.box([0.1, 0.1], [0.3, 0.3])
    # 1 - u1 - u2 < 1 on any region away from 0, below the table's range
    with pytest.raises(ValueError):
        prop43_rhs(R, lambda u: np.ones(len(u)), 1.0, om, 5000)
    val, _ = prop43_rhs(R, lambda u: np.ones(len(u)), 1.0, lambda t: om(1 + t), 5000)
    assert val > 0
    with pytest.raises(SingularRegion):
        prop43_rhs(Polytope.box([0.0], [0.5]), lambda u: np.ones(len(u)), 1.0, om, 100)
    empty = Polytope(1, (((1.0,), -0.7), ((-1.0,), 0.2)))
    assert prop43_rhs(empty, lambda u: np.ones(len(u)), 1.0, om, 100) == (0.0, 0.0)

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from goldbachlab.families import (
    GAMMA_STAR,
    FamilyConfig,
    Interval,
    TooSmall,
    WindowTooShort,
    choose_X,
    construct_window,
    digit_member,
    digit_set,
    digits_avoid,
    interval_Int,
    interval_Int_alt,
    kappa_A,
    ps_member,
    ps_primes_in,
    ps_values,
    quadratic_primes_in,
)
from goldbachlab.primes import is_prime_scalar, sieve_primes


@pytest.fixture(scope="module")
def table():
    return sieve_primes(2, 2 * 10**6)


def test_choose_X():
    assert choose_X(4 * 10**6) == (6, 10**6)
    assert choose_X(21) == (1, 10)
    assert choose_X(19_000) == (3, 10**3)
    with pytest.raises(TooSmall):
        choose_X(19)


@given(st.integers(20, 10**12))
def test_choose_X_property(N0):
    k, X = choose_X(N0)
    assert X == 10**k and 2 * X <= N0 < 20 * X


def test_interval_Int():
    iv = interval_Int(4 * 10**6, 10**6)
    assert (iv.lo, iv.hi) == (1_750_000, 1_875_000)
    assert iv.length == Fraction(10**6, 8)
    small = interval_Int(21, 10)
    assert (small.lo, small.hi) == (8, Fraction(37, 4))
    assert small.integers().tolist() == [9]
    assert 8 not in small and Fraction(37, 4) in small
    alt = interval_Int_alt(4 * 10**6, 10**6)
    assert (alt.lo, alt.hi) == (375_000, 750_000)


def test_config_validation():
    cfg = FamilyConfig(a0=7, c0=1.05, k=6, N0=4 * 10**6 + 1)
    assert cfg.X == 10**6 and cfg.gamma0 == pytest.approx(1 / 1.05)
    assert 9 * (1 - cfg.gamma0) + 12 * cfg.delta0 < 1
    assert cfg.D == pytest.approx(72.38, abs=0.01)
    assert GAMMA_STAR == pytest.approx(0.919, abs=1e-3)
    for bad in (
        dict(a0=10, c0=1.05, k=6, N0=4 * 10**6 + 1),
        dict(a0=7, c0=1.2, k=6, N0=4 * 10**6 + 1),
        dict(a0=7, c0=1.05, k=6, N0=4 * 10**6),
        dict(a0=7, c0=1.05, k=5, N0=4 * 10**6 + 1),
        dict(a0=7, c0=1.05, k=6, N0=4 * 10**6 + 1, delta0=0.1),
        dict(a0=7, c0=1.05, k=6, N0=4 * 10**6 + 1, H=7),
    ):
        with pytest.raises(ValueError):
            FamilyConfig(**bad)
    assert FamilyConfig.from_N0(200_001).k == 5


def test_ps_member_examples():
    assert ps_member(2, 1.05) and ps_member(11, 1.05)
    assert all(ps_member(p, 1) for p in (2, 3, 97))


def test_ps_member_matches_forward_map():
    image = set(ps_values(1, 10**5, 1.05).tolist())
    top = int(ps_values(10**5 - 1, 10**5, 1.05)[0])
    got = [ps_member(p, 1.05) for p in range(2, top)]
    want = [p in image for p in range(2, top)]
    assert got == want


def test_ps_values_exact_rational():
    # 4**(3/2) = 8 exactly; floats near integer powers must resolve correctly
    vals = ps_values(1, 50, Fraction(3, 2))
    assert vals.tolist() == [math.isqrt(n**3) for n in range(1, 50)]


def test_ps_primes_in(table):
    iv = Interval(Fraction(1_750_000), Fraction(1_875_000))
    assert np.array_equal(ps_primes_in(iv, 1, table), table.primes(1_750_001, 1_875_001))
    ps = ps_primes_in(iv, 1.05, table)
    g = 1 / 1.05
    allp = table.primes(1_750_001, 1_875_001).astype(float)
    expected = np.sum(g * allp ** (g - 1))
    assert 0.7 <= ps.size / expected <= 1.0
    assert all(ps_member(int(p), 1.05) and is_prime_scalar(int(p)) for p in ps[:200])
    assert ps_primes_in(Interval(Fraction(10), Fraction(10)), 1.05, table).size == 0


def test_ps_primes_small_oracle(table):
    iv = Interval(Fraction(1), Fraction(10**5))
    image = set(int(math.floor(n**1.05)) for n in range(1, 10**5))
    want = [p for p in table.primes(2, 10**5 + 1).tolist() if p in image]
    assert ps_primes_in(iv, 1.05, table).tolist() == want


def test_quadratic_primes(table):
    ps, r = quadratic_primes_in(Interval(Fraction(0), Fraction(10)), table)
    got = dict(zip(ps.tolist(), r.tolist()))
    assert got[5] == 4 and got[3] == 4 and 7 not in got
    lo, hi = 0, 3000
    ps, r = quadratic_primes_in(Interval(Fraction(lo), Fraction(hi)), table)
    lattice = {}
    for p in table.primes(2, hi + 1).tolist():
        m = math.isqrt(p - 1)
        lattice[p] = sum(1 for x in range(-m, m + 1) for y in range(-m, m + 1) if x * x + y * y == p - 1)
    assert dict(zip(ps.tolist(), r.tolist())) == {p: v for p, v in lattice.items() if v > 0}
    distinct = quadratic_primes_in(Interval(Fraction(lo), Fraction(hi)), table, distinct=True)
    assert np.array_equal(distinct, ps)


def test_digit_member_examples():
    assert digit_member(1234, FamilyConfig(a0=9, c0=1, k=4, N0=20_001))
    assert not digit_member(105, FamilyConfig(a0=0, c0=1, k=3, N0=2_001))
    assert len(digit_set(2, 7)) == 81
    with pytest.raises(ValueError):
        digit_member(10**4, FamilyConfig(a0=9, c0=1, k=4, N0=20_001))


@given(st.integers(0, 10**6 - 1), st.integers(0, 9))
def test_digit_member_string_scan(n, a0):
    assert digits_avoid(n, 6, a0) == (str(a0) not in f"{n:06d}")


@pytest.mark.parametrize("k", range(1, 7))
def test_digit_set_size(k):
    for a0 in (0, 7):
        A = digit_set(k, a0)
        assert A.size == 9**k and A.max() < 10**k
        assert np.all(digits_avoid(A, k, a0))
        assert np.unique(A).size == A.size


def test_kappa_A_matches_coprime_density():
    assert kappa_A(7) == Fraction(5, 6) and kappa_A(0) == Fraction(10, 9)
    # fraction of A coprime to 10 equals phi(10)/10 * kappa_A when a0 is coprime to 10
    A = digit_set(6, 7)
    frac = Fraction(int(np.sum((A % 2 != 0) & (A % 5 != 0))), A.size)
    assert frac == Fraction(4, 10) * kappa_A(7)


def test_window_examples():
    w = construct_window(FamilyConfig(a0=7, c0=1.05, k=6, N0=2 * 10**6 + 1))
    assert w.n_star == 490_000 and abs(w.n_star - 5 * 10**5) == 10**4
    w = construct_window(FamilyConfig(a0=4, c0=1.05, k=6, N0=2 * 10**6 + 1))
    assert w.n_star == 509_000
    with pytest.raises(WindowTooShort):
        construct_window(FamilyConfig(a0=7, c0=1.05, k=6, N0=2 * 10**6 + 1, H=2))


@pytest.mark.parametrize("a0", range(10))
@pytest.mark.parametrize("k", range(3, 10))
def test_window_invariants(a0, k):
    for H in range(3, k + 1):
        w = construct_window(FamilyConfig(a0=a0, c0=1.05, k=k, N0=2 * 10**k + 1, H=H))
        assert 2 * abs(w.n_star - 5 * 10 ** (k - 1)) <= 3 * 10 ** (k - 2)
        assert w.size == 9 ** (k - H)
        if k - H <= 4:
            n2 = np.arange(10 ** (k - H))
            ok = digits_avoid(n2, k - H, a0)
            assert np.all(digits_avoid(w.n_star + n2[ok], k, a0))

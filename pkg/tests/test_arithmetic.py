import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goldbachlab.arithmetic import (
    EULER_GAMMA,
    EvenInput,
    NeedsFactorization,
    StepTooCoarse,
    buchstab_omega,
    chi4,
    divisor_chi_sum,
    divisor_chi_sum_range,
    euler_phi,
    factorize,
    mobius,
    r_two_squares,
    ramanujan_like_sum,
    singular_series,
    singular_series_star,
)


def brute_r(n):
    m = math.isqrt(n)
    return sum(1 for x in range(-m, m + 1) for y in range(-m, m + 1) if x * x + y * y == n)


def test_chi4_examples():
    assert (chi4(1), chi4(2), chi4(7)) == (1, 0, -1)


@given(st.integers(1, 10**4), st.integers(1, 10**4))
def test_chi4_completely_multiplicative(m, n):
    assert chi4(m * n) == chi4(m) * chi4(n)


def test_r_examples():
    assert r_two_squares(1) == 4
    assert r_two_squares(3) == 0
    assert r_two_squares(25) == 12
    assert [divisor_chi_sum(n) for n in (5, 9, 2)] == [2, 1, 1]


@given(st.integers(1, 3000))
def test_r_matches_lattice(n):
    assert r_two_squares(n) == brute_r(n)


@given(st.integers(1, 10**4), st.integers(1, 10**4))
def test_divisor_chi_sum_multiplicative(m, n):
    if math.gcd(m, n) == 1:
        assert divisor_chi_sum(m * n) == divisor_chi_sum(m) * divisor_chi_sum(n)


def test_divisor_chi_sum_range_matches_scalar():
    vals = divisor_chi_sum_range(1, 3000)
    assert vals.tolist() == [divisor_chi_sum(n) for n in range(1, 3000)]
    vals = divisor_chi_sum_range(10**6, 10**6 + 500)
    assert vals.tolist() == [divisor_chi_sum(n) for n in range(10**6, 10**6 + 500)]


def test_factorize_bound():
    assert factorize(2**5 * 3 * 7**2) == {2: 5, 3: 1, 7: 2}
    with pytest.raises(NeedsFactorization):
        factorize(10**15 + 37, bound=10**3)
    # caller-supplied factors bypass the bound
    assert divisor_chi_sum(5**3, factors={5: 3}) == 4


def test_mobius_phi():
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert [euler_phi(n) for n in (1, 10, 36, 97)] == [1, 4, 12, 96]


def test_ramanujan_like_examples():
    assert ramanujan_like_sum(1, 1, 1, 0) == pytest.approx(1)
    assert ramanujan_like_sum(1, 2, 1, 0) == pytest.approx(-1)
    assert abs(ramanujan_like_sum(1, 4, 2, 1)) < 1e-12
    with pytest.raises(ValueError):
        ramanujan_like_sum(2, 4, 1, 0)


@pytest.mark.parametrize("q", range(1, 201))
def test_ramanujan_reduces_to_mobius(q):
    for c in (1, q - 1 if q > 1 else 1):
        if math.gcd(c, q) != 1:
            continue
        direct = sum(cmath.exp(2j * math.pi * c * s / q) for s in range(1, q + 1) if math.gcd(s, q) == 1)
        got = ramanujan_like_sum(c, q, 1, 5)
        assert abs(got - direct) < 1e-9
        if mobius(q) != 0 or all(e == 1 for e in factorize(q).values()):
            assert got.real == pytest.approx(mobius(q), abs=1e-9)


def test_singular_series_values():
    s3 = singular_series(3, 10**6)
    # frozen from an independent product over a plain prime list
    assert s3.value == pytest.approx(1.5339743631421043, rel=1e-12)
    assert singular_series(9, 10**6).value == s3.value
    assert s3.truncation_bound < 1e-11
    with pytest.raises(EvenInput):
        singular_series(10)


def test_singular_series_oracle_ordering():
    from goldbachlab.primes import simple_sieve

    N0 = 5
    prod = 1.0
    for p in reversed(simple_sieve(10**5).tolist()):
        prod *= (1 - 1 / (p - 1) ** 2) if N0 % p == 0 else (1 + 1 / (p - 1) ** 3)
    assert singular_series(N0, 10**5).value == pytest.approx(prod, rel=1e-12)


def test_singular_series_star_values():
    from goldbachlab.primes import simple_sieve

    N0 = 5
    ss = singular_series_star(N0, 10**6)
    assert ss.value == pytest.approx(6.85630717200626, rel=1e-10)
    prod = math.pi * singular_series(N0, 10**6).value
    for p in reversed(simple_sieve(10**6).tolist()):
        x = chi4(p)
        if N0 % p == 0:
            prod *= 1 + x / (p * (p - 1))
        elif (N0 - 1) % p == 0:
            prod *= 1 + x * (2 * p - 3) / (p * (p * p - 3 * p + 3))
        else:
            prod *= 1 + x * (p - 3) / (p * (p * p - 3 * p + 3))
    assert ss.value == pytest.approx(prod, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5 * 10**5))
def test_singular_series_star_ratio_band(h):
    N0 = 2 * h + 1
    r = singular_series_star(N0, 10**4).value / (math.pi * singular_series(N0, 10**4).value)
    assert 0.5 < r < 2.0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5 * 10**5))
def test_euler_product_stability(h):
    N0 = 2 * h + 1
    a = singular_series(N0, 10**4).value
    b = singular_series(N0, 2 * 10**4).value
    assert abs(b / a - 1) < 1e-7


def test_buchstab_closed_forms():
    tab = buchstab_omega(20, 1e-4)
    u = np.linspace(2, 3, 1001)
    err = np.max(np.abs(tab(u) - (1 + np.log(u - 1)) / u))
    assert err < 10 * 1e-4
    assert tab(1.5) == pytest.approx(2 / 3, abs=1e-15)
    assert tab(2.5) == pytest.approx((1 + math.log(1.5)) / 2.5, abs=1e-12)
    assert abs(tab(10) - math.exp(-EULER_GAMMA)) < 1e-4
    assert abs(tab(20) - math.exp(-EULER_GAMMA)) < 1e-10
    assert tab.values.min() >= 0.5 and tab.values.max() <= 1.0


def test_buchstab_three_to_four_quadrature():
    # on [3,4]: u*omega(u) = 3*omega(3) + int_2^{u-1} omega(t) dt, omega known on [2,3]
    from scipy.integrate import quad

    tab = buchstab_omega(5, 1e-4)
    for u in (3.25, 3.5, 3.9):
        val, _ = quad(lambda t: (1 + math.log(t - 1)) / t, 2, u - 1)
        assert tab(u) == pytest.approx((1 + math.log(2) + val) / u, abs=1e-12)


def test_buchstab_errors():
    with pytest.raises(StepTooCoarse):
        buchstab_omega(5, 1e-2)
    tab = buchstab_omega(3, 1e-3)
    with pytest.raises(ValueError):
        tab(3.5)

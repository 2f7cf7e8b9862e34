"""Multiplicative functions, the character mod 4, singular series, Buchstab's omega.

Conventions: ``e(x) = exp(2*pi*i*x)``; ``r_two_squares`` counts signed ordered
pairs, so ``r(n) = 4 * divisor_chi_sum(n)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .primes import small_primes

__all__ = [
    "NeedsFactorization",
    "EvenInput",
    "StepTooCoarse",
    "DEFAULT_FACTOR_BOUND",
    "chi4",
    "chi4_array",
    "factorize",
    "mobius",
    "euler_phi",
    "r_two_squares",
    "divisor_chi_sum",
    "divisor_chi_sum_range",
    "rough_mask",
    "ramanujan_like_sum",
    "SingularSeriesValue",
    "singular_series",
    "singular_series_star",
    "BuchstabTable",
    "buchstab_omega",
    "EULER_GAMMA",
]

#: Trial division uses sieved primes up to this bound, so inputs up to its
#: square factor completely.
DEFAULT_FACTOR_BOUND = 10**7

EULER_GAMMA = 0.57721566490153286061


class NeedsFactorization(ValueError):
    """Input too large for trial division; pass ``factors=`` explicitly."""


class EvenInput(ValueError):
    """The singular series vanishes for even arguments; refuse to compute it."""


class StepTooCoarse(ValueError):
    pass


def chi4(n: int) -> int:
    """The non-principal character mod 4."""
    if n % 2 == 0:
        return 0
    return 1 if n % 4 == 1 else -1


def chi4_array(n) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    out = np.zeros(n.shape, dtype=np.int64)
    r = n % 4
    out[r == 1] = 1
    out[r == 3] = -1
    return out


def factorize(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> dict[int, int]:
    """Prime factorisation ``{p: e}`` of ``n >= 1`` by trial division.

    Raises :class:`NeedsFactorization` if ``n > bound**2``.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if n > bound * bound:
        raise NeedsFactorization(f"{n} exceeds factorisation bound {bound}**2")
    out: dict[int, int] = {}
    if n == 1:
        return out
    ps = small_primes(math.isqrt(n))
    for p in ps[n % ps == 0].tolist():
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out[p] = e
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _factors(n: int, factors: dict[int, int] | None) -> dict[int, int]:
    if factors is None:
        return factorize(n)
    if math.prod(p**e for p, e in factors.items()) != n:
        raise ValueError("supplied factors do not multiply to n")
    return factors


def mobius(n: int, factors: dict[int, int] | None = None) -> int:
    f = _factors(n, factors)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int, factors: dict[int, int] | None = None) -> int:
    out = n
    for p in _factors(n, factors):
        out = out // p * (p - 1)
    return out


def _local_chi_sum(p: int, e: int) -> int:
    # sum of chi(p^j) for j = 0..e
    if p == 2:
        return 1
    if p % 4 == 1:
        return e + 1
    return 1 - e % 2


def divisor_chi_sum(n: int, factors: dict[int, int] | None = None) -> int:
    """``sum_{d | n} chi4(d)``, from the factorisation of ``n``."""
    out = 1
    for p, e in _factors(n, factors).items():
        out *= _local_chi_sum(p, e)
        if out == 0:
            break
    return out


def r_two_squares(n: int, factors: dict[int, int] | None = None) -> int:
    """Number of ``(x, y)`` in Z^2 with ``x^2 + y^2 = n`` (signs and order counted)."""
    return 4 * divisor_chi_sum(n, factors)


def divisor_chi_sum_range(lo: int, hi: int) -> np.ndarray:
    """``divisor_chi_sum(n)`` for every ``n`` in ``[lo, hi)``, ``lo >= 1``, vectorised."""
    if lo < 1:
        raise ValueError("lo must be >= 1")
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    rem = np.arange(lo, hi, dtype=np.int64)
    out = np.ones(hi - lo, dtype=np.int64)
    for p in small_primes(math.isqrt(hi - 1)).tolist():
        start = (-lo) % p
        idx = np.arange(start, hi - lo, p)
        if idx.size == 0:
            continue
        exps = np.zeros(idx.size, dtype=np.int64)
        live = np.arange(idx.size)
        while live.size:
            rem[idx[live]] //= p
            exps[live] += 1
            live = live[rem[idx[live]] % p == 0]
        if p % 4 == 1:
            out[idx] *= exps + 1
        elif p % 4 == 3:
            out[idx] *= 1 - exps % 2
    # leftover cofactor is 1 or a single prime above sqrt(hi)
    big = rem > 1
    out[big & (rem % 4 == 1)] *= 2
    out[big & (rem % 4 == 3)] = 0
    return out


def rough_mask(n, z: float, exclude: tuple[int, ...] = ()) -> np.ndarray:
    """True where ``n`` has no prime factor ``p <= z`` outside ``exclude``.

    ``n = 0`` is divisible by every prime, so it is rough only when no prime
    qualifies (``z < 2`` or every prime up to ``z`` is excluded).
    """
    arr = np.asarray(n, dtype=np.int64)
    out = np.ones(arr.shape, dtype=bool)
    ps = [p for p in small_primes(int(math.floor(z))).tolist() if p not in exclude]
    for p in ps:
        out &= arr % p != 0
    return out


def ramanujan_like_sum(c: int, q: int, d: int, l: int) -> complex:
    """``sum e(c*s/q)`` over ``1 <= s <= q``, ``gcd(s, q) = 1``, ``s = l mod gcd(q, d)``."""
    if q < 1 or d < 1:
        raise ValueError("q and d must be positive")
    if math.gcd(c, q) != 1:
        raise ValueError("need gcd(c, q) = 1")
    g = math.gcd(q, d)
    re, im = [], []
    for s in range(1, q + 1):
        if math.gcd(s, q) == 1 and (s - l) % g == 0:
            z = cmath.exp(2j * math.pi * ((c * s) % q) / q)
            re.append(z.real)
            im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im))


@dataclass(frozen=True)
class SingularSeriesValue:
    value: float
    cutoff: int
    #: tail factor over primes above ``cutoff`` lies in ``[1 - b, 1 + b]``
    truncation_bound: float


def _check_odd(N0: int, cutoff: int) -> None:
    if N0 % 2 == 0:
        raise EvenInput(f"singular series of even N0={N0} is 0 by convention")
    if N0 < 3 or cutoff < 3:
        raise ValueError("need N0 >= 3 and cutoff >= 3")


def _divides(N: int, ps: np.ndarray) -> np.ndarray:
    if N < 2**62:
        return N % ps == 0
    return np.array([N % p == 0 for p in ps.tolist()], dtype=bool)


def _euler_log_terms(N0: int, ps: np.ndarray) -> np.ndarray:
    pm1 = (ps - 1).astype(float)
    with np.errstate(divide="ignore"):
        return np.where(_divides(N0, ps), np.log1p(-1.0 / pm1**2), np.log1p(1.0 / pm1**3))


def _tail_bound(N0: int, cutoff: int) -> float:
    upper = math.expm1(1.0 / (2.0 * (cutoff - 1) ** 2))
    n_big = int(math.log(N0) / math.log(cutoff)) if N0 > cutoff else 0
    lower = -math.expm1(n_big * math.log1p(-1.0 / cutoff**2))
    return max(upper, lower)


def singular_series(N0: int, cutoff: int = 10**6) -> SingularSeriesValue:
    """Euler product for the ternary singular series, truncated at primes ``<= cutoff``."""
    _check_odd(N0, cutoff)
    ps = small_primes(cutoff)
    logv = math.fsum(_euler_log_terms(N0, ps).tolist())
    return SingularSeriesValue(math.exp(logv), cutoff, _tail_bound(N0, cutoff))


def _twist_log_terms(N0: int, ps: np.ndarray) -> np.ndarray:
    p = ps.astype(float)
    chi = chi4_array(ps).astype(float)
    cubic = p * (p * p - 3 * p + 3)
    div_n = _divides(N0, ps)
    div_n1 = _divides(N0 - 1, ps)
    term = np.where(
        div_n,
        chi / (p * (p - 1)),
        np.where(div_n1, chi * (2 * p - 3) / cubic, chi * (p - 3) / cubic),
    )
    return np.log1p(term)


def singular_series_star(N0: int, cutoff: int = 10**6) -> SingularSeriesValue:
    """``pi * S(N0)`` times the three chi-twisted local products, truncated at ``cutoff``."""
    _check_odd(N0, cutoff)
    ps = small_primes(cutoff)
    logs = np.concatenate([_euler_log_terms(N0, ps), _twist_log_terms(N0, ps)])
    value = math.pi * math.exp(math.fsum(logs.tolist()))
    # every twisted factor is within 2/p^2 of 1
    twist_tail = math.expm1(2.0 / (cutoff - 1))
    bound = (1 + _tail_bound(N0, cutoff)) * (1 + twist_tail) - 1
    return SingularSeriesValue(value, cutoff, bound)


@dataclass(frozen=True)
class BuchstabTable:
    """Buchstab's omega on the uniform grid ``1, 1 + step, ..., u_max``."""

    u_max: float
    step: float
    values: np.ndarray = field(repr=False)

    @property
    def grid(self) -> np.ndarray:
        return 1.0 + self.step * np.arange(self.values.size)

    def __call__(self, u):
        u_arr = np.asarray(u, dtype=float)
        if u_arr.size and (u_arr.min() < 1.0 or u_arr.max() > self.u_max + 1e-12):
            raise ValueError(f"omega table covers [1, {self.u_max}]")
        out = np.interp(u_arr, self.grid, self.values)
        exact = u_arr <= 2.0
        out = np.where(exact, 1.0 / np.where(exact, u_arr, 1.0), out)
        return float(out) if out.ndim == 0 else out


def _cubic_midpoints(seg: np.ndarray) -> np.ndarray:
    """Values halfway between consecutive samples of ``seg`` (cubic Lagrange, stencil kept inside)."""
    n = seg.size - 1
    # interior: centred 4-point rule
    mids = np.empty(n)
    if n >= 3:
        mids[1:-1] = (-seg[:-3] + 9 * seg[1:-2] + 9 * seg[2:-1] - seg[3:]) / 16
    # ends: one-sided 4-point rules
    mids[0] = (5 * seg[0] + 15 * seg[1] - 5 * seg[2] + seg[3]) / 16
    mids[-1] = (seg[-4] - 5 * seg[-3] + 15 * seg[-2] + 5 * seg[-1]) / 16
    return mids


def buchstab_omega(u_max: float, step: float = 1e-4) -> BuchstabTable:
    """Buchstab's omega from ``(u*omega(u))' = omega(u - 1)`` and ``omega = 1/u`` on ``[1, 2]``.

    Classical RK4 for ``v = u*omega`` on a grid aligned with the integers (the
    step is shrunk to ``1/ceil(1/step)``).  The right-hand side only involves
    the previous unit segment, which is final by then; its half-step values are
    cubic interpolants whose stencil never straddles an integer, where omega
    loses smoothness.
    """
    if step > 1e-3:
        raise StepTooCoarse(f"step {step} > 1e-3")
    if step <= 0 or u_max < 2:
        raise ValueError("need step > 0 and u_max >= 2")
    per_unit = math.ceil(1.0 / step - 1e-9)
    h = 1.0 / per_unit
    n_units = math.ceil(u_max - 1 - 1e-12)
    values = np.empty(n_units * per_unit + 1)
    values[: per_unit + 1] = 1.0 / (1.0 + h * np.arange(per_unit + 1))
    local = np.arange(1, per_unit + 1)
    for m in range(1, n_units):
        prev = values[(m - 1) * per_unit : m * per_unit + 1]
        if m == 1:
            mids = 1.0 / (1.0 + h * (np.arange(per_unit) + 0.5))
        else:
            mids = _cubic_midpoints(prev)
        # RK4 stages for v' = f(u) collapse to a Simpson increment
        incr = h / 6 * (prev[:-1] + 4 * mids + prev[1:])
        u0 = 1.0 + m
        v = u0 * values[m * per_unit] + np.cumsum(incr)
        values[m * per_unit + 1 : (m + 1) * per_unit + 1] = v / (u0 + h * local)
    n_keep = int(round((u_max - 1) * per_unit)) + 1
    return BuchstabTable(1.0 + (n_keep - 1) * h, h, values[:n_keep].copy())

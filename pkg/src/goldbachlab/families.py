"""The three special prime families and the digit-restricted sets.

* missing-digit integers: no base-10 digit (``k`` digits, leading zeros
  allowed) equals ``a0``;
* Piatetski-Shapiro primes ``p = floor(n**c0)``;
* primes ``p = x**2 + y**2 + 1``, weighted by ``r(p - 1)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .arithmetic import divisor_chi_sum_range
from .primes import PrimeTable

__all__ = [
    "GAMMA_STAR",
    "FamilyConfig",
    "Interval",
    "ShortIntervalWindow",
    "TooSmall",
    "WindowTooShort",
    "BoundaryWarning",
    "choose_X",
    "interval_Int",
    "interval_Int_alt",
    "kappa_A",
    "digits_avoid",
    "digit_member",
    "digit_set",
    "construct_window",
    "ps_member",
    "ps_values",
    "ps_primes_in",
    "quadratic_primes_in",
]

GAMMA_STAR = 8 / 9 + (2 / 3) * math.log(10 / 9) / math.log(10)


class TooSmall(ValueError):
    pass


class WindowTooShort(ValueError):
    pass


class BoundaryWarning(UserWarning):
    """``n**c0`` sits within the guard band of an integer; the floor is not certain."""


def choose_X(N0: int) -> tuple[int, int]:
    """The unique ``(k, X = 10**k)`` with ``2X <= N0 < 20X``."""
    if N0 < 20:
        raise TooSmall(f"N0={N0} < 20")
    k = len(str(N0 // 2)) - 1
    return k, 10**k


@dataclass(frozen=True)
class Interval:
    """Interval with exact rational endpoints and per-end closedness."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = False
    hi_closed: bool = True

    def __contains__(self, x) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def integer_range(self) -> tuple[int, int]:
        """``(first, stop)`` so the integers inside are ``range(first, stop)``."""
        first = math.ceil(self.lo) if self.lo_closed else math.floor(self.lo) + 1
        last = math.floor(self.hi) if self.hi_closed else math.ceil(self.hi) - 1
        return first, max(first, last + 1)

    def integers(self) -> np.ndarray:
        return np.arange(*self.integer_range(), dtype=np.int64)


def interval_Int(N0: int, X: int) -> Interval:
    """``(N0/2 - X/4, N0/2 - X/8]``, the range of the second and third primes."""
    half = Fraction(N0, 2)
    return Interval(half - Fraction(X, 4), half - Fraction(X, 8), False, True)


def interval_Int_alt(N0: int, X: int) -> Interval:
    """The alternative range ``[N0/8 - X/8, N0/4 - X/4]`` stated alongside the volume constants."""
    return Interval(Fraction(N0, 8) - Fraction(X, 8), Fraction(N0, 4) - Fraction(X, 4), True, True)


def kappa_A(a0: int) -> Fraction:
    """Density correction of the digit set among integers coprime to 10."""
    if math.gcd(10, a0) == 1:
        phi10 = 4
        return Fraction(10 * (phi10 - 1), 9 * phi10)
    return Fraction(10, 9)


@dataclass(frozen=True)
class FamilyConfig:
    a0: int
    c0: float | Fraction
    k: int
    N0: int
    C0: float = 1.0
    delta0: float | None = None
    H: int | None = None

    def __post_init__(self):
        if not 0 <= self.a0 <= 9:
            raise ValueError("a0 must be a digit")
        if not 1 <= self.c0 < 1 / GAMMA_STAR:
            raise ValueError(f"c0 must lie in [1, 1/gamma*) = [1, {1 / GAMMA_STAR:.6f})")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.N0 % 2 == 0:
            raise ValueError("N0 must be odd")
        if not 2 * self.X <= self.N0 < 20 * self.X:
            raise ValueError(f"need 2X <= N0 < 20X with X=10^{self.k}")
        if self.C0 <= 0:
            raise ValueError("C0 must be positive")
        if self.delta0 is None:
            # half of the admissible range
            object.__setattr__(self, "delta0", (1 - 9 * (1 - self.gamma0)) / 24)
        if not (self.delta0 > 0 and 9 * (1 - self.gamma0) + 12 * self.delta0 < 1):
            raise ValueError("need delta0 > 0 and 9(1 - gamma0) + 12 delta0 < 1")
        if self.H is None:
            object.__setattr__(self, "H", min(3, self.k))
        if not 1 <= self.H <= self.k:
            raise ValueError("need 1 <= H <= k")

    @classmethod
    def from_N0(cls, N0: int, **kw) -> "FamilyConfig":
        k, _ = choose_X(N0)
        kw.setdefault("a0", 7)
        kw.setdefault("c0", 1.05)
        return cls(k=k, N0=N0, **kw)

    @property
    def X(self) -> int:
        return 10**self.k

    @property
    def gamma0(self) -> float:
        return 1 / float(self.c0)

    @property
    def kappa_A(self) -> Fraction:
        return kappa_A(self.a0)

    @property
    def size_A(self) -> int:
        return 9**self.k

    @property
    def D(self) -> float:
        """Divisor split point ``X^(1/2) (log X)^(-C0)``."""
        return math.sqrt(self.X) * math.log(self.X) ** (-self.C0)

    def Int(self) -> Interval:
        return interval_Int(self.N0, self.X)


# -- missing-digit sets -------------------------------------------------------


def digits_avoid(n, k: int, a0: int):
    """Vectorised test that none of the ``k`` low digits of ``n`` equals ``a0``."""
    arr = np.asarray(n, dtype=np.int64)
    ok = np.ones(arr.shape, dtype=bool)
    rest = arr.copy()
    for _ in range(k):
        ok &= rest % 10 != a0
        rest //= 10
    return bool(ok) if ok.ndim == 0 else ok


def digit_member(n: int, cfg: FamilyConfig) -> bool:
    if not 0 <= n < cfg.X:
        raise ValueError(f"{n} out of range [0, 10^{cfg.k})")
    return digits_avoid(n, cfg.k, cfg.a0)


def digit_set(k: int, a0: int) -> np.ndarray:
    """All ``9**k`` members of ``[0, 10**k)`` avoiding digit ``a0``, sorted."""
    digits = np.array([d for d in range(10) if d != a0], dtype=np.int64)
    out = np.zeros(1, dtype=np.int64)
    for j in range(k):
        out = (out[None, :] + digits[:, None] * 10**j).ravel()
    return np.sort(out)


@dataclass(frozen=True)
class ShortIntervalWindow:
    n_star: int
    B_lo: int
    B_hi: int
    A_star: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.A_star.size)


def _window_prefix(a0: int, H: int) -> str:
    if a0 == 4:
        head = "509"
    elif a0 == 9:
        # both default prefixes "49" and "509" contain a 9
        head = "50"
    else:
        head = "49"
    pad = str(min(d for d in range(10) if d != a0))
    return head + pad * (H - len(head))


def construct_window(cfg: FamilyConfig) -> ShortIntervalWindow:
    """Anchor ``n*`` near ``X/2`` whose top ``H`` digits avoid ``a0``; window ``[n*, n* + 10^(k-H))``."""
    if cfg.H < 3:
        raise WindowTooShort("H >= 3 is needed to keep n* within 1.5*10^(k-2) of X/2")
    k, H, a0 = cfg.k, cfg.H, cfg.a0
    n_star = int(_window_prefix(a0, H)) * 10 ** (k - H)
    if 2 * abs(n_star - 5 * 10 ** (k - 1)) > 3 * 10 ** (k - 2):
        raise AssertionError("anchor violates |n* - 5*10^(k-1)| <= 1.5*10^(k-2)")
    width = 10 ** (k - H)
    B = np.arange(n_star, n_star + width, dtype=np.int64)
    in_A = digits_avoid(B, k, a0)
    A_star = B[in_A]
    # n* + n2 in A  =>  n2 in A (with k - H digits)
    n2 = B - n_star
    if np.any(in_A & ~digits_avoid(n2, k - H, a0)):
        raise AssertionError("window suffix property fails")
    return ShortIntervalWindow(n_star, n_star, n_star + width, A_star)


# -- Piatetski-Shapiro primes -------------------------------------------------


def _rational_c0(c0) -> Fraction | None:
    if isinstance(c0, Fraction):
        return c0
    f = Fraction(c0).limit_denominator(1000)
    return f if float(f) == float(c0) else None


def _exact_floor_pow(n: int, c: Fraction) -> int:
    """``floor(n**(u/v))`` as the largest ``m`` with ``m**v <= n**u``."""
    u, v = c.numerator, c.denominator
    target = n**u
    m = int(n ** (u / v))
    while m**v > target:
        m -= 1
    while (m + 1) ** v <= target:
        m += 1
    return m


_GUARD = mpmath.mpf(10) ** -18


def _mp_floor_pow(n: int, c0: float) -> int:
    with mpmath.workprec(128):
        val = mpmath.power(n, mpmath.mpf(c0))
        fl = int(mpmath.floor(val))
        if val - fl < _GUARD or fl + 1 - val < _GUARD:
            warnings.warn(f"floor({n}**{c0}) undecidable at 128-bit precision", BoundaryWarning)
        return fl


def _floor_pow(n: int, c0) -> int:
    c = _rational_c0(c0)
    if c is not None:
        return _exact_floor_pow(n, c)
    return _mp_floor_pow(n, c0)


def ps_values(n_lo: int, n_hi: int, c0) -> np.ndarray:
    """``floor(n**c0)`` for ``n`` in ``[n_lo, n_hi)``; float fast path, exact near integers."""
    n = np.arange(n_lo, n_hi, dtype=np.int64)
    if n.size == 0:
        return n
    v = n.astype(float) ** float(c0)
    out = np.floor(v).astype(np.int64)
    tol = 1e-12 * v + 1e-9
    frac = v - out
    risky = np.flatnonzero((frac < tol) | (1 - frac < tol))
    for i in risky.tolist():
        out[i] = _floor_pow(int(n[i]), c0)
    return out


def ps_member(p: int, c0) -> bool:
    """True iff ``p = floor(n**c0)`` for some positive integer ``n``."""
    if float(c0) == 1.0:
        return True
    guess = max(1, int(p ** (1 / float(c0))) - 1)
    for n in range(guess, guess + 4):
        fl = _floor_pow(n, c0)
        if fl == p:
            return True
        if fl > p:
            return False
    raise AssertionError("candidate search overshot")  # pragma: no cover


def ps_primes_in(interval: Interval, c0, table: PrimeTable) -> np.ndarray:
    """Piatetski-Shapiro primes inside ``interval``, ascending."""
    first, stop = interval.integer_range()
    if stop <= first:
        return np.zeros(0, dtype=np.int64)
    if float(c0) == 1.0:
        return table.primes(first, stop)
    g = 1 / float(c0)
    n_lo = max(1, int(first**g) - 2)
    n_hi = int((stop - 1) ** g) + 3
    vals = ps_values(n_lo, n_hi, c0)
    vals = vals[(vals >= first) & (vals < stop)]
    vals = np.unique(vals)
    return vals[table.is_prime(vals)] if vals.size else vals


# -- primes of the form x^2 + y^2 + 1 -----------------------------------------


def quadratic_primes_in(interval: Interval, table: PrimeTable, distinct: bool = False):
    """Primes ``p`` in ``interval`` with ``r(p - 1) > 0``.

    Returns ``(primes, r)`` with ``r[i] = r(primes[i] - 1)``, or just the primes
    when ``distinct`` is set.
    """
    first, stop = interval.integer_range()
    ps = table.primes(first, stop)
    if ps.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty if distinct else (empty, empty)
    lo = int(ps[0]) - 1
    chi_sums = divisor_chi_sum_range(lo, int(ps[-1]))
    r = 4 * chi_sums[ps - 1 - lo]
    keep = r > 0
    return ps[keep] if distinct else (ps[keep], r[keep])

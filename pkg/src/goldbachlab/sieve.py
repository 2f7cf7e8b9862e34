"""Sifted sets, the Buchstab identity for exponential sums, and beta-sieve weights.

Sieve weights live on squarefree ``d`` built from the primes ``p < z``; the
primes 2 and 5 are left out of ``P(z)`` by default because every use imposes
``gcd(d, 10) = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .arithmetic import rough_mask
from .primes import small_primes

__all__ = [
    "DEFAULT_EXCLUDE",
    "BETA",
    "EmptyRange",
    "SieveWeights",
    "FundamentalLemmaReport",
    "sifted_set",
    "buchstab_step",
    "sieve_primes_below",
    "build_lambda",
    "mobius_weights",
    "divisor_sums",
    "coprime_to_P",
    "lambda_weighted_sum",
    "lambda_weighted_sum_direct",
    "fundamental_lemma_check",
]

DEFAULT_EXCLUDE = (2, 5)
BETA = 2


class EmptyRange(ValueError):
    pass


def _as_array(C) -> np.ndarray:
    return np.unique(np.asarray(list(C) if isinstance(C, (set, frozenset)) else C, dtype=np.int64))


def sifted_set(C, z: float) -> np.ndarray:
    """Members of ``C`` with every prime factor ``> z``."""
    if z < 1:
        raise ValueError("z must be >= 1")
    arr = _as_array(C)
    return arr[rough_mask(arr, z)]


def _phase_sum(n: np.ndarray, theta: float) -> complex:
    if n.size == 0:
        return 0j
    z = np.exp(2j * np.pi * np.mod(n * theta, 1.0))
    return complex(math.fsum(z.real), math.fsum(z.imag))


def _smallest_prime_factor(n: np.ndarray, limit: int) -> np.ndarray:
    """Smallest prime factor up to ``limit`` (``0`` when there is none that small)."""
    spf = np.zeros(n.shape, dtype=np.int64)
    for p in small_primes(limit).tolist():
        hit = (spf == 0) & (n % p == 0)
        spf[hit] = p
    return spf


def buchstab_step(C, u1: float, u2: float, theta: float) -> tuple[complex, complex, complex]:
    """Both sides of ``S(C,u2,th) = S(C,u1,th) - sum_{u1<p<=u2} S(C_p,p,th)``.

    ``S(C_p, p, th)`` runs over ``c in C`` with ``p | c`` and no prime factor of
    ``c/p`` below ``p``; the phase is taken at ``c`` itself.  Returns
    ``(S(C,u2), S(C,u1), subtracted sum)``.
    """
    if not 1 <= u1 <= u2:
        raise ValueError("need 1 <= u1 <= u2")
    arr = _as_array(C)
    arr = arr[arr >= 1]
    lhs = _phase_sum(arr[rough_mask(arr, u2)], theta)
    first = _phase_sum(arr[rough_mask(arr, u1)], theta)
    parts = []
    for p in small_primes(int(math.floor(u2))).tolist():
        if p <= u1:
            continue
        mult = arr[arr % p == 0]
        # c/p free of primes < p
        keep = rough_mask(mult // p, p - 1)
        parts.append(_phase_sum(mult[keep], theta))
    sub = complex(math.fsum(z.real for z in parts), math.fsum(z.imag for z in parts))
    return lhs, first, sub


def sieve_primes_below(z: float, exclude: tuple[int, ...] = DEFAULT_EXCLUDE) -> np.ndarray:
    """Primes ``p < z`` not in ``exclude`` (the prime divisors of ``P(z)``)."""
    ps = small_primes(max(1, math.ceil(z) - 1))
    ps = ps[ps < z]
    return ps[~np.isin(ps, exclude)] if exclude else ps.copy()


def coprime_to_P(n, z: float, exclude: tuple[int, ...] = DEFAULT_EXCLUDE) -> np.ndarray:
    """Indicator of ``gcd(n, P(z)) = 1``."""
    arr = np.asarray(n, dtype=np.int64)
    out = np.ones(arr.shape, dtype=bool)
    for p in sieve_primes_below(z, exclude).tolist():
        out &= arr % p != 0
    return out


@dataclass(frozen=True)
class SieveWeights:
    """``lam[i]`` is the weight of ``d[i]``; ``top[i]`` is the largest prime factor (1 for ``d=1``)."""

    y: float
    z: float
    variant: str
    d: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)
    top: np.ndarray = field(repr=False)
    exclude: tuple[int, ...] = DEFAULT_EXCLUDE

    def __len__(self) -> int:
        return int(self.d.size)

    def __getitem__(self, d: int) -> int:
        i = np.searchsorted(self.d, d)
        return int(self.lam[i]) if i < self.d.size and self.d[i] == d else 0

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.d.tolist(), self.lam.tolist()))

    def with_value(self, d: int, value: int) -> "SieveWeights":
        """Copy with one weight overwritten (fault injection for the identity suite)."""
        i = int(np.searchsorted(self.d, d))
        if i >= self.d.size or self.d[i] != d:
            raise KeyError(d)
        lam = self.lam.copy()
        lam[i] = value
        return replace(self, lam=lam)

    def violations(self) -> list[str]:
        """Structural checks: ``lam(1) = 1``, ``|lam| <= 1``, ``d < y``, ``gcd(d, 10) = 1``."""
        out = []
        if self[1] != 1:
            out.append(f"lambda(1) = {self[1]}")
        if np.any(np.abs(self.lam) > 1):
            out.append("|lambda(d)| > 1")
        if np.any(self.d >= self.y):
            out.append("support reaches d >= y")
        for p in self.exclude:
            if np.any((self.d % p == 0) & (self.lam != 0)):
                out.append(f"weight on a multiple of {p}")
        return out


def _icbrt(x: np.ndarray) -> np.ndarray:
    c = np.floor(np.cbrt(x.astype(float))).astype(np.int64)
    c = np.where((c + 1) ** 3 <= x, c + 1, c)
    return np.where(c**3 > x, c - 1, c)


def _beta_levels(y: float, z: float, variant: str, exclude, g=None):
    """Yield ``(d, top_index, sign, gprod)`` arrays level by level.

    ``d = p1 p2 ... pr`` with ``p1 > ... > pr``; the beta condition
    ``p1...p_m * p_m^BETA < y`` is imposed at odd ``m`` (upper) or even ``m``
    (lower).  ``variant="mobius"`` keeps every ``d < y``.
    """
    ps = sieve_primes_below(z, exclude)
    ymax = math.ceil(y) - 1 if math.isfinite(y) else np.iinfo(np.int64).max
    gp = None if g is None else np.array([g(int(p)) for p in ps], dtype=float)
    # level 0: d = 1; 'last' is the index bound for the next (smaller) prime
    d = np.ones(1, dtype=np.int64)
    last = np.full(1, ps.size, dtype=np.int64)
    top = np.zeros(1, dtype=np.int64)
    gprod = np.ones(1)
    level = 0
    while d.size:
        yield d, top, (-1) ** level, gprod
        level += 1
        cap = ymax // d
        if variant != "mobius" and ((variant == "upper") == (level % 2 == 1)):
            cap = np.minimum(cap, _icbrt(ymax // d))
        hi = np.minimum(last, np.searchsorted(ps, cap, side="right"))
        total = int(hi.sum())
        if total == 0:
            break
        parent = np.repeat(np.arange(d.size), hi)
        starts = np.cumsum(hi) - hi
        j = np.arange(total) - np.repeat(starts, hi)
        d = d[parent] * ps[j]
        top = np.where(level == 1, ps[j], top[parent])
        gprod = gprod[parent] * gp[j] if gp is not None else gprod[parent]
        last = j


def build_lambda(y: float, z: float, variant: str = "upper", exclude=DEFAULT_EXCLUDE) -> SieveWeights:
    """Beta-sieve weights ``lambda^+`` or ``lambda^-`` (dimension 1, ``beta = 2``)."""
    if variant not in ("upper", "lower"):
        raise ValueError("variant must be 'upper' or 'lower'")
    if z < 2:
        raise ValueError("z must be >= 2")
    if y <= z:
        raise EmptyRange(f"need y > z, got y={y}, z={z}")
    return _collect(y, z, variant, exclude)


def mobius_weights(y: float, z: float, exclude=DEFAULT_EXCLUDE) -> SieveWeights:
    """``mu(d)`` on every ``d | P(z)`` with ``d < y`` (``y = inf`` gives the Legendre sieve)."""
    return _collect(y, z, "mobius", exclude)


def _collect(y, z, variant, exclude) -> SieveWeights:
    ds, lams, tops = [], [], []
    for d, top, sign, _ in _beta_levels(y, z, variant, exclude):
        ds.append(d)
        lams.append(np.full(d.size, sign, dtype=np.int64))
        tops.append(np.where(d == 1, 1, top))
    d = np.concatenate(ds)
    order = np.argsort(d, kind="stable")
    return SieveWeights(y, z, variant, d[order], np.concatenate(lams)[order], np.concatenate(tops)[order], tuple(exclude))


def divisor_sums(w: SieveWeights, N: int) -> np.ndarray:
    """``out[n] = sum_{d | n} lambda(d)`` for ``0 <= n <= N`` (``out[0]`` unused)."""
    out = np.zeros(N + 1, dtype=np.int64)
    for d, lam in zip(w.d.tolist(), w.lam.tolist()):
        if d <= N and lam:
            out[d::d] += lam
    out[0] = 0
    return out


def _restrict(w: SieveWeights, z: float) -> tuple[np.ndarray, np.ndarray]:
    keep = (w.top < z) & (w.lam != 0)
    return w.d[keep], w.lam[keep]


def lambda_weighted_sum(C, z: float, theta: float, w: SieveWeights) -> complex:
    """``sum_{n in C} e(n theta) sum_{t | n, t | P(z)} lambda(t)``, divisor first."""
    arr = _as_array(C)
    arr = arr[arr >= 1]
    if arr.size == 0:
        return 0j
    top = int(arr.max())
    phase = np.zeros(top + 1, dtype=complex)
    phase[arr] = np.exp(2j * np.pi * np.mod(arr * theta, 1.0))
    d, lam = _restrict(w, z)
    re, im = [], []
    for t, l in zip(d.tolist(), lam.tolist()):
        if t > top:
            continue
        s = phase[t::t].sum() * l
        re.append(s.real)
        im.append(s.imag)
    return complex(math.fsum(re), math.fsum(im))


def lambda_weighted_sum_direct(C, z: float, theta: float, w: SieveWeights) -> complex:
    """Same sum in definition order (outer loop over ``n``); reference implementation."""
    arr = _as_array(C)
    arr = arr[arr >= 1]
    d, lam = _restrict(w, z)
    re, im = [], []
    for n in arr.tolist():
        coef = int(lam[n % d == 0].sum())
        if coef:
            v = coef * np.exp(2j * np.pi * ((n * theta) % 1.0))
            re.append(v.real)
            im.append(v.imag)
    return complex(math.fsum(re), math.fsum(im))


@dataclass(frozen=True)
class FundamentalLemmaReport:
    y: float
    z: float
    s: float
    upper: float
    lower: float
    product: float
    ratio_upper: float
    ratio_lower: float
    e_minus_s: float
    n_upper: int
    n_lower: int
    note: str = "rho in the lambda-support bound read as log y / log X"

    @property
    def deviation(self) -> float:
        return max(abs(self.ratio_upper - 1), abs(self.ratio_lower - 1))


def reciprocal_g(p: int) -> float:
    """``g(p) = 1/p`` off the excluded primes, ``0`` on them."""
    return 0.0 if p in DEFAULT_EXCLUDE else 1.0 / p


def fundamental_lemma_check(
    g: Callable[[int], float] = reciprocal_g,
    y: float = 1e6,
    z: float = 100,
    exclude=DEFAULT_EXCLUDE,
) -> FundamentalLemmaReport:
    """Compare ``sum lambda^(+/-)(d) g(d)`` with ``prod_{p<z} (1 - g(p))``.

    The weighted sums are accumulated level by level without materialising
    the weight table.
    """
    if y <= z:
        raise EmptyRange(f"need y > z, got y={y}, z={z}")
    sums, counts = {}, {}
    for variant in ("upper", "lower"):
        acc, cnt = [], 0
        for d, _, sign, gprod in _beta_levels(y, z, variant, exclude, g):
            acc.append(sign * math.fsum(gprod))
            cnt += d.size
        sums[variant] = math.fsum(acc)
        counts[variant] = cnt
    ps = sieve_primes_below(z, exclude)
    product = math.exp(math.fsum(math.log1p(-g(int(p))) for p in ps))
    s = math.log(y) / math.log(z)
    return FundamentalLemmaReport(
        y, z, s, sums["upper"], sums["lower"], product,
        sums["upper"] / product, sums["lower"] / product, math.exp(-s),
        counts["upper"], counts["lower"],
    )

"""Weighted supports and their exponential sums, pointwise and on the grid ``a/X``."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .arithmetic import chi4_array, divisor_chi_sum_range, rough_mask
from .families import FamilyConfig, construct_window, digit_set, digits_avoid, ps_primes_in
from .primes import PrimeTable

__all__ = [
    "WeightedSupport",
    "ExpSumGrid",
    "SQSplit",
    "GridMismatch",
    "build_S_A",
    "build_S_B",
    "build_S_P",
    "build_S_AcapP",
    "build_S_c0",
    "build_S_Q",
    "build_S_Q_split",
    "build_sifted",
    "eval_point",
    "grid_eval",
    "F_Y",
    "export_grid_csv",
]


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True)
class WeightedSupport:
    """Finite measure ``sum w_i * delta_{n_i}``; ``n`` strictly increasing."""

    n: np.ndarray
    w: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        n = np.asarray(self.n, dtype=np.int64)
        w = np.asarray(self.w)
        if n.shape != w.shape or n.ndim != 1:
            raise ValueError("n and w must be 1-d arrays of equal length")
        if n.size > 1 and np.any(np.diff(n) <= 0):
            raise ValueError("support must be strictly increasing")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_entries(cls, n, w, label: str = "custom") -> "WeightedSupport":
        """Sort and merge duplicate indices by adding their weights."""
        n = np.asarray(n, dtype=np.int64)
        w = np.broadcast_to(np.asarray(w), n.shape)
        uniq, inv = np.unique(n, return_inverse=True)
        if np.iscomplexobj(w):
            merged = np.bincount(inv, w.real, uniq.size) + 1j * np.bincount(inv, w.imag, uniq.size)
        else:
            merged = np.bincount(inv, w.astype(float), uniq.size)
        return cls(uniq, merged, label)

    @classmethod
    def unit(cls, n, label: str = "custom") -> "WeightedSupport":
        n = np.unique(np.asarray(n, dtype=np.int64))
        return cls(n, np.ones(n.size), label)

    def __len__(self) -> int:
        return int(self.n.size)

    def total(self) -> float:
        return math.fsum(self.w.real) + (1j * math.fsum(self.w.imag) if np.iscomplexobj(self.w) else 0)

    def scaled(self, c: float, label: str | None = None) -> "WeightedSupport":
        return WeightedSupport(self.n, self.w * c, label or self.label)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.n.tolist(), self.w.tolist()))


@dataclass(frozen=True)
class ExpSumGrid:
    """``values[a]`` is the sum at ``a/X``; index ``0`` doubles as ``a = X``."""

    X: int
    values: np.ndarray = field(repr=False)
    label: str = "custom"

    def __post_init__(self):
        if self.values.shape != (self.X,):
            raise ValueError("grid must have length X")

    def at(self, a: int) -> complex:
        return complex(self.values[a % self.X])


# -- builders -----------------------------------------------------------------


def build_S_A(cfg: FamilyConfig, windowed: bool = False) -> WeightedSupport:
    """Unit weights on ``A`` (or on ``A*`` when ``windowed``)."""
    if windowed:
        return WeightedSupport.unit(construct_window(cfg).A_star, "S_A")
    return WeightedSupport.unit(digit_set(cfg.k, cfg.a0), "S_A")


def build_S_B(cfg: FamilyConfig, windowed: bool = False) -> WeightedSupport:
    if windowed:
        w = construct_window(cfg)
        return WeightedSupport.unit(np.arange(w.B_lo, w.B_hi), "S_B")
    return WeightedSupport.unit(np.arange(cfg.X), "S_B")


def build_S_P(lo: int, hi: int, table: PrimeTable) -> WeightedSupport:
    """Unit weights on the primes in ``[lo, hi)``."""
    return WeightedSupport.unit(table.primes(lo, hi), "custom")


def build_S_AcapP(cfg: FamilyConfig, table: PrimeTable, windowed: bool = True) -> WeightedSupport:
    base = build_S_A(cfg, windowed).n
    primes = base[table.is_prime(base)] if base.size else base
    return WeightedSupport.unit(primes, "S_AcapP")


def build_S_c0(cfg: FamilyConfig, table: PrimeTable, restricted: bool = True) -> WeightedSupport:
    """Weights ``(1/gamma) (log p) p^(1 - gamma)`` on primes in ``Int(N0)``.

    ``restricted`` keeps only Piatetski-Shapiro primes; the unrestricted
    variant spreads the same weight over every prime in the interval.
    """
    iv = cfg.Int()
    if restricted:
        ps = ps_primes_in(iv, cfg.c0, table)
    else:
        ps = table.primes(*iv.integer_range())
    g = cfg.gamma0
    pf = ps.astype(float)
    return WeightedSupport(ps, np.log(pf) * pf ** (1 - g) / g, "S_c0")


@dataclass(frozen=True)
class SQSplit:
    """Integer character sums ``coef[i, j] = sum chi(d)`` over ``d | p_j - 1`` in range ``i``."""

    primes: np.ndarray
    coef: np.ndarray
    D: float
    upper: float
    cap: int | None

    def support(self, part: int, times_four: bool = False) -> WeightedSupport:
        c = self.coef[part - 1] * (4 if times_four else 1)
        keep = c != 0
        return WeightedSupport(self.primes[keep], c[keep] * np.log(self.primes[keep].astype(float)), f"S_Q_{part}")

    def parts(self, times_four: bool = False) -> tuple[WeightedSupport, WeightedSupport, WeightedSupport]:
        return tuple(self.support(i, times_four) for i in (1, 2, 3))


def _split_chi_sums(m: np.ndarray, D: float, upper: float, cap: int | None) -> np.ndarray:
    """Per ``m``: sums of ``chi(d)`` over divisors ``d <= D``, ``D < d <= upper``, ``d > upper``."""
    out = np.zeros((3, m.size), dtype=np.int64)
    if m.size == 0:
        return out
    root = math.isqrt(int(m.max()))

    def add(d: np.ndarray, cols: np.ndarray):
        chi = chi4_array(d)
        if cap is not None:
            chi = np.where(d <= cap, chi, 0)
        part = np.where(d <= D, 0, np.where(d <= upper, 1, 2))
        np.add.at(out, (part, cols), chi)

    for j in range(1, root + 1):
        # j <= sqrt(m) so each divisor pair is seen once
        cols = np.flatnonzero((m % j == 0) & (m >= j * j))
        if cols.size == 0:
            continue
        co = m[cols] // j
        add(np.full(cols.size, j, dtype=np.int64), cols)
        distinct = co != j
        add(co[distinct], cols[distinct])
    return out


def build_S_Q_split(cfg: FamilyConfig, table: PrimeTable, cap_at_X: bool = False) -> SQSplit:
    """Split ``S_Q`` by divisor size at ``D`` and ``X/D``.

    The last range is ``d > X/D`` with no upper cap, so the three parts add
    up to the full divisor sum of every ``p - 1``.  ``cap_at_X`` drops
    divisors above ``X``, which loses the exact partition once ``p > X + 1``.
    """
    ps = table.primes(*cfg.Int().integer_range())
    D = cfg.D
    upper = cfg.X / D
    cap = cfg.X if cap_at_X else None
    return SQSplit(ps, _split_chi_sums(ps - 1, D, upper, cap), D, upper, cap)


def build_S_Q(cfg: FamilyConfig, table: PrimeTable, times_four: bool = False) -> WeightedSupport:
    """Full ``S_Q`` with weights ``r(p - 1) log p`` (``/4`` unless ``times_four``)."""
    ps = table.primes(*cfg.Int().integer_range())
    if ps.size == 0:
        return WeightedSupport(ps, np.zeros(0), "S_Q_full")
    lo = int(ps[0]) - 1
    c = divisor_chi_sum_range(lo, int(ps[-1]))[ps - 1 - lo] * (4 if times_four else 1)
    keep = c != 0
    return WeightedSupport(ps[keep], c[keep] * np.log(ps[keep].astype(float)), "S_Q_full")


def build_sifted(
    cfg: FamilyConfig,
    d: int,
    z: float,
    part: str = "w",
    C=None,
) -> WeightedSupport:
    """``n < X/d`` free of prime factors ``<= z``, weighted by ``w_{nd}``.

    ``w_m = 1_A(m) - kappa_A |A| / |B|``; ``part`` selects ``"w"``, the
    A-part ``"A"`` or the B-part ``"B"`` (the subtracted constant alone).
    ``C`` optionally restricts ``n`` to a given integer set.
    """
    if d < 1:
        raise ValueError("d must be positive")
    n = np.arange(0, -(-cfg.X // d), dtype=np.int64)
    if C is not None:
        n = np.intersect1d(n, np.asarray(C, dtype=np.int64))
    n = n[rough_mask(n, z)]
    a_part = digits_avoid(n * d, cfg.k, cfg.a0).astype(float)
    b_part = np.full(n.size, float(cfg.kappa_A) * cfg.size_A / cfg.X)
    w = {"w": a_part - b_part, "A": a_part, "B": b_part}[part]
    return WeightedSupport(n, w, "S_d_z")


# -- evaluation -----------------------------------------------------------------


def eval_point(ws: WeightedSupport, theta) -> complex:
    """``sum w(n) e(n theta)`` with compensated summation.

    A :class:`~fractions.Fraction` ``theta`` reduces the phase ``n theta mod 1``
    exactly in integers before the exponential.
    """
    if ws.n.size == 0:
        return 0j
    if isinstance(theta, Fraction):
        num, den = theta.numerator, theta.denominator
        if abs(num) < 2**31 and den < 2**31 and int(ws.n.max()) < 2**31:
            frac = ((ws.n * (num % den)) % den) / den
        else:
            frac = np.array([(int(x) * num % den) / den for x in ws.n.tolist()])
    else:
        frac = np.mod(ws.n * float(theta), 1.0)
    z = ws.w * np.exp(2j * np.pi * frac)
    return complex(math.fsum(z.real), math.fsum(z.imag))


def grid_eval(ws: WeightedSupport, X: int) -> ExpSumGrid:
    """All values at ``a/X``: fold weights mod ``X``, then ``X * ifft``."""
    r = ws.n % X
    if np.iscomplexobj(ws.w):
        folded = np.bincount(r, ws.w.real, X) + 1j * np.bincount(r, ws.w.imag, X)
    else:
        folded = np.bincount(r, ws.w, X).astype(complex)
    return ExpSumGrid(X, X * np.fft.ifft(folded), ws.label)


def F_Y(theta, Y: int, a0: int) -> float:
    """``Y^(-log 9/log 10) |sum_{n<Y} 1_A(n) e(n theta)|`` via the digit product."""
    m = round(math.log10(Y))
    if m < 1 or 10**m != Y:
        raise ValueError("Y must be 10^m with m >= 1")
    digits = np.array([d for d in range(10) if d != a0], dtype=float)
    th = float(theta)
    out = 1.0
    for j in range(m):
        phase = np.mod(digits * ((10**j * th) % 1.0), 1.0)
        out *= abs(np.exp(2j * np.pi * phase).sum()) / 9
    return out


def export_grid_csv(grid: ExpSumGrid, path: str | Path) -> None:
    """Rows ``(a, Re, Im)`` for ``a = 1..X``."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["a", "re", "im"])
        for a in range(1, grid.X + 1):
            v = grid.values[a % grid.X]
            wr.writerow([a, repr(float(v.real)), repr(float(v.imag))])

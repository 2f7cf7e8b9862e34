"""Representation counts, main terms and the volume constants of the mixed problem."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .arithmetic import EvenInput, singular_series
from .circle import mean_value
from .expsum import WeightedSupport
from .families import FamilyConfig, construct_window, ps_primes_in, quadratic_primes_in
from .primes import PrimeTable, sieve_primes

__all__ = [
    "EmptyPolytope",
    "SingularRegion",
    "Polytope",
    "RepresentationReport",
    "classical_R",
    "classical_R_many",
    "classical_R_brute",
    "mixed_supports",
    "mixed_representation",
    "check_against_mean_value",
    "volume_overlap",
    "gamma_estimate",
    "prop43_rhs",
]

MAX_CLASSICAL = 10**8


class EmptyPolytope(ValueError):
    pass


class SingularRegion(ValueError):
    """Some coordinate reaches 0 inside the region, where ``1/(u_1...u_l)`` blows up."""


@dataclass(frozen=True)
class RepresentationReport:
    N0: int
    raw_count: int
    weighted_count: float
    main_term: float
    ratio: float
    params: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {
            "N0": self.N0,
            "raw_count": self.raw_count,
            "weighted_count": self.weighted_count,
            "main_term": self.main_term,
            "ratio": self.ratio,
        }


def _report(N0: int, raw: int, weighted: float, main: float, **params) -> RepresentationReport:
    ratio = weighted / main if main > 0 else float("nan")
    return RepresentationReport(N0, int(raw), float(weighted), float(main), ratio, params)


# -- classical ternary count ------------------------------------------------------------


def _check_classical(N0: int) -> None:
    if N0 % 2 == 0:
        raise EvenInput(f"N0={N0} is even")
    if not 7 <= N0 <= MAX_CLASSICAL:
        raise ValueError(f"need 7 <= N0 <= {MAX_CLASSICAL}")


def _self_convolve(f: np.ndarray, size: int) -> np.ndarray:
    """``(f * f)[0:size]`` by real FFT."""
    n = 1 << (2 * f.size - 1).bit_length()
    F = np.fft.rfft(f, n)
    return np.fft.irfft(F * F, n)[:size]


def classical_R_many(N0s: Sequence[int], table: PrimeTable | None = None) -> list[RepresentationReport]:
    """``R(N0) = sum log p1 log p2 log p3`` over ``p1 + p2 + p3 = N0`` for several ``N0``.

    One FFT self-convolution gives the pair sums; the third prime is summed
    directly.  Unit weights give the exact integer count (pair counts are
    rounded, so they are exact while the FFT error stays below 1/2).
    """
    N0s = [int(n) for n in N0s]
    for n in N0s:
        _check_classical(n)
    top = max(N0s)
    if table is None or table.hi < top + 1 or table.lo > 2:
        table = sieve_primes(2, top + 1)
    ps = table.primes(2, top + 1)
    lw = np.zeros(top + 1)
    lw[ps] = np.log(ps.astype(float))
    ind = np.zeros(top + 1)
    ind[ps] = 1.0
    pair_log = _self_convolve(lw, top + 1)
    pair_cnt = np.rint(_self_convolve(ind, top + 1)).astype(np.int64)
    out = []
    for n in N0s:
        p3 = ps[ps <= n - 4]
        rest = n - p3
        weighted = math.fsum((lw[p3] * pair_log[rest]).tolist())
        raw = int(pair_cnt[rest].sum())
        main = 0.5 * singular_series(n).value * n * n
        out.append(_report(n, raw, weighted, main))
    return out


def classical_R(N0: int, table: PrimeTable | None = None) -> RepresentationReport:
    return classical_R_many([N0], table)[0]


def classical_R_brute(N0: int) -> tuple[int, float]:
    """Ordered triples by direct enumeration; the oracle for small ``N0``."""
    _check_classical(N0)
    ps = sieve_primes(2, N0 + 1).primes(2, N0 + 1).tolist()
    pset = set(ps)
    raw, terms = 0, []
    for p1 in ps:
        for p2 in ps:
            p3 = N0 - p1 - p2
            if p3 < 2:
                break
            if p3 in pset:
                raw += 1
                terms.append(math.log(p1) * math.log(p2) * math.log(p3))
    return raw, math.fsum(terms)


# -- the mixed problem ----------------------------------------------------------------


def mixed_supports(cfg: FamilyConfig, table: PrimeTable) -> tuple[WeightedSupport, WeightedSupport, WeightedSupport]:
    """``(A* cap P, PS primes, x^2+y^2+1 primes)`` with the representation weights.

    ``v = 1``, ``w2 = p^(1-gamma) log p`` and ``w3 = r(p-1) log p``.
    """
    win = construct_window(cfg)
    a = win.A_star[table.is_prime(win.A_star)] if win.size else win.A_star
    E = WeightedSupport.unit(a, "S_AcapP")
    iv = cfg.Int()
    p2 = ps_primes_in(iv, cfg.c0, table)
    f2 = p2.astype(float)
    c0 = WeightedSupport(p2, f2 ** (1 - cfg.gamma0) * np.log(f2), "S_c0")
    p3, r = quadratic_primes_in(iv, table)
    Q = WeightedSupport(p3, r * np.log(p3.astype(float)), "S_Q_full")
    return E, c0, Q


def mixed_representation(N0: int, cfg: FamilyConfig, table: PrimeTable, supports=None) -> RepresentationReport:
    """Triples ``p1 + p2 + p3 = N0`` with ``p1`` in ``A* cap P``, ``p2`` PS in ``Int``, ``p3 = x^2+y^2+1`` in ``Int``.

    ``p3`` runs in the outer loop and ``p2`` inside, ``p1`` looked up in a set.
    The main term is a density heuristic: every pair ``(p2, p3)`` landing in
    the window contributes ``w2 w3 |A* cap P| / |B*|``.
    """
    if N0 % 2 == 0:
        raise EvenInput(f"N0={N0} is even")
    if cfg.N0 != N0:
        raise ValueError("cfg.N0 must equal N0")
    E, c0, Q = supports if supports is not None else mixed_supports(cfg, table)
    win = construct_window(cfg)
    p1_set = set(E.n.tolist())
    raw = 0
    terms: list[np.ndarray] = []
    heur: list[float] = []
    density = len(E) / (win.B_hi - win.B_lo)
    for p3, w3 in zip(Q.n.tolist(), Q.w.tolist()):
        m = N0 - p3 - c0.n
        hit = np.fromiter((x in p1_set for x in m.tolist()), dtype=bool, count=m.size)
        if hit.any():
            raw += int(hit.sum())
            terms.append(E.w[np.searchsorted(E.n, m[hit])] * c0.w[hit] * w3)
        inwin = (m >= win.B_lo) & (m < win.B_hi)
        if inwin.any():
            heur.append(math.fsum(c0.w[inwin].tolist()) * w3)
    weighted = math.fsum(np.concatenate(terms).tolist()) if terms else 0.0
    main = density * math.fsum(heur)
    return _report(N0, raw, weighted, main, a0=cfg.a0, c0=cfg.c0, k=cfg.k, window=(win.B_lo, win.B_hi))


def check_against_mean_value(N0: int, cfg: FamilyConfig, table: PrimeTable) -> tuple[float, float]:
    sup = mixed_supports(cfg, table)
    return mixed_representation(N0, cfg, table, sup).weighted_count, mean_value(*sup, N0)


# -- volumes and polytopes ----------------------------------------------------------------


def volume_overlap(N0: int, X: int, y: float) -> float:
    """Length of ``{w in Int : N0 - w - y in Int}`` with ``Int = (N0/2 - X/4, N0/2 - X/8]``."""
    a, b = N0 / 2 - X / 4, N0 / 2 - X / 8
    return max(0.0, min(b, N0 - y - a) - max(a, N0 - y - b))


@dataclass(frozen=True)
class Polytope:
    """``{u in [0,1]^l : c . u + c0 >= 0 for each (c, c0)}``."""

    l: int
    constraints: tuple[tuple[tuple[float, ...], float], ...] = ()

    def __post_init__(self):
        for c, _ in self.constraints:
            if len(c) != self.l:
                raise ValueError("constraint length must equal l")

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> "Polytope":
        l = len(lo)
        cons = []
        for i in range(l):
            e = tuple(1.0 if j == i else 0.0 for j in range(l))
            cons.append((e, -float(lo[i])))
            cons.append((tuple(-x for x in e), float(hi[i])))
        return cls(l, tuple(cons))

    def _A_b(self):
        if not self.constraints:
            return None, None
        A = -np.array([c for c, _ in self.constraints], dtype=float)
        b = np.array([c0 for _, c0 in self.constraints], dtype=float)
        return A, b

    def contains(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        ok = np.all((u >= 0) & (u <= 1), axis=1)
        for c, c0 in self.constraints:
            ok &= u @ np.asarray(c, dtype=float) + c0 >= 0
        return ok

    def bounds(self) -> np.ndarray:
        """Per-coordinate ``[min, max]`` over the region; raises :class:`EmptyPolytope`."""
        A, b = self._A_b()
        out = np.zeros((self.l, 2))
        for i in range(self.l):
            for j, sign in enumerate((1.0, -1.0)):
                c = np.zeros(self.l)
                c[i] = sign
                res = linprog(c, A_ub=A, b_ub=b, bounds=[(0, 1)] * self.l, method="highs")
                if res.status == 2:
                    raise EmptyPolytope("no point satisfies the constraints")
                out[i, j] = sign * res.fun
        return out

    def is_empty(self) -> bool:
        A, b = self._A_b()
        res = linprog(np.zeros(self.l), A_ub=A, b_ub=b, bounds=[(0, 1)] * self.l, method="highs")
        return res.status == 2

    def sample(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, float]:
        """``n`` uniform points and the bounding-box volume they were drawn from (rejection sampling)."""
        bb = self.bounds()
        box_vol = float(np.prod(bb[:, 1] - bb[:, 0]))
        u = bb[:, 0] + (bb[:, 1] - bb[:, 0]) * rng.random((n, self.l))
        return u, box_vol


def _mc(values: np.ndarray, inside: np.ndarray, box_vol: float) -> tuple[float, float]:
    f = np.where(inside, values, 0.0) * box_vol
    return float(f.mean()), float(f.std(ddof=1) / math.sqrt(f.size)) if f.size > 1 else 0.0


def gamma_estimate(N0: int, X: int, R: Polytope, samples: int = 100_000, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo ``Gamma`` with ``y = X^(u_1 + ... + u_l)`` and ``dy = y log X du``."""
    if R.is_empty():
        raise EmptyPolytope("empty region")
    rng = np.random.default_rng(seed)
    u, box_vol = R.sample(samples, rng)
    inside = R.contains(u)
    y = np.power(float(X), u.sum(axis=1))
    vol = np.array([volume_overlap(N0, X, t) for t in y.tolist()])
    return _mc(vol * y * math.log(X), inside, box_vol)


def prop43_rhs(
    R: Polytope,
    z: Callable[[np.ndarray], np.ndarray],
    Gamma: float,
    omega: Callable,
    samples: int = 100_000,
    seed: int = 0,
) -> tuple[float, float]:
    """``Gamma * int_R omega(1 - sum u) / (u_1 ... u_l z(u)) du`` by Monte Carlo, with standard error."""
    if R.is_empty():
        return 0.0, 0.0
    bb = R.bounds()
    if np.any(bb[:, 0] <= 0):
        raise SingularRegion("region touches u_i = 0")
    rng = np.random.default_rng(seed)
    u, box_vol = R.sample(samples, rng)
    inside = R.contains(u)
    t = 1.0 - u.sum(axis=1)
    om = np.zeros(samples)
    om[inside] = omega(t[inside])
    f = om / (np.prod(u, axis=1) * np.asarray(z(u), dtype=float))
    v, e = _mc(f, inside, box_vol)
    return Gamma * v, abs(Gamma) * e

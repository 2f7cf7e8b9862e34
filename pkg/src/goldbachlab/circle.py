"""The discrete circle method on the grid ``a/X``.

Arc geometry, the convolutions ``J^(i)(E)``, the mean value ``M(E)`` and
numerical probes of the major-arc approximations and minor-arc bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arithmetic import chi4, euler_phi, mobius, ramanujan_like_sum
from .expsum import (
    ExpSumGrid,
    GridMismatch,
    SQSplit,
    WeightedSupport,
    build_S_A,
    build_S_AcapP,
    build_S_c0,
    build_S_Q_split,
    eval_point,
    grid_eval,
)
from .families import FamilyConfig, construct_window, digits_avoid
from .primes import PrimeTable

__all__ = [
    "Aliasing",
    "ArcRange",
    "Arc",
    "ArcClassification",
    "ConvolutionResult",
    "DiagnosticsConfig",
    "MajorArcApprox",
    "CircleSetup",
    "dirichlet_approx",
    "max_Q",
    "max_L",
    "build_arcs",
    "arc_coverage",
    "classify_grid",
    "convolve",
    "mean_value",
    "orthogonality_check",
    "major_arc_approx_Sc0",
    "major_arc_approx_SQ1",
    "bound_diagnostics",
    "negligibility_ratio",
    "build_E1",
    "theta_pair",
    "windowed_primes",
    "SQ1_main_coefficient",
]


class Aliasing(ValueError):
    """More congruence solutions than the guard can subtract."""


class ArcRange(ValueError):
    """Arc parameters beyond ``q <= [X^(4/5)] + 1`` or ``L <= [X^(1/5)] + 1``."""


def _iroot(n: int, k: int) -> int:
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def max_Q(X: int) -> int:
    """``[X^(4/5)] + 1`` in exact integer arithmetic."""
    return _iroot(X**4, 5) + 1


def max_L(X: int) -> int:
    return _iroot(X, 5) + 1


def _cf_approx(num: int, den: int, N: int) -> tuple[int, int]:
    """Last continued-fraction convergent of ``num/den`` with denominator ``<= N``."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    a, b = num, den
    while b:
        t = a // b
        p2, q2 = t * p1 + p0, t * q1 + q0
        if q2 > N:
            break
        p0, q0, p1, q1 = p1, q1, p2, q2
        a, b = b, a - t * b
    return p1, q1


def dirichlet_approx(theta, N: int) -> tuple[int, int]:
    """Coprime ``(c, q)`` with ``1 <= q <= N`` and ``|theta - c/q| <= 1/(qN)``."""
    if N < 1:
        raise ValueError("N must be positive")
    f = theta if isinstance(theta, Fraction) else Fraction(theta)
    return _cf_approx(f.numerator, f.denominator, N)


@dataclass(frozen=True)
class Arc:
    """``I_{c,q}(L) = [c/q - L/(qX), c/q + L/(qX)]``."""

    c: int
    q: int
    L: int
    X: int

    @property
    def lo(self) -> Fraction:
        return Fraction(self.c, self.q) - Fraction(self.L, self.q * self.X)

    @property
    def hi(self) -> Fraction:
        return Fraction(self.c, self.q) + Fraction(self.L, self.q * self.X)

    def contains(self, a) -> np.ndarray | bool:
        """Whether ``a/X`` lies in the arc, via ``|a q - c X| <= L``."""
        return np.abs(np.asarray(a, dtype=np.int64) * self.q - self.c * self.X) <= self.L


def build_arcs(X: int, Q0: int, L0: int) -> list[Arc]:
    """All ``I_{c,q}(L0)`` with ``q <= Q0``, ``0 <= c <= q``, ``gcd(c, q) = 1``."""
    if not 1 <= Q0 <= max_Q(X) or not 0 <= L0 <= max_L(X):
        raise ArcRange(f"need 1 <= Q0 <= {max_Q(X)} and 0 <= L0 <= {max_L(X)}")
    arcs = [Arc(0, 1, L0, X), Arc(1, 1, L0, X)]
    for q in range(2, Q0 + 1):
        arcs.extend(Arc(c, q, L0, X) for c in range(1, q) if math.gcd(c, q) == 1)
    return arcs


def arc_coverage(X: int, Q0: int, L0: int) -> np.ndarray:
    """Number of arcs ``I_{c,q}(L0)``, ``q <= Q0``, containing each ``a/X``, ``a = 1..X``."""
    if not 1 <= Q0 <= max_Q(X) or not 0 <= L0 <= max_L(X):
        raise ArcRange(f"need 1 <= Q0 <= {max_Q(X)} and 0 <= L0 <= {max_L(X)}")
    a = np.arange(1, X + 1, dtype=np.int64)
    count = np.zeros(X, dtype=np.int64)
    for q in range(1, Q0 + 1):
        aq = a * q
        # candidate numerators c with |aq - cX| <= L0 (L0 < X/2 leaves at most two)
        for c in {*np.unique(aq // X).tolist(), *np.unique(aq // X + 1).tolist()}:
            if c < 0 or c > q or math.gcd(c, q) != 1:
                continue
            count += np.abs(aq - c * X) <= L0
    return count


@dataclass(frozen=True)
class DiagnosticsConfig:
    """Free constants of the minor/major arc analysis, resolved per ``X``."""

    Q0: int | None = None
    L0: int | None = None
    A: float = 2.0
    B: float = 2.0
    C1: float = 2.0
    eps: float = 0.01
    dyadic_Q: int = 2

    def resolve(self, X: int) -> "DiagnosticsConfig":
        Q0 = self.Q0 if self.Q0 is not None else max(1, int(math.log(X) ** 2))
        L0 = self.L0 if self.L0 is not None else max(1, -(-max_L(X) // 2))
        return DiagnosticsConfig(Q0, L0, self.A, self.B, self.C1, self.eps, self.dyadic_Q)


@dataclass(frozen=True)
class ArcClassification:
    """Per ``a`` (index ``a mod X``): Dirichlet ``(c, q)`` at ``N = [X^(4/5)] + 1`` and offset ``L = |aq - cX|``."""

    X: int
    c: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    L: np.ndarray = field(repr=False)
    major: np.ndarray = field(repr=False)
    in_minor_set: np.ndarray = field(repr=False)
    Q0: int = 0
    L0: int = 0

    @property
    def minor_fraction(self) -> float:
        return float(np.mean(self.in_minor_set))

    def arc(self, a: int) -> Arc | None:
        i = a % self.X
        return Arc(int(self.c[i]), int(self.q[i]), int(self.L[i]), self.X) if self.major[i] else None


def _dirichlet_grid(X: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.zeros(X, dtype=np.int64)
    q = np.ones(X, dtype=np.int64)
    for a in range(1, X):
        c[a], q[a] = _cf_approx(a, X, N)
    return c, q


def classify_grid(Sc0: ExpSumGrid, X: int, Q0: int, L0: int, delta0: float) -> ArcClassification:
    """Major iff the Dirichlet denominator is ``<= Q0`` and the offset ``<= L0``; minor-set flag from ``|S_c0|``."""
    if Sc0.X != X:
        raise GridMismatch("grid length differs from X")
    c, q = _dirichlet_grid(X, max_Q(X))
    a = np.arange(X, dtype=np.int64)
    L = np.abs(a * q - c * X)
    major = (q <= Q0) & (L <= L0)
    in_n = np.abs(Sc0.values) <= X ** (1 - delta0)
    return ArcClassification(X, c, q, L, major, in_n, Q0, L0)


def _check_grids(*grids: ExpSumGrid) -> int:
    X = grids[0].X
    if any(g.X != X for g in grids):
        raise GridMismatch("all grids must share X")
    return X


def convolve(E: ExpSumGrid, Sc0: ExpSumGrid, SQi: ExpSumGrid, N0: int, restriction=None) -> complex:
    """``(1/X) sum_a E S_c0 S_Q^(i) e(-N0 a/X)``, optionally over a boolean mask of ``a mod X``."""
    X = _check_grids(E, Sc0, SQi)
    a = np.arange(X, dtype=np.int64)
    phase = np.exp(-2j * np.pi * ((N0 % X) * a % X) / X)
    terms = E.values * Sc0.values * SQi.values * phase
    if restriction is not None:
        terms = terms[np.asarray(restriction, dtype=bool)]
    return complex(math.fsum(terms.real), math.fsum(terms.imag)) / X


def _triple_products(E: WeightedSupport, c0: WeightedSupport, Q: WeightedSupport, N0: int) -> np.ndarray:
    """All products ``v(m) w2(p2) w3(p3)`` with ``m + p2 + p3 = N0``, p3 outer, p2 inner."""
    out = []
    if len(E) == 0 or len(c0) == 0 or len(Q) == 0:
        return np.zeros(0)
    for p3, w3 in zip(Q.n.tolist(), Q.w.tolist()):
        m = N0 - p3 - c0.n
        idx = np.searchsorted(E.n, m)
        idx = np.minimum(idx, E.n.size - 1)
        hit = E.n[idx] == m
        if np.any(hit):
            out.append(E.w[idx[hit]] * c0.w[hit] * w3)
    return np.concatenate(out) if out else np.zeros(0)


def _fsum_complex(z: np.ndarray) -> complex | float:
    if np.iscomplexobj(z):
        return complex(math.fsum(z.real), math.fsum(z.imag))
    return math.fsum(z)


def mean_value(E: WeightedSupport, c0: WeightedSupport, Q: WeightedSupport, N0: int, gamma_rescale: float | None = None):
    """``sum v(m) w2(p2) w3(p3)`` over ``m + p2 + p3 = N0`` (an equation, not a congruence).

    With grid weights ``w2 = (1/gamma) p^(1-gamma) log p`` and
    ``w3 = (r(p-1)/4) log p`` this is what the grid convolution counts;
    ``gamma_rescale`` multiplies by ``4 gamma``, converting to the weights
    ``p2^(1-gamma) r(p3-1) log p2 log p3``.
    """
    val = _fsum_complex(_triple_products(E, c0, Q, N0))
    return val * 4 * gamma_rescale if gamma_rescale is not None else val


@dataclass(frozen=True)
class ConvolutionResult:
    J1: complex
    J2: complex
    J3: complex
    M: float
    alias_correction: float
    residual: float
    offsets: tuple[int, ...] = ()
    negligibility_ratio: float = float("nan")

    @property
    def J(self) -> complex:
        return self.J1 + self.J3


def _alias_offsets(E, c0, Q, N0: int, X: int) -> list[int]:
    if min(len(E), len(c0), len(Q)) == 0:
        return []
    lo = int(E.n[0] + c0.n[0] + Q.n[0])
    hi = int(E.n[-1] + c0.n[-1] + Q.n[-1])
    t_lo = -((N0 - lo) // X)
    t_hi = (hi - N0) // X
    return [t for t in range(t_lo, t_hi + 1) if t != 0]


def orthogonality_check(
    E: WeightedSupport,
    c0: WeightedSupport,
    split: tuple[WeightedSupport, WeightedSupport, WeightedSupport],
    N0: int,
    X: int,
    size: int | None = None,
) -> ConvolutionResult:
    """``|J1 + J2 + J3 - aliases - M(E)| / (1 + |M(E)|)``.

    Congruence solutions ``m + p2 + p3 = N0 + tX`` with ``t != 0`` are
    counted directly and removed; more than two such offsets raise
    :class:`Aliasing`.
    """
    Eg, Sg = grid_eval(E, X), grid_eval(c0, X)
    J = [convolve(Eg, Sg, grid_eval(s, X), N0) for s in split]
    Q_full = WeightedSupport.from_entries(
        np.concatenate([s.n for s in split]), np.concatenate([s.w for s in split]), "S_Q_full"
    )
    M = mean_value(E, c0, Q_full, N0)
    offsets = _alias_offsets(E, c0, Q_full, N0, X)
    if len(offsets) > 2:
        raise Aliasing(f"{len(offsets)} aliased offsets {offsets}; supports too wide for X={X}")
    corr = sum(mean_value(E, c0, Q_full, N0 + t * X) for t in offsets)
    resid = abs(sum(J) - corr - M) / (1 + abs(M))
    ratio = negligibility_ratio(J[0] + J[2], X, size) if size else float("nan")
    return ConvolutionResult(J[0], J[1], J[2], M, corr, resid, tuple(offsets), ratio)


# -- major-arc approximants -----------------------------------------------------


@dataclass(frozen=True)
class MajorArcApprox:
    approx: complex
    actual: complex
    error: float
    normalized: float


def _interval_sum(cfg: FamilyConfig, xi: Fraction) -> complex:
    n = cfg.Int().integers()
    return eval_point(WeightedSupport(n, np.ones(n.size)), xi)


def major_arc_approx_Sc0(c: int, q: int, xi, cfg: FamilyConfig, table: PrimeTable, support=None) -> MajorArcApprox:
    """``S_c0(c/q + xi)`` against ``(mu(q)/phi(q)) sum_{n in Int} e(n xi)``."""
    if math.gcd(c, q) != 1:
        raise ValueError("need gcd(c, q) = 1")
    xi = Fraction(xi)
    s = support if support is not None else build_S_c0(cfg, table)
    actual = eval_point(s, Fraction(c, q) + xi)
    approx = mobius(q) / euler_phi(q) * _interval_sum(cfg, xi)
    err = abs(actual - approx)
    return MajorArcApprox(approx, actual, err, err / cfg.X)


def SQ1_main_coefficient(c: int, q: int, D: float) -> complex:
    """``sum_{d <= D} chi(d) c_d(c, q, 1) / phi([q, d])``."""
    terms = []
    for d in range(1, int(math.floor(D)) + 1):
        x = chi4(d)
        if x == 0:
            continue
        terms.append(x * ramanujan_like_sum(c, q, d, 1) / euler_phi(q * d // math.gcd(q, d)))
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def major_arc_approx_SQ1(c: int, q: int, xi, cfg: FamilyConfig, table: PrimeTable, split: SQSplit | None = None) -> MajorArcApprox:
    """``S_Q^(1)(c/q + xi)`` against its major-arc main term."""
    if math.gcd(c, q) != 1:
        raise ValueError("need gcd(c, q) = 1")
    xi = Fraction(xi)
    sp = split if split is not None else build_S_Q_split(cfg, table)
    actual = eval_point(sp.support(1), Fraction(c, q) + xi)
    approx = SQ1_main_coefficient(c, q, sp.D) * _interval_sum(cfg, xi)
    err = abs(actual - approx)
    return MajorArcApprox(approx, actual, err, err / cfg.X)


# -- setups and diagnostics -------------------------------------------------------


@dataclass
class CircleSetup:
    """Supports and grids for one ``(cfg, N0)``, built once and shared by diagnostics."""

    cfg: FamilyConfig
    table: PrimeTable
    c0: WeightedSupport = field(init=False)
    split: SQSplit = field(init=False)
    grids: dict = field(init=False, default_factory=dict)

    def __post_init__(self):
        self.c0 = build_S_c0(self.cfg, self.table)
        self.split = build_S_Q_split(self.cfg, self.table)
        X = self.cfg.X
        self.grids["S_c0"] = grid_eval(self.c0, X)
        for i, part in enumerate(self.split.parts(), start=1):
            self.grids[f"S_Q_{i}"] = grid_eval(part, X)

    def J(self, E: WeightedSupport, parts=(1, 3), restriction=None) -> complex:
        Eg = grid_eval(E, self.cfg.X)
        return sum(
            convolve(Eg, self.grids["S_c0"], self.grids[f"S_Q_{i}"], self.cfg.N0, restriction) for i in parts
        )


def negligibility_ratio(J: complex, X: int, size: int) -> float:
    """``|J| log X / (size * X)``."""
    if size == 0:
        return 0.0
    return abs(J) * math.log(X) / (size * X)


def theta_pair(eps: float = 0.01) -> tuple[float, float]:
    return 9 / 25 + 2 * eps, 17 / 40 - 2 * eps


def build_E1(cfg: FamilyConfig, eps: float = 0.01, windowed: bool = False) -> WeightedSupport:
    """Type-II family at ``l = 1``: ``sum_{X^th1 <= p <= X^th2, p^2 <= X} S*_p(p, theta)``.

    ``S*_p(p, theta)`` sums ``w_m e(m theta)`` over ``m`` in ``B`` (or ``B*``)
    with ``p | m`` and every prime factor of ``m/p`` above ``p``;
    ``w_m = 1_A(m) - kappa_A |A|/|B|`` on the chosen pair of sets.
    """
    th1, th2 = theta_pair(eps)
    X = cfg.X
    if windowed:
        win = construct_window(cfg)
        B = np.arange(win.B_lo, win.B_hi, dtype=np.int64)
        dens = win.size / B.size
    else:
        B = np.arange(1, X, dtype=np.int64)
        dens = cfg.size_A / X
    kap = float(cfg.kappa_A)
    lo, hi = X**th1, X**th2
    from .arithmetic import rough_mask
    from .primes import small_primes

    ns, ws = [], []
    for p in small_primes(int(hi)).tolist():
        if p < lo or p < X ** (th2 - th1) or p * p > X:
            continue
        m = B[B % p == 0]
        m = m[rough_mask(m // p, p)]
        ns.append(m)
        ws.append(digits_avoid(m, cfg.k, cfg.a0).astype(float) - kap * dens)
    if not ns:
        return WeightedSupport(np.zeros(0, dtype=np.int64), np.zeros(0), "custom")
    return WeightedSupport.from_entries(np.concatenate(ns), np.concatenate(ws), "custom")


def bound_diagnostics(setup: CircleSetup, dcfg: DiagnosticsConfig | None = None) -> dict[str, float]:
    """Left-hand side over claimed scale for the minor/major arc bounds at one ``X``."""
    cfg = setup.cfg
    X = cfg.X
    d = (dcfg or DiagnosticsConfig()).resolve(X)
    logX = math.log(X)
    cls = classify_grid(setup.grids["S_c0"], X, d.Q0, max_L(X), cfg.delta0)
    SA = build_S_A(cfg)
    sizeA = len(SA)
    Eg = grid_eval(SA, X)
    a = np.arange(X, dtype=np.int64)
    phase = np.exp(-2j * np.pi * ((cfg.N0 % X) * a % X) / X)
    S13 = setup.grids["S_Q_1"].values + setup.grids["S_Q_3"].values
    integrand = Eg.values * setup.grids["S_c0"].values * S13 * phase

    def total(mask) -> float:
        t = integrand[mask]
        return abs(complex(math.fsum(t.real), math.fsum(t.imag)))

    out = {}
    major = cls.q <= d.Q0
    S3 = np.abs(setup.grids["S_Q_3"].values[major])
    out["SQ3_major"] = float(S3.max() if S3.size else 0.0) / (X * logX ** (-d.B))
    shell = major & (cls.L > d.L0)
    out["major_shell"] = total(shell) / (sizeA * X**2 * logX / d.L0)
    out["minor_set"] = total(cls.in_minor_set) / (math.sqrt(sizeA) * X ** (2.5 - cfg.delta0))
    Q = d.dyadic_Q
    band = (cls.q > Q) & (cls.q <= 2 * Q) & (cls.L <= d.L0)
    out["dyadic_band"] = total(band) / (sizeA * X**2 * Q ** (-0.5))
    # von Mangoldt sum up to N = X at each grid point, q from Dirichlet with N = sqrt(X)
    lam = _von_mangoldt_support(X, setup.table)
    vm = np.abs(grid_eval(lam, X).values)
    root = math.isqrt(X)
    qs = np.array([1] + [_cf_approx(int(x), X, root)[1] for x in range(1, X)])
    scale = math.log(X) ** 3.5 * (X / np.sqrt(qs) + X**0.8 + np.sqrt(X * qs))
    out["vonmangoldt_sum"] = float(np.max(vm / scale))
    return out


def _von_mangoldt_support(N: int, table: PrimeTable) -> WeightedSupport:
    ps = table.primes(2, N + 1)
    ns, ws = [], []
    for p in ps.tolist():
        lp = math.log(p)
        pk = p
        while pk <= N:
            ns.append(pk)
            ws.append(lp)
            pk *= p
    return WeightedSupport.from_entries(ns, ws)


def windowed_primes(cfg: FamilyConfig, table: PrimeTable) -> WeightedSupport:
    """``S_{A* cap P}``: unit weights on the primes of the short window."""
    return build_S_AcapP(cfg, table, windowed=True)

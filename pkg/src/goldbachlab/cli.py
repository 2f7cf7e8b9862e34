"""Command-line entry point: ``goldbachlab <command> [--config F] [--out DIR] [--threads N] [--seed S]``.

Exit codes: 0 success, 1 identity or verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import arithmetic, circle, expsum, goldbach, sieve
from .cache import CorruptCache, load_cache, save_cache
from .config import ConfigError, RunConfig, load_config
from .families import FamilyConfig, construct_window
from .primes import PrimeTable, sieve_primes

__all__ = ["main", "COMMANDS"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for r in rows:
            wr.writerow(r)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(type(o).__name__)


def _table(hi: int) -> PrimeTable:
    return sieve_primes(2, max(hi, 100))


def _table_for(cfg: FamilyConfig) -> PrimeTable:
    _, stop = cfg.Int().integer_range()
    return _table(max(stop, cfg.X, cfg.N0) + 1)


# -- commands -----------------------------------------------------------------------


def cmd_primes(rc: RunConfig, out: Path) -> int:
    table = sieve_primes(rc.primes_lo, rc.primes_hi)
    path = out / rc.cache
    hdr = save_cache(table, path)
    back = load_cache(path)
    ok = np.array_equal(back.bits, table.bits)
    _write_json(
        out / "primes.json",
        {"lo": hdr.lo, "hi": hdr.hi, "count": back.count(), "checksum": f"{hdr.checksum:016x}", "cache": str(path), "roundtrip": ok},
    )
    return EXIT_OK if ok else EXIT_FAIL


def _check_partition(cfg: FamilyConfig, table: PrimeTable, tol: float) -> dict:
    sp = expsum.build_S_Q_split(cfg, table)
    full = np.array([arithmetic.divisor_chi_sum(int(p) - 1) for p in sp.primes], dtype=np.int64)
    int_bad = int(np.count_nonzero(sp.coef.sum(axis=0) != full))
    logs = np.log(sp.primes.astype(float))
    wsum = sum(sp.coef[i] * logs for i in range(3))
    ref = full * logs
    rel = float(np.max(np.abs(wsum - ref) / np.maximum(np.abs(ref), 1e-300))) if ref.size else 0.0
    return {"ok": int_bad == 0 and rel < tol, "integer_mismatches": int_bad, "max_rel": rel, "primes": int(sp.primes.size)}


def _check_orthogonality(cfg: FamilyConfig, table: PrimeTable, tol: float) -> dict:
    res = circle.orthogonality_check(
        expsum.build_S_A(cfg), expsum.build_S_c0(cfg, table), expsum.build_S_Q_split(cfg, table).parts(), cfg.N0, cfg.X
    )
    return {"ok": res.residual < tol, "residual": res.residual, "M": res.M, "offsets": list(res.offsets)}


def _check_buchstab(cfg: FamilyConfig, tol: float) -> dict:
    C = np.arange(1, cfg.X + 1)
    worst = 0.0
    for u1, u2, th in ((2, math.sqrt(cfg.X), 0.37), (3, cfg.X ** 0.4, 0.0), (2, 2, 0.11)):
        a, b, c = sieve.buchstab_step(C, u1, u2, th)
        worst = max(worst, abs(a - (b - c)) / C.size)
    return {"ok": worst < tol, "max_scaled_error": worst}


def _check_sandwich(rc: RunConfig) -> dict:
    up = sieve.build_lambda(rc.sieve_y, rc.sieve_z, "upper")
    lo = sieve.build_lambda(rc.sieve_y, rc.sieve_z, "lower")
    if rc.corrupt_lambda_one:
        up = up.with_value(1, 0)
    N = rc.sandwich_N
    ind = sieve.coprime_to_P(np.arange(1, N + 1), rc.sieve_z).astype(np.int64)
    su, sl = sieve.divisor_sums(up, N)[1:], sieve.divisor_sums(lo, N)[1:]
    bad = int(np.count_nonzero((sl > ind) | (ind > su)))
    viol = up.violations() + lo.violations()
    return {"ok": bad == 0 and not viol, "exceptions": bad, "weight_violations": len(viol)}


def cmd_identities(rc: RunConfig, out: Path) -> int:
    cfg = rc.family()
    table = _table_for(cfg)
    report = {
        "partition": _check_partition(cfg, table, rc.tol_partition),
        "orthogonality": _check_orthogonality(cfg, table, rc.tol_orthogonality),
        "buchstab": _check_buchstab(cfg, rc.tol_buchstab),
        "sandwich": _check_sandwich(rc),
    }
    report["all_ok"] = all(v["ok"] for v in report.values())
    _write_json(out / "identities.json", report)
    for name, v in report.items():
        if name != "all_ok":
            print(f"{name}: {'PASS' if v['ok'] else 'FAIL'}")
    return EXIT_OK if report["all_ok"] else EXIT_FAIL


def _verify_row(args):
    N0, rc, table = args
    try:
        rep = goldbach.mixed_representation(N0, rc.family(N0), table)
        return [N0, rep.raw_count, repr(rep.weighted_count), repr(rep.main_term), repr(rep.ratio), ""]
    except Exception as exc:  # recorded per row, the campaign continues
        return [N0, "", "", "", "", f"{type(exc).__name__}: {exc}"]


def cmd_verify(rc: RunConfig, out: Path) -> int:
    lo = rc.verify_lo | 1
    N0s = list(range(lo, rc.verify_hi + 1, 2))
    table = _table(rc.verify_hi + 1)
    with ThreadPoolExecutor(max_workers=rc.threads) as ex:
        rows = list(ex.map(_verify_row, [(n, rc, table) for n in N0s]))
    _write_csv(out / "verify.csv", ["N0", "raw_count", "weighted_count", "main_term", "ratio", "error"], rows)
    good = [r for r in rows if not r[5]]
    zeros = [r[0] for r in good if r[1] == 0]
    ratios = [float(r[4]) for r in good if math.isfinite(float(r[4]))]
    summary = {
        "rows": len(rows),
        "errors": [r[0] for r in rows if r[5]],
        "zero_count": len(zeros),
        "zero_N0": zeros,
        "nonzero_rate": (len(good) - len(zeros)) / len(rows) if rows else float("nan"),
        "min_ratio": min(ratios) if ratios else None,
        "median_ratio": statistics.median(ratios) if ratios else None,
        "a0": rc.a0,
        "c0": rc.c0,
    }
    _write_json(out / "verify_summary.json", summary)
    return EXIT_OK


def negligibility_sample(k: int, rc: RunConfig, table: PrimeTable) -> dict[str, float]:
    """Mean over fixed ``N0 = 2X + j * floor(18X / n) + 1`` of the two negligibility ratios."""
    X = 10**k
    n = rc.scaling_n_N0
    step = (18 * X) // n
    e1, j2 = [], []
    for j in range(n):
        N0 = (2 * X + j * step) | 1
        cfg = FamilyConfig(a0=rc.a0, c0=rc.c0, k=k, N0=N0, C0=rc.C0)
        st = circle.CircleSetup(cfg, table)
        size = construct_window(cfg).size
        e1.append(circle.negligibility_ratio(st.J(circle.build_E1(cfg, rc.eps)), X, size))
        j2.append(circle.negligibility_ratio(st.J(circle.windowed_primes(cfg, table), parts=(2,)), X, size))
    return {"negligibility_E1": float(np.mean(e1)), "negligibility_J2_AcapP": float(np.mean(j2))}


def cmd_scaling(rc: RunConfig, out: Path) -> int:
    if len(rc.scaling_ks) < 2:
        raise ConfigError("scaling.ks needs at least two values")
    table = _table(10 ** max(rc.scaling_ks) * 10 + 1)

    def one(k):
        X = 10**k
        st = circle.CircleSetup(FamilyConfig(a0=rc.a0, c0=rc.c0, k=k, N0=4 * X + 1, C0=rc.C0), table)
        rep = circle.bound_diagnostics(st, rc.diagnostics())
        rep.update(negligibility_sample(k, rc, table))
        return k, rep

    with ThreadPoolExecutor(max_workers=rc.threads) as ex:
        results = list(ex.map(one, rc.scaling_ks))
    rows = [[name, k, repr(v)] for k, rep in results for name, v in sorted(rep.items())]
    _write_csv(out / "scaling.csv", ["diagnostic", "k", "value"], rows)
    _write_json(out / "scaling.json", {str(k): rep for k, rep in results})
    return EXIT_OK


def cmd_singular(rc: RunConfig, out: Path) -> int:
    rows = []
    for N0 in rc.singular_N0s:
        s = arithmetic.singular_series(N0, rc.singular_cutoff)
        t = arithmetic.singular_series_star(N0, rc.singular_cutoff)
        rows.append([N0, repr(s.value), repr(s.truncation_bound), repr(t.value), repr(t.truncation_bound), s.cutoff])
    _write_csv(out / "singular.csv", ["N0", "S", "S_bound", "S_star", "S_star_bound", "cutoff"], rows)
    return EXIT_OK


def cmd_buchstab(rc: RunConfig, out: Path) -> int:
    try:
        tab = arithmetic.buchstab_omega(rc.buchstab_u_max, rc.buchstab_step)
    except arithmetic.StepTooCoarse as exc:
        raise ConfigError(str(exc)) from exc
    _write_csv(out / "buchstab.csv", ["u", "omega"], ([repr(float(u)), repr(float(w))] for u, w in zip(tab.grid, tab.values)))
    return EXIT_OK


def cmd_arcs(rc: RunConfig, out: Path) -> int:
    X = rc.arcs_X
    Q0 = rc.arcs_Q0 if rc.arcs_Q0 is not None else circle.max_Q(X)
    L0 = rc.arcs_L0 if rc.arcs_L0 is not None else circle.max_L(X)
    try:
        arcs = circle.build_arcs(X, Q0, L0)
    except circle.ArcRange as exc:
        raise ConfigError(str(exc)) from exc
    cov = circle.arc_coverage(X, Q0, L0)
    _write_csv(out / "arcs.csv", ["c", "q", "L", "lo", "hi"], ([a.c, a.q, a.L, str(a.lo), str(a.hi)] for a in arcs))
    uncovered = (np.flatnonzero(cov == 0) + 1).tolist()
    _write_json(out / "arcs.json", {"X": X, "Q0": Q0, "L0": L0, "arcs": len(arcs), "uncovered": uncovered, "min_cover": int(cov.min())})
    return EXIT_OK


_EXPSUM = {
    "A": lambda cfg, t: expsum.build_S_A(cfg),
    "A_star": lambda cfg, t: expsum.build_S_A(cfg, windowed=True),
    "B": lambda cfg, t: expsum.build_S_B(cfg),
    "P": lambda cfg, t: expsum.build_S_P(0, cfg.X, t),
    "AcapP": lambda cfg, t: expsum.build_S_AcapP(cfg, t),
    "c0": lambda cfg, t: expsum.build_S_c0(cfg, t),
    "Q": lambda cfg, t: expsum.build_S_Q(cfg, t),
    "Q1": lambda cfg, t: expsum.build_S_Q_split(cfg, t).support(1),
    "Q2": lambda cfg, t: expsum.build_S_Q_split(cfg, t).support(2),
    "Q3": lambda cfg, t: expsum.build_S_Q_split(cfg, t).support(3),
    "E1": lambda cfg, t: circle.build_E1(cfg),
}


def cmd_expsum(rc: RunConfig, out: Path) -> int:
    if rc.expsum_family not in _EXPSUM:
        raise ConfigError(f"expsum.family must be one of {sorted(_EXPSUM)}")
    cfg = rc.family()
    ws = _EXPSUM[rc.expsum_family](cfg, _table_for(cfg))
    expsum.export_grid_csv(expsum.grid_eval(ws, cfg.X), out / f"expsum_{rc.expsum_family}.csv")
    return EXIT_OK


COMMANDS = {
    "primes": cmd_primes,
    "identities": cmd_identities,
    "verify": cmd_verify,
    "scaling": cmd_scaling,
    "singular": cmd_singular,
    "buchstab": cmd_buchstab,
    "arcs": cmd_arcs,
    "expsum": cmd_expsum,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="goldbachlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0])
        p.add_argument("--config", help="sectioned key = value file")
        p.add_argument("--out", help="output directory (overrides run.out)")
        p.add_argument("--threads", type=int, help="worker threads (overrides run.threads)")
        p.add_argument("--seed", type=int, help="random seed (overrides run.seed)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = load_config(args.config).with_overrides(out=args.out, threads=args.threads, seed=args.seed).validate()
        out = Path(rc.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](rc, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CorruptCache as exc:
        print(f"corrupt-cache: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Run configuration: sectioned ``key = value`` files read with :mod:`configparser`."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .circle import DiagnosticsConfig
from .families import FamilyConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "SCHEMA"]


class ConfigError(ValueError):
    """Missing file, unknown key or invalid value (exit code 2)."""


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _int_list(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.replace(",", " ").split())


def _opt(conv):
    return lambda s: None if s.strip().lower() in ("", "none") else conv(s)


# section -> key -> (attribute, converter)
SCHEMA: dict[str, dict[str, tuple[str, object]]] = {
    "family": {
        "a0": ("a0", int),
        "c0": ("c0", float),
        "k": ("k", _opt(int)),
        "N0": ("N0", _opt(int)),
        "C0": ("C0", float),
        "H": ("H", _opt(int)),
        "delta0": ("delta0", _opt(float)),
    },
    "diagnostics": {
        "Q0": ("Q0", _opt(int)),
        "L0": ("L0", _opt(int)),
        "A": ("A", float),
        "B": ("B", float),
        "C1": ("C1", float),
        "eps": ("eps", float),
    },
    "run": {
        "seed": ("seed", int),
        "threads": ("threads", int),
        "out": ("out", str),
        "samples": ("samples", int),
    },
    "tolerances": {
        "orthogonality": ("tol_orthogonality", float),
        "partition": ("tol_partition", float),
        "buchstab": ("tol_buchstab", float),
    },
    "primes": {"lo": ("primes_lo", int), "hi": ("primes_hi", int), "cache": ("cache", str)},
    "verify": {"N0_lo": ("verify_lo", int), "N0_hi": ("verify_hi", int)},
    "scaling": {"ks": ("scaling_ks", _int_list), "n_N0": ("scaling_n_N0", int)},
    "identities": {
        "sieve_y": ("sieve_y", float),
        "sieve_z": ("sieve_z", float),
        "sandwich_N": ("sandwich_N", int),
        "corrupt_lambda_one": ("corrupt_lambda_one", _bool),
    },
    "singular": {"N0s": ("singular_N0s", _int_list), "cutoff": ("singular_cutoff", int)},
    "buchstab": {"u_max": ("buchstab_u_max", float), "step": ("buchstab_step", float)},
    "arcs": {"X": ("arcs_X", int), "Q0": ("arcs_Q0", _opt(int)), "L0": ("arcs_L0", _opt(int))},
    "expsum": {"family": ("expsum_family", str)},
}


@dataclass(frozen=True)
class RunConfig:
    a0: int = 7
    c0: float = 1.05
    k: int | None = 3
    N0: int | None = 2001
    C0: float = 1.0
    H: int | None = None
    delta0: float | None = None
    Q0: int | None = None
    L0: int | None = None
    A: float = 2.0
    B: float = 2.0
    C1: float = 2.0
    eps: float = 0.01
    seed: int = 0
    threads: int = 1
    out: str = "out"
    samples: int = 100_000
    tol_orthogonality: float = 1e-6
    tol_partition: float = 1e-12
    tol_buchstab: float = 1e-9
    primes_lo: int = 2
    primes_hi: int = 10**6
    cache: str = "primes.gblb"
    verify_lo: int = 200_001
    verify_hi: int = 200_021
    scaling_ks: tuple[int, ...] = (4, 5)
    scaling_n_N0: int = 8
    sieve_y: float = 1e3
    sieve_z: float = 10.0
    sandwich_N: int = 10**5
    corrupt_lambda_one: bool = False
    singular_N0s: tuple[int, ...] = (1_000_001,)
    singular_cutoff: int = 10**6
    buchstab_u_max: float = 20.0
    buchstab_step: float = 1e-4
    arcs_X: int = 1000
    arcs_Q0: int | None = None
    arcs_L0: int | None = None
    expsum_family: str = "c0"

    def family(self, N0: int | None = None) -> FamilyConfig:
        N0 = self.N0 if N0 is None else N0
        kw = dict(C0=self.C0, H=self.H, delta0=self.delta0)
        if N0 is None:
            raise ConfigError("family.N0 is required")
        cfg = FamilyConfig.from_N0(N0, a0=self.a0, c0=self.c0, **kw)
        if self.k is not None and N0 == self.N0 and cfg.k != self.k:
            raise ConfigError(f"k={self.k} disagrees with N0={N0} (needs k={cfg.k})")
        return cfg

    def diagnostics(self) -> DiagnosticsConfig:
        return DiagnosticsConfig(self.Q0, self.L0, self.A, self.B, self.C1, self.eps)

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def validate(self) -> "RunConfig":
        try:
            if self.N0 is not None:
                self.family()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.verify_lo > self.verify_hi:
            raise ConfigError("verify.N0_lo > verify.N0_hi")
        return self


def load_config(path: str | Path | None) -> RunConfig:
    """Defaults, overlaid with the file; unknown sections or keys are errors."""
    if path is None:
        return RunConfig().validate()
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read(p)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    values = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            attr, conv = SCHEMA[section][key]
            try:
                values[attr] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}: {exc}") from exc
    names = {f.name for f in fields(RunConfig)}
    assert set(values) <= names
    return RunConfig(**values).validate()

"""Numerical workbench for a conditional ternary Goldbach problem with three special prime families."""

from .arithmetic import (
    BuchstabTable,
    buchstab_omega,
    chi4,
    divisor_chi_sum,
    euler_phi,
    mobius,
    r_two_squares,
    ramanujan_like_sum,
    singular_series,
    singular_series_star,
)
from .cache import load_cache, save_cache
from .circle import (
    Arc,
    DiagnosticsConfig,
    bound_diagnostics,
    build_arcs,
    classify_grid,
    convolve,
    dirichlet_approx,
    mean_value,
    negligibility_ratio,
    orthogonality_check,
)
from .config import RunConfig, load_config
from .expsum import WeightedSupport, ExpSumGrid, eval_point, grid_eval
from .families import FamilyConfig, choose_X, construct_window
from .goldbach import classical_R, mixed_representation, volume_overlap
from .primes import PrimeTable, sieve_primes
from .sieve import build_lambda, fundamental_lemma_check

__version__ = "0.1.0"

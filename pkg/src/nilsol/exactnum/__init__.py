"""Exact arithmetic kernels: rationals, power products, Q/Z/GF(2) linear algebra,
real root isolation and Fourier-Motzkin feasibility."""
from fractions import Fraction as Rational

from .fm import Constraint, fm_feasible, fm_witness
from .gf2 import AffineSolutions, gf2_affine_solutions
from .linalg import (
    Matrix,
    integer_kernel,
    kernel_rational,
    min_norm_solution,
    rank,
    solve_rational,
)
from .poly import IsolatedRoot, Poly, SignUndetermined, count_real_roots, isolate_real_roots
from .powerproduct import PowerProduct, Surd, simplify

UnivariatePolynomial = Poly

__all__ = [
    "AffineSolutions",
    "Constraint",
    "IsolatedRoot",
    "Matrix",
    "Poly",
    "PowerProduct",
    "Rational",
    "SignUndetermined",
    "Surd",
    "UnivariatePolynomial",
    "count_real_roots",
    "fm_feasible",
    "fm_witness",
    "gf2_affine_solutions",
    "integer_kernel",
    "isolate_real_roots",
    "kernel_rational",
    "min_norm_solution",
    "rank",
    "simplify",
    "solve_rational",
]

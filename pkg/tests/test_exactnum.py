from fractions import Fraction as F
from itertools import combinations, product
from math import gcd

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from nilsol.exactnum import (
    Constraint,
    Matrix,
    Poly,
    PowerProduct,
    Surd,
    count_real_roots,
    fm_feasible,
    fm_witness,
    gf2_affine_solutions,
    integer_kernel,
    isolate_real_roots,
    kernel_rational,
    min_norm_solution,
    rank,
    solve_rational,
)
from nilsol.exactnum import gf2
from nilsol.exactnum.linalg import hermite_rows, rref

small = st.integers(-4, 4)
matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 6).flatmap(lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
)


# ---------------------------------------------------------------- rational linear algebra

@given(matrices)
@settings(max_examples=80, deadline=None)
def test_rank_matches_sympy(rows):
    assert rank(rows) == sp.Matrix(rows).rank()


@given(matrices)
@settings(max_examples=80, deadline=None)
def test_kernel_is_kernel_of_full_dimension(rows):
    ker = kernel_rational(rows)
    n = len(rows[0])
    assert len(ker) == n - sp.Matrix(rows).rank()
    M = Matrix.from_rows(rows)
    for v in ker:
        assert all(x == 0 for x in M.apply(v))


@given(matrices, st.lists(small, min_size=6, max_size=6))
@settings(max_examples=80, deadline=None)
def test_solve_rational_agrees_with_consistency(rows, seed):
    n = len(rows[0])
    x0 = seed[:n]
    rhs = Matrix.from_rows(rows).apply(x0)
    sol = solve_rational(rows, rhs)
    assert sol is not None
    assert Matrix.from_rows(rows).apply(sol) == tuple(F(b) for b in rhs)


def test_inconsistent_system_returns_none():
    assert solve_rational([[1, 1], [2, 2]], [1, 3]) is None


def test_rref_reduced_form():
    rows, pivots, _ = rref([[2, 4, 6], [1, 2, 4]])
    assert pivots == [0, 2] or tuple(pivots) == (0, 2)
    assert rows[0][0] == 1 and rows[1][2] == 1 and rows[0][2] == 0


def test_min_norm_solution_is_orthogonal_to_kernel():
    A = [[1, 1, 0], [0, 1, 1]]
    x = min_norm_solution(A, [1, 1])
    assert Matrix.from_rows(A).apply(x) == (1, 1)
    for v in kernel_rational(A):
        assert sum(a * b for a, b in zip(x, v)) == 0
    assert x == (F(1, 3), F(2, 3), F(1, 3))


@given(matrices)
@settings(max_examples=60, deadline=None)
def test_integer_kernel_is_primitive_lattice_basis(rows):
    ker = integer_kernel(rows)
    n = len(rows[0])
    assert len(ker) == n - sp.Matrix(rows).rank()
    M = Matrix.from_rows(rows)
    for v in ker:
        assert all(isinstance(x, int) for x in v)
        assert all(x == 0 for x in M.apply(v))
    if ker:
        # saturated lattice: the maximal minors are coprime
        K = sp.Matrix(ker)
        k = len(ker)
        minors = [K[:, list(cols)].det() for cols in combinations(range(n), k)]
        assert gcd(*[int(m) for m in minors]) == 1 if len(minors) > 1 else abs(minors[0]) == 1


def test_hermite_rows_echelon():
    H = hermite_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    pivots = [next(j for j, x in enumerate(r) if x) for r in H]
    assert pivots == sorted(pivots)
    assert all(r[p] > 0 for r, p in zip(H, pivots))


# ---------------------------------------------------------------- GF(2)

@given(st.integers(1, 5).flatmap(lambda r: st.lists(st.lists(st.integers(0, 1), min_size=5, max_size=5), min_size=r, max_size=r)),
       st.lists(st.integers(0, 1), min_size=5, max_size=5))
@settings(max_examples=80, deadline=None)
def test_gf2_affine_solutions_match_brute_force(A, x0):
    s = gf2.mat_vec(A, x0)
    sols = gf2_affine_solutions(A, s, 5)
    brute = {x for x in product((0, 1), repeat=5) if gf2.mat_vec(A, x) == s}
    assert sols is not None
    assert set(map(tuple, sols)) == brute
    assert len(sols) == len(brute)


def test_gf2_inconsistent():
    assert gf2_affine_solutions([[1, 1], [1, 1]], [1, 0], 2) is None


def test_gf2_kernel_and_image():
    A = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    ker = gf2.kernel(A, 3)
    assert set(map(tuple, ker)) == {(1, 1, 1)}
    assert len(gf2.image_basis(A, 3)) == 2


# ---------------------------------------------------------------- Fourier-Motzkin

def test_fm_strict_and_weak():
    # x > 0, y > 0, x + y < 1  is feasible
    cons = [Constraint.make((1, 0), 0), Constraint.make((0, 1), 0), Constraint.make((-1, -1), 1)]
    assert fm_feasible(cons, 2)
    w = fm_witness(cons, 2)
    assert all(c.holds(w) for c in cons)
    # x > 0 and -x >= 0 is infeasible; x >= 0 and -x >= 0 is feasible
    assert not fm_feasible([Constraint.make((1,), 0), Constraint.make((-1,), 0, strict=False)], 1)
    assert fm_feasible([Constraint.make((1,), 0, strict=False), Constraint.make((-1,), 0, strict=False)], 1)


@given(st.lists(st.tuples(small, small, small, st.booleans()), min_size=1, max_size=5))
@settings(max_examples=100, deadline=None)
def test_fm_witness_satisfies_constraints(raw):
    cons = [Constraint.make((a, b), c, strict) for a, b, c, strict in raw]
    w = fm_witness(cons, 2)
    if w is not None:
        assert all(c.holds(w) for c in cons)
        assert fm_feasible(cons, 2)
    else:
        assert not fm_feasible(cons, 2)
        # no grid point works either (sanity, not a proof)
        grid = [F(i, 4) for i in range(-20, 21)]
        assert not any(all(c.holds((x, y)) for c in cons) for x in grid for y in grid)


# ---------------------------------------------------------------- univariate polynomials

polys = st.lists(st.integers(-6, 6), min_size=2, max_size=7).filter(lambda c: any(c[1:]))


@given(polys)
@settings(max_examples=100, deadline=None)
def test_root_isolation_matches_sympy(coeffs):
    p = Poly(coeffs)
    x = sp.symbols("x")
    sp_roots = sorted(set(sp.Poly(list(reversed(coeffs)), x).real_roots()), key=lambda r: float(sp.N(r, 30)))
    ours = isolate_real_roots(p)
    assert len(ours) == len(sp_roots)
    assert count_real_roots(p) == len(sp_roots)
    for r, s in zip(ours, sp_roots):
        if r.is_exact:
            assert sp.Rational(r.value.numerator, r.value.denominator) == s
        else:
            assert r.lo < F(str(sp.N(s, 40))) < r.hi or abs(float(r.approx()) - float(s)) < 1e-25


def test_isolated_root_approx_and_sign():
    p = Poly((-2, 0, 1))  # x^2 - 2
    neg, pos = isolate_real_roots(p)
    assert not pos.is_exact
    with mpmath.workprec(128):
        assert abs(pos.approx(128) - mpmath.sqrt(2)) < mpmath.mpf(2) ** -120
    assert pos.sign_of(Poly((-1, 1))) == 1   # sqrt2 - 1 > 0
    assert neg.sign_of(Poly((1, 1))) == -1   # -sqrt2 + 1 < 0


def test_excluded_and_rational_roots():
    p = Poly((-6, 11, -6, 1))  # (x-1)(x-2)(x-3)
    roots = isolate_real_roots(p, excluded=[2])
    assert [r.value for r in roots] == [1, 3]


def test_repeated_roots_reported_once():
    p = Poly((1, -2, 1)) * Poly((-3, 0, 1))
    roots = isolate_real_roots(p)
    assert len(roots) == 3
    assert [r.multiplicity for r in roots if r.is_exact] == [2]


# ---------------------------------------------------------------- power products

@given(st.fractions(min_value=F(1, 50), max_value=50), st.fractions(min_value=F(1, 50), max_value=50),
       st.sampled_from([F(1, 2), F(1, 3), F(2, 3), F(-1, 2), F(3)]))
@settings(max_examples=80, deadline=None)
def test_power_product_arithmetic(a, b, e):
    pa, pb = PowerProduct.from_rational(a), PowerProduct.from_rational(b)
    assert (pa * pb).to_fraction() == a * b
    assert (pa / pb).to_fraction() == a / b
    with mpmath.workprec(160):
        want = mpmath.power(mpmath.mpf(a.numerator) / a.denominator, mpmath.mpf(e.numerator) / e.denominator)
        assert abs((pa ** e).to_mpf(160) - want) < mpmath.mpf(10) ** -40 * want


def test_power_product_canonical():
    r = PowerProduct.from_factors(1, {2: F(1, 2)})
    assert r * r == PowerProduct.from_rational(2)
    assert str(PowerProduct.from_rational(F(-5, 361))) == "-5/361"
    with pytest.raises(ValueError):
        PowerProduct.from_rational(-4) ** F(1, 2)


def test_surd_equality_is_exact():
    s2 = Surd.from_value(PowerProduct.from_factors(1, {2: F(1, 2)}))
    s8 = Surd.from_value(PowerProduct.from_factors(1, {8: F(1, 2)}))
    assert s8 == 2 * s2
    assert s2 * s2 == 2
    assert (s2 + 1) - s2 == 1
    assert not (s2 - s2).terms
    assert Surd.from_value(F(3, 4)).to_fraction() == F(3, 4)

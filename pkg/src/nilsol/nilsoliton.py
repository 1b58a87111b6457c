"""Decide which signatures carry a diagonal nilsoliton metric on a nice nilpotent algebra.

The pipeline works with the normalization ``lam = -1/2``:

1. the diagonal Nikolayevsky derivation ``N = v^D`` from ``M tM b = [1]``;
2. condition K: ``M tM X = [1]``, an affine family ``X0 + sum t_i alpha_i``;
3. condition P: ``X^alpha_i = c^(2 alpha_i)`` for a kernel basis of ``tM``;
4. conditions H (no zero entry) and L (``logsign X = M_2 delta``);
5. explicit metrics from ``e^{M}(|g|) c^2 = |X|``, each checked by the
   curvature code in :mod:`nilsol.geometry`.
"""
from __future__ import annotations

import contextlib
import itertools
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Mapping, Sequence

import mpmath

from .algebra import NiceLieAlgebra, RootMatrix, irreducible_components, parse_nice_algebra
from .algebra import ZeroCoefficientError
from .exactnum import gf2
from .exactnum.fm import Constraint, fm_feasible, fm_witness
from .exactnum.linalg import Matrix, integer_kernel, kernel_rational, min_norm_solution, rref, solve_rational
from .exactnum.poly import IsolatedRoot, Poly, SignUndetermined, isolate_real_roots
from .exactnum.powerproduct import PowerProduct
from .geometry import DiagonalMetric, NotNilsolitonError, verify_nilsoliton

log = logging.getLogger(__name__)

__all__ = [
    "AffineFamily",
    "ClassificationReport",
    "DiagonalMetric",
    "NikolayevskyData",
    "NilsolitonError",
    "PSystem",
    "SolvedX",
    "build_P",
    "classify",
    "condition_K",
    "feasible_signatures",
    "format_scaled_vector",
    "nikolayevsky",
    "parse_signature",
    "reconstruct_metric",
    "render_signature",
    "riemannian_exists",
    "signatures",
    "solve_P",
    "sort_signatures",
    "sweep",
]

DEFAULT_SAMPLES = tuple(Fraction(x) for x in ("-2", "-1/2", "1/4", "1/2", "3/4", "2", "5"))
NUMERIC_PREC = 128


class NilsolitonError(ValueError):
    pass


# --------------------------------------------------------------------------- helpers

def _root_matrix(obj) -> RootMatrix:
    return obj.root_matrix if isinstance(obj, NiceLieAlgebra) else obj


def format_scaled_vector(v: Sequence[Fraction]) -> str:
    """Write ``v`` as ``q(w_1,...,w_n)`` with ``w`` primitive and ``q > 0``, e.g. ``2/3(1,1,2)``."""
    v = [Fraction(x) for x in v]
    if all(x == 0 for x in v):
        return "(" + ",".join("0" for _ in v) + ")"
    num = reduce(gcd, (x.numerator for x in v if x != 0))
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in v))
    q = Fraction(abs(num), den)
    body = "(" + ",".join(str(int(x / q)) for x in v) + ")"
    return body if q == 1 else f"{q}{body}"


def render_signature(delta: Sequence[int]) -> str:
    """Indices of negative coefficients, e.g. ``(1,1,0,0,0,1,0) -> "126"``; ``"∅"`` when none."""
    s = "".join(str(i) for i, d in enumerate(delta, start=1) if d)
    return s or "∅"


def parse_signature(text: str, n: int) -> tuple[int, ...]:
    text = text.strip()
    if text in ("∅", "", "0", "{}", "empty"):
        return (0,) * n
    idx = {int(ch) for ch in text}
    if any(i < 1 or i > n for i in idx):
        raise ValueError(f"signature {text!r} out of range for dimension {n}")
    return tuple(1 if i in idx else 0 for i in range(1, n + 1))


def sort_signatures(sigs: Iterable[str]) -> tuple[str, ...]:
    """Empty signature first, then lexicographic order of the index strings."""
    return tuple(sorted(set(sigs), key=lambda s: (s != "∅", s)))


# --------------------------------------------------------------------------- N and K

@dataclass(frozen=True)
class NikolayevskyData:
    b: tuple[Fraction, ...]
    v: tuple[Fraction, ...]

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.v)

    @property
    def trace(self) -> Fraction:
        return sum(self.v, Fraction(0))

    def __str__(self) -> str:
        return format_scaled_vector(self.v)


def nikolayevsky(M) -> NikolayevskyData:
    """Diagonal Nikolayevsky derivation ``N = v^D``, ``v = tM b + [1]``.

    ``b`` is the minimum-norm solution of ``M tM b = [1]``.  The defining trace
    identity ``Tr(N v'^D) = Tr(v'^D)`` is checked on a basis of diagonal
    derivations ``v' in ker M``.
    """
    rm = _root_matrix(M)
    A = rm.matrix
    if A.nrows == 0:
        raise NilsolitonError("abelian algebra: no brackets")
    ones = [Fraction(1)] * A.nrows
    b = min_norm_solution(A @ A.T, ones)
    if b is None:
        raise NilsolitonError("no pre-Einstein solution: [1] is not in the image of M tM")
    v = tuple(x + 1 for x in A.T.apply(b))
    for w in kernel_rational(A):
        if sum((x * y for x, y in zip(v, w)), Fraction(0)) != sum(w, Fraction(0)):
            raise NilsolitonError("trace identity Tr(N X) = Tr X fails on a diagonal derivation")
    return NikolayevskyData(tuple(b), v)


@dataclass(frozen=True)
class AffineFamily:
    """Solutions ``X(t) = X0 + sum_i t_i alpha_i`` of ``M tM X = [1]``."""

    X0: tuple[Fraction, ...]
    kernel: tuple[tuple[int, ...], ...]

    @property
    def corank(self) -> int:
        return len(self.kernel)

    @property
    def m(self) -> int:
        return len(self.X0)

    def forms(self) -> tuple[tuple[Fraction, tuple[Fraction, ...]], ...]:
        """Entry ``j`` as ``(constant, coefficients in t)``."""
        return tuple(
            (self.X0[j], tuple(Fraction(a[j]) for a in self.kernel)) for j in range(self.m)
        )

    def member(self, t: Sequence) -> tuple:
        t = list(t)
        if len(t) != self.corank:
            raise ValueError("wrong number of parameters")
        return tuple(
            self.X0[j] + sum((a[j] * x for a, x in zip(self.kernel, t)), Fraction(0) * 0)
            for j in range(self.m)
        )

    def zero_entries(self) -> tuple[int, ...]:
        """Entries vanishing identically on the whole family (condition H fails for all X)."""
        return tuple(j for j, (c, a) in enumerate(self.forms()) if c == 0 and not any(a))


def condition_K(M) -> AffineFamily:
    """The affine family of condition K at ``lam = -1/2``."""
    rm = _root_matrix(M)
    A = rm.matrix
    if A.nrows == 0:
        raise NilsolitonError("abelian algebra: no brackets")
    X0 = min_norm_solution(A @ A.T, [Fraction(1)] * A.nrows)
    if X0 is None:
        raise NilsolitonError("no solution to K")
    return AffineFamily(tuple(X0), tuple(integer_kernel(A.T)))


# --------------------------------------------------------------------------- sparse multivariate polynomials

def _mp_const(c, k: int) -> dict:
    return {(0,) * k: Fraction(c)} if c != 0 else {}


def _mp_linear(const: Fraction, coeffs: Sequence[Fraction]) -> dict:
    k = len(coeffs)
    out = _mp_const(const, k)
    for i, a in enumerate(coeffs):
        if a != 0:
            e = [0] * k
            e[i] = 1
            out[tuple(e)] = Fraction(a)
    return out


def _mp_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def _mp_pow(p: dict, n: int, k: int) -> dict:
    out = _mp_const(1, k)
    for _ in range(n):
        out = _mp_mul(out, p)
    return out


def _mp_axpy(p: dict, q: dict, s: Fraction) -> dict:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, Fraction(0)) + s * c
    return {e: c for e, c in out.items() if c != 0}


def _mp_degree(p: dict) -> int:
    return max((sum(e) for e in p), default=0)


def _mp_to_poly(p: dict) -> Poly:
    deg = max((e[0] for e in p), default=0)
    coeffs = [Fraction(0)] * (deg + 1)
    for e, c in p.items():
        coeffs[e[0]] += c
    return Poly(coeffs)


def _mp_eval(p: dict, point: Sequence):
    total = 0
    for e, c in p.items():
        term = c
        for x, k in zip(point, e):
            if k:
                term = term * x ** k
        total = total + term
    return total


def _mp_derivative(p: dict, i: int) -> dict:
    out: dict = {}
    for e, c in p.items():
        if e[i]:
            f = list(e)
            f[i] -= 1
            out[tuple(f)] = out.get(tuple(f), Fraction(0)) + c * e[i]
    return {e: c for e, c in out.items() if c != 0}


def _mp_str(p: dict, names: Sequence[str]) -> str:
    if not p:
        return "0"
    parts = []
    for e, c in sorted(p.items(), reverse=True):
        mono = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(names, e) if k)
        parts.append(f"{c}*{mono}" if mono else str(c))
    return " + ".join(parts)


# --------------------------------------------------------------------------- condition P

@dataclass(frozen=True)
class PSystem:
    """Cleared monomial equations ``prod_{a>0} x_j^a - C prod_{a<0} x_j^-a = 0`` in the kernel coordinates."""

    nvars: int
    equations: tuple[dict, ...]
    forms: tuple[tuple[Fraction, tuple[Fraction, ...]], ...]
    kernel: tuple[tuple[int, ...], ...]

    @property
    def excluded_values(self) -> tuple[Fraction, ...]:
        """Parameter values where some entry of ``X`` vanishes (one-parameter case)."""
        if self.nvars != 1:
            raise ValueError("excluded values are defined for one parameter only")
        vals = {-c / a[0] for c, a in self.forms if a[0] != 0}
        return tuple(sorted(vals))

    def univariate(self) -> Poly:
        if self.nvars != 1:
            raise ValueError("system has more than one variable")
        return _mp_to_poly(self.equations[0])

    def describe(self) -> list[str]:
        names = [f"t{i + 1}" for i in range(self.nvars)]
        return [_mp_str(eq, names) + " = 0" for eq in self.equations]


def build_P(alg: NiceLieAlgebra, family: AffineFamily) -> PSystem:
    """Condition P for ``alg`` on the affine family of condition K."""
    k = family.corank
    forms = family.forms()
    c = alg.structure_constants
    lin = [_mp_linear(const, coeffs) for const, coeffs in forms]
    eqs = []
    for alpha in family.kernel:
        if sum(alpha) != 0:
            raise NilsolitonError("kernel vector of tM with nonzero coordinate sum")
        lhs, rhs = _mp_const(1, k), _mp_const(1, k)
        C = Fraction(1)
        for j, a in enumerate(alpha):
            if a > 0:
                lhs = _mp_mul(lhs, _mp_pow(lin[j], a, k))
            elif a < 0:
                rhs = _mp_mul(rhs, _mp_pow(lin[j], -a, k))
            C *= (c[j] * c[j]) ** a
        eqs.append(_mp_axpy(lhs, rhs, -C))
    return PSystem(k, tuple(eqs), forms, family.kernel)


# --------------------------------------------------------------------------- solutions of P

@dataclass(frozen=True)
class SolvedX:
    """A vector ``X`` satisfying K, H and P.

    ``values`` are exact rationals when ``kind == "rational"``; otherwise they
    are 128-bit approximations and ``signs`` are certified either through an
    isolating interval of an algebraic parameter (``"algebraic"``) or by an
    interval Newton test (``"numeric"``).
    """

    values: tuple
    signs: tuple[int, ...]
    kind: str = "rational"
    params: tuple = ()
    root: IsolatedRoot | None = None
    entry_polys: tuple[Poly, ...] = ()

    @property
    def exact(self) -> bool:
        return self.kind == "rational"

    @property
    def numeric(self) -> bool:
        return self.kind == "numeric"

    @property
    def logsign(self) -> tuple[int, ...]:
        return tuple(1 if s < 0 else 0 for s in self.signs)

    def approx(self, prec: int = NUMERIC_PREC) -> tuple:
        if self.exact:
            with mpmath.workprec(prec):
                return tuple(mpmath.mpf(x.numerator) / x.denominator for x in self.values)
        if self.root is not None and prec > NUMERIC_PREC:
            r = self.root.approx(prec + 16)
            with mpmath.workprec(prec + 16):
                return tuple(_poly_mpf(p, r) for p in self.entry_polys)
        return self.values

    def __str__(self) -> str:
        if self.exact:
            return format_scaled_vector(self.values) if all(x > 0 for x in self.values) else (
                "(" + ",".join(str(x) for x in self.values) + ")"
            )
        tag = "~" if self.kind == "algebraic" else "~num"
        return "(" + ",".join(mpmath.nstr(x, 12) for x in self.values) + ")" + tag


def _poly_mpf(p: Poly, x):
    acc = mpmath.mpf(0)
    for c in reversed(p.coeffs):
        acc = acc * x + mpmath.mpf(c.numerator) / c.denominator
    return acc


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _rational_solution(values: Sequence[Fraction], params=()) -> SolvedX | None:
    signs = tuple(_sign(x) for x in values)
    if 0 in signs:
        return None
    return SolvedX(tuple(values), signs, "rational", tuple(params))


def _algebraic_solution(root: IsolatedRoot, polys: Sequence[Poly], params: Sequence[Poly] = ()) -> SolvedX | None:
    if root.is_exact:
        vals = tuple(p(root.value) for p in polys)
        return _rational_solution(vals, tuple(q(root.value) for q in params) or (root.value,))
    signs = tuple(root.sign_of(p) for p in polys)
    if 0 in signs:
        return None
    r = root.approx(NUMERIC_PREC + 16)
    with mpmath.workprec(NUMERIC_PREC):
        vals = tuple(+_poly_mpf(p, r) for p in polys)
        pars = tuple(+_poly_mpf(q, r) for q in params) or (+r,)
    return SolvedX(vals, signs, "algebraic", pars, root, tuple(polys))


def _sample_points(excluded: Sequence[Fraction]) -> list[Fraction]:
    pts = sorted(set(excluded))
    if not pts:
        return [Fraction(0)]
    out = [pts[0] - 1]
    out += [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    out.append(pts[-1] + 1)
    return out


def _solve_one(system: PSystem, family: AffineFamily) -> list[SolvedX]:
    p = system.univariate()
    excluded = system.excluded_values
    polys = [Poly((c, a[0])) for c, a in system.forms]
    if p.is_zero():
        # P holds identically: every sign pattern of the family is attained
        return [s for s in (_rational_solution(family.member((t,)), (t,)) for t in _sample_points(excluded)) if s]
    out = []
    for r in isolate_real_roots(p, excluded=excluded):
        s = _algebraic_solution(r, polys)
        if s is not None:
            out.append(s)
    return out


# ---- several parameters: lex Groebner basis with a separating linear form

def _separating_weights(k: int) -> list[tuple[int, ...]]:
    cands = [
        tuple(range(1, k + 1)),
        tuple((-1) ** i * (i + 2) for i in range(k)),
        tuple(3 ** i for i in range(k)),
        tuple(i * i + i + 1 for i in range(k)),
        tuple(7 ** i - 2 * i for i in range(k)),
    ]
    return list(dict.fromkeys(cands))


def _to_sympy(p: dict, gens):
    import sympy

    return sympy.Poly.from_dict({e: sympy.Rational(c.numerator, c.denominator) for e, c in p.items()}, *gens, domain="QQ")


def _from_sympy_univariate(expr, u) -> Poly:
    import sympy

    sp = sympy.Poly(expr, u, domain="QQ")
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(sp.all_coeffs())]
    return Poly(coeffs)


def _shape_basis(G, ts, u):
    """``[g_1(u), ..., g_k(u)], h(u)`` if ``G`` is ``{t_i - g_i(u)} + {h(u)}``, else ``None``."""
    import sympy

    polys = list(G.exprs)
    if len(polys) != len(ts) + 1:
        return None
    h = [p for p in polys if not (sympy.Poly(p, *ts, u).free_symbols & set(ts))]
    if len(h) != 1:
        return None
    gs = []
    for t in ts:
        hit = None
        for p in polys:
            P = sympy.Poly(p, *ts, u)
            others = [s for s in ts if s != t]
            if P.degree(t) == 1 and all(P.degree(s) == 0 for s in others):
                lc = sympy.Poly(p, t).LC()
                if lc.free_symbols:
                    return None
                hit = sympy.expand(-(p - lc * t) / lc)
        if hit is None:
            return None
        gs.append(hit)
    return gs, h[0]


def _groebner_solutions(system: PSystem) -> list[SolvedX] | None:
    """Exact solutions via elimination, or ``None`` when no shape basis is found."""
    import sympy

    k = system.nvars
    ts = sympy.symbols(f"t1:{k + 1}")
    u = sympy.Symbol("u")
    eqs = [_to_sympy(e, ts).as_expr() for e in system.equations if e]
    if not eqs:
        return None
    lin = [
        sympy.Rational(c.numerator, c.denominator) + sum(sympy.Rational(a.numerator, a.denominator) * t for a, t in zip(co, ts))
        for c, co in system.forms
    ]
    nonconst = [x for x, (_, co) in zip(lin, system.forms) if any(co)]
    for w in _separating_weights(k):
        sep = u - sum(wi * t for wi, t in zip(w, ts))
        G = sympy.groebner(eqs + [sep], *ts, u, order="lex", domain="QQ")
        if list(G.exprs) == [1]:
            return []
        if not G.is_zero_dimensional:
            z = sympy.Symbol("z")
            sat = z * sympy.Mul(*nonconst) - 1
            Gz = sympy.groebner(eqs + [sep, sat], z, *ts, u, order="lex", domain="QQ")
            kept = [g for g in Gz.exprs if z not in g.free_symbols]
            if kept == [1]:
                return []
            if not kept:
                continue
            G = sympy.groebner(kept, *ts, u, order="lex", domain="QQ")
            if not G.is_zero_dimensional:
                continue
        shape = _shape_basis(G, ts, u)
        if shape is None:
            # pass to the radical in u and retry once
            h = [g for g in G.exprs if not (g.free_symbols & set(ts))]
            if len(h) != 1:
                continue
            hs = sympy.Poly(h[0], u)
            sqf = sympy.quo(hs, sympy.gcd(hs, hs.diff(u)))
            G = sympy.groebner(list(G.exprs) + [sqf.as_expr()], *ts, u, order="lex", domain="QQ")
            shape = _shape_basis(G, ts, u)
            if shape is None:
                continue
        gs, h = shape
        hpoly = _from_sympy_univariate(h, u)
        if hpoly.degree < 1:
            return []
        tpolys = [_from_sympy_univariate(g, u) for g in gs]
        xpolys = []
        for c, co in system.forms:
            acc = Poly((c,))
            for a, tp in zip(co, tpolys):
                if a:
                    acc = acc + tp * Poly((a,))
            xpolys.append(acc % hpoly if acc.degree >= hpoly.degree else acc)
        out = []
        for r in isolate_real_roots(hpoly):
            s = _algebraic_solution(r, xpolys, tpolys)
            if s is not None:
                out.append(s)
        return out
    return None


# ---- numeric fallback with interval certification

def _seed_grid_size(deg: int) -> int:
    env = os.environ.get("NILSOL_NUMERIC_SEED_GRID")
    if env:
        return max(2, int(env))
    return 2 * deg + 1


def _newton(eqs, jac, x0, tol):
    x = mpmath.matrix(x0)
    k = len(x0)
    for _ in range(80):
        F = mpmath.matrix([_mp_eval(e, list(x)) for e in eqs])
        J = mpmath.matrix([[_mp_eval(d, list(x)) for d in row] for row in jac])
        try:
            step = mpmath.lu_solve(J, F)
        except ZeroDivisionError:
            return None
        lam = mpmath.mpf(1)
        norm0 = mpmath.norm(F)
        while lam > mpmath.mpf(2) ** -20:
            y = x - lam * step
            Fy = mpmath.matrix([_mp_eval(e, list(y)) for e in eqs])
            if mpmath.norm(Fy) < norm0 or norm0 == 0:
                break
            lam /= 2
        x = y
        if mpmath.norm(step) * lam < tol:
            return [x[i] for i in range(k)]
        if mpmath.norm(x) > 1e12:
            return None
    return None


@contextlib.contextmanager
def _iv_prec(prec: int):
    # the interval context keeps its own precision, independent of mpmath.mp
    old = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        yield
    finally:
        mpmath.iv.prec = old


def _iv(x):
    iv = mpmath.iv
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / x.denominator
    return iv.mpf(x)


def _krawczyk(eqs, jac, y, radius) -> bool:
    """Interval Newton (Krawczyk) test: a unique zero lies within ``radius`` of ``y``."""
    iv = mpmath.iv
    k = len(y)
    J = mpmath.matrix([[_mp_eval(d, y) for d in row] for row in jac])
    try:
        Y = mpmath.inverse(J)
    except ZeroDivisionError:
        return False
    with _iv_prec(mpmath.mp.prec):
        return _krawczyk_contains(eqs, jac, y, radius, Y)


def _krawczyk_contains(eqs, jac, y, radius, Y) -> bool:
    iv = mpmath.iv
    k = len(y)
    box = [iv.mpf([yi - radius, yi + radius]) for yi in y]
    ycen = [iv.mpf(yi) for yi in y]
    Fy = [_mp_eval_iv(e, ycen) for e in eqs]
    Jx = [[_mp_eval_iv(d, box) for d in row] for row in jac]
    for i in range(k):
        acc = ycen[i]
        for j in range(k):
            acc -= iv.mpf(Y[i, j]) * Fy[j]
        for j in range(k):
            mij = iv.mpf(1 if i == j else 0)
            for l in range(k):
                mij -= iv.mpf(Y[i, l]) * Jx[l][j]
            acc += mij * (box[j] - ycen[j])
        if not (acc.a > box[i].a and acc.b < box[i].b):
            return False
    return True


def _mp_eval_iv(p: dict, point):
    iv = mpmath.iv
    total = iv.mpf(0)
    for e, c in p.items():
        term = _iv(c)
        for x, k in zip(point, e):
            if k:
                term = term * x ** k
        total = total + term
    return total


def _numeric_solutions(system: PSystem, family: AffineFamily, notes: list[str]) -> list[SolvedX]:
    k = system.nvars
    eqs = [e for e in system.equations if e]
    if len(eqs) != k:
        notes.append("numeric fallback skipped: P does not cut out finitely many points")
        return []
    jac = [[_mp_derivative(e, i) for i in range(k)] for e in eqs]
    deg = max(_mp_degree(e) for e in eqs)
    n_axis = _seed_grid_size(deg)
    scale = 1 + 2 * max((abs(x) for x in family.X0), default=Fraction(1))
    axis = [-scale + 2 * scale * Fraction(i, n_axis - 1) for i in range(n_axis)]
    found: list[list] = []
    with mpmath.workprec(NUMERIC_PREC):
        tol = mpmath.mpf(10) ** -30
        for seed in itertools.product(axis, repeat=k):
            x0 = [mpmath.mpf(s.numerator) / s.denominator + mpmath.mpf(1) / 997 for s in seed]
            x = _newton(eqs, jac, x0, tol)
            if x is None:
                continue
            if any(mpmath.norm(mpmath.matrix(x) - mpmath.matrix(y)) < 1e-8 for y in found):
                continue
            found.append(x)
        out = []
        for x in found:
            radius = mpmath.mpf(10) ** -25
            if not _krawczyk(eqs, jac, x, radius):
                notes.append(f"numeric fallback unverified candidate dropped: t ~ {[mpmath.nstr(v, 10) for v in x]}")
                continue
            signs, vals = [], []
            with _iv_prec(NUMERIC_PREC):
                box = [mpmath.iv.mpf([xi - radius, xi + radius]) for xi in x]
                for c, co in system.forms:
                    val = _iv(c)
                    for a, b in zip(co, box):
                        if a:
                            val += _iv(a) * b
                    if val.a > 0:
                        signs.append(1)
                    elif val.b < 0:
                        signs.append(-1)
                    else:
                        signs.append(0)
                    vals.append(mpmath.mpf(val.mid))
            if 0 in signs:
                continue
            out.append(SolvedX(tuple(vals), tuple(signs), "numeric", tuple(x)))
    return out


def solve_P(system: PSystem, family: AffineFamily, notes: list[str] | None = None) -> list[SolvedX]:
    """All ``X`` in the family satisfying H and P, each with certified signs."""
    notes = [] if notes is None else notes
    k = system.nvars
    if k == 0:
        s = _rational_solution(family.X0)
        return [s] if s else []
    if k == 1:
        return _solve_one(system, family)
    exact = _groebner_solutions(system)
    if exact is not None:
        return exact
    notes.append("elimination did not reach a shape basis; numeric fallback used")
    return _numeric_solutions(system, family, notes)


# --------------------------------------------------------------------------- signatures and metrics

def signatures(alg: NiceLieAlgebra, X: SolvedX | Sequence) -> frozenset[tuple[int, ...]]:
    """All ``delta`` with ``M_2 delta = logsign X``."""
    if isinstance(X, SolvedX):
        s = X.logsign
    else:
        s = tuple(1 if x < 0 else 0 for x in X)
    sol = gf2.gf2_affine_solutions(alg.root_matrix.mod2, s, alg.dim)
    return frozenset(sol) if sol is not None else frozenset()


def _log_targets(alg: NiceLieAlgebra, X: SolvedX):
    return [x / (c * c) for x, c in zip(X.values, alg.structure_constants)]


def reconstruct_metric(alg: NiceLieAlgebra, X: SolvedX, delta: Sequence[int]) -> DiagonalMetric:
    """A metric ``g`` of signature ``delta`` with ``e^{M}(|g|) c^2 = |X|``.

    ``log|g|`` is the echelon solution of ``M v = log(|X|/c^2)`` whose free
    coordinates (taken leftmost) vanish.  Irrational ``X`` gives an
    approximate metric (``exact=False``).
    """
    delta = tuple(int(d) % 2 for d in delta)
    rm = alg.root_matrix
    if tuple(gf2.mat_vec(rm.mod2, delta)) != X.logsign:
        raise NilsolitonError(f"signature {render_signature(delta)} does not satisfy M_2 delta = logsign X")
    A = rm.matrix
    order = list(reversed(range(alg.dim)))
    if X.exact:
        targets = [abs(t) for t in _log_targets(alg, X)]
        pps = [PowerProduct.from_rational(t) for t in targets]
        primes = sorted({p for pp in pps for p, _ in pp.factors})
        exps: list[dict[int, Fraction]] = [dict() for _ in range(alg.dim)]
        for p in primes:
            rhs = [pp.as_dict().get(p, Fraction(0)) for pp in pps]
            sol = solve_rational(A, rhs, column_order=order)
            if sol is None:
                raise NilsolitonError("X not exactly representable: log|X| - 2 log|c| is not in the image of M")
            for i, e in enumerate(sol):
                if e:
                    exps[i][p] = e
        coeffs = tuple(
            PowerProduct(-1 if d else 1, tuple(sorted(exps[i].items()))) for i, d in enumerate(delta)
        )
        return DiagonalMetric(coeffs)
    with mpmath.workprec(NUMERIC_PREC + 32):
        vals = X.approx(NUMERIC_PREC + 32)
        rhs = [mpmath.log(abs(x) / (mpmath.mpf(c.numerator) / c.denominator) ** 2)
               for x, c in zip(vals, alg.structure_constants)]
        v = _echelon_apply(A, rhs, order)
        coeffs = tuple((-1 if d else 1) * mpmath.exp(x) for x, d in zip(v, delta))
    return DiagonalMetric(coeffs, exact=False)


def _echelon_apply(A: Matrix, rhs, order):
    """Numeric twin of ``solve_rational(A, rhs, column_order=order)`` for consistent ``rhs``."""
    _, pivots, _ = rref(A, column_order=order)
    sub = Matrix.from_rows([[A[i, j] for j in pivots] for i in range(A.nrows)], len(pivots))
    _, rows, _ = rref(sub.T)
    B = Matrix.from_rows([[sub[i, j] for j in range(len(pivots))] for i in rows], len(pivots))
    r = len(pivots)
    inv_cols = [solve_rational(B, [Fraction(int(i == j)) for i in range(r)]) for j in range(r)]
    out = [mpmath.mpf(0)] * A.ncols
    for a, col in enumerate(pivots):
        acc = mpmath.mpf(0)
        for b, row in enumerate(rows):
            q = inv_cols[b][a]
            if q:
                acc += mpmath.mpf(q.numerator) / q.denominator * rhs[row]
        out[col] = acc
    return out


# --------------------------------------------------------------------------- feasibility (K, H, L only)

def _orthant_constraints(family: AffineFamily, pattern: Sequence[int]) -> list[Constraint]:
    cons = []
    for (c, co), s in zip(family.forms(), pattern):
        sgn = -1 if s else 1
        cons.append(Constraint.make([sgn * a for a in co], sgn * c, strict=True))
    return cons


def _image_patterns(alg: NiceLieAlgebra) -> list[tuple[int, ...]]:
    rm = alg.root_matrix
    basis = gf2.image_basis(rm.mod2, alg.dim)
    pats = []
    for bits in itertools.product((0, 1), repeat=len(basis)):
        v = (0,) * rm.m
        for b, w in zip(bits, basis):
            if b:
                v = gf2.add(v, w)
        pats.append(v)
    return pats


def feasible_signatures(alg: NiceLieAlgebra, family: AffineFamily | None = None) -> frozenset[tuple[int, ...]]:
    """Signatures ``delta`` for which some ``X`` satisfies K, H and ``logsign X = M_2 delta``."""
    family = condition_K(alg) if family is None else family
    out: set[tuple[int, ...]] = set()
    for s in _image_patterns(alg):
        if fm_feasible(_orthant_constraints(family, s), family.corank):
            sol = gf2.gf2_affine_solutions(alg.root_matrix.mod2, s, alg.dim)
            if sol is not None:
                out.update(sol)
    return frozenset(out)


def riemannian_exists(alg: NiceLieAlgebra, family: AffineFamily | None = None) -> bool:
    """Whether condition K admits a solution with all entries positive."""
    try:
        family = condition_K(alg) if family is None else family
    except NilsolitonError:
        return False
    if nikolayevsky(alg).is_zero:
        return False
    return fm_feasible(_orthant_constraints(family, (0,) * family.m), family.corank)


def positive_witness(alg: NiceLieAlgebra, family: AffineFamily | None = None):
    """A rational X in the solution space of K with every entry positive, or ``None``."""
    family = condition_K(alg) if family is None else family
    t = fm_witness(_orthant_constraints(family, (0,) * family.m), family.corank)
    return None if t is None else family.member(t)


# --------------------------------------------------------------------------- end to end

@dataclass
class ClassificationReport:
    name: str
    algebra: NiceLieAlgebra
    nikolayevsky: NikolayevskyData | None = None
    corank: int | None = None
    family: AffineFamily | None = None
    solutions: list[SolvedX] = field(default_factory=list)
    S: tuple[str, ...] = ()
    S0: tuple[str, ...] = ()
    obstruction: str | None = None
    failures: list[str] = field(default_factory=list)
    metrics: list[tuple[str, DiagonalMetric]] = field(default_factory=list)
    feasible: tuple[str, ...] = ()
    notes: list[str] = field(default_factory=list)

    @property
    def N(self) -> str:
        return str(self.nikolayevsky) if self.nikolayevsky is not None else ""

    @property
    def numeric(self) -> bool:
        return any(s.numeric for s in self.solutions)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "algebra": self.algebra.to_notation(),
            "params": {k: str(v) for k, v in self.algebra.params},
            "N": self.N,
            "corank": self.corank,
            "S": list(self.S),
            "S0": list(self.S0),
            "obstruction": self.obstruction,
            "failures": list(self.failures),
            "solutions": [
                {"X": [str(x) if s.exact else mpmath.nstr(x, 20) for x in s.values], "kind": s.kind}
                for s in self.solutions
            ],
            "metrics": [{"signature": d, "g": str(g), "exact": g.exact} for d, g in self.metrics],
            "notes": list(self.notes),
        }


def classify(alg: NiceLieAlgebra, with_metrics: bool = True) -> ClassificationReport:
    """Run N, K, H, L and P on ``alg`` and collect signatures and metrics.

    The obstruction is the first failing stage among N-zero, K, H, L, P when
    no signature survives.
    """
    rep = ClassificationReport(alg.name, alg)
    if len(irreducible_components(alg)) > 1:
        rep.notes.append("algebra is decomposable; signatures refer to the whole algebra")
    try:
        rep.nikolayevsky = nikolayevsky(alg)
        rep.family = fam = condition_K(alg)
    except NilsolitonError as exc:
        rep.obstruction = "K"
        rep.failures.append(f"K: {exc}")
        return rep
    rep.corank = fam.corank
    if rep.nikolayevsky.is_zero:
        rep.obstruction = "N-zero"
        rep.failures.append("N-zero: the Nikolayevsky derivation vanishes")
        return rep
    zero = fam.zero_entries()
    if zero:
        rep.failures.append(f"H: entries {[j + 1 for j in zero]} vanish on every solution of K")
        rep.obstruction = "H"
        return rep
    feas = feasible_signatures(alg, fam)
    rep.feasible = sort_signatures(render_signature(d) for d in feas)
    if not feas:
        rep.failures.append("L: no sign pattern of a K-solution lies in the image of M_2")
        rep.obstruction = "L"
        return rep
    system = build_P(alg, fam)
    try:
        sols = solve_P(system, fam, rep.notes)
    except SignUndetermined as exc:
        rep.failures.append(f"P: {exc}")
        rep.obstruction = "P"
        return rep
    rep.solutions = sols
    sigs: set[str] = set()
    for s in sols:
        deltas = signatures(alg, s)
        sigs.update(render_signature(d) for d in deltas)
        if with_metrics:
            for d in sorted(deltas):
                g = reconstruct_metric(alg, s, d)
                try:
                    verify_nilsoliton(alg, g, lam=Fraction(-1, 2))
                except NotNilsolitonError as exc:
                    raise NilsolitonError(f"reconstructed metric failed verification: {exc}") from exc
                rep.metrics.append((render_signature(d), g))
    rep.S = sort_signatures(sigs)
    if riemannian_exists(alg, fam):
        ker = gf2.kernel(alg.root_matrix.mod2, alg.dim)
        rep.S0 = sort_signatures(render_signature(d) for d in gf2.AffineSolutions((0,) * alg.dim, ker))
    if not rep.S:
        rep.obstruction = "P"
        rep.failures.append("P: no solution of the monomial equations satisfies H and L")
    missing = set(rep.S0) - set(rep.S)
    if missing:
        raise NilsolitonError(f"solver missed signatures guaranteed by a positive solution: {sorted(missing)}")
    return rep


def sweep(
    text: str,
    samples: Mapping[str, Sequence] | None = None,
    name: str = "",
    fixed: Mapping[str, object] | None = None,
    with_metrics: bool = False,
) -> list[tuple[dict, ClassificationReport | Exception]]:
    """Classify a parametric algebra at every combination of sample values.

    Values that make a structure constant vanish (leaving the family) are
    reported as the corresponding exception instead of a report.
    """
    samples = dict(samples or {"a": DEFAULT_SAMPLES})
    keys = sorted(samples)
    out = []
    for combo in itertools.product(*(samples[k] for k in keys)):
        params = dict(fixed or {})
        params.update({k: Fraction(v) for k, v in zip(keys, combo)})
        try:
            alg = parse_nice_algebra(text, params, name=name)
        except ZeroCoefficientError as exc:
            out.append((params, exc))
            continue
        out.append((params, classify(alg, with_metrics=with_metrics)))
    return out

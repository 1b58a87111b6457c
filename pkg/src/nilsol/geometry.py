"""Curvature of diagonal left-invariant metrics and the constructions built on it.

Two independent Ricci computations are provided: :func:`ricci_nice_diagonal`
uses the closed formula ``Ric = 1/2 tM X`` that is valid for nice bases, while
:func:`ricci_koszul` works from the Levi-Civita connection of an arbitrary
metric Lie algebra with a diagonal metric.  They serve as oracles for each other.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .algebra import NiceLieAlgebra, NotationError
from .exactnum import gf2
from .exactnum.powerproduct import PowerProduct, Surd, simplify

__all__ = [
    "DiagonalMetric",
    "EinsteinExtension",
    "GeometryError",
    "MetricLieAlgebra",
    "NilsolitonCertificate",
    "NotNilsolitonError",
    "RicciResult",
    "WickError",
    "einstein_extension",
    "nikolayevsky_vector",
    "ricci_koszul",
    "ricci_nice_diagonal",
    "verify_nilsoliton",
    "wick_rotate",
]

NUMERIC_PREC = 128
NUMERIC_TOL = mpmath.mpf(2) ** -100


def _hiprec(fn):
    """Run ``fn`` with at least the working precision used for approximate metrics."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with mpmath.workprec(max(mpmath.mp.prec, NUMERIC_PREC + 32)):
            return fn(*args, **kwargs)

    return wrapper


class GeometryError(ValueError):
    pass


class NotNilsolitonError(GeometryError):
    def __init__(self, message: str, defect=()):
        super().__init__(message)
        self.defect = tuple(defect)


class WickError(GeometryError):
    pass


# --------------------------------------------------------------------------- metrics

def _as_exact(x):
    if isinstance(x, PowerProduct):
        return x
    if isinstance(x, Surd):
        if x.is_rational():
            return PowerProduct.from_rational(x.to_fraction())
        if len(x.terms) == 1:
            (key, c), = x.terms
            return PowerProduct(1 if c > 0 else -1, key) * PowerProduct.from_rational(abs(c))
        raise GeometryError("metric coefficients must be signed power products")
    if isinstance(x, str):
        x = Fraction(x)
    return PowerProduct.from_rational(Fraction(x))


@dataclass(frozen=True)
class DiagonalMetric:
    """``g_1 e^1 (x) e^1 + ... + g_n e^n (x) e^n``.

    Exact metrics hold :class:`PowerProduct` coefficients.  Approximate ones
    (``exact=False``) hold ``mpmath.mpf`` values and only arise from irrational
    or numerically solved data.
    """

    coefficients: tuple
    exact: bool = True

    @_hiprec
    def __post_init__(self):
        if self.exact:
            object.__setattr__(self, "coefficients", tuple(_as_exact(c) for c in self.coefficients))
        else:
            object.__setattr__(self, "coefficients", tuple(mpmath.mpf(c) for c in self.coefficients))
            if any(c == 0 for c in self.coefficients):
                raise GeometryError("degenerate metric")

    @classmethod
    def parse(cls, text: str) -> "DiagonalMetric":
        """Parse ``"1,1,5/19,-5/361"``; bare rationals only."""
        try:
            vals = [Fraction(t.strip()) for t in text.split(",") if t.strip()]
        except (ValueError, ZeroDivisionError) as exc:
            raise NotationError(f"bad metric {text!r}: {exc}", text) from None
        if any(v == 0 for v in vals):
            raise GeometryError("degenerate metric")
        return cls(tuple(vals))

    @property
    def n(self) -> int:
        return len(self.coefficients)

    @property
    def signature(self) -> tuple[int, ...]:
        if self.exact:
            return tuple(1 if c.sign < 0 else 0 for c in self.coefficients)
        return tuple(1 if c < 0 else 0 for c in self.coefficients)

    def values(self, prec: int = NUMERIC_PREC) -> tuple:
        if self.exact:
            return tuple(c.to_mpf(prec) for c in self.coefficients)
        return self.coefficients

    @_hiprec
    def flipped(self, delta: Sequence[int]) -> "DiagonalMetric":
        """``(-1)^delta g``."""
        return DiagonalMetric(tuple(-c if d % 2 else c for c, d in zip(self.coefficients, delta)), self.exact)

    def __str__(self) -> str:
        if self.exact:
            return "(" + ",".join(str(c) for c in self.coefficients) + ")"
        return "(" + ",".join(mpmath.nstr(c, 20) for c in self.coefficients) + ")~"


# --------------------------------------------------------------------------- Ricci

@dataclass(frozen=True)
class RicciResult:
    """Ricci operator as a full matrix (``operator[i][j]`` = component along ``e_i`` of ``Ric e_j``)."""

    operator: tuple[tuple, ...]
    exact: bool = True

    @property
    def n(self) -> int:
        return len(self.operator)

    @property
    def diagonal(self) -> tuple:
        return tuple(self.operator[i][i] for i in range(self.n))

    @property
    def scalar(self):
        total = Surd.from_value(0) if self.exact else mpmath.mpf(0)
        for d in self.diagonal:
            total = total + (Surd.from_value(d) if self.exact else d)
        return simplify(total) if self.exact else total

    def is_diagonal(self) -> bool:
        return all(_is_zero(self.operator[i][j]) for i in range(self.n) for j in range(self.n) if i != j)

    def equals(self, other: "RicciResult") -> bool:
        if self.n != other.n:
            return False
        return all(
            _same(a, b) for ra, rb in zip(self.operator, other.operator) for a, b in zip(ra, rb)
        )


def _is_zero(x) -> bool:
    if isinstance(x, Surd):
        return x.is_zero()
    if isinstance(x, Fraction) or isinstance(x, int):
        return x == 0
    return abs(x) < NUMERIC_TOL


def _same(a, b) -> bool:
    if isinstance(a, mpmath.mpf) or isinstance(b, mpmath.mpf):
        return abs(mpmath.mpf(_to_mpf(a)) - _to_mpf(b)) < NUMERIC_TOL
    return Surd.from_value(a) == Surd.from_value(b)


def _to_mpf(x):
    if isinstance(x, (Surd, PowerProduct)):
        return x.to_mpf(NUMERIC_PREC)
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _diag_result(diag: Sequence, exact: bool) -> RicciResult:
    n = len(diag)
    zero = Fraction(0) if exact else mpmath.mpf(0)
    op = tuple(tuple(diag[i] if i == j else zero for j in range(n)) for i in range(n))
    return RicciResult(op, exact)


def _check_dims(alg: NiceLieAlgebra, g: DiagonalMetric) -> None:
    if g.n != alg.dim:
        raise GeometryError(f"metric has {g.n} coefficients, algebra has dimension {alg.dim}")


@_hiprec
def x_vector(alg: NiceLieAlgebra, g: DiagonalMetric) -> tuple:
    """``X = e^{M}(g) c^2``: one entry ``g_k c^2 / (g_i g_j)`` per bracket."""
    _check_dims(alg, g)
    gs = g.coefficients
    if g.exact:
        return tuple(gs[k - 1] / (gs[i - 1] * gs[j - 1]) * (c * c) for i, j, k, c in alg.brackets)
    return tuple(gs[k - 1] / (gs[i - 1] * gs[j - 1]) * _to_mpf(c * c) for i, j, k, c in alg.brackets)


@_hiprec
def ricci_nice_diagonal(alg: NiceLieAlgebra, g: DiagonalMetric) -> RicciResult:
    """Ricci operator of a diagonal metric on a nice algebra via ``Ric = 1/2 tM X``."""
    X = x_vector(alg, g)
    n = alg.dim
    if g.exact:
        acc = [Surd.from_value(0) for _ in range(n)]
        for (i, j, k, _), x in zip(alg.brackets, X):
            sx = Surd.from_value(x) * Fraction(1, 2)
            acc[i - 1] = acc[i - 1] - sx
            acc[j - 1] = acc[j - 1] - sx
            acc[k - 1] = acc[k - 1] + sx
        return _diag_result([simplify(a) for a in acc], True)
    acc = [mpmath.mpf(0)] * n
    for (i, j, k, _), x in zip(alg.brackets, X):
        acc[i - 1] -= x / 2
        acc[j - 1] -= x / 2
        acc[k - 1] += x / 2
    return _diag_result(acc, False)


@dataclass(frozen=True)
class MetricLieAlgebra:
    """A Lie algebra with arbitrary structure constants and a diagonal metric.

    ``brackets`` lists ``(i, j, k, c)`` with ``[e_i, e_j] = c e_k`` for ``i < j``;
    several targets per pair are allowed.  ``labels`` names the basis vectors
    for display (the Einstein extension labels its extra vector ``0``).
    """

    dim: int
    brackets: tuple[tuple[int, int, int, Fraction], ...]
    metric: DiagonalMetric
    labels: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(1, self.dim + 1)))
        if self.metric.n != self.dim:
            raise GeometryError("metric size does not match dimension")

    @classmethod
    def from_nice(cls, alg: NiceLieAlgebra, g: DiagonalMetric) -> "MetricLieAlgebra":
        return cls(alg.dim, tuple(alg.brackets), g)

    def structure(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        """Antisymmetric structure constants keyed by ordered pairs (0-based)."""
        out: dict[tuple[int, int], dict[int, Fraction]] = {}
        for i, j, k, c in self.brackets:
            a, b = i - 1, j - 1
            out.setdefault((a, b), {})
            out[(a, b)][k - 1] = out[(a, b)].get(k - 1, Fraction(0)) + Fraction(c)
            out.setdefault((b, a), {})
            out[(b, a)][k - 1] = out[(b, a)].get(k - 1, Fraction(0)) - Fraction(c)
        return out

    def jacobi_defects(self) -> list[tuple[int, int, int]]:
        st = self.structure()

        def br(u: dict[int, Fraction], b: int) -> dict[int, Fraction]:
            out: dict[int, Fraction] = {}
            for a, x in u.items():
                for k, c in st.get((a, b), {}).items():
                    out[k] = out.get(k, Fraction(0)) + x * c
            return out

        bad = []
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    tot: dict[int, Fraction] = {}
                    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                        for idx, val in br(st.get((a, b), {}), c).items():
                            tot[idx] = tot.get(idx, Fraction(0)) + val
                    if any(v != 0 for v in tot.values()):
                        bad.append((i + 1, j + 1, k + 1))
        return bad


@_hiprec
def ricci_koszul(mla: MetricLieAlgebra) -> RicciResult:
    """Ricci operator from the Koszul formula, exact for exact metrics.

    ``nabla_{e_a} e_b = sum_k G[a][b][k] e_k`` with
    ``2 g_k G[a][b][k] = c_ab^k g_k - c_bk^a g_a + c_ka^b g_b``; curvature
    ``R(a, b) = [L_a, L_b] - sum_q c_ab^q L_q`` and
    ``Ric(y, z) = sum_a (R(e_a, e_y) e_z)^a``.
    """
    n = mla.dim
    st = mla.structure()
    g = mla.metric
    if g.exact:
        rational = all(c.is_rational() for c in g.coefficients)
        gv = [c.to_fraction() if rational else Surd.from_value(c) for c in g.coefficients]
        zero = Fraction(0) if rational else Surd.from_value(0)
        inv = [1 / x for x in gv]
    else:
        gv = list(g.coefficients)
        zero = mpmath.mpf(0)
        inv = [1 / x for x in gv]

    def c(a: int, b: int, k: int):
        return st.get((a, b), {}).get(k, 0)

    # L[a] is the sparse matrix of nabla_{e_a}: L[a][(k, b)] = G[a][b][k]
    L: list[dict[tuple[int, int], object]] = []
    for a in range(n):
        La: dict[tuple[int, int], object] = {}
        for b in range(n):
            for k in range(n):
                t1, t2, t3 = c(a, b, k), c(b, k, a), c(k, a, b)
                if t1 == 0 and t2 == 0 and t3 == 0:
                    continue
                val = (gv[k] * t1 - gv[a] * t2 + gv[b] * t3) * inv[k] / 2
                if not _is_zero(val):
                    La[(k, b)] = val
        L.append(La)

    def matmul(A: dict, B: dict) -> dict:
        out: dict = {}
        by_row: dict[int, list] = {}
        for (r, s), v in B.items():
            by_row.setdefault(r, []).append((s, v))
        for (i, r), u in A.items():
            for s, v in by_row.get(r, ()):
                out[(i, s)] = out.get((i, s), zero) + u * v
        return out

    def axpy(acc: dict, A: dict, scale) -> None:
        for key, v in A.items():
            acc[key] = acc.get(key, zero) + v * scale

    ric = [[zero] * n for _ in range(n)]
    prods = {}
    for a in range(n):
        for y in range(n):
            if a == y:
                continue
            if (a, y) not in prods:
                prods[(a, y)] = matmul(L[a], L[y])
            if (y, a) not in prods:
                prods[(y, a)] = matmul(L[y], L[a])
            R: dict = {}
            axpy(R, prods[(a, y)], 1)
            axpy(R, prods[(y, a)], -1)
            for q, cq in st.get((a, y), {}).items():
                axpy(R, L[q], -cq)
            # (R e_z)^a for every z contributes to Ric(y, z)
            for (row, z), v in R.items():
                if row == a:
                    ric[y][z] = ric[y][z] + v
    op = []
    for i in range(n):
        row = []
        for j in range(n):
            v = ric[i][j] * inv[i]
            row.append(simplify(v) if isinstance(v, Surd) else v)
        op.append(tuple(row))
    return RicciResult(tuple(op), g.exact)


# --------------------------------------------------------------------------- nilsolitons

def nikolayevsky_vector(alg: NiceLieAlgebra) -> tuple[Fraction, ...]:
    """Diagonal Nikolayevsky derivation ``v = tM b + 1`` with ``M tM b = 1``."""
    from .exactnum.linalg import min_norm_solution

    M = alg.root_matrix.matrix
    if M.nrows == 0:
        return tuple(Fraction(1) for _ in range(alg.dim))
    b = min_norm_solution(M @ M.T, [Fraction(1)] * M.nrows)
    if b is None:
        raise GeometryError("M tM b = [1] has no solution")
    tb = M.T.apply(b)
    return tuple(x + 1 for x in tb)


@dataclass(frozen=True)
class NilsolitonCertificate:
    """Outcome of :func:`verify_nilsoliton`: ``Ric = lam id + D`` with ``D = -lam N``."""

    lam: object
    derivation: tuple
    nikolayevsky: tuple[Fraction, ...]
    ricci: RicciResult
    exact: bool = True

    @property
    def normalized(self) -> bool:
        return _same(self.lam, Fraction(-1, 2))


@_hiprec
def verify_nilsoliton(alg: NiceLieAlgebra, g: DiagonalMetric, lam=None) -> NilsolitonCertificate:
    """Check that ``g`` is a nilsoliton of type Nil4 on ``alg``.

    The constant ``lam`` is detected from the Ricci operator unless given.
    Raises :class:`NotNilsolitonError` carrying the entrywise defect of
    ``Ric - lam (id - N)`` on failure, or when the derivation part vanishes.
    """
    ric = ricci_nice_diagonal(alg, g)
    r = ric.diagonal
    v = nikolayevsky_vector(alg)
    exact = g.exact
    if exact:
        r = [Surd.from_value(x) for x in r]
    # D = Ric - lam id is a derivation iff M(Ric) = -lam [1]
    rows = alg.root_matrix.rows
    mr = [r[k - 1] - r[i - 1] - r[j - 1] for (i, j), k in rows]
    if lam is None:
        if mr:
            lam = -mr[0]
        else:
            lam = Surd.from_value(0) if exact else mpmath.mpf(0)
    else:
        lam = Surd.from_value(Fraction(lam)) if exact else _to_mpf(Fraction(lam))
    one = Fraction(1)
    defect = []
    for ri, vi in zip(r, v):
        want = lam * (one - vi) if exact else lam * (1 - _to_mpf(vi))
        defect.append(ri - want)
    bad = any(not _is_zero(d) for d in defect)
    bad = bad or any(not _is_zero(x + lam) for x in mr)
    out_defect = tuple(simplify(d) if isinstance(d, Surd) else d for d in defect)
    if bad:
        raise NotNilsolitonError("Ricci operator is not lam(id - N) for a derivation N", out_defect)
    D = tuple(ri - lam for ri in r)
    if all(_is_zero(d) for d in D):
        raise NotNilsolitonError("Einstein or Ricci-flat metric, not of type Nil4", out_defect)
    if _is_zero(lam):
        raise NotNilsolitonError("lam = 0: Ricci is a derivation but not of type Nil4", out_defect)
    D_out = tuple(simplify(d) if isinstance(d, Surd) else d for d in D)
    lam_out = simplify(lam) if isinstance(lam, Surd) else lam
    return NilsolitonCertificate(lam_out, D_out, v, ric, exact)


# --------------------------------------------------------------------------- Wick rotation

@_hiprec
def wick_rotate(alg: NiceLieAlgebra, W: Sequence[int], g: DiagonalMetric | None = None):
    """Wick rotation by ``W in Z^n``: new constants ``c (-1)^((w_i + w_j - w_k)/2)``.

    Returns ``(alg_W, g_W)`` with ``g_W = (-1)^W g``.  Requires ``W mod 2`` to
    lie in the kernel of the mod-2 root matrix.  When ``g`` is a nilsoliton,
    the rotated metric is checked to be one as well.
    """
    W = tuple(int(w) for w in W)
    if len(W) != alg.dim:
        raise WickError(f"W has length {len(W)}, expected {alg.dim}")
    delta = tuple(w % 2 for w in W)
    if any(gf2.mat_vec(alg.root_matrix.mod2, delta)):
        raise WickError("span of i^W e_k is not closed under the bracket (W mod 2 not in ker M_2)")
    new_c = []
    for i, j, k, c in alg.brackets:
        e = (W[i - 1] + W[j - 1] - W[k - 1]) // 2
        new_c.append(-c if e % 2 else c)
    name = f"{alg.name}^W" if alg.name else ""
    alg_w = alg.with_constants(new_c, name=name)
    if g is None:
        return alg_w, None
    g_w = g.flipped(delta)
    try:
        verify_nilsoliton(alg, g)
    except NotNilsolitonError:
        return alg_w, g_w
    verify_nilsoliton(alg_w, g_w)
    return alg_w, g_w


# --------------------------------------------------------------------------- Einstein extension

@dataclass(frozen=True)
class EinsteinExtension:
    algebra: MetricLieAlgebra
    lam: object
    e0_coefficient: object
    ricci: RicciResult


@_hiprec
def einstein_extension(alg: NiceLieAlgebra, g: DiagonalMetric) -> EinsteinExtension:
    """Rank-one extension ``alg x_N span(e_0)`` with metric ``g - (Tr N / lam) e^0 (x) e^0``.

    The extra vector acts by ``[e_0, e_i] = v_i e_i``; internally it is the last
    basis vector.  The Koszul Ricci operator is checked to equal ``lam id``.
    """
    cert = verify_nilsoliton(alg, g)
    v = cert.nikolayevsky
    trN = sum(v, Fraction(0))
    if trN == 0:
        raise NotNilsolitonError("not Nil4: N = 0")
    n = alg.dim
    e0 = n + 1
    brackets = list(alg.brackets)
    for i, vi in enumerate(v, start=1):
        if vi != 0:
            # [e_i, e_0] = -v_i e_i
            brackets.append((i, e0, i, -vi))
    lam = cert.lam
    if g.exact:
        coeff = simplify(Surd.from_value(-trN) / Surd.from_value(lam))
        metric = DiagonalMetric(g.coefficients + (_as_exact(coeff),))
    else:
        coeff = -_to_mpf(trN) / lam
        metric = DiagonalMetric(g.coefficients + (coeff,), exact=False)
    mla = MetricLieAlgebra(n + 1, tuple(brackets), metric, tuple(range(1, n + 1)) + (0,))
    if mla.jacobi_defects():
        raise GeometryError("extension violates the Jacobi identity")
    ric = ricci_koszul(mla)
    target = _diag_result([lam] * (n + 1), g.exact)
    if not ric.equals(target):
        raise GeometryError("extension is not Einstein: Koszul Ricci differs from lam id")
    return EinsteinExtension(mla, lam, coeff, ric)

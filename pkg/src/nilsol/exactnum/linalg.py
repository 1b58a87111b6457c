"""Exact linear algebra over Q and Z.

Matrices are plain row sequences (tuples of tuples); entries may be ``int`` or
``Fraction``. Every routine pivots deterministically (first nonzero column,
first available row) so results are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with an explicit shape (so 0-row matrices keep ``ncols``)."""

    nrows: int
    ncols: int
    data: tuple

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], ncols: int | None = None) -> "Matrix":
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix without rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        return cls(len(rows), ncols, rows)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, ncols, tuple((0,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple:
        return self.data[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.ncols, self.nrows, tuple(self.col(j) for j in range(self.ncols)))

    def apply(self, vec: Sequence) -> tuple:
        if len(vec) != self.ncols:
            raise ValueError("shape mismatch")
        return tuple(sum((a * x for a, x in zip(r, vec)), 0) for r in self.data)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = [other.col(j) for j in range(other.ncols)]
        return Matrix(
            self.nrows,
            other.ncols,
            tuple(tuple(sum((a * b for a, b in zip(r, c)), 0) for c in cols) for r in self.data),
        )

    def tolist(self) -> list:
        return [list(r) for r in self.data]


def _as_rows(A) -> tuple[list[list[Fraction]], int]:
    if isinstance(A, Matrix):
        return [[Fraction(x) for x in r] for r in A.data], A.ncols
    rows = [[Fraction(x) for x in r] for r in A]
    if not rows:
        raise ValueError("pass a Matrix to give a row-less matrix its width")
    return rows, len(rows[0])


def rref(A, rhs: Sequence | None = None, column_order: Sequence[int] | None = None):
    """Reduced row echelon form.

    Returns ``(rows, pivots, rhs)`` where ``pivots[r]`` is the pivot column of
    row ``r``. ``column_order`` changes the order in which columns are tried as
    pivots; the default is left to right.
    """
    rows, ncols = _as_rows(A)
    b = [Fraction(x) for x in rhs] if rhs is not None else None
    if b is not None and len(b) != len(rows):
        raise ValueError("rhs length does not match row count")
    order = list(range(ncols)) if column_order is None else list(column_order)
    pivots: list[int] = []
    r = 0
    for c in order:
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            rows[p], rows[r] = rows[r], rows[p]
            if b is not None:
                b[p], b[r] = b[r], b[p]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        if b is not None:
            b[r] *= inv
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                if b is not None:
                    b[i] -= f * b[r]
        pivots.append(c)
        r += 1
    return rows, pivots, b


def rank(A) -> int:
    if isinstance(A, Matrix) and A.nrows == 0:
        return 0
    return len(rref(A)[1])


def solve_rational(A, rhs: Sequence, column_order: Sequence[int] | None = None) -> tuple[Fraction, ...] | None:
    """Return some ``x`` with ``A x = rhs`` (free variables set to zero), or ``None``."""
    if isinstance(A, Matrix) and A.nrows == 0:
        return tuple(Fraction(0) for _ in range(A.ncols))
    rows, pivots, b = rref(A, rhs, column_order)
    ncols = len(rows[0]) if rows else 0
    for i in range(len(pivots), len(rows)):
        if b[i] != 0:
            return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = b[r]
    return tuple(x)


def kernel_rational(A) -> list[tuple[Fraction, ...]]:
    """Basis of ``ker A`` read off the reduced echelon form (one vector per free column)."""
    if isinstance(A, Matrix) and A.nrows == 0:
        n = A.ncols
        return [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    rows, pivots, _ = rref(A)
    ncols = len(rows[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f]
        basis.append(tuple(v))
    return basis


def min_norm_solution(A, rhs: Sequence) -> tuple[Fraction, ...] | None:
    """Solution of ``A x = rhs`` orthogonal to ``ker A`` (the minimum-norm one)."""
    x = solve_rational(A, rhs)
    if x is None:
        return None
    K = kernel_rational(A)
    if not K:
        return x
    # project x off span(K): solve (K^T K) y = K^T x
    gram = [[sum((a * b for a, b in zip(u, w)), Fraction(0)) for w in K] for u in K]
    proj = [sum((a * b for a, b in zip(u, x)), Fraction(0)) for u in K]
    y = solve_rational(gram, proj)
    return tuple(xi - sum((yj * u[i] for yj, u in zip(y, K)), Fraction(0)) for i, xi in enumerate(x))


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        return tuple(int(x) for x in v)
    first = next(x for x in v if x != 0)
    if first < 0:
        g = -g
    return tuple(int(x) // g for x in v)


def hermite_rows(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form of an integer matrix (zero rows dropped)."""
    H = [list(int(x) for x in r) for r in rows]
    if not H:
        return []
    ncols = len(H[0])
    r = 0
    for c in range(ncols):
        if r == len(H):
            break
        # Euclid down column c among rows r..
        while True:
            nz = [i for i in range(r, len(H)) if H[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(H[i][c]), i))
            H[r], H[p] = H[p], H[r]
            done = True
            for i in range(r + 1, len(H)):
                if H[i][c] != 0:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    if H[i][c] != 0:
                        done = False
            if done:
                break
        if all(H[i][c] == 0 for i in range(r, len(H))):
            continue
        if H[r][c] < 0:
            H[r] = [-a for a in H[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
        r += 1
    return [tuple(h) for h in H[:r]]


def integer_kernel(A) -> list[tuple[int, ...]]:
    """Z-basis of the integer kernel lattice of ``A``, each vector primitive.

    Column operations (extended Euclid) reduce ``A`` to column echelon form
    while tracking the unimodular transform; columns whose image vanishes
    span the kernel lattice. The basis is finally put in Hermite form so the
    output does not depend on the elimination path.
    """
    if not isinstance(A, Matrix):
        A = Matrix.from_rows(A)
    m, n = A.nrows, A.ncols
    cols = [[int(A[i, j]) for i in range(m)] for j in range(n)]
    U = [[int(i == j) for i in range(n)] for j in range(n)]  # U[j] tracks column j
    p = 0
    for i in range(m):
        if p == n:
            break
        while True:
            nz = [j for j in range(p, n) if cols[j][i] != 0]
            if len(nz) <= 1:
                break
            j0 = min(nz, key=lambda j: (abs(cols[j][i]), j))
            for j in nz:
                if j != j0:
                    q = cols[j][i] // cols[j0][i]
                    cols[j] = [a - q * b for a, b in zip(cols[j], cols[j0])]
                    U[j] = [a - q * b for a, b in zip(U[j], U[j0])]
        nz = [j for j in range(p, n) if cols[j][i] != 0]
        if nz:
            j = nz[0]
            cols[p], cols[j] = cols[j], cols[p]
            U[p], U[j] = U[j], U[p]
            p += 1
    basis = [U[j] for j in range(p, n)]
    return [_primitive(v) for v in hermite_rows(basis)]

"""Linear algebra over GF(2).

Vectors are tuples of 0/1 ints; matrices are sequences of such rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

GF2Vector = tuple


def reduce_mod2(rows: Sequence[Sequence[int]]) -> tuple[GF2Vector, ...]:
    return tuple(tuple(int(x) % 2 for x in r) for r in rows)


def mat_vec(A: Sequence[Sequence[int]], x: Sequence[int]) -> GF2Vector:
    return tuple(sum(a & b for a, b in zip(r, x)) % 2 for r in A)


def add(u: Sequence[int], v: Sequence[int]) -> GF2Vector:
    return tuple(a ^ b for a, b in zip(u, v))


@dataclass(frozen=True)
class AffineSolutions:
    """Solution set ``particular + span(kernel)`` of a GF(2) system."""

    particular: GF2Vector
    kernel: tuple[GF2Vector, ...]

    def __len__(self) -> int:
        return 2 ** len(self.kernel)

    def __iter__(self) -> Iterator[GF2Vector]:
        for coeffs in product((0, 1), repeat=len(self.kernel)):
            v = self.particular
            for c, k in zip(coeffs, self.kernel):
                if c:
                    v = add(v, k)
            yield v


def _eliminate(A: Sequence[Sequence[int]], s: Sequence[int] | None, ncols: int):
    rows = [list(r) for r in reduce_mod2(A)]
    b = [int(x) % 2 for x in s] if s is not None else [0] * len(rows)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        b[r], b[p] = b[p], b[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                rows[i] = [x ^ y for x, y in zip(rows[i], rows[r])]
                b[i] ^= b[r]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots, b


def kernel(A: Sequence[Sequence[int]], ncols: int) -> tuple[GF2Vector, ...]:
    rows, pivots, _ = _eliminate(A, None, ncols)
    basis = []
    for f in (c for c in range(ncols) if c not in pivots):
        v = [0] * ncols
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = rows[r][f]
        basis.append(tuple(v))
    return tuple(basis)


def rank(A: Sequence[Sequence[int]], ncols: int) -> int:
    return len(_eliminate(A, None, ncols)[1])


def gf2_affine_solutions(A: Sequence[Sequence[int]], s: Sequence[int], ncols: int | None = None) -> AffineSolutions | None:
    """Solve ``A x = s`` over GF(2); ``None`` when the system is inconsistent."""
    if ncols is None:
        if not A:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(A[0])
    if len(s) != len(A):
        raise ValueError("rhs length does not match row count")
    rows, pivots, b = _eliminate(A, s, ncols)
    if any(b[i] for i in range(len(pivots), len(rows))):
        return None
    x = [0] * ncols
    for r, c in enumerate(pivots):
        x[c] = b[r]
    return AffineSolutions(tuple(x), kernel(A, ncols))


def image_basis(A: Sequence[Sequence[int]], ncols: int) -> tuple[GF2Vector, ...]:
    """Basis of the column space of ``A`` (vectors of length ``len(A)``)."""
    cols = [tuple(int(r[j]) % 2 for r in A) for j in range(ncols)]
    if not A:
        return ()
    rows, pivots, _ = _eliminate([list(c) for c in cols], None, len(A))
    return tuple(tuple(r) for r in rows[: len(pivots)])

"""Univariate polynomials over Q and exact real root isolation.

Rational roots are found exactly; the remaining real roots are isolated with
Sturm sequences and bisection, and carried as :class:`IsolatedRoot` intervals
that can be refined on demand.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd, lcm
from typing import Iterable, Sequence

import mpmath


def max_refine() -> int:
    return int(os.environ.get("NILSOL_MAX_REFINE", "256"))


class SignUndetermined(ArithmeticError):
    """Interval refinement hit the depth limit before a sign was certified."""


@dataclass(frozen=True)
class Poly:
    """Dense polynomial with ``Fraction`` coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, (int, Fraction)) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other) -> "Poly":
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Poly":
        return _lift(other) - self

    def __mul__(self, other) -> "Poly":
        other = _lift(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        out = Poly((1,))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(len(r) - len(other.coeffs) + 1, 0)
        d, lc = other.degree, other.lead
        while len(r) - 1 >= d and r:
            shift = len(r) - 1 - d
            f = r[-1] / lc
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                r[shift + i] -= f * c
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return Poly(q), Poly(r)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> "Poly":
        return Poly(c / self.lead for c in self.coeffs) if self.coeffs else self

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def primitive_int(self) -> tuple[int, ...]:
        """Integer coefficients of the primitive associate with positive leading coefficient."""
        den = lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        g = g or 1
        if ints and ints[-1] < 0:
            g = -g
        return tuple(v // g for v in ints)

    def sign_at(self, x: Fraction) -> int:
        v = self(x)
        return (v > 0) - (v < 0)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" + ("" if i == 0 else "*x" if i == 1 else f"*x^{i}"))
        return "Poly(" + " + ".join(terms) + ")"


def _lift(p) -> Poly:
    return p if isinstance(p, Poly) else Poly((p,))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``p = lc * prod f_i^i`` with each ``f_i`` squarefree and coprime."""
    if p.degree < 1:
        return []
    out = []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    i = 1
    while b.degree >= 1:
        a = poly_gcd(b, d)
        b, c = b // a, d // a
        if a.degree >= 1:
            out.append((a, i))
        d = c - b.derivative()
        i += 1
    return out


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def _variations(seq: Sequence[Poly], x: Fraction) -> int:
    signs = [s for s in (q.sign_at(x) for q in seq) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def _variations_inf(seq: Sequence[Poly], positive: bool) -> int:
    signs = []
    for q in seq:
        s = 1 if q.lead > 0 else -1
        if not positive and q.degree % 2:
            s = -s
        signs.append(s)
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def count_real_roots(p: Poly, lo: Fraction | None = None, hi: Fraction | None = None) -> int:
    """Number of distinct real roots in ``(lo, hi]`` (``None`` meaning infinite)."""
    if p.is_zero():
        raise ValueError("zero polynomial has infinitely many roots")
    if p.degree < 1:
        return 0
    seq = sturm_sequence(p)
    vlo = _variations_inf(seq, False) if lo is None else _variations(seq, lo)
    vhi = _variations_inf(seq, True) if hi is None else _variations(seq, hi)
    return vlo - vhi


def root_bound(p: Poly) -> Fraction:
    """Strict upper bound on the absolute value of every root (Cauchy)."""
    lc = abs(p.lead)
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0)) + 1


def _interval_eval(p: Poly, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    # Horner over intervals; exact endpoints
    a = b = Fraction(0)
    for c in reversed(p.coeffs):
        prods = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(prods) + c, max(prods) + c
    return a, b


@dataclass(frozen=True)
class IsolatedRoot:
    """A real root of ``poly``: exact when ``value`` is set, else inside the open interval ``(lo, hi)``.

    ``poly`` is squarefree and changes sign strictly across the interval.
    """

    poly: Poly
    lo: Fraction
    hi: Fraction
    value: Fraction | None = None
    multiplicity: int = 1

    @property
    def kind(self) -> str:
        return "exact-rational" if self.value is not None else "irrational-interval"

    @property
    def is_exact(self) -> bool:
        return self.value is not None

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return (self.lo, self.hi)

    def refine(self, width: Fraction) -> "IsolatedRoot":
        """Bisect until the interval is narrower than ``width``."""
        if self.value is not None:
            return self
        lo, hi = self.lo, self.hi
        slo = self.poly.sign_at(lo)
        while hi - lo >= width:
            mid = (lo + hi) / 2
            s = self.poly.sign_at(mid)
            if s == 0:
                return IsolatedRoot(self.poly, mid, mid, mid, self.multiplicity)
            if s == slo:
                lo = mid
            else:
                hi = mid
        return IsolatedRoot(self.poly, lo, hi, None, self.multiplicity)

    def bisect(self) -> "IsolatedRoot":
        return self.refine((self.hi - self.lo) / 2 * Fraction(3, 2) if self.value is None else Fraction(1))

    def sign_of(self, q: Poly, depth: int | None = None) -> int:
        """Certified sign of ``q`` evaluated at this root."""
        if self.value is not None:
            return q.sign_at(self.value)
        if q.is_zero():
            return 0
        g = poly_gcd(self.poly, q)
        if g.degree >= 1 and count_real_roots(g, self.lo, self.hi) > 0:
            return 0
        r = self
        for _ in range(max_refine() if depth is None else depth):
            if r.value is not None:
                return q.sign_at(r.value)
            a, b = _interval_eval(q, r.lo, r.hi)
            if a > 0:
                return 1
            if b < 0:
                return -1
            r = r.bisect()
        raise SignUndetermined("sign undetermined after max refinement")

    def compare(self, q: Fraction) -> int:
        """Sign of ``root - q``."""
        return self.sign_of(Poly((-Fraction(q), 1)))

    def approx(self, prec: int = 128) -> mpmath.mpf:
        if self.value is not None:
            with mpmath.workprec(prec):
                return mpmath.mpf(self.value.numerator) / self.value.denominator
        r = self.refine(Fraction(1, 2 ** (prec + 4)))
        if r.value is not None:
            return r.approx(prec)
        with mpmath.workprec(prec):
            mid = (r.lo + r.hi) / 2
            return mpmath.mpf(mid.numerator) / mid.denominator

    def __float__(self) -> float:
        return float(self.value) if self.value is not None else float((self.lo + self.hi) / 2)

    def __repr__(self) -> str:
        if self.value is not None:
            m = f", mult={self.multiplicity}" if self.multiplicity > 1 else ""
            return f"IsolatedRoot({self.value}{m})"
        return f"IsolatedRoot(in ({self.lo}, {self.hi}), ~{float(self):.12g})"


def _isolate_squarefree(f: Poly) -> list[tuple[Fraction, Fraction] | Fraction]:
    """Disjoint isolating intervals (or exact hits) for a squarefree polynomial."""
    B = root_bound(f)
    seq = sturm_sequence(f)

    def count(lo, hi):
        return _variations(seq, lo) - _variations(seq, hi)

    out: list = []
    stack = [(-B, B, count(-B, B))]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        step = (hi - lo) / 8
        k = 1
        while f(mid) == 0:
            # keep split points off the roots; exact hits are picked up later
            mid = (lo + hi) / 2 + step / (k + 1)
            k += 1
        c1 = count(lo, mid)
        stack.append((mid, hi, n - c1))
        stack.append((lo, mid, c1))
    return out


def _rational_root_in(f_int: tuple[int, ...], f: Poly, lo: Fraction, hi: Fraction) -> Fraction | None:
    # a rational root p/q in lowest terms has q | leading coefficient
    a_n = abs(f_int[-1])
    lo_k = floor(lo * a_n)
    hi_k = floor(hi * a_n) + 1
    for k in range(lo_k, hi_k + 1):
        cand = Fraction(k, a_n)
        if lo <= cand <= hi and f(cand) == 0:
            return cand
    return None


def isolate_real_roots(p: Poly, excluded: Iterable = ()) -> list[IsolatedRoot]:
    """All distinct real roots of ``p`` in increasing order.

    Rational roots come back exact; irrational ones as isolating intervals.
    Roots equal to one of the ``excluded`` rationals are dropped.
    """
    if p.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    excluded = {Fraction(e) for e in excluded}
    roots: list[IsolatedRoot] = []
    for f, mult in squarefree_decomposition(p):
        f_int = f.primitive_int()
        fi = Poly(f_int)
        a_n = abs(f_int[-1])
        for iv in _isolate_squarefree(fi):
            lo, hi = iv
            r = IsolatedRoot(fi, lo, hi, None, mult)
            # an interval narrower than 1/a_n holds at most one candidate k/a_n
            r = r.refine(Fraction(1, a_n))
            if r.value is None:
                q = _rational_root_in(f_int, fi, r.lo, r.hi)
                if q is not None:
                    r = IsolatedRoot(fi, q, q, q, mult)
            roots.append(r)
    roots = [r for r in roots if not (r.value is not None and r.value in excluded)]
    roots.sort(key=lambda r: (r.lo, r.hi))
    return roots

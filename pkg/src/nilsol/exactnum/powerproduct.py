"""Exact products of rational powers of positive rationals, and sums of them.

:class:`PowerProduct` is ``sign * prod p**e`` with ``p`` prime and ``e``
rational, which is a canonical form: two power products are equal iff their
data agree.

:class:`Surd` is a finite Q-linear combination of such products, normalized
so every monomial carries only fractional exponents in ``(0, 1)``.  Distinct
monomials of this shape are linearly independent over Q, so equality of two
:class:`Surd` values is decided exactly by comparing their term maps.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Mapping

import mpmath
from sympy import factorint


def _factor(n: int) -> dict[int, int]:
    return {int(p): int(e) for p, e in factorint(n).items()}


def _factor_fraction(q: Fraction) -> dict[int, int]:
    out = dict(_factor(q.numerator)) if q.numerator != 1 else {}
    for p, e in (_factor(q.denominator).items() if q.denominator != 1 else ()):
        out[p] = out.get(p, 0) - e
    return out


@dataclass(frozen=True)
class PowerProduct:
    sign: int
    factors: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def from_rational(cls, q) -> "PowerProduct":
        q = Fraction(q)
        if q == 0:
            raise ZeroDivisionError("zero is not a power product")
        fac = _factor_fraction(abs(q))
        return cls(1 if q > 0 else -1, tuple(sorted((p, Fraction(e)) for p, e in fac.items())))

    @classmethod
    def from_factors(cls, sign: int, factors: Mapping) -> "PowerProduct":
        """Build ``sign * prod base**exp`` for positive rational bases."""
        acc: dict[int, Fraction] = {}
        for base, exp in factors.items():
            base, exp = Fraction(base), Fraction(exp)
            if base <= 0:
                raise ValueError("bases must be positive")
            for p, e in _factor_fraction(base).items():
                acc[p] = acc.get(p, Fraction(0)) + e * exp
        return cls(1 if sign > 0 else -1, tuple(sorted((p, e) for p, e in acc.items() if e != 0)))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.factors)

    def __mul__(self, other) -> "PowerProduct":
        if not isinstance(other, PowerProduct):
            other = PowerProduct.from_rational(other)
        acc = self.as_dict()
        for p, e in other.factors:
            acc[p] = acc.get(p, Fraction(0)) + e
        return PowerProduct(self.sign * other.sign, tuple(sorted((p, e) for p, e in acc.items() if e != 0)))

    __rmul__ = __mul__

    def inverse(self) -> "PowerProduct":
        return PowerProduct(self.sign, tuple((p, -e) for p, e in self.factors))

    def __truediv__(self, other) -> "PowerProduct":
        if not isinstance(other, PowerProduct):
            other = PowerProduct.from_rational(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> "PowerProduct":
        return PowerProduct.from_rational(other) * self.inverse()

    def __pow__(self, exp) -> "PowerProduct":
        exp = Fraction(exp)
        sign = self.sign
        if sign < 0:
            if exp.denominator % 2 == 0:
                raise ValueError("even root of a negative power product")
            sign = -1 if exp.numerator % 2 else 1
        return PowerProduct(sign, tuple((p, e * exp) for p, e in self.factors if e * exp != 0))

    def __neg__(self) -> "PowerProduct":
        return PowerProduct(-self.sign, self.factors)

    def __abs__(self) -> "PowerProduct":
        return PowerProduct(1, self.factors)

    def is_rational(self) -> bool:
        return all(e.denominator == 1 for _, e in self.factors)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        out = Fraction(self.sign)
        for p, e in self.factors:
            out *= Fraction(p) ** int(e)
        return out

    def to_mpf(self, prec: int = 128) -> mpmath.mpf:
        with mpmath.workprec(prec):
            out = mpmath.mpf(self.sign)
            for p, e in self.factors:
                out *= mpmath.power(p, mpmath.mpf(e.numerator) / e.denominator)
            return out

    def __float__(self) -> float:
        return float(self.to_mpf(64))

    def __str__(self) -> str:
        if self.is_rational():
            return str(self.to_fraction())
        parts = [f"{p}^({e})" if e.denominator != 1 else f"{p}^{e}" for p, e in self.factors]
        return ("-" if self.sign < 0 else "") + "*".join(parts)


@dataclass(frozen=True)
class Surd:
    """Exact element of the ring spanned over Q by rational powers of primes."""

    terms: tuple[tuple[tuple[tuple[int, Fraction], ...], Fraction], ...]

    @staticmethod
    def _from_map(m: dict) -> "Surd":
        return Surd(tuple(sorted((k, c) for k, c in m.items() if c != 0)))

    @classmethod
    def from_value(cls, v) -> "Surd":
        if isinstance(v, Surd):
            return v
        if isinstance(v, PowerProduct):
            coeff = Fraction(v.sign)
            key = []
            for p, e in v.factors:
                ip = floor(e)
                coeff *= Fraction(p) ** ip
                if e != ip:
                    key.append((p, e - ip))
            return cls._from_map({tuple(key): coeff})
        return cls._from_map({(): Fraction(v)})

    def as_map(self) -> dict:
        return dict(self.terms)

    def __add__(self, other) -> "Surd":
        m = self.as_map()
        for k, c in Surd.from_value(other).terms:
            m[k] = m.get(k, Fraction(0)) + c
        return Surd._from_map(m)

    __radd__ = __add__

    def __neg__(self) -> "Surd":
        return Surd(tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other) -> "Surd":
        return self + (-Surd.from_value(other))

    def __rsub__(self, other) -> "Surd":
        return Surd.from_value(other) - self

    def __mul__(self, other) -> "Surd":
        other = Surd.from_value(other)
        m: dict = {}
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                exps = dict(k1)
                for p, e in k2:
                    exps[p] = exps.get(p, Fraction(0)) + e
                coeff = c1 * c2
                key = []
                for p in sorted(exps):
                    e = exps[p]
                    if e >= 1:
                        coeff *= p
                        e -= 1
                    if e:
                        key.append((p, e))
                key = tuple(key)
                m[key] = m.get(key, Fraction(0)) + coeff
        return Surd._from_map(m)

    __rmul__ = __mul__

    def inverse(self) -> "Surd":
        if len(self.terms) != 1:
            raise ZeroDivisionError("only single-term surds are invertible here")
        (key, c), = self.terms
        pp = PowerProduct(1 if c > 0 else -1, key) * PowerProduct.from_rational(abs(c))
        return Surd.from_value(pp.inverse())

    def __truediv__(self, other) -> "Surd":
        return self * Surd.from_value(other).inverse()

    def __rtruediv__(self, other) -> "Surd":
        return Surd.from_value(other) * self.inverse()

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(k == () for k, _ in self.terms)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("irrational surd")
        return self.terms[0][1] if self.terms else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, PowerProduct, Surd)):
            return self.terms == Surd.from_value(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.terms)

    def to_mpf(self, prec: int = 128) -> mpmath.mpf:
        with mpmath.workprec(prec):
            out = mpmath.mpf(0)
            for k, c in self.terms:
                t = mpmath.mpf(c.numerator) / c.denominator
                for p, e in k:
                    t *= mpmath.power(p, mpmath.mpf(e.numerator) / e.denominator)
                out += t
            return out

    def __float__(self) -> float:
        return float(self.to_mpf(64))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.terms:
            rad = "*".join(f"{p}^({e})" for p, e in k)
            parts.append(f"{c}" + (f"*{rad}" if rad else ""))
        return " + ".join(parts)


def simplify(v):
    """Collapse a rational :class:`Surd` or :class:`PowerProduct` to ``Fraction``."""
    if isinstance(v, Surd) and v.is_rational():
        return v.to_fraction()
    if isinstance(v, PowerProduct) and v.is_rational():
        return v.to_fraction()
    return v

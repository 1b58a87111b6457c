"""Fourier-Motzkin elimination for systems of affine inequalities over Q.

A constraint ``(coeffs, const, strict)`` reads ``coeffs . t + const > 0`` when
``strict`` is true and ``>= 0`` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    const: Fraction
    strict: bool = True

    @classmethod
    def make(cls, coeffs: Sequence, const, strict: bool = True) -> "Constraint":
        return cls(tuple(Fraction(c) for c in coeffs), Fraction(const), strict)

    def holds(self, point: Sequence) -> bool:
        val = sum((a * x for a, x in zip(self.coeffs, point)), Fraction(0)) + self.const
        return val > 0 if self.strict else val >= 0


def _normalize(c: Constraint) -> Constraint:
    # scale so the first nonzero coefficient has absolute value 1 (keeps numbers small)
    lead = next((a for a in c.coeffs if a != 0), None)
    if lead is None:
        return c
    s = abs(lead)
    return Constraint(tuple(a / s for a in c.coeffs), c.const / s, c.strict)


def _eliminate_last(cons: list[Constraint]) -> list[Constraint]:
    j = len(cons[0].coeffs) - 1 if cons else 0
    pos, neg, out = [], [], []
    for c in cons:
        a = c.coeffs[j]
        if a > 0:
            pos.append(c)
        elif a < 0:
            neg.append(c)
        else:
            out.append(Constraint(c.coeffs[:j], c.const, c.strict))
    for p in pos:
        for q in neg:
            lp, lq = p.coeffs[j], -q.coeffs[j]
            coeffs = tuple(lq * a + lp * b for a, b in zip(p.coeffs[:j], q.coeffs[:j]))
            out.append(_normalize(Constraint(coeffs, lq * p.const + lp * q.const, p.strict or q.strict)))
    return list(dict.fromkeys(out))


def _stages(constraints: Sequence[Constraint], nvars: int) -> list[list[Constraint]]:
    stage = [_normalize(c) for c in constraints]
    stages = [stage]
    for _ in range(nvars):
        stage = _eliminate_last(stage)
        stages.append(stage)
    return stages


def _constants_ok(cons: Sequence[Constraint]) -> bool:
    return all((c.const > 0) if c.strict else (c.const >= 0) for c in cons)


def fm_feasible(constraints: Sequence[Constraint], nvars: int | None = None) -> bool:
    """Decide whether the (possibly open) polyhedron is nonempty."""
    if nvars is None:
        nvars = len(constraints[0].coeffs) if constraints else 0
    return _constants_ok(_stages(constraints, nvars)[-1])


def fm_witness(constraints: Sequence[Constraint], nvars: int | None = None) -> tuple[Fraction, ...] | None:
    """A rational point satisfying every constraint, or ``None``.

    Back-substitutes through the elimination stages, picking for each variable
    the midpoint of its feasible interval (or a unit step off a one-sided bound).
    """
    if nvars is None:
        nvars = len(constraints[0].coeffs) if constraints else 0
    stages = _stages(constraints, nvars)
    if not _constants_ok(stages[-1]):
        return None
    point: list[Fraction] = []
    for j in range(nvars):
        cons = stages[nvars - 1 - j]
        lo = hi = None
        lo_strict = hi_strict = False
        for c in cons:
            a = c.coeffs[j]
            rest = sum((x * y for x, y in zip(c.coeffs[:j], point)), Fraction(0)) + c.const
            if a > 0:
                b = -rest / a
                if lo is None or b > lo or (b == lo and c.strict):
                    lo, lo_strict = b, c.strict
            elif a < 0:
                b = rest / -a
                if hi is None or b < hi or (b == hi and c.strict):
                    hi, hi_strict = b, c.strict
        if lo is None and hi is None:
            val = Fraction(0)
        elif lo is None:
            val = hi - 1
        elif hi is None:
            val = lo + 1
        else:
            val = (lo + hi) / 2 if (lo_strict or hi_strict) else lo
        point.append(val)
    pt = tuple(point)
    assert all(c.holds(pt) for c in constraints), "witness back-substitution failed"
    return pt

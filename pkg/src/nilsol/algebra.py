"""Nice nilpotent Lie algebras given in structure-equation notation.

The notation lists the differentials ``(de^1, ..., de^n)``; for example
``(0,0,e^{12})`` is the Heisenberg algebra.  A term ``q e^{ij}`` in ``de^k``
means ``[e_i, e_j] = -q e_k``, following ``de^k(e_i, e_j) = -e^k([e_i, e_j])``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .exactnum import gf2
from .exactnum.linalg import Matrix

Bracket = tuple[int, int, int, Fraction]


class AlgebraError(ValueError):
    """Base class for notation and validation failures."""


class NotationError(AlgebraError):
    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.text = text
        self.pos = pos
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{message}{where}" + (f": {text!r}" if text else ""))


class UnboundParameterError(NotationError):
    pass


class ZeroCoefficientError(AlgebraError):
    """A parameter binding makes a structure constant vanish, changing the diagram."""


class NotNiceError(AlgebraError):
    pass


class JacobiError(AlgebraError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"Jacobi identity fails on triples {self.violations}")


class NotNilpotentError(AlgebraError):
    def __init__(self, ideal):
        self.ideal = tuple(ideal)
        super().__init__(f"lower central series stabilizes at span{{e_i : i in {list(self.ideal)}}}")


# --------------------------------------------------------------------------- parsing

_SYMBOL = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _Scanner:
    def __init__(self, text: str, offset: int, params: Mapping[str, Fraction]):
        self.text = text
        self.i = 0
        self.offset = offset
        self.params = params

    def err(self, msg: str, cls=NotationError):
        raise cls(msg, self.text, self.offset + self.i)

    def peek(self) -> str:
        return self.text[self.i] if self.i < len(self.text) else ""

    def at_term(self) -> bool:
        return self.text.startswith("e^", self.i)

    def eat(self, s: str) -> bool:
        if self.text.startswith(s, self.i):
            self.i += len(s)
            return True
        return False

    # coefficient expressions: sums/products of rationals, symbols and parentheses
    def expr(self) -> Fraction:
        val = self.product()
        while self.peek() and self.peek() in "+-":
            op = self.text[self.i]
            self.i += 1
            rhs = self.product()
            val = val + rhs if op == "+" else val - rhs
        return val

    def product(self) -> Fraction:
        if self.eat("-"):
            return -self.product()
        if self.eat("+"):
            return self.product()
        val = self.atom()
        while True:
            if self.eat("*"):
                val *= self.atom()
            elif self.peek() == "/":
                self.i += 1
                d = self.atom()
                if d == 0:
                    self.err("division by zero")
                val /= d
            elif self.peek() == "(" or (self.peek().isalpha() and not self.at_term()) or self.peek().isdigit():
                val *= self.atom()
            else:
                return val

    def atom(self) -> Fraction:
        c = self.peek()
        if c == "(":
            self.i += 1
            v = self.expr()
            if not self.eat(")"):
                self.err("expected ')'")
            return v
        if c.isdigit():
            j = self.i
            while self.peek().isdigit():
                self.i += 1
            return Fraction(int(self.text[j:self.i]))
        if c.isalpha() or c == "_":
            if self.at_term():
                self.err("expected coefficient")
            m = _SYMBOL.match(self.text, self.i)
            name = m.group(0)
            # a symbol may sit directly in front of a term, as in "ae^{13}"
            k = self.text.find("e^", self.i)
            if self.i <= k < m.end():
                name = self.text[self.i:k]
            self.i += len(name)
            if name not in self.params:
                self.err(f"unbound parameter {name!r}", UnboundParameterError)
            return Fraction(self.params[name])
        self.err("unexpected character" if c else "unexpected end of input")


def _split_top(text: str) -> list[tuple[int, str]]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise NotationError("unbalanced ')'", text, i)
        elif ch == "," and depth == 0:
            parts.append((start, text[start:i]))
            start = i + 1
    if depth:
        raise NotationError("unbalanced '('", text, len(text))
    parts.append((start, text[start:]))
    return parts


def _strip_wrapper(text: str) -> tuple[int, str]:
    if text.startswith("(") and text.endswith(")"):
        depth = 0
        for i, ch in enumerate(text):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                if i == len(text) - 1:
                    return 1, text[1:-1]
                break
    return 0, text


def _parse_entry(entry: str, offset: int, n: int, params) -> list[tuple[int, int, Fraction]]:
    """Terms ``(i, j, q)`` of one differential ``de^k = sum q e^{ij}``."""
    if entry == "":
        raise NotationError("empty entry", entry, offset)
    if entry == "0":
        return []
    sc = _Scanner(entry, offset, params)
    terms: list[tuple[int, int, Fraction]] = []
    first = True
    while sc.i < len(entry):
        sign = Fraction(1)
        if not first:
            if sc.eat("+"):
                pass
            elif sc.eat("-"):
                sign = Fraction(-1)
            else:
                sc.err("expected '+' or '-'")
        first = False
        if sc.at_term():
            coeff = Fraction(1)
        elif sc.peek() == "-" and entry.startswith("e^", sc.i + 1):
            sc.i += 1
            coeff = Fraction(-1)
        else:
            coeff = sc.product()
            sc.eat("*")
        if not sc.eat("e^{"):
            sc.err("expected 'e^{'")
        body = re.match(r"(\d)(\d)\}", entry[sc.i:])
        if body is None:
            if re.match(r"\d+,\d+\}", entry[sc.i:]):
                sc.err("two-digit indices e^{i,j} are reserved and not supported")
            sc.err("expected two index digits and '}'")
        i, j = int(body.group(1)), int(body.group(2))
        pos = sc.i
        sc.i += 3
        if i == j:
            raise NotationError(f"repeated index e^{{{i}{j}}}", entry, offset + pos)
        for idx in (i, j):
            if not 1 <= idx <= n:
                raise NotationError(f"index {idx} out of range 1..{n}", entry, offset + pos)
        q = sign * coeff
        if i > j:
            i, j, q = j, i, -q
        if any((a, b) == (i, j) for a, b, _ in terms):
            raise NotationError(f"duplicate term e^{{{i}{j}}}", entry, offset + pos)
        terms.append((i, j, q))
    return terms


def _fmt_coeff(q: Fraction) -> str:
    if q == 1:
        return ""
    if q == -1:
        return "-"
    return f"{q} "


@dataclass(frozen=True)
class NiceLieAlgebra:
    """A Lie algebra with a nice basis ``e_1..e_n``.

    ``brackets`` holds ``(i, j, k, c)`` with ``i < j`` meaning ``[e_i, e_j] = c e_k``,
    in the order the terms appear in the notation (this fixes the row order of the
    root matrix and the indexing of structure-constant vectors).
    """

    name: str
    dim: int
    brackets: tuple[Bracket, ...]
    params: tuple[tuple[str, Fraction], ...] = ()

    @property
    def m(self) -> int:
        return len(self.brackets)

    @property
    def structure_constants(self) -> tuple[Fraction, ...]:
        return tuple(b[3] for b in self.brackets)

    @cached_property
    def bracket_map(self) -> dict[tuple[int, int], tuple[int, Fraction]]:
        return {(i, j): (k, c) for i, j, k, c in self.brackets}

    def bracket(self, i: int, j: int) -> dict[int, Fraction]:
        """``[e_i, e_j]`` as ``{k: coefficient}``."""
        if i == j:
            return {}
        if i < j:
            hit = self.bracket_map.get((i, j))
            return {hit[0]: hit[1]} if hit else {}
        hit = self.bracket_map.get((j, i))
        return {hit[0]: -hit[1]} if hit else {}

    def differential(self) -> list[list[tuple[int, int, Fraction]]]:
        out: list[list] = [[] for _ in range(self.dim)]
        for i, j, k, c in self.brackets:
            out[k - 1].append((i, j, -c))
        return out

    def to_notation(self) -> str:
        entries = []
        for terms in self.differential():
            if not terms:
                entries.append("0")
                continue
            s = ""
            for idx, (i, j, q) in enumerate(terms):
                body = f"e^{{{i}{j}}}"
                if idx == 0:
                    s += _fmt_coeff(q) + body
                else:
                    s += ("-" if q < 0 else "+") + _fmt_coeff(abs(q)) + body
            entries.append(s)
        return "(" + ",".join(entries) + ")"

    def __str__(self) -> str:
        return f"{self.name} {self.to_notation()}" if self.name else self.to_notation()

    @cached_property
    def root_matrix(self) -> "RootMatrix":
        return root_matrix(self)

    def with_constants(self, constants: Sequence, name: str | None = None) -> "NiceLieAlgebra":
        """Same diagram, new structure constants (in bracket order)."""
        br = tuple((i, j, k, Fraction(c)) for (i, j, k, _), c in zip(self.brackets, constants))
        return NiceLieAlgebra(self.name if name is None else name, self.dim, br, self.params)


def parse_nice_algebra(
    text: str,
    params: Mapping[str, object] | None = None,
    name: str = "",
    validate: bool = True,
    dim: int | None = None,
) -> NiceLieAlgebra:
    """Parse structure equations such as ``"(0,0,e^{12},e^{13})"``.

    ``params`` binds parameter symbols to rationals (``"1/2"``, ``Fraction`` or int).
    With ``validate`` the result is checked to be nice, to satisfy Jacobi and
    to be nilpotent, raising the matching :class:`AlgebraError` subclass.
    """
    bound = {k: Fraction(v) for k, v in (params or {}).items()}
    src = text
    compact = "".join(text.split())
    off, body = _strip_wrapper(compact)
    pieces = _split_top(body)
    n = len(pieces)
    if dim is not None and dim != n:
        raise NotationError(f"differential has {n} entries, expected {dim}", src)
    if n > 9:
        raise NotationError("dimension above 9 is not supported", src)
    brackets: list[Bracket] = []
    for k, (start, entry) in enumerate(pieces, start=1):
        for i, j, q in _parse_entry(entry, off + start, n, bound):
            if q == 0:
                raise ZeroCoefficientError(f"coefficient of e^{{{i}{j}}} in de^{k} vanishes for {bound}")
            brackets.append((i, j, k, -q))
    alg = NiceLieAlgebra(name, n, tuple(brackets), tuple(sorted(bound.items())))
    if validate:
        validate_algebra(alg)
    return alg


def from_brackets(dim: int, brackets, name: str = "", validate: bool = True) -> NiceLieAlgebra:
    br = []
    for i, j, k, c in brackets:
        c = Fraction(c)
        if i > j:
            i, j, c = j, i, -c
        br.append((i, j, k, c))
    alg = NiceLieAlgebra(name, dim, tuple(br))
    if validate:
        validate_algebra(alg)
    return alg


# --------------------------------------------------------------------------- validation

def nice_violations(alg: NiceLieAlgebra) -> list[str]:
    problems = []
    seen_pair: dict[tuple[int, int], int] = {}
    seen_ik: dict[tuple[int, int], int] = {}
    for i, j, k, c in alg.brackets:
        if c == 0:
            problems.append(f"zero structure constant for [e{i},e{j}]")
        if (i, j) in seen_pair:
            problems.append(f"[e{i},e{j}] has components on e{seen_pair[(i, j)]} and e{k}")
        seen_pair[(i, j)] = k
        for a, b in ((i, j), (j, i)):
            if (a, k) in seen_ik and seen_ik[(a, k)] != b:
                problems.append(f"e{a} ⨼ de^{k} involves both e^{seen_ik[(a, k)]} and e^{b}")
            seen_ik[(a, k)] = b
    return problems


def check_jacobi(alg: NiceLieAlgebra) -> list[tuple[int, int, int]]:
    """Triples ``i<j<k`` where ``[[e_i,e_j],e_k] + cyclic`` is nonzero (exact)."""

    def br(u: dict[int, Fraction], k: int) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for a, ca in u.items():
            for b, cb in alg.bracket(a, k).items():
                out[b] = out.get(b, Fraction(0)) + ca * cb
        return out

    bad = []
    n = alg.dim
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                tot: dict[int, Fraction] = {}
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    for idx, v in br(alg.bracket(a, b), c).items():
                        tot[idx] = tot.get(idx, Fraction(0)) + v
                if any(v != 0 for v in tot.values()):
                    bad.append((i, j, k))
    return bad


def lower_central_series(alg: NiceLieAlgebra, max_steps: int = 20) -> list[frozenset[int]]:
    """Index sets spanning ``g, [g,g], [g,[g,g]], ...`` until stable.

    For a nice basis every term of the series is spanned by basis vectors.
    """
    series = [frozenset(range(1, alg.dim + 1))]
    for _ in range(max_steps):
        cur = series[-1]
        nxt = frozenset(k for i, j, k, _ in alg.brackets if i in cur or j in cur)
        if nxt == cur:
            break
        series.append(nxt)
        if not nxt:
            break
    return series


def check_nilpotent(alg: NiceLieAlgebra) -> int:
    """Nilpotency class (number of nonzero terms of the lower central series)."""
    series = lower_central_series(alg)
    if series[-1]:
        raise NotNilpotentError(sorted(series[-1]))
    return len(series) - 1


def lcs_type(alg: NiceLieAlgebra) -> str:
    """Dimensions of the lower central series, as in the label prefix ``7421``."""
    return "".join(str(len(s)) for s in lower_central_series(alg) if s)


def validate_algebra(alg: NiceLieAlgebra) -> None:
    probs = nice_violations(alg)
    if probs:
        raise NotNiceError("; ".join(probs))
    bad = check_jacobi(alg)
    if bad:
        raise JacobiError(bad)
    check_nilpotent(alg)


def irreducible_components(alg: NiceLieAlgebra) -> list[tuple[int, ...]]:
    parent = list(range(alg.dim + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j, k, _ in alg.brackets:
        for a in (j, k):
            ra, rb = find(i), find(a)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for a in range(1, alg.dim + 1):
        groups.setdefault(find(a), []).append(a)
    return [tuple(g) for g in sorted(groups.values())]


# --------------------------------------------------------------------------- root matrix

@dataclass(frozen=True)
class RootMatrix:
    """Integer matrix with a row ``-e_i - e_j + e_k`` per bracket ``({i,j}, k)``."""

    n: int
    rows: tuple[tuple[tuple[int, int], int], ...]
    matrix: Matrix
    mod2: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.rows)

    def exp_action(self, g: Sequence):
        """``e^{M}(g)``: the h-th entry is ``g_k / (g_i g_j)``."""
        return tuple(g[k - 1] / (g[i - 1] * g[j - 1]) for (i, j), k in self.rows)


def root_matrix(alg: NiceLieAlgebra) -> RootMatrix:
    n = alg.dim
    rows, data = [], []
    for i, j, k, _ in alg.brackets:
        r = [0] * n
        r[i - 1] -= 1
        r[j - 1] -= 1
        r[k - 1] += 1
        rows.append(((i, j), k))
        data.append(tuple(r))
    M = Matrix(len(data), n, tuple(data))
    return RootMatrix(n, tuple(rows), M, gf2.reduce_mod2(data))

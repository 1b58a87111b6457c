"""Catalog of nice nilpotent Lie algebras, golden-data checks, tables and the ``nilsol`` CLI.

A catalog is a JSON document ``{"schema_version": 1, "entries": [...]}``.  Each
entry carries a name, a dimension and the differential as a list of strings;
optional keys describe parameter families, expected results, parameter regimes
and sign branches.  A bundled catalog ships with the package and is selected
with the source name ``"builtin"``.
"""
from __future__ import annotations

import argparse
import ast
import csv
import fnmatch
import io
import json
import operator
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import mpmath

from .algebra import AlgebraError, NiceLieAlgebra, ZeroCoefficientError, parse_nice_algebra
from .geometry import (
    DiagonalMetric,
    GeometryError,
    MetricLieAlgebra,
    NotNilsolitonError,
    einstein_extension,
    ricci_koszul,
    verify_nilsoliton,
    wick_rotate,
)
from .nilsoliton import (
    ClassificationReport,
    NilsolitonError,
    SolvedX,
    classify,
    render_signature,
    riemannian_exists,
    signatures,
    sort_signatures,
)

SCHEMA_VERSION = 1
EVAL_PREC = 128

_ENTRY_KEYS = {
    "name", "dim", "differential", "params", "family", "expected", "regimes",
    "branches", "constants", "groups", "notes",
}
_EXPECTED_KEYS = {"N", "S", "S0", "obstruction", "riemannian", "X"}
_OBSTRUCTIONS = {"N-zero", "K", "H", "L", "P"}


class CatalogError(ValueError):
    pass


# --------------------------------------------------------------------------- conditions

_BINOPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow,
}
_CMPOPS = {
    ast.Lt: operator.lt, ast.LtE: operator.le, ast.Gt: operator.gt,
    ast.GtE: operator.ge, ast.Eq: operator.eq, ast.NotEq: operator.ne,
}
_FUNCS = {"sqrt": mpmath.sqrt, "abs": abs}


def _eval_node(node, env):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return mpmath.mpf(node.value) if isinstance(node.value, int) else mpmath.mpf(str(node.value))
    if isinstance(node, ast.Name):
        if node.id not in env:
            raise CatalogError(f"unknown name {node.id!r} in condition")
        return env[node.id]
    if isinstance(node, ast.UnaryOp):
        v = _eval_node(node.operand, env)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        if isinstance(node.op, ast.Not):
            return not v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left, env), _eval_node(node.right, env))
    if isinstance(node, ast.BoolOp):
        vals = (_eval_node(v, env) for v in node.values)
        return all(vals) if isinstance(node.op, ast.And) else any(vals)
    if isinstance(node, ast.Compare):
        left = _eval_node(node.left, env)
        for op, rhs in zip(node.ops, node.comparators):
            if type(op) not in _CMPOPS:
                break
            right = _eval_node(rhs, env)
            if not _CMPOPS[type(op)](left, right):
                return False
            left = right
        else:
            return True
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
        return _FUNCS[node.func.id](*(_eval_node(a, env) for a in node.args))
    raise CatalogError(f"unsupported syntax in condition: {ast.dump(node)[:60]}")


def evaluate(expr: str, env: Mapping[str, object]):
    """Evaluate an arithmetic/boolean expression with 128-bit mpmath numbers.

    Only numbers, names from ``env``, ``+ - * / **``, comparisons (chained),
    ``and/or/not`` and ``sqrt``/``abs`` are accepted.
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise CatalogError(f"cannot parse condition {expr!r}: {exc.msg}") from None
    with mpmath.workprec(EVAL_PREC):
        scope = {k: _to_mpf(v) for k, v in env.items()}
        return _eval_node(tree, scope)


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    if isinstance(v, int):
        return mpmath.mpf(v)
    return v


# --------------------------------------------------------------------------- entries

@dataclass(frozen=True)
class Regime:
    when: str
    S: tuple[str, ...]


@dataclass(frozen=True)
class Branch:
    """Solutions whose entries have the given signs (1-based positions) share ``S``."""

    signs: tuple[tuple[int, int], ...]
    S: tuple[str, ...]
    when: str | None = None
    tag: tuple[str, int] | None = None


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    dim: int
    differential: tuple[str, ...]
    params: tuple[tuple[str, Fraction], ...] = ()
    symbols: tuple[str, ...] = ()
    samples: tuple[tuple[str, tuple[Fraction, ...]], ...] = ()
    excluded: tuple[tuple[str, tuple[Fraction, ...]], ...] = ()
    expected: Mapping = field(default_factory=dict)
    regimes: tuple[Regime, ...] = ()
    branches: tuple[Branch, ...] = ()
    constants: tuple[tuple[str, str], ...] = ()
    groups: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def notation(self) -> str:
        return "(" + ",".join(self.differential) + ")"

    @property
    def is_family(self) -> bool:
        return bool(self.symbols)

    def algebra(self, params: Mapping | None = None) -> NiceLieAlgebra:
        bound = dict(self.params)
        bound.update({k: Fraction(v) for k, v in (params or {}).items()})
        return parse_nice_algebra(self.notation, bound, name=self.name, dim=self.dim)

    def sample_points(self, override: Mapping[str, Sequence] | None = None) -> list[dict[str, Fraction]]:
        if not self.symbols:
            return [{}]
        samples = dict(self.samples)
        for k, vals in (override or {}).items():
            if k in self.symbols:
                samples[k] = tuple(Fraction(v) for v in vals)
        missing = [s for s in self.symbols if s not in samples and s not in dict(self.params)]
        if missing:
            raise CatalogError(f"{self.name}: no sample values for {missing}")
        keys = [s for s in self.symbols if s in samples]
        return [dict(zip(keys, combo)) for combo in product(*(samples[k] for k in keys))]

    def environment(self, params: Mapping) -> dict:
        env = {k: _to_mpf(Fraction(v)) for k, v in {**dict(self.params), **params}.items()}
        for name, expr in self.constants:
            env[name] = evaluate(expr, env)
        return env

    def regime_for(self, params: Mapping) -> Regime | None:
        if not self.regimes:
            return None
        env = self.environment(params)
        hits = [r for r in self.regimes if evaluate(r.when, env)]
        if len(hits) > 1:
            raise CatalogError(f"{self.name}: parameters {_fmt_params(params)} match several regimes")
        return hits[0] if hits else None

    def branches_for(self, params: Mapping) -> list[Branch]:
        env = self.environment(params)
        return [b for b in self.branches if b.when is None or evaluate(b.when, env)]


def _fraction(v, where: str) -> Fraction:
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise CatalogError(f"{where}: {v!r} is not a rational number") from None


def _sig_list(v, where: str, dim: int) -> tuple[str, ...]:
    if not isinstance(v, list) or not all(isinstance(s, str) for s in v):
        raise CatalogError(f"{where}: expected a list of signature strings")
    for s in v:
        if s != "∅" and not (s.isdigit() and "0" not in s and max(s) <= str(dim)):
            raise CatalogError(f"{where}: bad signature {s!r} for dimension {dim}")
    return sort_signatures(v)


def _parse_entry(raw, where: str) -> CatalogEntry:
    if not isinstance(raw, dict):
        raise CatalogError(f"{where}: entry must be an object")
    unknown = set(raw) - _ENTRY_KEYS
    if unknown:
        raise CatalogError(f"{where}: unknown keys {sorted(unknown)}")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise CatalogError(f"{where}: missing name")
    where = f"{where} ({name})"
    dim = raw.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or not 1 <= dim <= 9:
        raise CatalogError(f"{where}: dim must be an integer between 1 and 9")
    diff = raw.get("differential")
    if not isinstance(diff, list) or not all(isinstance(d, str) for d in diff):
        raise CatalogError(f"{where}: differential must be a list of strings")
    if len(diff) != dim:
        raise CatalogError(f"{where}: differential has {len(diff)} entries but dim is {dim}")

    params = {k: _fraction(v, f"{where} params") for k, v in (raw.get("params") or {}).items()}
    fam = raw.get("family") or {}
    if not isinstance(fam, dict):
        raise CatalogError(f"{where}: family must be an object")
    symbols = tuple(fam.get("symbols", ()))
    samples = {k: tuple(_fraction(x, f"{where} samples") for x in v) for k, v in (fam.get("samples") or {}).items()}
    excluded = {k: tuple(_fraction(x, f"{where} excluded") for x in v) for k, v in (fam.get("excluded") or {}).items()}
    for k in list(samples) + list(excluded):
        if k not in symbols:
            raise CatalogError(f"{where}: {k!r} is not a declared family symbol")
    for k, vals in samples.items():
        bad = set(vals) & set(excluded.get(k, ()))
        if bad:
            raise CatalogError(f"{where}: sample values {sorted(map(str, bad))} are excluded")

    expected = dict(raw.get("expected") or {})
    unknown = set(expected) - _EXPECTED_KEYS
    if unknown:
        raise CatalogError(f"{where}: unknown expected keys {sorted(unknown)}")
    for key in ("S", "S0"):
        if key in expected:
            expected[key] = _sig_list(expected[key], f"{where} expected {key}", dim)
    if "obstruction" in expected and expected["obstruction"] not in _OBSTRUCTIONS:
        raise CatalogError(f"{where}: unknown obstruction {expected['obstruction']!r}")
    if "riemannian" in expected and not isinstance(expected["riemannian"], bool):
        raise CatalogError(f"{where}: riemannian must be true or false")
    if "X" in expected:
        expected["X"] = tuple(
            tuple(_fraction(x, f"{where} expected X") for x in vec) for vec in expected["X"]
        )

    constants = tuple((k, str(v)) for k, v in (raw.get("constants") or {}).items())
    regimes = tuple(
        Regime(str(r["when"]), _sig_list(r["S"], f"{where} regime {i}", dim))
        for i, r in enumerate(raw.get("regimes") or ())
    )
    branches = []
    for i, b in enumerate(raw.get("branches") or ()):
        signs = tuple(sorted((int(pos), 1 if s == "+" else -1) for pos, s in b.get("signs", {}).items()))
        tag = b.get("tag")
        branches.append(Branch(
            signs, _sig_list(b["S"], f"{where} branch {i}", dim), b.get("when"),
            (str(tag["expr"]), int(tag["sign"])) if tag else None,
        ))
    groups = tuple(raw.get("groups") or ())
    notes = tuple(str(n) for n in raw.get("notes") or ())
    entry = CatalogEntry(
        name, dim, tuple(diff), tuple(sorted(params.items())), symbols,
        tuple(sorted(samples.items())), tuple(sorted(excluded.items())), expected,
        regimes, tuple(branches), constants, groups, notes,
    )
    # validate structure, conditions and constants at the first sample point
    try:
        point = entry.sample_points()[0] if symbols and samples else {s: Fraction(7, 3) for s in symbols}
        entry.algebra(point)
        env = entry.environment(point)
        for r in regimes:
            evaluate(r.when, env)
    except AlgebraError as exc:
        raise CatalogError(f"{where}: {exc}") from None
    except CatalogError as exc:
        raise CatalogError(f"{where}: {exc}") from None
    return entry


def load_catalog(source: str | Path | Mapping | Sequence = "builtin") -> list[CatalogEntry]:
    """Load and validate a catalog from ``"builtin"``, a path, or parsed JSON data."""
    if isinstance(source, (str, Path)):
        if str(source) == "builtin":
            text = resources.files("nilsol").joinpath("data/catalog.json").read_text(encoding="utf-8")
        else:
            try:
                text = Path(source).read_text(encoding="utf-8")
            except OSError as exc:
                raise CatalogError(f"cannot read catalog {source}: {exc.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"catalog is not valid JSON: {exc}") from None
    else:
        data = source
    if isinstance(data, Mapping):
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise CatalogError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
        raw_entries = data.get("entries")
    else:
        raw_entries = data
    if not isinstance(raw_entries, list):
        raise CatalogError("catalog entries must be a list")
    out, seen = [], {}
    for idx, raw in enumerate(raw_entries):
        entry = _parse_entry(raw, f"entry {idx}")
        if entry.name in seen:
            raise CatalogError(f"entry {idx}: duplicate name {entry.name!r} (first at entry {seen[entry.name]})")
        seen[entry.name] = idx
        out.append(entry)
    return out


def select(
    entries: Iterable[CatalogEntry],
    max_dim: int | None = None,
    names: Sequence[str] = (),
    groups: Sequence[str] = (),
) -> list[CatalogEntry]:
    out = []
    for e in entries:
        if max_dim is not None and e.dim > max_dim:
            continue
        if names and not any(fnmatch.fnmatchcase(e.name, pat) for pat in names):
            continue
        if groups and not set(groups) & set(e.groups):
            continue
        out.append(e)
    return out


# --------------------------------------------------------------------------- golden checks

@dataclass(frozen=True)
class Diff:
    entry: str
    params: tuple[tuple[str, Fraction], ...]
    field: str
    expected: object
    actual: object

    def __str__(self) -> str:
        where = self.entry + (f" [{_fmt_params(dict(self.params))}]" if self.params else "")
        return f"{where} {self.field}: expected {_fmt_value(self.expected)}, got {_fmt_value(self.actual)}"


@dataclass
class SuiteResult:
    entry: CatalogEntry
    params: dict[str, Fraction]
    report: ClassificationReport | None
    diffs: list[Diff]
    riemannian: bool | None = None


def _fmt_params(params: Mapping) -> str:
    return ",".join(f"{k}={v}" for k, v in sorted(params.items()))


def _fmt_value(v) -> str:
    if isinstance(v, (tuple, list)) and all(isinstance(s, str) for s in v):
        return "{" + ",".join(v) + "}"
    return str(v)


def _norm_N(s: str) -> str:
    return "".join(s.split())


def _x_str(vec) -> str:
    return "(" + ",".join(str(x) for x in vec) + ")"


def _branch_matches(branch: Branch, sol: SolvedX, env: dict) -> bool:
    for pos, sign in branch.signs:
        if pos > len(sol.signs) or sol.signs[pos - 1] != sign:
            return False
    if branch.tag is not None:
        expr, sign = branch.tag
        vals = sol.approx(EVAL_PREC)
        local = dict(env)
        local.update({f"x{i + 1}": v for i, v in enumerate(vals)})
        value = evaluate(expr, local)
        if (value > 0) != (sign > 0):
            return False
    return True


def check_branches(entry: CatalogEntry, params: Mapping, alg: NiceLieAlgebra, solutions: Sequence[SolvedX]) -> list[Diff]:
    """Compare per-solution signature sets against the entry's sign branches."""
    branches = entry.branches_for(params)
    if not branches:
        return []
    env = entry.environment(params)
    p = tuple(sorted(params.items()))
    diffs = []
    claimed = [False] * len(solutions)
    for i, b in enumerate(branches):
        got: set[str] = set()
        hit = False
        for j, sol in enumerate(solutions):
            if _branch_matches(b, sol, env):
                hit = claimed[j] = True
                got.update(render_signature(d) for d in signatures(alg, sol))
        label = "branch " + ",".join(f"x{pos}{'+' if s > 0 else '-'}" for pos, s in b.signs)
        if b.tag:
            label += f" ({b.tag[0]} {'>' if b.tag[1] > 0 else '<'} 0)"
        if not hit:
            diffs.append(Diff(entry.name, p, label, b.S, "no matching solution"))
        elif sort_signatures(got) != b.S:
            diffs.append(Diff(entry.name, p, label, b.S, sort_signatures(got)))
    for j, ok in enumerate(claimed):
        if not ok:
            diffs.append(Diff(entry.name, p, "branches", "every solution in a listed branch", str(solutions[j])))
    return diffs


def check_entry(entry: CatalogEntry, params: Mapping | None = None, with_metrics: bool = False) -> SuiteResult:
    params = dict(params or {})
    p = tuple(sorted(params.items()))
    exp = entry.expected
    diffs: list[Diff] = []
    try:
        alg = entry.algebra(params)
    except (AlgebraError, ZeroCoefficientError) as exc:
        return SuiteResult(entry, params, None, [Diff(entry.name, p, "algebra", "valid algebra", str(exc))])

    only_riemannian = set(exp) <= {"riemannian"} and not entry.regimes and not entry.branches
    if only_riemannian:
        got = riemannian_exists(alg)
        if "riemannian" in exp and got != exp["riemannian"]:
            diffs.append(Diff(entry.name, p, "riemannian", exp["riemannian"], got))
        return SuiteResult(entry, params, None, diffs, got)

    try:
        rep = classify(alg, with_metrics=with_metrics)
    except NilsolitonError as exc:
        return SuiteResult(entry, params, None, [Diff(entry.name, p, "classification", "success", str(exc))])

    expected_S = exp.get("S")
    regime = entry.regime_for(params)
    if entry.regimes:
        if regime is None:
            diffs.append(Diff(entry.name, p, "regime", "a matching regime", "none"))
        else:
            expected_S = regime.S
    if expected_S is not None and tuple(rep.S) != tuple(expected_S):
        diffs.append(Diff(entry.name, p, "S", expected_S, rep.S))
    if "N" in exp and _norm_N(exp["N"]) != _norm_N(rep.N):
        diffs.append(Diff(entry.name, p, "N", exp["N"], rep.N))
    if "S0" in exp and tuple(rep.S0) != tuple(exp["S0"]):
        diffs.append(Diff(entry.name, p, "S0", exp["S0"], rep.S0))
    if "obstruction" in exp and rep.obstruction != exp["obstruction"]:
        diffs.append(Diff(entry.name, p, "obstruction", exp["obstruction"], rep.obstruction))
    if "riemannian" in exp and bool(rep.S0) != exp["riemannian"]:
        diffs.append(Diff(entry.name, p, "riemannian", exp["riemannian"], bool(rep.S0)))
    if "X" in exp:
        if rep.family is not None and rep.family.corank == 0:
            got_X = {tuple(rep.family.X0)}
        else:
            got_X = {tuple(s.values) for s in rep.solutions if s.exact}
        want_X = set(exp["X"])
        if got_X != want_X:
            diffs.append(Diff(entry.name, p, "X", sorted(map(_x_str, want_X)), sorted(map(_x_str, got_X))))
    diffs.extend(check_branches(entry, params, alg, rep.solutions))
    return SuiteResult(entry, params, rep, diffs, bool(rep.S0))


def run_suite(
    entries: Iterable[CatalogEntry],
    samples: Mapping[str, Sequence] | None = None,
    with_metrics: bool = False,
) -> list[SuiteResult]:
    """Classify every entry (at every sample point of a family) and diff against golden data."""
    out = []
    for entry in entries:
        for point in entry.sample_points(samples):
            out.append(check_entry(entry, point, with_metrics))
    return out


# --------------------------------------------------------------------------- tables

TABLE_COLUMNS = ("name", "algebra", "N", "S")


@dataclass(frozen=True)
class TableRow:
    name: str
    algebra: str
    N: str
    S: tuple[str, ...]

    @classmethod
    def from_report(cls, rep: ClassificationReport) -> "TableRow":
        name = rep.name
        if rep.algebra.params:
            name += f" [{_fmt_params(dict(rep.algebra.params))}]"
        return cls(name, rep.algebra.to_notation()[1:-1], rep.N, tuple(rep.S))


def _rows(items: Iterable) -> list[TableRow]:
    out = []
    for it in items:
        if isinstance(it, TableRow):
            out.append(it)
        elif isinstance(it, SuiteResult):
            if it.report is not None:
                out.append(TableRow.from_report(it.report))
        else:
            out.append(TableRow.from_report(it))
    return out


def _set_str(S: Sequence[str]) -> str:
    return "{" + ",".join(S) + "}"


def emit_table(items: Iterable, fmt: str = "text") -> str:
    """Render reports (or :class:`TableRow` values) as ``csv``, ``json`` or ``text``."""
    rows = _rows(items)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for r in rows:
            w.writerow((r.name, r.algebra, r.N, _set_str(r.S)))
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "columns": list(TABLE_COLUMNS),
            "rows": [{"name": r.name, "algebra": r.algebra, "N": r.N, "S": list(r.S)} for r in rows],
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if fmt == "text":
        cells = [TABLE_COLUMNS] + [(r.name, r.algebra, r.N, _set_str(r.S)) for r in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(TABLE_COLUMNS))]
        return "".join(
            "  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() + "\n" for line in cells
        )
    raise ValueError(f"unknown table format {fmt!r}")


def parse_table(text: str, fmt: str) -> list[TableRow]:
    """Inverse of :func:`emit_table` for the ``csv`` and ``json`` formats."""
    if fmt == "json":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError("unsupported table schema_version")
        return [TableRow(r["name"], r["algebra"], r["N"], tuple(r["S"])) for r in doc["rows"]]
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if tuple(header or ()) != TABLE_COLUMNS:
            raise ValueError(f"unexpected csv header {header}")
        out = []
        for name, alg, N, S in reader:
            body = S.strip()[1:-1]
            out.append(TableRow(name, alg, N, tuple(s for s in body.split(",") if s)))
        return out
    raise ValueError(f"cannot parse table format {fmt!r}")


# --------------------------------------------------------------------------- CLI

def _kv(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), v.strip()


def _params(pairs) -> dict[str, Fraction]:
    out = {}
    for k, v in pairs or ():
        try:
            out[k] = Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise CatalogError(f"parameter {k}: {v!r} is not rational") from None
    return out


def _samples(pairs) -> dict[str, tuple[Fraction, ...]]:
    out = {}
    for k, v in pairs or ():
        try:
            out[k] = tuple(Fraction(x) for x in v.split(",") if x.strip())
        except (ValueError, ZeroDivisionError):
            raise CatalogError(f"samples for {k}: {v!r} is not a list of rationals") from None
    return out


def _int_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise CatalogError(f"{text!r} is not a comma-separated integer vector") from None


def _algebra_arg(args) -> NiceLieAlgebra:
    text = args.algebra
    try:
        entries = {e.name: e for e in load_catalog(args.catalog)}
    except CatalogError:
        entries = {}
    if text in entries:
        return entries[text].algebra(_params(args.param))
    return parse_nice_algebra(text, _params(args.param), name=args.name or "")


def _print_report(rep: ClassificationReport, out) -> None:
    print(f"algebra: {rep.name + ' ' if rep.name else ''}{rep.algebra.to_notation()}", file=out)
    if rep.algebra.params:
        print(f"parameters: {_fmt_params(dict(rep.algebra.params))}", file=out)
    print(f"N: {rep.N}", file=out)
    if rep.corank is not None:
        print(f"corank: {rep.corank}", file=out)
    print(f"obstruction: {rep.obstruction or 'none'}", file=out)
    print(f"S: {_set_str(rep.S)}", file=out)
    print(f"S0: {_set_str(rep.S0)}", file=out)
    for s in rep.solutions:
        sig = sort_signatures(render_signature(d) for d in signatures(rep.algebra, s))
        print(f"X = {s}  [{s.kind}]  signatures {_set_str(sig)}", file=out)
    for d, g in rep.metrics:
        print(f"metric {d}: {g}", file=out)
    for f in rep.failures:
        print(f"failure: {f}", file=out)
    for n in rep.notes:
        print(f"note: {n}", file=out)


def _cmd_analyze(args, out) -> int:
    alg = _algebra_arg(args)
    rep = classify(alg, with_metrics=not args.no_metrics)
    if args.json:
        print(json.dumps(rep.to_dict(), indent=2, ensure_ascii=False), file=out)
    else:
        _print_report(rep, out)
    return 0


def _suite_from_args(args) -> list[SuiteResult]:
    entries = select(load_catalog(args.catalog), args.dim, args.name or (), args.group or ())
    if not entries:
        raise CatalogError("no catalog entries match the selection")
    return run_suite(entries, _samples(args.samples), with_metrics=args.metrics)


def _report_diffs(results: Sequence[SuiteResult], out) -> int:
    diffs = [d for r in results for d in r.diffs]
    for d in diffs:
        print(f"DIFF {d}", file=out)
    checked = len(results)
    print(f"{checked} checks, {len(diffs)} diffs", file=out)
    return 1 if diffs else 0


def _cmd_classify(args, out) -> int:
    results = _suite_from_args(args)
    for r in results:
        if r.report is None and r.riemannian is not None:
            r_text = "Riemannian nilsoliton" if r.riemannian else "no Riemannian nilsoliton"
            print(f"{r.entry.name}: {r_text}", file=out)
    print(emit_table(results, args.format), end="", file=out)
    if args.golden_diff:
        return _report_diffs(results, out)
    return 0


def _cmd_table(args, out) -> int:
    results = _suite_from_args(args)
    print(emit_table(results, args.format), end="", file=out)
    if args.golden_diff:
        return _report_diffs(results, sys.stderr if args.format != "text" else out)
    return 0


def _cmd_verify(args, out) -> int:
    alg = _algebra_arg(args)
    g = DiagonalMetric.parse(args.metric)
    ric = ricci_koszul(MetricLieAlgebra.from_nice(alg, g))
    print(f"metric: {g}", file=out)
    print("Ricci: (" + ", ".join(str(x) for x in ric.diagonal) + ")", file=out)
    try:
        cert = verify_nilsoliton(alg, g)
    except NotNilsolitonError as exc:
        print(f"not a nilsoliton: {exc}", file=out)
        return 1
    print(f"nilsoliton: lambda = {cert.lam}", file=out)
    print("derivation D = (" + ", ".join(str(x) for x in cert.derivation) + ")", file=out)
    print(f"normalized (lambda = -1/2): {'yes' if cert.normalized else 'no'}", file=out)
    return 0


def _cmd_extend(args, out) -> int:
    alg = _algebra_arg(args)
    g = DiagonalMetric.parse(args.metric)
    try:
        ext = einstein_extension(alg, g)
    except NotNilsolitonError as exc:
        print(f"not a nilsoliton: {exc}", file=out)
        return 1
    n = alg.dim
    print(f"Einstein constant: {ext.lam}", file=out)
    print(f"metric on e0: {ext.e0_coefficient}", file=out)
    print("brackets:", file=out)
    for i, j, k, c in ext.algebra.brackets:
        if j == n + 1:
            # e0 is appended last internally but printed first
            i, j, c = n + 1, i, -c
        lab = "0" if i == n + 1 else str(i)
        print(f"  [e{lab},e{j}] = {c} e{k}", file=out)
    return 0


def _cmd_wick(args, out) -> int:
    alg = _algebra_arg(args)
    W = _int_vector(args.w)
    g = DiagonalMetric.parse(args.metric) if args.metric else None
    alg_w, g_w = wick_rotate(alg, W, g)
    print(f"algebra: {alg_w.to_notation()}", file=out)
    if g_w is not None:
        print(f"metric: {g_w}", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nilsol", description="Diagonal nilsoliton metrics on nice nilpotent Lie algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    def algebra_cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("algebra", help="structure equations such as '(0,0,e^{12})' or a catalog name")
        sp.add_argument("--param", action="append", type=_kv, metavar="NAME=VALUE", help="bind a parameter")
        sp.add_argument("--name", default="", help="label for the algebra")
        sp.add_argument("--catalog", default="builtin", help="catalog used to resolve names")
        return sp

    sp = algebra_cmd("analyze", "classify one algebra")
    sp.add_argument("--json", action="store_true", help="print the report as JSON")
    sp.add_argument("--no-metrics", action="store_true", help="skip metric reconstruction")
    sp.set_defaults(func=_cmd_analyze)

    for name, func, help_text in (
        ("classify", _cmd_classify, "classify catalog entries"),
        ("table", _cmd_table, "emit a signature table for catalog entries"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--catalog", default="builtin", help="catalog JSON file, or 'builtin'")
        sp.add_argument("--dim", type=int, help="only entries of dimension at most DIM")
        sp.add_argument("--name", action="append", help="glob on entry names (repeatable)")
        sp.add_argument("--group", action="append", help="catalog group (repeatable)")
        sp.add_argument("--samples", action="append", type=_kv, metavar="NAME=V1,V2", help="override family samples")
        sp.add_argument("--golden-diff", action="store_true", help="compare with the catalog's expected data")
        sp.add_argument("--metrics", action="store_true", help="reconstruct and verify metrics")
        sp.add_argument("--format", choices=("text", "csv", "json"), default="text" if name == "classify" else "csv")
        sp.set_defaults(func=func)

    sp = algebra_cmd("verify", "check that a diagonal metric is a nilsoliton")
    sp.add_argument("--metric", required=True, help="diagonal entries, e.g. 1,1,5/19")
    sp.set_defaults(func=_cmd_verify)

    sp = algebra_cmd("extend", "build the Einstein solvmanifold extension of a nilsoliton")
    sp.add_argument("--metric", required=True, help="diagonal entries, e.g. 1,1,1/3")
    sp.set_defaults(func=_cmd_extend)

    sp = algebra_cmd("wick", "Wick-rotate an algebra along an integer grading")
    sp.add_argument("--w", required=True, help="grading vector, e.g. 1,1,0,0,1,1")
    sp.add_argument("--metric", help="diagonal metric to rotate along with the algebra")
    sp.set_defaults(func=_cmd_wick)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (AlgebraError, CatalogError, GeometryError, NilsolitonError) as exc:
        print(f"nilsol: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

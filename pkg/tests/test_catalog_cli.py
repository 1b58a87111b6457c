import copy
import io
import json
from fractions import Fraction as F

import mpmath
import pytest

from nilsol.algebra import parse_nice_algebra
from nilsol.catalog_cli import (
    CatalogError,
    TableRow,
    check_entry,
    emit_table,
    evaluate,
    load_catalog,
    main,
    parse_table,
    run_suite,
    select,
)
from nilsol.nilsoliton import classify

H3 = {"name": "h3", "dim": 3, "differential": ["0", "0", "e^{12}"]}


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def doc(*entries):
    return {"schema_version": 1, "entries": list(entries)}


# ---------------------------------------------------------------- loading

def test_builtin_catalog_sizes(catalog):
    assert len(select(catalog, max_dim=6)) == 34
    assert len([e for e in catalog if "dim6" in e.groups]) == 34
    assert len([e for e in catalog if "obstructed7" in e.groups]) == 16
    e = next(e for e in catalog if e.name == "7421:9")
    assert e.notation == "(0,0,0,-e^{12},e^{13},e^{14}+e^{23},e^{16}+e^{34})"


def test_minimal_catalog_loads():
    (e,) = load_catalog(doc(H3))
    assert e.dim == 3 and not e.is_family
    assert e.algebra().brackets == parse_nice_algebra("(0,0,e^{12})").brackets


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d.update(schema_version=2), "schema_version"),
        (lambda d: d["entries"].append(copy.deepcopy(H3)), "duplicate name"),
        (lambda d: d["entries"][0].update(dim=4), "entry 0"),
        (lambda d: d["entries"][0].update(colour="red"), "entry 0"),
        (lambda d: d["entries"][0].update(differential=["0", "0", "e^{13}"]), "entry 0"),
        (lambda d: d["entries"][0].update(expected={"S": ["14"]}), "entry 0"),
        (lambda d: d["entries"][0].update(expected={"obstruction": "Q"}), "entry 0"),
    ],
)
def test_catalog_validation_errors(mutate, fragment):
    d = doc(copy.deepcopy(H3))
    mutate(d)
    with pytest.raises(CatalogError, match=fragment):
        load_catalog(d)


def test_catalog_errors_from_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(CatalogError, match="JSON"):
        load_catalog(bad)
    with pytest.raises(CatalogError, match="cannot read"):
        load_catalog(tmp_path / "missing.json")


def test_family_samples_skip_excluded():
    entry = {
        "name": "fam", "dim": 7,
        "differential": ["0", "0", "0", "(a-1)e^{12}", "ae^{13}", "e^{14}+e^{23}", "e^{16}+e^{25}+e^{34}"],
        "family": {"symbols": ["a"], "excluded": {"a": ["0", "1"]}, "samples": {"a": ["1"]}},
    }
    with pytest.raises(CatalogError, match="excluded"):
        load_catalog(doc(entry))


def test_select_by_name_and_group(catalog):
    assert [e.name for e in select(catalog, names=["7421:*"])] == ["7421:9", "7421:14"]
    assert {e.dim for e in select(catalog, groups=["examples8"])} == {8}


# ---------------------------------------------------------------- evaluator

@pytest.mark.parametrize(
    "expr, env, want",
    [
        ("a < 1/2", {"a": F(1, 4)}, True),
        ("0 < a < 1 and not a == 1/2", {"a": F(1, 2)}, False),
        ("a**2 >= alpha", {"a": F(40), "alpha": 1431}, True),
        ("-a + 3*b", {"a": F(1), "b": F(2)}, 5),
        ("sqrt(4) == 2 or a", {"a": 0}, True),
    ],
)
def test_evaluate(expr, env, want):
    with mpmath.workprec(128):
        assert evaluate(expr, env) == want


@pytest.mark.parametrize("expr", ["__import__('os')", "a.real", "[1][0]", "b", "lambda: 1"])
def test_evaluate_rejects_unsafe_or_unknown(expr):
    with pytest.raises(CatalogError):
        evaluate(expr, {"a": 1})


def test_regime_lookup(catalog):
    e = next(e for e in catalog if e.name == "8531:46")
    assert len(e.regime_for({"a": F(40)}).S) == 8
    assert e.regime_for({"a": F(1)}).S == ("∅", "13478", "1458", "357")


# ---------------------------------------------------------------- golden checks

def test_golden_check_reports_readable_diff():
    entry = dict(H3, expected={"S": ["∅", "12"], "N": "2/3(1,1,2)"})
    (e,) = load_catalog(doc(entry))
    res = check_entry(e)
    (d,) = res.diffs
    assert d.field == "S"
    text = str(d)
    assert text.startswith("h3 S: expected {∅,12}, got {∅,12,13,23}")


def test_run_suite_sweeps_family_samples(catalog):
    (e,) = select(catalog, names=["741:6"])
    results = run_suite([e], {"a": (F(-1), F(2))})
    assert [r.params for r in results] == [{"a": F(-1)}, {"a": F(2)}]
    assert all(not r.diffs for r in results)


# ---------------------------------------------------------------- tables

def reports():
    return [classify(parse_nice_algebra("(0,0,e^{12})", name="31:1"), with_metrics=False),
            classify(parse_nice_algebra("(0,0,0,e^{12},e^{13})", name="521:x"), with_metrics=False)]


def test_emit_text_row():
    text = emit_table(reports()[:1], "text")
    header, row = text.splitlines()
    assert header.split() == ["name", "algebra", "N", "S"]
    assert row.split() == ["31:1", "0,0,e^{12}", "2/3(1,1,2)", "{∅,12,13,23}"]


def test_emit_csv_header_and_empty():
    assert emit_table([], "csv") == "name,algebra,N,S\n"
    assert emit_table([], "text").strip().split() == ["name", "algebra", "N", "S"]
    assert json.loads(emit_table([], "json"))["rows"] == []
    assert emit_table(reports(), "csv").splitlines()[1] == '31:1,"0,0,e^{12}","2/3(1,1,2)","{∅,12,13,23}"'


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_table_round_trip_is_byte_identical(fmt):
    first = emit_table(reports(), fmt)
    rows = parse_table(first, fmt)
    assert all(isinstance(r, TableRow) for r in rows)
    assert emit_table(rows, fmt) == first


def test_emit_unknown_format():
    with pytest.raises(ValueError):
        emit_table([], "xml")


# ---------------------------------------------------------------- CLI

def test_cli_analyze_text_and_json():
    code, out = run("analyze", "(0,0,0,-e^{12},e^{13},e^{14}+e^{23},e^{16}+e^{34})")
    assert code == 0
    assert "N: 2/19(3,5,6,8,9,11,14)" in out
    assert "S: {126,147,24567,5}" in out
    code, out = run("analyze", "7421:9", "--json", "--no-metrics")
    assert code == 0 and json.loads(out)["S"] == ["126", "147", "24567", "5"]


def test_cli_analyze_with_parameter():
    code, out = run("analyze", "(0,0,0,(a-1)e^{12},ae^{13},e^{14}+e^{23},e^{16}+e^{25}+e^{34})",
                    "--param", "a=2", "--no-metrics")
    assert code == 0 and "parameters: a=2" in out


def test_cli_classify_golden_dim6():
    code, out = run("classify", "--dim", "6", "--golden-diff")
    assert code == 0
    assert out.rstrip().endswith("34 checks, 0 diffs")


def test_cli_classify_reports_mismatch(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps(doc(dict(H3, expected={"S": ["∅"]}))))
    code, out = run("classify", "--catalog", str(path), "--golden-diff")
    assert code == 1
    assert "DIFF h3 S: expected {∅}, got {∅,12,13,23}" in out


def test_cli_table_formats():
    code, out = run("table", "--name", "31:1")
    assert code == 0 and out.splitlines()[0] == "name,algebra,N,S"
    code, out = run("table", "--name", "741:6", "--samples", "a=2", "--format", "json")
    (row,) = json.loads(out)["rows"]
    assert row["name"] == "741:6 [a=2]" and len(row["S"]) == 24


def test_cli_verify_extend_wick():
    code, out = run("verify", "7421:9", "--metric", "1,1,5/19,5/19,-5/361,20/361,100/6859")
    assert code == 0 and "normalized (lambda = -1/2): yes" in out
    code, out = run("verify", "(0,0,e^{12})", "--metric", "1,1,2")
    assert code == 0 and "normalized (lambda = -1/2): no" in out
    code, out = run("verify", "421:1", "--metric", "1,1,1,2")
    assert code == 1 and "not a nilsoliton" in out
    code, out = run("extend", "(0,0,e^{12})", "--metric", "1,1,1/3")
    assert code == 0 and "metric on e0: 16/3" in out
    code, out = run("wick", "631:5a", "--w", "1,1,0,0,1,1", "--metric", "1,-1,1,-1/4,1/4,1/16")
    assert code == 0
    rotated = out.splitlines()[0].removeprefix("algebra: ")
    want = parse_nice_algebra("(0,0,0,-e^{12},e^{13},e^{24}+e^{35})")
    assert sorted(parse_nice_algebra(rotated).brackets) == sorted(want.brackets)
    assert "metric: (-1,1,1,-1/4,-1/4,-1/16)" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "(0,0,e^{13})"],
        ["analyze", "(0,0,e^{12}", "--param", "a=x"],
        ["classify", "--name", "no-such-entry"],
        ["wick", "(0,0,e^{12})", "--w", "1,0,0"],
        ["verify", "(0,0,e^{12})", "--metric", "1,0,1"],
    ],
)
def test_cli_input_errors_exit_2(argv, capsys):
    code, _ = run(*argv)
    assert code == 2
    assert "nilsol: error:" in capsys.readouterr().err


# ---------------------------------------------------------------- environment knobs

def test_seed_grid_env(monkeypatch):
    from nilsol.nilsoliton import _seed_grid_size

    assert _seed_grid_size(2) == 5
    monkeypatch.setenv("NILSOL_NUMERIC_SEED_GRID", "9")
    assert _seed_grid_size(2) == 9


def test_max_refine_env(monkeypatch):
    from nilsol.exactnum.poly import max_refine

    assert max_refine() == 256
    monkeypatch.setenv("NILSOL_MAX_REFINE", "12")
    assert max_refine() == 12

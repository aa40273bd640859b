import json
import subprocess
import sys

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from dreg.arith import format_rational
from dreg.cli import run_command
from dreg.errors import ParseError
from dreg.parser import format_problem, parse_expression, parse_ideal
from dreg.rank import holonomic_rank
from dreg.report import SCHEMA, dumps, emit_report
from dreg.weyl import DIdeal
from conftest import corpus_path, ds, gkz_regular, xs
from strategies import weyl_elements


# -- parser --------------------------------------------------------------


def test_parse_two_generators():
    pf = parse_ideal("vars 3; dx2^2 - dx1*dx3; x1*dx1 + x2*dx2 + x3*dx3 - 1/4;")
    assert pf.nvars == 3
    assert pf.generators == list(gkz_regular().generators[:2])


def test_parse_normal_orders_products():
    pf = parse_ideal("vars 1; dx1*x1;")
    (x,), (d,) = xs(1), ds(1)
    assert pf.generators == [x * d + 1]


def test_parse_index_out_of_range():
    with pytest.raises(ParseError, match="variable index out of range") as exc:
        parse_ideal("vars 2; dx3;")
    assert (exc.value.line, exc.value.column) == (1, 9)


def test_parse_index_zero():
    with pytest.raises(ParseError, match="variable index out of range"):
        parse_ideal("vars 2; x0;")


def test_parse_juxtaposition_rejected():
    with pytest.raises(ParseError, match=r"write '\*' between factors"):
        parse_ideal("vars 1; x1 dx1;")


def test_parse_error_position_on_later_line():
    with pytest.raises(ParseError) as exc:
        parse_ideal("vars 2;\nx1*dx1;\n  x2 + $;")
    assert exc.value.line == 3 and exc.value.column == 8


def test_parse_requires_vars_first():
    with pytest.raises(ParseError, match="vars"):
        parse_ideal("dx1; vars 1;")


def test_parse_requires_generators():
    with pytest.raises(ParseError, match="no generators"):
        parse_ideal("vars 2;")


def test_precedence():
    x, d = xs(2), ds(2)
    assert parse_expression("x1 + x2*dx2^2", 2) == x[0] + x[1] * d[1] ** 2
    assert parse_expression("-(x1 - 1)^2*dx1", 2) == -((x[0] - 1) ** 2) * d[0]
    assert parse_expression("dx1^2*x1", 2) == x[0] * d[0] ** 2 + 2 * d[0]
    assert parse_expression("3/6*x1", 2) == mpq(1, 2) * x[0]


def test_directives_and_comments():
    text = """# comment
vars 3;
dx2 - dx1*dx3;   # trailing comment
component x2;
avoid x1*x3;
point 1, 0, -2/3;
weight 1, 1, 1;
seed 7; heightbound 4; pointspercomponent 2; charts 1, 3; budget 5000;
"""
    pf = parse_ideal(text)
    assert [f.to_str() for f in pf.components] == ["x2"]
    assert [f.to_str() for f in pf.avoid] == ["x1*x3"]
    assert pf.points == [(1, 0, mpq(-2, 3))]
    assert pf.weights == [(1, 1, 1)]
    assert (pf.seed, pf.height_bound, pf.points_per_component) == (7, 4, 2)
    assert pf.charts == (1, 3) and pf.budget_ms == 5000


def test_directive_errors():
    with pytest.raises(ParseError, match="needs 3 coordinates"):
        parse_ideal("vars 3; dx1; point 1, 2;")
    with pytest.raises(ParseError, match="out of range"):
        parse_ideal("vars 2; dx1; charts 3;")
    with pytest.raises(ParseError, match="polynomial expected"):
        parse_ideal("vars 2; dx1; component dx1;")
    with pytest.raises(ParseError, match="unknown directive"):
        parse_ideal("vars 2; dx1; frobnicate 3;")


@pytest.mark.parametrize("name", ["exp_pole.dreg", "gkz_regular.dreg", "gkz_irregular.dreg", "euler.dreg"])
def test_corpus_files_parse(name):
    with open(corpus_path(name)) as fh:
        pf = parse_ideal(fh.read())
    assert holonomic_rank(pf.ideal).is_finite


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(weyl_elements(n).filter(bool), min_size=1,
                                             max_size=3))))
def test_round_trip(data):
    n, gens = data
    pf = parse_ideal(format_problem(n, gens))
    assert pf.generators == gens


# -- reports -------------------------------------------------------------


def test_rank_only_document():
    doc = json.loads(emit_report(holonomic_rank(DIdeal(2, ds(2)))))
    assert doc == {"rank": 1, "schema": SCHEMA}


def test_dumps_is_canonical():
    a = dumps({"b": [format_rational(mpq(1, 2))], "a": 1})
    b = dumps({"a": 1, "b": ["1/2"]})
    assert a == b and a.endswith("\n")
    assert a.index('"a"') < a.index('"b"')


# -- command line --------------------------------------------------------


def run(args, capsys):
    code = run_command(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_rank(capsys):
    code, out, _ = run(["rank", corpus_path("gkz_regular.dreg")], capsys)
    assert code == 0
    assert json.loads(out)["rank"] == 2


def test_cli_init(capsys):
    code, out, _ = run(["init", corpus_path("gkz_regular.dreg"), "--point", "0,1,1",
                        "--weight", "1,1,1"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert sorted(doc["generators"]) == sorted(["dx2", "dx3", "x1*dx1^2 + dx1"])
    assert doc["rank"] == 2


def test_cli_sing(capsys):
    code, out, _ = run(["sing", corpus_path("gkz_irregular.dreg")], capsys)
    doc = json.loads(out)
    assert code == 0
    assert sorted(doc["codim1"]) == ["x1", "x2", "x3"]
    assert doc["mayHaveDeeper"] is True


def test_cli_regular_gkz_irr(capsys):
    code, out, _ = run(["regular", corpus_path("gkz_irregular.dreg"), "--check-infinity",
                        "--seed", "7"], capsys)
    doc = json.loads(out)
    assert code == 1
    assert doc["verdict"] == "IRREGULAR"
    assert {"poly": "x2", "mult": 1} in doc["divisor"]


def test_cli_regular_gkz_reg(capsys):
    code, out, _ = run(["regular", corpus_path("gkz_regular.dreg"), "--check-infinity"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["verdict"] == "REGULAR" and doc["divisor"] == []


def test_cli_affine_only_is_inconclusive(capsys):
    code, out, _ = run(["regular", corpus_path("euler.dreg")], capsys)
    assert code == 2
    assert json.loads(out)["verdict"] == "INCONCLUSIVE"


@pytest.mark.parametrize("name,expected", [("exp_pole.dreg", 1), ("gkz_regular.dreg", 0),
                                           ("gkz_irregular.dreg", 1), ("euler.dreg", 0)])
def test_exit_codes_on_corpus(name, expected, capsys):
    code, _, _ = run(["regular", corpus_path(name), "--check-infinity"], capsys)
    assert code == expected


def test_cli_support_and_irrdiv(capsys):
    code, out, _ = run(["support", corpus_path("exp_pole.dreg")], capsys)
    assert code == 0 and json.loads(out)["support"] == ["x1"]
    code, out, _ = run(["irrdiv", corpus_path("gkz_irregular.dreg")], capsys)
    assert code == 0 and json.loads(out)["divisor"] == [{"poly": "x2", "mult": 1}]


def test_cli_oracle(capsys):
    code, out, _ = run(["oracle", corpus_path("gkz_irregular.dreg")], capsys)
    doc = json.loads(out)
    assert code == 1
    verdicts = {r["component"]: r["regular"] for r in doc["oracle"]}
    assert verdicts == {"x1": True, "x2": False, "x3": True}


def test_cli_cross_check(capsys):
    code, out, _ = run(["regular", corpus_path("gkz_irregular.dreg"), "--cross-check"], capsys)
    doc = json.loads(out)
    assert code == 1
    assert doc["crossCheck"] and all(c["agrees"] for c in doc["crossCheck"])


def test_cli_usage_errors(tmp_path, capsys):
    bad = tmp_path / "bad.dreg"
    bad.write_text("vars 2; dx3;")
    code, _, err = run(["rank", str(bad)], capsys)
    assert code == 3 and "variable index out of range" in err
    assert run(["frobnicate", str(bad)], capsys)[0] == 3
    assert run(["rank", str(tmp_path / "missing.dreg")], capsys)[0] == 3
    code, _, _ = run(["init", corpus_path("gkz_regular.dreg"), "--point", "1,2"], capsys)
    assert code == 3


def test_cli_infinite_rank_is_usage_error(tmp_path, capsys):
    f = tmp_path / "inf.dreg"
    f.write_text("vars 2; dx1;")
    assert run(["regular", str(f)], capsys)[0] == 3


def test_cli_budget_exceeded(monkeypatch, capsys):
    monkeypatch.setenv("DREG_BUDGET_MS", "1")
    code, out, _ = run(["regular", corpus_path("gkz_regular.dreg"), "--check-infinity"], capsys)
    assert code == 4
    assert "error" in json.loads(out)


def test_cli_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(["rank", corpus_path("gkz_irregular.dreg"), "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["rank"] == 2


def test_cli_determinism_and_jobs(capsys):
    args = ["regular", corpus_path("gkz_irregular.dreg"), "--check-infinity", "--seed", "3"]
    _, first, _ = run(args, capsys)
    _, second, _ = run(args, capsys)
    _, parallel, _ = run(args + ["--jobs", "3"], capsys)
    assert first == second == parallel


def test_cli_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO("vars 2; dx1; dx2;"))
    code, out, _ = run(["rank", "-"], capsys)
    assert code == 0 and json.loads(out)["rank"] == 1


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "dreg.cli", "rank", corpus_path("gkz_regular.dreg")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rank"] == 2

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_hinf import cli
from volterra_hinf import criteria as cr


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


# ---------------------------------------------------------------------------
# parsing helpers

@pytest.mark.parametrize("expr, env, value", [
    ("2p-2", {"p": 1.5}, 1.0),
    ("2(p-1)", {"p": 3.0}, 4.0),
    ("alpha/2 + 1", {"alpha": 3.0}, 2.5),
    ("-p**2", {"p": 2.0}, -4.0),
    ("0.5", {}, 0.5),
])
def test_eval_expression(expr, env, value):
    assert cli.eval_expression(expr, env) == value


@pytest.mark.parametrize("expr", ["q+1", "__import__('os')", "p[0]", "2p-"])
def test_eval_expression_rejects(expr):
    with pytest.raises(cli.CliError):
        cli.eval_expression(expr, {"p": 1.0})


@pytest.mark.parametrize("text, values", [
    ("1:2:0.5", [1.0, 1.5, 2.0]),
    ("0.1:0.3:0.1", [0.1, 0.2, 0.3]),
    ("0.5,2", [0.5, 2.0]),
    ("3", [3.0]),
])
def test_parse_range(text, values):
    assert cli.parse_range(text) == values


@pytest.mark.parametrize("text", ["1:2", "2:1:0.5", "1:2:0", "a,b"])
def test_parse_range_rejects(text):
    with pytest.raises(cli.CliError):
        cli.parse_range(text)


def test_parse_symbol_forms(tmp_path):
    assert cli.parse_symbol(None).c.tolist() == [0, 1]
    assert cli.parse_symbol("poly:1,0,2").c.tolist() == [1, 0, 2]
    assert cli.parse_symbol("1, 2i").c.tolist() == [1, 2j]
    assert cli.parse_symbol("[[1, 0], [0, 1]]").c.tolist() == [1, 1j]
    path = tmp_path / "g.csv"
    path.write_text(cli.parse_symbol("poly:0,1,3").to_csv())
    assert cli.parse_symbol(str(path)).c.tolist() == [0, 1, 3]
    with pytest.raises(cli.CliError):
        cli.parse_symbol("poly:1,x")


def test_parse_weight_registry_and_expressions():
    assert cli.parse_weight_arg("std1").spec() == "std:alpha=1"
    assert cli.parse_weight_arg("std:alpha=2p-2", {"p": 1.5}).spec() == "std:alpha=1"
    with pytest.raises(cli.CliError):
        cli.parse_weight_arg("nosuch:1")


@pytest.mark.parametrize("obj, text", [
    (float("inf"), '"inf"'),
    (float("-inf"), '"-inf"'),
    (0.1, "0.10000000000000001"),
    ({"b": 1, "a": [True, None]}, '{\n  "a": [true, null],\n  "b": 1\n}'),
])
def test_dumps_is_canonical(obj, text):
    assert cli.dumps(obj) == text


# ---------------------------------------------------------------------------
# commands

def test_classify_command(capsys):
    doc = run_json(capsys, "classify", "--weight", "const")
    assert doc["schema"] == 1 and doc["command"] == "classify"
    assert doc["result"]["report"]["d"] == "member"


def test_norm_command(capsys):
    doc = run_json(capsys, "norm", "--kind", "hp", "--p", "2", "--symbol", "poly:3,0,4")
    assert doc["result"]["norm"]["value"] == pytest.approx(5.0, rel=1e-12)


def test_norm_without_p(capsys):
    code, _, err = run(capsys, "norm", "--kind", "apw", "--symbol", "poly:1")
    assert code == 2 and "--p" in err


@pytest.mark.parametrize("argv, verdict", [
    (["--p", "2", "--weight", "std:alpha=2.5"], cr.TRIVIAL_ONLY),
    (["--p", "2", "--weight", "const", "--which", "bounded"], cr.COMPACT),
    (["--p", "0.75", "--weight", "std:alpha=-0.5"], cr.NONTRIVIAL),
])
def test_criterion_command(capsys, argv, verdict):
    doc = run_json(capsys, "criterion", *argv)
    assert doc["result"]["verdict"] == verdict


def test_bounded_value_in_json(capsys):
    doc = run_json(capsys, "criterion", "--p", "2", "--weight", "const", "--which", "bounded")
    assert doc["result"]["summary"]["value"] == pytest.approx(1.2020569031595942, rel=1e-9)


@pytest.mark.parametrize("argv", [
    ["criterion", "--p", "0.5", "--weight", "const", "--which", "trivial-dirichlet"],
    ["criterion", "--p", "2", "--weight", "const", "--which", "trivial-le1"],
    ["criterion", "--p", "2", "--weight", "const", "--which", "bounded", "--symbol", "poly:0,-1"],
    ["criterion", "--p", "0.75", "--weight", "const", "--grid-depth", "4"],
    ["criterion", "--p", "1,2", "--weight", "const"],
    ["classify", "--weight", "std:alpha=banana"],
    ["classify", "--weight", "const", "--grid-depth", "2"],
    ["verify", "--suite", "nosuch"],
])
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and not out and err.startswith("volterra-hinf: error:")


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--p", "2", "--alpha", "1.5,2.5", "--weight", "std:alpha=alpha",
                       "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == ",".join(cli.SWEEP_HEADER)
    assert [ln.split(",")[4] for ln in lines[1:]] == [cr.NONTRIVIAL, cr.TRIVIAL_ONLY]


def test_sweep_reports_bad_weights_per_row(capsys):
    doc = run_json(capsys, "sweep", "--p", "2", "--alpha=-3,1", "--weight", "std:alpha=alpha")
    rows = doc["result"]["rows"]
    assert rows[0]["verdict"] == "Error" and rows[1]["verdict"] == cr.NONTRIVIAL


def test_sweep_critical_line_p_le_1(capsys):
    doc = run_json(capsys, "sweep", "--p", "0.6,0.9", "--weight", "std:alpha=2p-2")
    for row in doc["result"]["rows"]:
        assert row["verdict"] == cr.NONTRIVIAL
        assert row["value"] == pytest.approx((2 * row["p"] - 1) ** (1 / row["p"]), rel=1e-9)


def test_strict_exits_3_on_inconclusive(capsys, monkeypatch):
    monkeypatch.setitem(cli.COMMANDS, "criterion", lambda args: ({"verdict": cr.INCONCLUSIVE}, [cr.INCONCLUSIVE]))
    assert run(capsys, "criterion", "--p", "2", "--weight", "const")[0] == 0
    assert run(capsys, "criterion", "--p", "2", "--weight", "const", "--strict")[0] == 3


def test_verify_failure_exits_4(capsys, monkeypatch):
    monkeypatch.setitem(cli._suites.SUITES, "weights", lambda seed: [{"check": "broken", "passed": False}])
    assert run(capsys, "verify", "--suite", "weights")[0] == 4


@pytest.mark.parametrize("suite", ["weights", "classify", "criteria", "dyadic", "volterra"])
def test_verify_suites_pass(capsys, suite):
    doc = run_json(capsys, "verify", "--suite", suite)
    assert doc["result"]["passed"] == doc["result"]["total"] > 0


def test_verify_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify", "--suite", "dyadic", "--seed", "3", "--out", str(a)]) == 0
    assert cli.main(["verify", "--suite", "dyadic", "--seed", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes() and not capsys.readouterr().out


def test_moment_cache(tmp_path, monkeypatch, capsys):
    # the oscillating weight has no closed-form moments, so its table fills up
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    first = run_json(capsys, "norm", "--kind", "apw", "--p", "1.5", "--weight", "osc", "--symbol", "poly:1,2,3")
    files = list(tmp_path.glob("moments-*.json"))
    assert len(files) == 1 and json.loads(files[0].read_text())
    second = run_json(capsys, "norm", "--kind", "apw", "--p", "1.5", "--weight", "osc", "--symbol", "poly:1,2,3")
    assert first == second


def test_damaged_cache_is_ignored(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    w = cli.parse_weight_arg("osc")
    cli._cache_path(w).write_text("not json")
    run_json(capsys, "norm", "--kind", "apw", "--p", "2", "--weight", "osc", "--symbol", "poly:0,1")
    assert json.loads(cli._cache_path(w).read_text())


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-5, 5), b=st.floats(-5, 5), c=st.floats(0.5, 5))
def test_expression_matches_python(a, b, c):
    got = cli.eval_expression("2a - b/c + (a+b)c", {"a": a, "b": b, "c": c})
    assert got == pytest.approx(2 * a - b / c + (a + b) * c, abs=1e-12)

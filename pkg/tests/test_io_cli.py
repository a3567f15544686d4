import io
import json
from fractions import Fraction as F

import pytest

from motpaver.cli import run, verify_report
from motpaver.io import ProblemError, compile_formula, load_problem, parse_problem
from motpaver._numeric import EXACT, FLOAT

BASE = {
    "dimension": 1,
    "mu": {"atoms": [-1, 1], "weights": ["1/2", "1/2"]},
    "nu": {"atoms": [-2, 0, 2], "weights": ["1/4", "1/2", "1/4"]},
    "cost": {"type": "expr", "formula": "abs(y[0] - x[0])"},
}


def _write(tmp_path, data, name="p.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def _run(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None)


def test_parse_exact_problem():
    pb = parse_problem(BASE)
    assert pb.arith.exact
    assert list(pb.cost[0]) == [1, 1, 3]


def test_decimal_literals_stay_exact(tmp_path):
    data = dict(BASE, mu={"atoms": [-0.1, 0.1], "weights": [0.5, 0.5]},
                nu={"atoms": [-0.1, 0.1], "weights": [0.5, 0.5]})
    pb = load_problem(_write(tmp_path, data))
    assert pb.mu.atoms[0, 0] == F(-1, 10)


def test_float_mode_rejects_rationals():
    data = dict(BASE, mode="float")
    with pytest.raises(ProblemError) as exc:
        parse_problem(data)
    assert "mu.weights[0]" in str(exc.value)


@pytest.mark.parametrize("patch,where", [
    ({"dimension": 0}, "dimension"),
    ({"mode": "fast"}, "mode"),
    ({"mu": {"atoms": [[1, 2]], "weights": [1]}}, "mu.atoms[0]"),
    ({"nu": {"atoms": [-2, 0, 2], "weights": ["1/4", "1/2"]}}, "nu.weights"),
    ({"nu": {"atoms": [-2, 0, 2], "weights": ["1/4", "1/2", "1/2"]}}, "nu"),
    ({"cost": {"type": "matrix", "values": [[1, 2]]}}, "cost.values"),
    ({"cost": {"type": "matrix", "values": [[1, 2, True], [0, 0, 0]]}}, "cost.values[0][2]"),
    ({"cost": {"type": "magic"}}, "cost"),
    ({"cost": {"type": "expr", "formula": "__import__('os')"}}, "cost.formula"),
    ({"cost": {"type": "expr", "formula": "x[3]"}}, "cost.formula"),
    ({"cost": {"type": "expr", "formula": "sqrt(y[0])"}}, "cost.formula"),
])
def test_field_diagnostics(patch, where):
    with pytest.raises(ProblemError) as exc:
        parse_problem(dict(BASE, **patch))
    assert exc.value.where == where


def test_json_syntax_error_has_position(tmp_path):
    path = _write(tmp_path, '{\n "dimension": 1,\n "mu": \n}')
    with pytest.raises(ProblemError) as exc:
        load_problem(path)
    assert exc.value.where.startswith("line 4")


def test_formulas():
    f = compile_formula("max(x[0], y[0]) ** 2 - 1/2", EXACT)
    assert f([F(1)], [F(3)]) == F(17, 2)
    g = compile_formula("sqrt(abs(y[0] - x[0]))", FLOAT)
    assert g([0.0], [4.0]) == 2.0
    with pytest.raises(ProblemError):
        compile_formula("x[0] ** (1/2)", EXACT)([F(2)], [F(1)])
    with pytest.raises(ProblemError):
        compile_formula("1/(y[0]-y[0])", EXACT)([F(0)], [F(0)])
    with pytest.raises(ProblemError):
        compile_formula("x.__class__", EXACT)


def test_cli_commands_round_trip(tmp_path):
    path = _write(tmp_path, BASE)
    for cmd in ("check-order", "solve", "pave", "decompose", "certify"):
        code, rep = _run(cmd, path)
        assert code == 0, cmd
        assert rep["schema"] == "motpaver.report/1" and rep["command"] == cmd
        assert verify_report(rep) == []
    code, rep = _run("solve", path)
    assert rep["result"]["value"] == {"decimal": 1.0, "exact": "1"}


def test_cli_is_deterministic(tmp_path):
    path = _write(tmp_path, BASE)
    a, b = io.StringIO(), io.StringIO()
    run(["decompose", path], out=a)
    run(["decompose", path], out=b)
    assert a.getvalue() == b.getvalue()
    code, rep = _run("--timing", "solve", path)
    assert "timing_s" in rep


def test_cli_not_in_order(tmp_path):
    data = dict(BASE, mu=BASE["nu"], nu=BASE["mu"])
    path = _write(tmp_path, data)
    code, rep = _run("check-order", path)
    assert code == 2 and rep["result"]["ordered"] is False
    assert verify_report(rep) == []
    code, rep = _run("solve", path)
    assert code == 2 and verify_report(rep) == []


def test_cli_violated_support(tmp_path):
    from motpaver import golden
    from motpaver.cli import _demo_problem
    inst = golden.example_4_2()
    path = _write(tmp_path, _demo_problem(inst).to_json())
    gamma = sorted(inst.couplings["P1"].support())
    gpath = _write(tmp_path, {"pairs": [list(q) for q in gamma]}, "gamma.json")
    code, rep = _run("certify", path, "--gamma", gpath)
    assert code == 3 and rep["result"]["verdict"] == "violated"
    assert verify_report(rep) == []
    code, rep = _run("certify", path)
    assert code == 0 and rep["result"]["verdict"] == "certified"


def test_cli_parse_errors(tmp_path, capsys):
    assert run(["solve", str(tmp_path / "missing.json")]) == 4
    assert run(["solve", _write(tmp_path, "{nope")]) == 4
    assert "line 1" in capsys.readouterr().err
    assert run(["demo", "example-9.9"]) == 4
    assert run([]) == 4


def test_verify_detects_tampering(tmp_path):
    path = _write(tmp_path, BASE)
    _, rep = _run("solve", path)
    rep["result"]["certificate"]["phi"][0] = "-5"
    assert verify_report(rep)
    rpath = _write(tmp_path, rep, "r.json")
    assert _run("--verify", rpath)[0] == 1
    _, rep = _run("pave", path)
    rep["result"]["components"][0]["eta"] = {"decimal": 0.25, "exact": "1/4"}
    assert verify_report(rep)
    _, rep = _run("decompose", path)
    rep["result"]["weighted_sum"] = {"decimal": 0.0, "exact": "0"}
    assert verify_report(rep)


def test_seed_from_environment(tmp_path, monkeypatch):
    path = _write(tmp_path, BASE)
    monkeypatch.setenv("MOTPAVER_SEED", "11")
    _, rep = _run("certify", path)
    assert rep["seed"] == 11 and rep["result"]["params"]["seed"] == 11
    _, rep = _run("--seed", "4", "certify", path)
    assert rep["seed"] == 4


def test_demos(tmp_path):
    code, rep = _run("demo", "example-4.2")
    assert code == 0 and len(rep["result"]["components"]) == 2
    assert verify_report(rep) == []
    code, rep = _run("demo", "example-2.1", "--grid", "16")
    assert [sorted(map(F, b)) for b in rep["result"]["checks"]["boundary_atoms"]] == [[-2, 0], [0, 2]]
    svg = tmp_path / "p.svg"
    code, rep = _run("demo", "example-4.1", "--grid", "4", "--plot", str(svg))
    assert code == 0 and svg.read_text().lstrip().startswith("<?xml")
    assert len(rep["result"]["components"]) == 3

import json
import subprocess
import sys
from pathlib import Path

import pytest

from gaussex import cli, serialize, willems
from gaussex.errors import InternalInconsistency

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"
GOLDEN = Path(__file__).resolve().parent / "golden" / "resistor.json"
CORPUS = sorted((MODELS / "corpus").glob("*.gx"))


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def assert_close(a, b, tol=1e-12, path="$"):
    if isinstance(a, dict):
        assert isinstance(b, dict) and a.keys() == b.keys(), path
        for k in a:
            assert_close(a[k], b[k], tol, f"{path}.{k}")
    elif isinstance(a, list):
        assert isinstance(b, list) and len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            assert_close(x, y, tol, f"{path}[{i}]")
    elif isinstance(a, float) or isinstance(b, float):
        assert abs(a - b) <= tol, path
    else:
        assert a == b, path


def test_golden_resistor(capsys):
    code, out, _ = run(capsys, "eval", MODELS / "resistor.gx")
    assert code == 0
    assert_close(json.loads(out), json.loads(GOLDEN.read_text()))


def test_eval_pretty_and_form(capsys):
    code, out, _ = run(capsys, "eval", MODELS / "resistor.gx", "--pretty", "--form", "precision")
    assert code == 0 and "fibre dim 1" in out and "form:" in out
    code, out, _ = run(capsys, "eval", MODELS / "resistor_observe.gx", "--form", "covariance")
    doc = json.loads(out)
    assert code == 0 and doc["form"]["type"] == "partial_quadratic"
    assert doc["result"]["noise"]["mean"] == pytest.approx([2.0])


def test_syntax_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.gx"
    bad.write_text("v = ")
    code, _, err = run(capsys, "eval", bad)
    assert code == 1 and "1:5: error: expected expression" in err


def test_user_errors(capsys, tmp_path):
    assert run(capsys, "eval", tmp_path / "missing.gx")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "check", MODELS / "resistor.gx", "--mc", "0", "--seed", "1")[0] == 1
    scoped = tmp_path / "scope.gx"
    scoped.write_text("y = x")
    assert run(capsys, "eval", scoped)[0] == 1
    code, _, err = run(capsys, "compose", CORPUS[0], CORPUS[0])
    assert code == 1 and "cannot compose" in err


def test_internal_error_exit(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise InternalInconsistency("fibre bookkeeping drifted")

    monkeypatch.setattr(willems, "theorem_check", broken)
    code, _, err = run(capsys, "compose", CORPUS[0], CORPUS[1], "--via-interconnection")
    assert code == 2 and "internal error" in err


def test_check_agrees(capsys):
    code, out, _ = run(capsys, "check", MODELS / "sensors.gx", "--mc", 20000, "--seed", 3, "--json")
    doc = json.loads(out)
    assert code == 0 and doc["agree"] and len(doc["events"]) >= 6


def test_check_disagreement_exit(capsys, monkeypatch):
    monkeypatch.setattr(willems, "cylinder_probability", lambda sys, ev: 0.01)
    code, out, _ = run(capsys, "check", MODELS / "resistor.gx", "--mc", 10000, "--seed", 1)
    assert code == 2 and "DISAGREE" in out


def test_check_needs_events(capsys):
    assert run(capsys, "check", CORPUS[0], "--mc", 100, "--seed", 1)[0] == 1


@pytest.mark.parametrize("f, g", list(zip(CORPUS, CORPUS[1:])), ids=lambda p: p.stem)
def test_compose_corpus(capsys, f, g):
    code, out, _ = run(capsys, "compose", f, g, "--via-interconnection", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["agree"] and doc["complementary"]


def test_compose_json_inputs(capsys, tmp_path):
    code, out, _ = run(capsys, "eval", CORPUS[0])
    first = tmp_path / "first.json"
    first.write_text(out)
    code, out, _ = run(capsys, "compose", first, CORPUS[1], "--json")
    doc = json.loads(out)
    assert code == 0 and doc["composite"]["cod"] == 2
    assert serialize.from_jsonable(doc["composite"]).dom_dim == 0


def test_entry_point_module():
    proc = subprocess.run(
        [sys.executable, "-m", "gaussex.cli", "eval", str(MODELS / "resistor.gx")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["schema"] == "gaussex/1"

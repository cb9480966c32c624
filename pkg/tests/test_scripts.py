import importlib.util
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def load(name):
    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_resistor_demo(capsys):
    mod = load("resistor_demo")
    mod.main(mod.ResistorConfig())
    assert "I after clamping V: fibre dim 0, mean [2.0], cov [[0.25]]" in capsys.readouterr().out


def test_theorem_check():
    mod = load("theorem_check")
    assert mod.main(mod.TheoremConfig(pairs=20, seed=1)) == 0


def test_mc_battery():
    mod = load("mc_battery")
    assert mod.main(mod.BatteryConfig(samples=20_000, seed=5, workers=2)) == 0

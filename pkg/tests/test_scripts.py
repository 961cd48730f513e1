import subprocess
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def _run(name, *args):
    return subprocess.run([sys.executable, str(SCRIPTS / name), *args], capture_output=True, text=True, check=True).stdout


def test_reproduce_tables():
    out = _run("reproduce_tables.py")
    assert " 11   0.304762  0.288889, 0.316667    ineffective" in out
    assert "f1        67.6471%" in out
    assert out.rstrip().endswith("selected: ja_rules")


def test_synthetic_comparison_runs():
    out = _run("synthetic_comparison.py", "--n", "40", "--k", "4", "--repeats", "1")
    assert out.count("repeat 0") == 4 and "selected:" in out

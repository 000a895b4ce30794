import io
import json
import pathlib
import subprocess
import sys

import pytest

from typedcls.cli import main

GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"


@pytest.fixture
def run(models):
    def go(*argv):
        out, err = io.StringIO(), io.StringIO()
        args = [str(models / a) if (models / a).exists() else a for a in argv]
        code = main(args, out, err)
        return code, out.getvalue(), err.getvalue()
    return go


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# golden JSON for the worked examples

R1 = str(GOLDEN / "r1.rules")

SCENARIOS = {
    "check_T": ["check", "--env", "repellency.env", "T.cls", "--json"],
    "step_typed_r1_T": ["step", "--env", "repellency.env", "--rules", R1, "--term", "T.cls", "--json"],
    "step_untyped_r1_T": ["step", "--untyped", "--rules", R1, "--term", "T.cls", "--json"],
    "step_typed_T1": ["step", "--env", "repellency.env", "--rules", "repellency.rules",
                      "--term", "T1.cls", "--json"],
    "run_typed_T1": ["run", "--env", "repellency.env", "--rules", "repellency.rules",
                     "--term", "T1.cls", "--json", "--max-states", "50", "--max-depth", "50"],
    "run_untyped_T1": ["run", "--untyped", "--rules", "repellency.rules", "--term", "T1.cls",
                       "--json", "--max-states", "50", "--max-depth", "50"],
    "step_absorption_blocked": ["step", "--env", "absorption.env", "--rules", "absorption.rules",
                                "--term", "cell_without_receptor.cls", "--json"],
    "step_absorption_fires": ["step", "--env", "absorption.env", "--rules", "absorption.rules",
                              "--term", "cell_with_receptor.cls", "--json"],
}


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_golden(run, name):
    code, out, _ = run(*SCENARIOS[name])
    assert code == 0
    assert json.loads(out) == json.loads((GOLDEN / f"{name}.json").read_text())


# ---------------------------------------------------------------------------
# fmt

def test_fmt(run, tmp_path):
    assert run("fmt", write(tmp_path, "a.cls", "a|eps")) == (0, "a\n", "")
    assert run("fmt", write(tmp_path, "b.cls", "loop(b.a){}"))[1] == "loop(a.b){}\n"


def test_fmt_parse_error(run, tmp_path):
    code, out, err = run("fmt", write(tmp_path, "bad.cls", "a |"))
    assert code == 2 and out == ""
    assert "bad.cls:1:4:" in err and "expected one of" in err


def test_missing_file(run):
    code, _, err = run("fmt", "/nonexistent/file.cls")
    assert code == 2 and "cannot read" in err


# ---------------------------------------------------------------------------
# check

def test_check_text(run, tmp_path):
    assert run("check", "--env", "repellency.env", "T.cls") == (0, "P = {tA, tM}; R = {}\n", "")
    eps = write(tmp_path, "eps.cls", "eps")
    assert run("check", "--env", "repellency.env", eps)[1] == "P = {}; R = {}\n"


def test_check_type_error(run, tmp_path):
    ab = write(tmp_path, "ab.cls", "a | b")
    code, out, err = run("check", "--env", "repellency.env", ab)
    assert code == 1 and out == ""
    assert err.startswith("type error: incompatible types")
    code, out, _ = run("check", "--env", "repellency.env", ab, "--json")
    assert code == 1
    error = json.loads(out)["error"]
    assert error["kind"] == "Incompatible" and error["position"] == "/comp[1]"


def test_check_bad_env(run, tmp_path):
    env = write(tmp_path, "bad.env", "type t requires {u};")
    assert run("check", "--env", env, "T.cls")[0] == 2


# ---------------------------------------------------------------------------
# infer

def test_infer_text(run, tmp_path):
    code, out, _ = run("infer", write(tmp_path, "x.cls", "?x"))
    assert code == 0
    assert out == "Θ = {?x: (φ_x, ψ_x)}\ntype = (φ_x, ψ_x)\nΞ = {ψ_x = R(φ_x)}\n"
    code, out, _ = run("infer", "--env", "repellency.env", write(tmp_path, "a.cls", "a"))
    assert out == "Θ = {}\ntype = ({tA}, ∅)\nΞ = {}\n"


def test_infer_one_ok(run, tmp_path):
    code, out, _ = run("infer", "--env", "repellency.env", write(tmp_path, "p.cls", "b | $X"))
    assert code == 0 and out.count("ok(") == 1


def test_infer_unknown_element(run, tmp_path):
    code, _, err = run("infer", "--env", "repellency.env", write(tmp_path, "p.cls", "z"))
    assert code == 1 and "no basic type" in err


# ---------------------------------------------------------------------------
# step and run

def test_step_text(run):
    code, out, _ = run("step", "--env", "repellency.env", "--rules", "repellency.rules",
                       "--term", "T1.cls")
    assert (code, out) == (0, "R2: loop(m){a} | loop(m){b}\n")
    assert run("step", "--untyped", "--rules", R1, "--term", "T.cls")[1] == "R1: a | b | loop(m){}\n"
    assert run("step", "--env", "repellency.env", "--rules", R1, "--term", "T.cls")[:2] == (0, "")


def test_step_ill_typed_state(run, tmp_path):
    ab = write(tmp_path, "ab.cls", "a | b")
    code, _, err = run("step", "--env", "repellency.env", "--rules", R1, "--term", ab)
    assert code == 1 and "not typable" in err


def test_step_needs_env(run):
    code, _, err = run("step", "--rules", R1, "--term", "T.cls")
    assert code == 2 and "--env" in err


def test_step_undeclared_element(run, tmp_path):
    t = write(tmp_path, "z.cls", "z")
    code, _, err = run("step", "--env", "repellency.env", "--rules", R1, "--term", t)
    assert code == 2 and "undeclared elements: z" in err


def test_run_text_and_dot(run, tmp_path):
    dot = tmp_path / "g.dot"
    code, out, _ = run("run", "--env", "repellency.env", "--rules", "repellency.rules",
                       "--term", "T1.cls", "--max-states", "50", "--max-depth", "50",
                       "--dot", str(dot))
    assert (code, out) == (0, "states: 3\nedges: 2\ntruncated: false\n")
    text = dot.read_text()
    assert text.count("->") == 2
    assert 'label="loop(m){a} | loop(m){b}"' in text and 'label="R2"' in text


def test_run_state_cap(run):
    code, out, _ = run("run", "--untyped", "--rules", "repellency.rules", "--term", "T1.cls",
                       "--max-states", "1")
    assert (code, out) == (0, "states: 1\nedges: 0\ntruncated: true\n")


def test_run_untyped_superset(run):
    typed = json.loads(run(*SCENARIOS["run_typed_T1"])[1])
    untyped = json.loads(run(*SCENARIOS["run_untyped_T1"])[1])
    assert set(typed["states"]) <= set(untyped["states"]) and len(untyped["states"]) >= 3


def test_run_bad_bounds(run):
    assert run("run", "--untyped", "--rules", R1, "--term", "T.cls", "--max-states", "0")[0] == 2


def test_usage_errors(run):
    assert run()[0] == 2
    assert run("bogus")[0] == 2
    assert run("step", "--term", "T.cls")[0] == 2


def test_module_entry_point(models):
    proc = subprocess.run([sys.executable, "-m", "typedcls", "check", "--env",
                           str(models / "repellency.env"), str(models / "T.cls")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "P = {tA, tM}; R = {}\n"

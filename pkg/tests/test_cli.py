import io
import subprocess
import sys

import pytest

from sla.cli import INPUT_ERROR, NO, OK, UNKNOWN, main
from sla.textio import parse_automaton

from oracles import CORPUS


def run(*argv, stdin=""):
    out = io.StringIO()
    code = main(list(argv), stdout=out, stdin=io.StringIO(stdin))
    return code, out.getvalue()


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def corpus(name):
    return str(CORPUS / name)


def test_check():
    code, out = run("check", corpus("diffk_odds.aut"))
    assert code == OK and kv(out) == {"kind": "dfa", "orbits": "3", "letters": "1", "valid": "yes"}
    code, out = run("check", corpus("nfa_shift.aut"))
    assert code == OK and kv(out)["kind"] == "nfa"


def test_accepts():
    assert run("accepts", corpus("diffk_odds.aut"), "z:0 z:1 z:4")[0] == OK
    code, out = run("accepts", corpus("diffk_odds.aut"), "z:0 z:2")
    assert code == NO and kv(out) == {"accepted": "no", "final": "bot:0"}
    assert run("accepts", corpus("diffk_odds.aut"), "q:1")[0] == INPUT_ERROR
    assert run("accepts", corpus("diffk_odds.aut"), "z1")[0] == INPUT_ERROR


def test_empty_and_find_word():
    code, out = run("empty", corpus("empty_accepting.aut"))
    assert code == OK and kv(out)["empty"] == "yes"
    code, out = run("empty", corpus("diffk_odds.aut"))
    assert code == NO
    code, out = run("find-word", corpus("binprefix.aut"))
    assert code == OK and kv(out)["word"] == "start:0"
    assert run("find-word", corpus("empty_accepting.aut"))[0] == NO
    assert run("empty", corpus("nfa_shift.aut"))[0] == NO


def test_minimality_and_minimize(tmp_path):
    code, out = run("is-minimal", corpus("dup_z3.aut"))
    assert code == NO and "witness=sim={[p,p_copy],[r]}" in out
    assert run("is-minimal", corpus("diffk_mod3.aut"))[0] == OK
    target = tmp_path / "m.aut"
    report = tmp_path / "r.txt"
    code, out = run("minimize", corpus("dup_diffk_odds.aut"), "-o", str(target), "--report", str(report))
    assert code == OK and kv(out)["status"] == "minimal" and kv(out)["orbits"] == "3"
    assert report.read_text() == out
    assert len(parse_automaton(target.read_text()).states) == 3
    code, out = run("minimize", corpus("binprefix.aut"), "--cap", "8", "-o", str(target))
    assert code in (OK, UNKNOWN)


def test_refine_table():
    code, out = run("refine", corpus("binprefix.aut"), "--steps", "3")
    lines = out.splitlines()
    assert code == OK
    assert lines[1] == "step=1 orbits=3 classes={[bot],[eps],[int]} chars=1,1,2"
    assert lines[3].endswith("chars=1,1,8") and lines[-1] == "stabilized=no"
    assert run("refine", corpus("binprefix.aut"), "--steps", "-1")[0] == INPUT_ERROR


def test_gen_pipes_into_other_commands():
    code, text = run("gen", "diffk", "--mod", "2", "--residues", "1")
    assert code == OK
    assert text == (CORPUS / "diffk_odds.aut").read_text()
    code, out = run("accepts", "-", "z:3 z:6", stdin=text)
    assert code == OK
    code, text = run("gen", "cm2", "--machine", "inc2", "--from", "0,0,0", "--to", "2,2,0")
    assert code == OK and run("accepts", "-", "z:0 z:0", stdin=text)[0] == OK
    assert run("gen", "cm2", "--machine", "nope")[0] == INPUT_ERROR
    assert run("gen", "cm2", "--to", "1,2")[0] == INPUT_ERROR
    assert run("gen", "diffk", "--set", "odd")[0] == INPUT_ERROR
    assert run("gen", "binprefix")[1] == (CORPUS / "binprefix.aut").read_text()


def test_epad(tmp_path):
    f = tmp_path / "sys.epad"
    f.write_text("3*x %= 3 mod y & 5*y %= 7 mod x & 2*x = y - 18\n")
    code, out = run("epad", "solve", str(f))
    assert code == OK and kv(out) == {"result": "sat", "x": "1", "y": "20"}
    code, out = run("epad", "solve", "-", stdin="x | 12 & x > 4 & !(2 | x)")
    assert code == NO and kv(out) == {"result": "unsat"}
    code, out = run("epad", "solve", "-", "--cap", "8", stdin="x | y & y | x & x != y & x != -y")
    assert code == UNKNOWN and kv(out)["cap"] == "8"
    assert run("epad", "solve", "-", stdin="x * y = 1")[0] == INPUT_ERROR


def test_input_errors(tmp_path):
    assert run("check", str(tmp_path / "missing.aut"))[0] == INPUT_ERROR
    bad = tmp_path / "bad.aut"
    bad.write_text("orbit q char 0\norbit q char 0\n")
    assert run("check", str(bad))[0] == INPUT_ERROR
    assert run("accepts", corpus("nfa_shift.aut"), "a:0")[0] == INPUT_ERROR
    assert run("frobnicate")[0] == INPUT_ERROR
    assert run()[0] == INPUT_ERROR


@pytest.mark.parametrize("args", [["--version"], ["--deterministic", "check", "CORPUS/identity_z.aut"]])
def test_module_entry_point(args):
    args = [a.replace("CORPUS", str(CORPUS)) for a in args]
    res = subprocess.run([sys.executable, "-m", "sla.cli", *args], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("sla ") or "valid=yes" in res.stdout

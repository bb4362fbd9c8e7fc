import io
import json
import random
import subprocess
import sys

import pytest

from gen import rand_pretrace, rand_term
from gen_derivations import derive, theory
from nomg.barstrings import alpha_eq, d_member
from nomg.cli import run
from nomg.derivation import derivation_to_json
from nomg.graded import eq_bar, eq_loc, leq_loc
from nomg.nominal import UNIT, Name, NameTable
from nomg.rnna import EXAMPLE
from nomg.syntax import render_pretrace, render_term

AB = "orbit A 0\norbit B 1\norbit stop 0\nA() -|x-> stop()\nB(a) -a-> stop()\nB(a) -|x-> stop()\n"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def js(*argv):
    code, out, err = call(*argv, "--format", "json")
    return code, json.loads(out) if out else None


@pytest.fixture
def ex(tmp_path):
    p = tmp_path / "ex.nts"
    p.write_text(EXAMPLE)
    return str(p)


@pytest.fixture
def ab(tmp_path):
    p = tmp_path / "ab.nts"
    p.write_text(AB)
    return str(p)


def test_alpha_eq_verb():
    assert call("alpha-eq", "|a |b", "|b |b")[0] == 0
    assert call("alpha-eq", "|a |b a", "|b |b b")[0] == 1
    assert call("alpha-eq", "a", "a b")[0] == 2


def test_canon_and_fn():
    code, out, _ = call("canon", "|x |y x")
    assert code == 0 and out.strip() == "|x |y x"
    assert js("fn", "|b a $x(c)")[1] == {"result": ["a", "c"]}


def test_membership_verbs():
    assert call("d-member", "a a", "|a |b")[0] == 0
    assert call("n-member", "a a", "|a |b")[0] == 1
    assert call("d-member", "b $x(b)", "|a $x(a)")[0] == 0


def test_eq_verbs():
    assert call("eq", "--theory", "loc", "a.$x + |a.$x", "|a.$x")[0] == 0
    code, out = js("eq", "--theory", "bar", "a.$x + |a.$x", "|a.$x")
    assert code == 1 and out == {"verdict": False, "witness": "a $x"}
    assert call("eq", "--theory", "tr", "|a.$x", "|b.$x")[0] == 0
    assert call("eq", "--theory", "tr", "$x + $x", "$x")[0] == 2


def test_leq_witness_is_labelled():
    code, out, _ = call("leq", "|a.$x", "a.$x")
    assert code == 1
    assert "not covered: |a $x" in out
    assert "bounded name pool" in out
    code, out = js("leq", "|a.$x", "a.$x", "--pool-extra", "2")
    assert out["witness"] == "|a $x" and "word" in out


def test_nf_mu_split():
    assert js("nf", "|a.(a.$* + b.$*)")[1]["result"] == ["|a a", "|a b"]
    code, out = js("mu", "|a.$v", "--let", "v=a.$x")
    assert code == 0 and out["result"] == ["|a a $x"]
    code, out, _ = call("split", "1", "a.b.$x")
    assert code == 0 and out.strip() == "a.[{b $x}]"
    assert call("split", "1", "a.$x")[0] == 2
    assert call("mu", "|a.$v")[0] == 2


def test_traces_verb(ex):
    code, out = js("traces", ex, "--state", "s()", "--depth", "4")
    assert code == 0 and out == {"depth": 4, "words": ["|n0 |n1 n0 n1"]}
    code, text, _ = call("traces", ex, "--depth", "2")
    assert text.splitlines() == ["depth 2: 1 trace(s)", "|n0 |n0"]


def test_member_verb(ex):
    assert call("member", ex, "--state", "s()", "--word", "n0 n0 n0 n0", "--semantics", "local")[0] == 1
    assert call("member", ex, "--state", "s()", "--word", "n0 n1 n0 n1", "--semantics", "local")[0] == 0
    assert call("member", ex, "--word", "n0 n1 n0", "--semantics", "global")[0] == 0


def test_equiv_verb(ab):
    assert call("equiv", ab, "--states", "A()", "B(a)", "--semantics", "local", "--depth", "3")[0] == 0
    code, out = js("equiv", ab, "--states", "A()", "B(a)", "--semantics", "global", "--depth", "3")
    assert code == 1 and out["witness"] == "a" and out["witness_depth"] == 1


def test_check_verb(tmp_path):
    th = theory("bar")
    d = derive(random.Random(3), th, 2, 3)
    p = tmp_path / "d.json"
    p.write_text(json.dumps(derivation_to_json(d, th.table)))
    assert call("check", str(p), "--theory", "bar")[0] == 0
    p.write_text(json.dumps({"rule": "refl", "conclusion": {"depth": 1, "lhs": "a.$x", "rhs": "a.$x"}}))
    code, out = js("check", str(p), "--theory", "bar")
    assert code == 1 and out["node"] == "root"


@pytest.mark.parametrize("argv, where", [
    (["alpha-eq", "|a |", "a"], "W:1:"),
    (["eq", "--theory", "bar", "a.$x +", "$x"], "T:1:"),
    (["traces", "missing.nts", "--depth", "1"], "missing.nts"),
])
def test_errors_exit_two_with_position(argv, where):
    code, out, err = call(*argv)
    assert code == 2 and out == ""
    assert err.startswith("nomg: error:") and where in err


def test_bad_automaton_reports_line(tmp_path):
    p = tmp_path / "bad.nts"
    p.write_text("orbit s 0\ns() -a-> s()\n")
    code, _, err = call("traces", str(p), "--state", "s()", "--depth", "1")
    assert code == 2 and f"{p}:2:" in err


def test_usage_errors():
    assert call()[0] == 2
    assert call("traces", "x.nts")[0] == 2
    assert call("split", "-1", "$x")[0] == 2


def test_output_is_deterministic(ex):
    argv = ["nf", "b.$x + a.$x + |c.$y + |a.$y", "--format", "json"]
    assert len({call(*argv)[1] for _ in range(3)}) == 1
    proc = [subprocess.run([sys.executable, "-m", "nomg", "traces", ex, "--depth", "5", "--format", "json"],
                           capture_output=True, text=True) for _ in range(2)]
    assert proc[0].returncode == 0 and proc[0].stdout == proc[1].stdout


def test_verdicts_match_library():
    rng = random.Random(11)
    table = NameTable()
    for i in range(6):
        table.intern(f"n{i}")
    for _ in range(40):
        n = rng.randint(0, 3)
        w, v = rand_pretrace(rng, n), rand_pretrace(rng, n)
        code = call("alpha-eq", render_pretrace(w, table), render_pretrace(v, table))[0]
        assert code == (0 if alpha_eq(w, v) else 1)
        # names are interned in order of appearance, which is harmless by equivariance
        u = tuple(Name(rng.choice(list(w.support()) + [rng.randrange(5)])) for _ in range(n))
        text = " ".join(f"n{int(x)}" for x in u) + ("" if w.tail == UNIT else " " + render_pretrace(
            type(w)((), w.tail), table))
        code = call("d-member", text or "ε", render_pretrace(w, table))[0]
        assert code == (0 if d_member(u, w, w.tail) else 1)
    for _ in range(40):
        n = rng.randint(0, 2)
        t, s = rand_term(rng, n, size=1, names=3), rand_term(rng, n, size=1, names=3)
        tt, st = render_term(t, table), render_term(s, table)
        assert call("eq", "--theory", "bar", tt, st)[0] == (0 if eq_bar(t, s) else 1)
        assert call("eq", "--theory", "loc", tt, st)[0] == (0 if eq_loc(t, s) else 1)
        assert call("leq", tt, st)[0] == (0 if leq_loc(t, s) else 1)

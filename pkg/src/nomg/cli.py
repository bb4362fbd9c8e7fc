"""Command-line front end.

Exit status: 0 for an affirmative verdict or a computed value, 1 for a
negative verdict, 2 for usage and parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .barstrings import (
    IllFormedError,
    Pretrace,
    TraceSet,
    alpha_eq,
    canonicalize,
    d_leq,
    d_member,
    free_names,
    n_member,
)
from .derivation import check_derivation, parse_derivation
from .graded import common_depth, eq_bar, leq_loc, mu_bar, normalize_bar, split
from .nominal import NameTable, VarRef
from .oracle import brute_d_leq
from .rnna import (
    dword_member,
    global_witness,
    local_witness_depth,
    nword_member,
    parse_automaton,
    traces,
)
from .syntax import (
    ParseError,
    parse_data_word,
    parse_pretrace,
    parse_term,
    render_name,
    render_pretrace,
    render_set,
    render_tail,
    render_term,
    render_word,
)
from .terms import SIGMA_TR, TermError, Var, map_vars
from .theory import load_theory


class UsageError(Exception):
    pass


class Report:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.fields: dict[str, Any] = {}
        self.lines: list[str] = []

    def verdict(self, ok: bool, text: str | None = None) -> int:
        self.fields["verdict"] = ok
        self.lines.append(text or ("true" if ok else "false"))
        return 0 if ok else 1

    def value(self, key: str, value: Any, text: str) -> None:
        self.fields[key] = value
        self.lines.append(text)

    def emit(self, out) -> None:
        if self.fmt == "json":
            out.write(json.dumps(self.fields, sort_keys=True) + "\n")
        else:
            for line in self.lines:
                out.write(line + "\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror}", 1, 1, path) from None


def _term(text: str, table: NameTable, what: str, signature=None):
    kw = {"signature": signature} if signature is not None else {}
    return parse_term(text, table, source=what, **kw)


def _leq_witness(rep: Report, left: TraceSet, right: TraceSet, table: NameTable, extra: int) -> None:
    """Record a pretrace of ``left`` not covered by ``right`` plus a data word."""
    for w in left.sorted():
        if not d_leq(w, right.items):
            rep.value("witness", render_pretrace(w, table), f"not covered: {render_pretrace(w, table)}")
            ok, found = brute_d_leq(w, right.items, extra)
            if not ok:
                word, tail = found
                text = render_pretrace(Pretrace(tuple(_free(a) for a in word), tail), table)
                rep.value("word", text, f"separating data word (bounded name pool): {text}")
            return


def _free(a):
    from .barstrings import BarLetter

    return BarLetter(a, False)


def cmd_alpha_eq(a, rep, table):
    w, v = parse_pretrace(a.w, table, "W"), parse_pretrace(a.v, table, "V")
    return rep.verdict(alpha_eq(w, v))


def cmd_canon(a, rep, table):
    c = canonicalize(parse_pretrace(a.w, table, "W"))
    rep.value("result", render_pretrace(c, table, ""), render_pretrace(c, table))
    return 0


def cmd_fn(a, rep, table):
    names = sorted(free_names(parse_pretrace(a.w, table, "W")))
    rendered = [render_name(n, table) for n in names]
    rep.value("result", rendered, "{" + ", ".join(rendered) + "}")
    return 0


def _word_and_tail(text: str, table: NameTable) -> tuple[tuple, Any]:
    p = parse_pretrace(text, table, "U")
    if any(l.bound for l in p.letters):
        raise ParseError("data words contain no bound letters", 1, 1, "U")
    return tuple(l.name for l in p.letters), p.tail


def cmd_d_member(a, rep, table):
    u, tail = _word_and_tail(a.u, table)
    return rep.verdict(d_member(u, parse_pretrace(a.w, table, "W"), tail))


def cmd_n_member(a, rep, table):
    u, tail = _word_and_tail(a.u, table)
    return rep.verdict(n_member(u, parse_pretrace(a.w, table, "W"), tail))


def cmd_leq(a, rep, table):
    t, u = _term(a.t, table, "T"), _term(a.u, table, "U")
    n = common_depth(t, u)
    ok = leq_loc(t, u)
    code = rep.verdict(ok)
    if not ok:
        _leq_witness(rep, normalize_bar(t, n), normalize_bar(u, n), table, a.pool_extra)
    return code


def cmd_eq(a, rep, table):
    if a.theory == "tr":
        t = _term(a.t, table, "T", SIGMA_TR)
        u = _term(a.u, table, "U", SIGMA_TR)
        return rep.verdict(eq_bar(t, u))
    t, u = _term(a.t, table, "T"), _term(a.u, table, "U")
    n = common_depth(t, u)
    S, T = normalize_bar(t, n), normalize_bar(u, n)
    if a.theory == "bar":
        ok = eq_bar(t, u)
        code = rep.verdict(ok)
        if not ok:
            diff = sorted(S.items ^ T.items, key=Pretrace.sort_key)[0]
            side = "left" if diff in S.items else "right"
            text = render_pretrace(diff, table)
            rep.value("witness", text, f"only in {side} normal form: {text}")
        return code
    ok = leq_loc(t, u) and leq_loc(u, t)
    code = rep.verdict(ok)
    if not ok:
        if not leq_loc(t, u):
            _leq_witness(rep, S, T, table, a.pool_extra)
        else:
            _leq_witness(rep, T, S, table, a.pool_extra)
    return code


def cmd_nf(a, rep, table):
    S = normalize_bar(_term(a.t, table, "T"))
    rep.value("result", [render_pretrace(p, table, "") for p in S.sorted()], render_set(S, table))
    return 0


def _lets(items: Sequence[str], table: NameTable) -> dict[str, TraceSet]:
    out = {}
    for item in items or ():
        name, sep, text = item.partition("=")
        name = name.strip().lstrip("$")
        if not sep or not name:
            raise UsageError(f"--let expects NAME=TERM, got {item!r}")
        out[name] = normalize_bar(_term(text, table, f"--let {name}"))
    return out


def cmd_mu(a, rep, table):
    lets = _lets(a.let, table)
    t = _term(a.s, table, "S")
    depths = {V.depth for V in lets.values()}

    def bind(ref):
        if isinstance(ref, VarRef) and ref.symbol in lets and not ref.params:
            return Var(lets[ref.symbol])
        raise UsageError(f"variable {render_tail(ref, table)} is not bound by --let")

    inner = map_vars(t, bind)
    S = normalize_bar(inner)
    if len(depths) > 1:
        raise UsageError("--let sets have different depths")
    m = depths.pop() if depths else 0
    R = mu_bar(S.depth, m, S)
    rep.value("result", [render_pretrace(p, table, "") for p in R.sorted()], render_set(R, table))
    return 0


def cmd_split(a, rep, table):
    s = split(a.n, _term(a.t, table, "T"))
    rep.value("result", render_term(s, table), render_term(s, table))
    return 0


def _system(a):
    ts = parse_automaton(_read(a.file), a.file)
    return ts


def _state(ts, text: str | None):
    if text is None:
        if ts.start is None:
            raise UsageError("no --state given and the system declares no start state")
        return ts.start
    return ts.parse_state(text)


def cmd_traces(a, rep, table):
    ts = _system(a)
    q = _state(ts, a.state)
    T = traces(ts, q, a.depth)
    words = [render_pretrace(w, None, "") for w in T.sorted()]
    rep.value("depth", a.depth, f"depth {a.depth}: {len(words)} trace(s)")
    rep.fields["words"] = words
    rep.lines.extend(w or "ε" for w in words)
    return 0


def cmd_equiv(a, rep, table):
    ts = _system(a)
    q1, q2 = (_state(ts, s) for s in a.states)
    if a.semantics == "global":
        wit = global_witness(ts, q1, q2, a.depth)
        code = rep.verdict(wit is None)
        if wit is not None:
            k, w, left = wit
            text = render_pretrace(w, ts.table)
            side = "first" if left else "second"
            rep.value("witness", text, f"depth {k}: only the {side} state has {text}")
            rep.fields["witness_depth"] = k
        return code
    k = local_witness_depth(ts, q1, q2, a.depth)
    code = rep.verdict(k is None)
    if k is not None:
        S, T = traces(ts, q1, k), traces(ts, q2, k)
        rep.fields["witness_depth"] = k
        sub = Report(rep.fmt)
        if not all(d_leq(w, T.items) for w in S.items):
            _leq_witness(sub, S, T, ts.table, a.pool_extra)
        else:
            _leq_witness(sub, T, S, ts.table, a.pool_extra)
        rep.fields.update(sub.fields)
        rep.lines.append(f"depth {k}:")
        rep.lines.extend(sub.lines)
    return code


def cmd_member(a, rep, table):
    ts = _system(a)
    q = _state(ts, a.state)
    u = parse_data_word(a.word, ts.table, "--word")
    fn = dword_member if a.semantics == "local" else nword_member
    return rep.verdict(fn(ts, q, u))


def cmd_check(a, rep, table):
    theory = load_theory(a.theory)
    d = parse_derivation(_read(a.derivation), theory, a.derivation)
    r = check_derivation(d, theory)
    code = rep.verdict(r.ok, str(r))
    if not r.ok:
        rep.fields["node"] = r.node
        rep.fields["reason"] = r.reason
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--pool-extra", type=int, default=0, metavar="K",
                        help="extra fresh names for witness search")

    p = argparse.ArgumentParser(prog="nomg", description="Nominal automata and graded equational logic.")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = verb("alpha-eq", cmd_alpha_eq, "alpha-equivalence of two pretraces")
    sp.add_argument("w")
    sp.add_argument("v")
    verb("canon", cmd_canon, "canonical representative").add_argument("w")
    verb("fn", cmd_fn, "free names").add_argument("w")
    for name, fn, what in (("d-member", cmd_d_member, "local"), ("n-member", cmd_n_member, "global")):
        sp = verb(name, fn, f"data word membership ({what} freshness)")
        sp.add_argument("u", help="data word, optionally ending in a variable")
        sp.add_argument("w", help="pretrace")
    sp = verb("leq", cmd_leq, "inclusion of local-freshness languages of two terms")
    sp.add_argument("t")
    sp.add_argument("u")
    sp = verb("eq", cmd_eq, "derivable equality in a built-in theory")
    sp.add_argument("--theory", choices=("tr", "bar", "loc"), required=True)
    sp.add_argument("t")
    sp.add_argument("u")
    verb("nf", cmd_nf, "normal form of a term").add_argument("t")
    sp = verb("mu", cmd_mu, "flatten a term over sets of pretraces")
    sp.add_argument("s")
    sp.add_argument("--let", action="append", metavar="V=TERM")
    sp = verb("split", cmd_split, "cut a depth 1+n term at depth 1")
    sp.add_argument("n", type=int)
    sp.add_argument("t")
    sp = verb("traces", cmd_traces, "bar traces of a state up to alpha")
    sp.add_argument("file")
    sp.add_argument("--state")
    sp.add_argument("--depth", type=int, required=True)
    sp = verb("equiv", cmd_equiv, "bounded-depth equivalence of two states")
    sp.add_argument("file")
    sp.add_argument("--states", nargs=2, required=True, metavar=("Q1", "Q2"))
    sp.add_argument("--semantics", choices=("global", "local"), required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp = verb("member", cmd_member, "data word membership for a state")
    sp.add_argument("file")
    sp.add_argument("--state")
    sp.add_argument("--word", required=True)
    sp.add_argument("--semantics", choices=("global", "local"), required=True)
    sp = verb("check", cmd_check, "check a derivation tree")
    sp.add_argument("derivation")
    sp.add_argument("--theory", required=True, help="tr, bar, loc or a theory file")
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    for k in ("depth", "n", "pool_extra"):
        if getattr(a, k, 0) is not None and getattr(a, k, 0) < 0:
            err.write(f"nomg: error: {k.replace('_', '-')} must be non-negative\n")
            return 2
    rep = Report(a.format)
    try:
        code = a.fn(a, rep, NameTable())
    except (ParseError, TermError, IllFormedError, UsageError, KeyError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        err.write(f"nomg: error: {msg}\n")
        return 2
    rep.emit(out)
    return code


def main() -> None:
    sys.exit(run())

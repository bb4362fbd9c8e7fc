"""Orbit-finite nominal transition systems with name allocation.

States are strong orbit elements ``s(a, b)``.  Rules are written on
representatives with formal parameters and apply to every state of the
source orbit::

    system example
    orbit s 0
    orbit t 1
    start s()
    s() -|x-> t(x)        # allocate a name, bound as x
    t(a) -a-> s()         # read the known name a

All states are final.  Trace sets are bar strings up to alpha-equivalence,
computed by unfolding to a fixed depth.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .barstrings import (
    BarLetter,
    Pretrace,
    TraceSet,
    d_member,
    d_set_eq,
    free_names,
    n_member,
)
from .nominal import Abstraction, Name, NameTable, Permutation, fresh
from .syntax import ParseError, parse_state


@dataclass(frozen=True, order=True)
class StateInstance:
    symbol: str
    names: tuple[Name, ...] = ()

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"state {self.symbol} has repeated names")

    def permute(self, perm: Permutation) -> "StateInstance":
        return StateInstance(self.symbol, tuple(perm(a) for a in self.names))

    def support(self) -> frozenset[Name]:
        return frozenset(self.names)

    def __repr__(self) -> str:
        return f"{self.symbol}(" + ",".join(map(repr, self.names)) + ")"


@dataclass(frozen=True)
class Rule:
    source: str
    params: tuple[str, ...]
    label: str
    bound: bool
    target: str
    args: tuple[str, ...]
    line: int = 0


@dataclass(frozen=True)
class FreeStep:
    name: Name
    target: StateInstance


@dataclass(frozen=True)
class BoundStep:
    target: Abstraction  # <y> target state


@dataclass
class NominalTS:
    name: str
    orbits: dict[str, int]
    rules: list[Rule]
    start: StateInstance | None = None
    table: NameTable = field(default_factory=NameTable)
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def state(self, symbol: str, names: Iterable[int] = ()) -> StateInstance:
        names = tuple(Name(a) for a in names)
        if symbol not in self.orbits:
            raise KeyError(f"undeclared orbit {symbol!r}")
        if len(names) != self.orbits[symbol]:
            raise ValueError(f"orbit {symbol} has arity {self.orbits[symbol]}, got {len(names)} names")
        return StateInstance(symbol, names)

    def parse_state(self, text: str) -> StateInstance:
        symbol, names = parse_state(text, self.table)
        try:
            return self.state(symbol, names)
        except (KeyError, ValueError) as e:
            raise ParseError(str(e.args[0]), 1, 1, "state") from None


_LINE_RE = {
    "system": re.compile(r"system\s+(\S+)\Z"),
    "orbit": re.compile(r"orbit\s+([A-Za-z]\w*)\s+(\d+)\Z"),
    "start": re.compile(r"start\s+(.+)\Z"),
}
_RULE_RE = re.compile(
    r"(?P<src>[A-Za-z]\w*)\s*\((?P<params>[^()]*)\)\s*"
    r"-\s*(?P<bar>[|¦]?)\s*(?P<label>[A-Za-z][\w']*)\s*->\s*"
    r"(?P<tgt>[A-Za-z]\w*)\s*\((?P<args>[^()]*)\)\Z"
)
_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")


def parse_automaton(text: str, source: str | None = None) -> NominalTS:
    ts = NominalTS("system", {}, [])
    start_text: tuple[int, int, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        body = line.strip()
        if not body:
            continue
        off = line.index(body)

        def err(msg: str, col: int = 0) -> ParseError:
            return ParseError(msg, lineno, off + col + 1, source)

        word = body.split(None, 1)[0]
        if word in _LINE_RE and (m := _LINE_RE[word].match(body)):
            if word == "system":
                ts.name = m[1]
            elif word == "orbit":
                if m[1] in ts.orbits:
                    raise err(f"orbit {m[1]} declared twice", m.start(1))
                ts.orbits[m[1]] = int(m[2])
            else:
                if start_text is not None:
                    raise err("start declared twice")
                start_text = (lineno, off + m.start(1) + 1, m[1])
            continue
        m = _RULE_RE.match(body)
        if not m:
            raise err("expected 'system', 'orbit', 'start' or a transition 'q(..) -a-> q2(..)'")
        params = _idents(m, "params", err)
        args = _idents(m, "args", err)
        src, tgt, label, bound = m["src"], m["tgt"], m["label"], bool(m["bar"])
        for sym, n, grp in ((src, params, "src"), (tgt, args, "tgt")):
            if sym not in ts.orbits:
                raise err(f"undeclared orbit {sym!r}", m.start(grp))
            if len(n) != ts.orbits[sym]:
                raise err(f"orbit {sym} has arity {ts.orbits[sym]}, got {len(n)}", m.start(grp))
        if len(set(params)) != len(params):
            raise err("repeated parameter in source state", m.start("params"))
        if len(set(args)) != len(args):
            raise err("repeated argument in target state", m.start("args"))
        if bound:
            if label in params:
                raise err(f"bound name {label} clashes with a source parameter", m.start("label"))
            allowed = set(params) | {label}
        else:
            if label not in params:
                raise err(f"free label {label} is not a parameter of the source state", m.start("label"))
            allowed = set(params)
        for a in args:
            if a not in allowed:
                raise err(f"target argument {a} is not available in the source state", m.start("args"))
        ts.rules.append(Rule(src, params, label, bound, tgt, args, lineno))
    if start_text is not None:
        lineno, col, stext = start_text
        try:
            symbol, names = parse_state(stext, ts.table, source)
        except ParseError as e:
            raise ParseError(e.message, lineno, col + e.col - 1, source) from None
        if symbol not in ts.orbits:
            raise ParseError(f"undeclared orbit {symbol!r}", lineno, col, source)
        if len(names) != ts.orbits[symbol] or len(set(names)) != len(names):
            raise ParseError(f"start state must give {ts.orbits[symbol]} distinct names", lineno, col, source)
        ts.start = StateInstance(symbol, names)
    return ts


def _idents(m: re.Match, group: str, err) -> tuple[str, ...]:
    text = m[group].strip()
    if not text:
        return ()
    out = tuple(p.strip() for p in text.split(","))
    for p in out:
        if not _IDENT_RE.match(p):
            raise err(f"bad name {p!r}", m.start(group))
    return out


def successors(ts: NominalTS, q: StateInstance) -> set:
    if q.symbol not in ts.orbits:
        raise KeyError(f"undeclared orbit {q.symbol!r}")
    out: set = set()
    for r in ts.rules:
        if r.source != q.symbol:
            continue
        env = dict(zip(r.params, q.names))
        if r.bound:
            y = fresh(q.names)
            env[r.label] = y
            out.add(BoundStep(Abstraction(y, StateInstance(r.target, tuple(env[a] for a in r.args)))))
        else:
            out.add(FreeStep(env[r.label], StateInstance(r.target, tuple(env[a] for a in r.args))))
    return out


def _sorted_steps(steps: set) -> list:
    return sorted(steps, key=lambda s: (isinstance(s, BoundStep), repr(s)))


def traces(ts: NominalTS, q: StateInstance, n: int) -> TraceSet:
    """Alpha-classes of the bar strings of length ``n`` with a run from ``q``."""
    if n < 0:
        raise ValueError("depth must be non-negative")
    key = (q, n)
    hit = ts._memo.get(key)
    if hit is not None:
        return hit
    if n == 0:
        out = TraceSet(0, [Pretrace(())], canonical=True)
    else:
        words: list[Pretrace] = []
        for step in successors(ts, q):
            if isinstance(step, FreeStep):
                letter, target = BarLetter(step.name, False), step.target
            else:
                c = fresh(q.names)
                letter, target = BarLetter(c, True), step.target.concrete(c)
            words.extend(w.cons(letter) for w in traces(ts, target, n - 1).items)
        out = TraceSet(n, words)
    ts._memo[key] = out
    return out


def accepts_literal(ts: NominalTS, q: StateInstance, w: Pretrace) -> bool:
    """Whether some alpha-variant of the bar string ``w`` has a run from ``q``."""
    if not w.letters:
        return True
    head, rest = w.head, w.rest()
    for step in _sorted_steps(successors(ts, q)):
        if isinstance(step, FreeStep):
            if not head.bound and step.name == head.name and accepts_literal(ts, step.target, rest):
                return True
        elif head.bound:
            # rename the binder to a name unused anywhere, then follow the step
            c = fresh(set(q.names) | rest.support() | {head.name} | step.target.body.support())
            renamed = rest.permute(Permutation({head.name: c, c: head.name}))
            if accepts_literal(ts, step.target.concrete(c), renamed):
                return True
    return False


def equiv_global(ts: NominalTS, q1: StateInstance, q2: StateInstance, n: int) -> bool:
    return global_witness(ts, q1, q2, n) is None


def global_witness(ts: NominalTS, q1: StateInstance, q2: StateInstance, n: int):
    """Least depth ``k <= n`` with differing trace sets, and a canonical bar
    string in the symmetric difference; ``None`` when equivalent."""
    for k in range(n + 1):
        a, b = traces(ts, q1, k), traces(ts, q2, k)
        if a != b:
            diff = sorted(a.items ^ b.items, key=Pretrace.sort_key)
            return k, diff[0], diff[0] in a.items
    return None


def equiv_local(ts: NominalTS, q1: StateInstance, q2: StateInstance, n: int) -> bool:
    return local_witness_depth(ts, q1, q2, n) is None


def local_witness_depth(ts: NominalTS, q1: StateInstance, q2: StateInstance, n: int) -> int | None:
    for k in range(n + 1):
        if not d_set_eq(traces(ts, q1, k).items, traces(ts, q2, k).items):
            return k
    return None


def dword_member(ts: NominalTS, q: StateInstance, u: Iterable[int]) -> bool:
    u = tuple(u)
    return any(d_member(u, w) for w in traces(ts, q, len(u)).items)


def nword_member(ts: NominalTS, q: StateInstance, u: Iterable[int]) -> bool:
    u = tuple(u)
    return any(n_member(u, w) for w in traces(ts, q, len(u)).items)


def trace_names(ts: NominalTS, q: StateInstance, n: int) -> frozenset[Name]:
    out: set[Name] = set()
    for w in traces(ts, q, n).items:
        out |= free_names(w)
    return frozenset(out)


EXAMPLE = """\
system example
orbit s 0
orbit t 1
orbit u 2
orbit v 1
start s()
s() -|x-> t(x)
t(a) -|y-> u(a,y)
u(a,b) -a-> v(b)
v(b) -b-> s()
"""

"""Checking equational derivations over a graded theory.

A derivation is a JSON tree::

    {"rule": "refl|symm|trans|cong|perm|ax",
     "conclusion": {"depth": n, "lhs": "...", "rhs": "..."},
     "data": {...},
     "premises": [...]}

Rule data is optional except for ``ax``, which needs ``axiom`` (label or
index) and may give ``tau`` (a name map, completed to a permutation),
``sigma`` (images of the axiom's variables, keyed ``x`` or ``$x(a)``) and
``vars`` (parameters of schema variables, e.g. ``{"x": ["a"]}``; by default
the free names of the image).

The substitution of an ``ax`` node is given on one element per variable
orbit and extended equivariantly.  Well-definedness is checked by one swap
per stray name: for each name ``b`` free in ``sigma(x)`` but not a
parameter of ``x``, ``(b c).sigma(x) = sigma(x)`` must be derivable for a
fresh ``c``.  Built-in theories decide this directly; other theories must
supply the equation as a premise of the node.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .nominal import Name, NameTable, Permutation, VarRef, fresh, swap
from .syntax import ParseError, parse_term, tokenize, _Stream
from .terms import (
    App,
    BApp,
    FApp,
    Term,
    TermError,
    Var,
    check_term,
    free_names_term,
    has_depth,
    names_term,
    variables,
)
from .theory import Axiom, Theory

RULES = ("refl", "symm", "trans", "cong", "perm", "ax")


@dataclass
class Derivation:
    rule: str
    depth: int
    lhs: Term
    rhs: Term
    data: dict = field(default_factory=dict)
    premises: list["Derivation"] = field(default_factory=list)


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    node: str | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "accepted" if self.ok else f"rejected at {self.node}: {self.reason}"


class _Reject(Exception):
    def __init__(self, node: str, reason: str):
        super().__init__(reason)
        self.node, self.reason = node, reason


# parsing

def parse_derivation(source: str | dict, theory: Theory, filename: str | None = None) -> Derivation:
    if isinstance(source, str):
        try:
            obj = json.loads(source)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, e.lineno, e.colno, filename) from None
    else:
        obj = source
    return _node(obj, theory, "root", filename)


def _node(obj: Any, theory: Theory, path: str, filename: str | None) -> Derivation:
    def fail(msg: str) -> ParseError:
        return ParseError(f"{path}: {msg}", 1, 1, filename)

    if not isinstance(obj, dict):
        raise fail("derivation node must be an object")
    rule = obj.get("rule")
    if rule not in RULES:
        raise fail(f"unknown rule {rule!r}")
    concl = obj.get("conclusion")
    if not isinstance(concl, dict) or not {"depth", "lhs", "rhs"} <= set(concl):
        raise fail("conclusion needs depth, lhs and rhs")
    depth = concl["depth"]
    if not isinstance(depth, int) or isinstance(depth, bool) or depth < 0:
        raise fail("depth must be a natural number")
    try:
        lhs = parse_term(concl["lhs"], theory.table, theory.signature, f"{path}.lhs")
        rhs = parse_term(concl["rhs"], theory.table, theory.signature, f"{path}.rhs")
    except TermError as e:
        raise fail(str(e)) from None
    premises = obj.get("premises", [])
    if not isinstance(premises, list):
        raise fail("premises must be a list")
    data = obj.get("data", {}) or {}
    if not isinstance(data, dict):
        raise fail("data must be an object")
    kids = [_node(p, theory, f"{path}.premises[{i}]", filename) for i, p in enumerate(premises)]
    return Derivation(rule, depth, lhs, rhs, _data(rule, data, theory, fail), kids)


def _name(table: NameTable, lit: Any, fail) -> Name:
    if not isinstance(lit, str):
        raise fail(f"name expected, got {lit!r}")
    try:
        return table.intern(lit)
    except ValueError as e:
        raise fail(str(e)) from None


def _data(rule: str, data: dict, theory: Theory, fail) -> dict:
    table = theory.table
    out: dict[str, Any] = {}
    if rule == "cong":
        if "op" in data:
            out["op"] = str(data["op"])
        if "name" in data:
            out["name"] = _name(table, data["name"], fail)
    elif rule == "perm":
        for k in ("a", "b"):
            if k in data:
                out[k] = _name(table, data[k], fail)
    elif rule == "ax":
        if "axiom" not in data:
            raise fail("ax needs data.axiom")
        out["axiom"] = str(data["axiom"])
        tau = data.get("tau", {})
        if not isinstance(tau, dict):
            raise fail("tau must be an object")
        src = [_name(table, k, fail) for k in tau]
        dst = [_name(table, v, fail) for v in tau.values()]
        try:
            m = dict(zip(src, dst))
            out["tau"] = Permutation(m) if set(src) == set(dst) else Permutation.extending(src, dst)
        except ValueError as e:
            raise fail(f"tau: {e}") from None
        sigma = data.get("sigma", {})
        if not isinstance(sigma, dict):
            raise fail("sigma must be an object")
        out["sigma"] = {}
        for key, val in sigma.items():
            ref = _var_key(key, table, fail)
            try:
                out["sigma"][ref.symbol] = (ref, parse_term(str(val), table, theory.signature, f"sigma[{key}]"))
            except TermError as e:
                raise fail(str(e)) from None
        vars_ = data.get("vars", {})
        if not isinstance(vars_, dict):
            raise fail("vars must be an object")
        out["vars"] = {}
        for sym, names in vars_.items():
            if not isinstance(names, list):
                raise fail("vars entries must be lists of names")
            ps = tuple(_name(table, n, fail) for n in names)
            if len(set(ps)) != len(ps):
                raise fail(f"vars[{sym}] repeats a name")
            out["vars"][sym.lstrip("$")] = ps
    return out


def _var_key(key: str, table: NameTable, fail) -> VarRef:
    text = key if key.startswith("$") else "$" + key
    s = _Stream(tokenize(text), table, None)
    try:
        ref = s.var()
        s.finish()
    except ParseError as e:
        raise fail(f"bad sigma key {key!r}: {e.message}") from None
    return ref


# checking

def check_derivation(d: Derivation, theory: Theory) -> CheckReport:
    try:
        _check(d, theory, "root", {})
    except _Reject as e:
        return CheckReport(False, e.node, e.reason)
    return CheckReport(True)


def _check(d: Derivation, theory: Theory, path: str, arity: dict[str, int]) -> None:
    def need(cond: bool, reason: str) -> None:
        if not cond:
            raise _Reject(path, reason)

    for side, t in (("lhs", d.lhs), ("rhs", d.rhs)):
        try:
            check_term(t, theory.signature)
        except TermError as e:
            need(False, f"{side}: {e}")
        need(has_depth(t, d.depth), f"{side} does not have uniform depth {d.depth}")
        for x in variables(t):
            need(isinstance(x, VarRef), f"{side} contains a non-variable leaf")
            k = arity.setdefault(x.symbol, len(x.params))
            need(k == len(x.params), f"variable ${x.symbol} used with {len(x.params)} and {k} parameters")

    getattr(_Rules, d.rule)(d, theory, need)
    for i, p in enumerate(d.premises):
        _check(p, theory, f"{path}.premises[{i}]", arity)


def _same_head(t: Term, u: Term) -> bool:
    if type(t) is not type(u) or isinstance(t, Var) or t.op != u.op:
        return False
    if isinstance(t, FApp):
        return t.name == u.name
    if isinstance(t, BApp):
        return t.binder == u.binder
    return True


class _Rules:
    @staticmethod
    def refl(d: Derivation, theory: Theory, need) -> None:
        need(not d.premises, "refl takes no premises")
        need(d.depth == 0, "refl concludes at depth 0")
        need(isinstance(d.lhs, Var) and d.lhs == d.rhs, "refl needs the same variable on both sides")

    @staticmethod
    def symm(d: Derivation, theory: Theory, need) -> None:
        need(len(d.premises) == 1, "symm takes one premise")
        p = d.premises[0]
        need(p.depth == d.depth, "symm premise depth differs")
        need(p.lhs == d.rhs and p.rhs == d.lhs, "symm premise is not the reversed equation")

    @staticmethod
    def trans(d: Derivation, theory: Theory, need) -> None:
        need(len(d.premises) == 2, "trans takes two premises")
        p, q = d.premises
        need(p.depth == d.depth and q.depth == d.depth, "trans premise depth differs")
        need(p.lhs == d.lhs, "trans: first premise lhs differs from conclusion lhs")
        need(p.rhs == q.lhs, "trans: premises do not meet in the middle")
        need(q.rhs == d.rhs, "trans: second premise rhs differs from conclusion rhs")

    @staticmethod
    def cong(d: Derivation, theory: Theory, need) -> None:
        t, u = d.lhs, d.rhs
        need(_same_head(t, u), "cong needs the same operation and name on both sides")
        need(d.data.get("op", t.op.name) == t.op.name, "cong data names another operation")
        if "name" in d.data:
            need(d.data["name"] == getattr(t, "name", getattr(t, "binder", None)), "cong data names another name")
        m = d.depth - t.op.depth
        need(m >= 0, f"cong over {t.op.name} needs depth at least {t.op.depth}")
        need(len(d.premises) == len(t.args), f"cong over {t.op.name} takes {len(t.args)} premises")
        for i, (p, a, b) in enumerate(zip(d.premises, t.args, u.args)):
            need(p.depth == m, f"cong premise {i} should have depth {m}")
            need(p.lhs == a and p.rhs == b, f"cong premise {i} does not relate argument {i}")

    @staticmethod
    def perm(d: Derivation, theory: Theory, need) -> None:
        t, u = d.lhs, d.rhs
        need(isinstance(t, BApp) and isinstance(u, BApp) and t.op == u.op,
             "perm needs the same bound operation on both sides")
        a, b = t.binder, u.binder
        need(d.data.get("a", a) == a and d.data.get("b", b) == b, "perm data disagrees with the binders")
        need(a != b, "perm needs distinct binders")
        for i, ui in enumerate(u.args):
            need(a not in free_names_term(ui), f"perm side condition: binder {a!r} is free in argument {i}")
        m = d.depth - t.op.depth
        need(m >= 0, f"perm over {t.op.name} needs depth at least {t.op.depth}")
        need(len(d.premises) == len(t.args), f"perm over {t.op.name} takes {len(t.args)} premises")
        p_ab = swap(a, b)
        for i, (p, ti, ui) in enumerate(zip(d.premises, t.args, u.args)):
            need(p.depth == m, f"perm premise {i} should have depth {m}")
            need(p.lhs == ti and p.rhs == ui.permute(p_ab), f"perm premise {i} is not t_{i} = (a b).u_{i}")

    @staticmethod
    def ax(d: Derivation, theory: Theory, need) -> None:
        try:
            axiom = theory.axiom(d.data["axiom"])
        except KeyError as e:
            need(False, str(e.args[0]))
        l = d.depth - axiom.depth
        need(l >= 0, f"axiom {axiom.id} has depth {axiom.depth} > {d.depth}")
        tau: Permutation = d.data.get("tau", Permutation())
        sigma: dict = d.data.get("sigma", {})
        vars_: dict = d.data.get("vars", {})

        known = axiom.schema | set(axiom.fixed)
        for sym in list(sigma) + list(vars_):
            need(sym in known, f"${sym} is not a variable of axiom {axiom.id}")
        for sym in vars_:
            need(sym in axiom.schema, f"vars given for fixed variable ${sym}")

        occurrences: list[tuple[VarRef, Term]] = []
        for side, pat, tgt in (("lhs", axiom.lhs, d.lhs), ("rhs", axiom.rhs, d.rhs)):
            need(_shape(pat.permute(tau), tgt, occurrences),
                 f"{side} is not an instance of axiom {axiom.id} under tau")

        elements: dict[str, tuple[tuple[Name, ...], Term]] = {}
        for occ, sub in occurrences:
            need(occ.symbol in sigma, f"sigma is undefined on ${occ.symbol}")
            key, img = sigma[occ.symbol]
            need(has_depth(img, l), f"sigma(${occ.symbol}) does not have depth {l}")
            if occ.symbol in axiom.schema:
                need(sub == img, f"occurrence of ${occ.symbol} is not sigma(${occ.symbol})")
                params = vars_.get(occ.symbol, key.params or _ordered_names(img))
            else:
                need(len(key.params) == axiom.fixed[occ.symbol],
                     f"sigma key {key!r} has the wrong number of parameters")
                pi = _name_match(img, sub, dict(zip(key.params, occ.params)))
                need(pi is not None, f"occurrence {occ!r} is not a permuted image of sigma({key!r})")
                params = key.params
            elements[occ.symbol] = (params, img)
        for sym, (key, img) in sigma.items():
            need(has_depth(img, l), f"sigma(${sym}) does not have depth {l}")
            if sym not in elements:
                params = vars_.get(sym, key.params or _ordered_names(img)) if sym in axiom.schema else key.params
                elements[sym] = (params, img)

        for sym, (params, img) in sorted(elements.items()):
            stray = sorted(free_names_term(img) - set(params))
            for b in stray:
                c = fresh(names_term(img) | set(params) | {b})
                moved = img.permute(swap(b, c))
                need(_derivable(theory, d, moved, img, l),
                     f"sigma(${sym}) is not equivariant: stray name {theory.table.literal(b)} "
                     f"changes it under a swap with a fresh name")


def _ordered_names(t: Term) -> tuple[Name, ...]:
    return tuple(sorted(free_names_term(t)))


def _derivable(theory: Theory, d: Derivation, t: Term, u: Term, depth: int) -> bool:
    if theory.decide is not None:
        return theory.decide(t, u, depth)
    return any(p.depth == depth and {(p.lhs, p.rhs), (p.rhs, p.lhs)} & {(t, u)} for p in d.premises)


def _shape(pat: Term, tgt: Term, occ: list) -> bool:
    """Match ``tgt`` against ``pat`` up to its variables, recording them."""
    if isinstance(pat, Var):
        occ.append((pat.ref, tgt))
        return True
    if not _same_head(pat, tgt):
        return False
    return all(_shape(p, t, occ) for p, t in zip(pat.args, tgt.args))


def _name_match(pat: Term, tgt: Term, seed: dict) -> Permutation | None:
    """A permutation sending ``pat`` to ``tgt`` and extending ``seed``."""
    fwd: dict = {}
    bwd: dict = {}

    def bind(a, b) -> bool:
        if a in fwd:
            return fwd[a] == b
        if b in bwd:
            return False
        fwd[a], bwd[b] = b, a
        return True

    def go(p: Term, t: Term) -> bool:
        if isinstance(p, Var):
            if not isinstance(t, Var):
                return False
            x, y = p.ref, t.ref
            if not (isinstance(x, VarRef) and isinstance(y, VarRef)):
                return x == y
            return x.symbol == y.symbol and len(x.params) == len(y.params) and all(
                bind(a, b) for a, b in zip(x.params, y.params))
        if type(p) is not type(t) or p.op != t.op:
            return False
        if isinstance(p, FApp) and not bind(p.name, t.name):
            return False
        if isinstance(p, BApp) and not bind(p.binder, t.binder):
            return False
        return all(go(a, b) for a, b in zip(p.args, t.args))

    if not all(bind(a, b) for a, b in seed.items()) or not go(pat, tgt):
        return None
    return Permutation.extending(list(fwd), list(fwd.values()))


def derivation_to_json(d: Derivation, table: NameTable) -> dict:
    """Inverse of :func:`parse_derivation` (names rendered through ``table``)."""
    from .syntax import render_term

    data: dict[str, Any] = {}
    lit = table.literal
    for k, v in d.data.items():
        if k in ("name", "a", "b"):
            data[k] = lit(v)
        elif k == "tau":
            data[k] = {lit(a): lit(b) for a, b in sorted(v.items())}
        elif k == "sigma":
            data[k] = {_key_text(ref, table): render_term(img, table) for ref, img in v.values()}
        elif k == "vars":
            data[k] = {s: [lit(a) for a in ps] for s, ps in v.items()}
        else:
            data[k] = v
    out: dict[str, Any] = {
        "rule": d.rule,
        "conclusion": {"depth": d.depth, "lhs": render_term(d.lhs, table), "rhs": render_term(d.rhs, table)},
    }
    if data:
        out["data"] = data
    if d.premises:
        out["premises"] = [derivation_to_json(p, table) for p in d.premises]
    return out


def _key_text(ref: VarRef, table: NameTable) -> str:
    from .syntax import render_tail

    return render_tail(ref, table)

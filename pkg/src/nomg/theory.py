"""Graded theories: signatures plus axioms over strong contexts.

Theory file format, one declaration per line (``#`` starts a comment)::

    op <name> <pure|free|bound> <arity> <depth>
    ax [<label>] <depth> <context> : <lhs> = <rhs>

A context lists variable symbols in braces.  ``{x, y}`` declares schema
variables, which may be instantiated at any element of any context;
``{x/1}`` declares a fixed orbit whose elements carry one name, written
``$x(a)`` in the axiom.  The built-in theories ``tr``, ``bar`` and ``loc``
come with decision procedures.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .graded import eq_bar, eq_loc
from .nominal import NameTable
from .syntax import ParseError, parse_term
from .terms import (
    Kind,
    OpSym,
    SIGMA_BAR,
    SIGMA_TR,
    Signature,
    Term,
    TermError,
    has_depth,
    variables,
)

Decide = Callable[[Term, Term, int], bool]


@dataclass(frozen=True)
class Axiom:
    id: str
    depth: int
    schema: frozenset[str]
    fixed: dict[str, int]
    lhs: Term
    rhs: Term


@dataclass
class Theory:
    name: str
    signature: Signature
    axioms: list[Axiom] = field(default_factory=list)
    table: NameTable = field(default_factory=NameTable)
    decide: Optional[Decide] = None

    def axiom(self, ident: str | int) -> Axiom:
        for ax in self.axioms:
            if ax.id == str(ident):
                return ax
        raise KeyError(f"theory {self.name} has no axiom {ident!r}")


_OP_RE = re.compile(r"op\s+(\S+)\s+(pure|free|bound)\s+(\d+)\s+(\d+)\s*\Z")
_AX_RE = re.compile(r"ax\s+(?:([A-Za-z][\w'-]*)\s+)?(\d+)\s*\{([^}]*)\}\s*:(.*)\Z")
_CTX_RE = re.compile(r"\s*([A-Za-z][A-Za-z0-9_']*)\s*(?:/\s*(\d+))?\s*\Z")


def parse_theory(
    text: str,
    name: str = "theory",
    source: str | None = None,
    table: NameTable | None = None,
    base: Signature | None = None,
) -> Theory:
    th = Theory(name, Signature(base or ()), table=table or NameTable())
    pending: list[tuple[int, str, re.Match]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        col = raw.index(line[0]) + 1
        if line.startswith("op") and (m := _OP_RE.match(line)):
            op = OpSym(m[1], Kind(m[2]), int(m[3]), int(m[4]))
            if op.name in th.signature and th.signature[op.name] != op:
                raise ParseError(f"operation {op.name} declared twice", lineno, col, source)
            th.signature.add(op)
        elif line.startswith("ax") and (m := _AX_RE.match(line)):
            pending.append((lineno, raw, m))
        else:
            raise ParseError("expected 'op <name> <kind> <arity> <depth>' or 'ax <depth> {ctx} : lhs = rhs'",
                             lineno, col, source)
    for lineno, raw, m in pending:
        th.axioms.append(_axiom(th, lineno, raw, m, len(th.axioms), source))
    return th


def _axiom(th: Theory, lineno: int, raw: str, m: re.Match, index: int, source: str | None) -> Axiom:
    label, depth, ctx, body = m[1], int(m[2]), m[3], m[4]
    body_col = raw.index(body) + 1 if body else len(raw)
    schema: set[str] = set()
    fixed: dict[str, int] = {}
    for item in filter(str.strip, ctx.split(",")):
        cm = _CTX_RE.match(item)
        if not cm:
            raise ParseError(f"bad context entry {item.strip()!r}", lineno, raw.index("{") + 1, source)
        if cm[2] is None:
            schema.add(cm[1])
        else:
            fixed[cm[1]] = int(cm[2])
    if "=" not in body:
        raise ParseError("axiom needs 'lhs = rhs'", lineno, body_col, source)
    left, right = body.split("=", 1)
    lhs = parse_term(left, th.table, th.signature, source, lineno)
    rhs = parse_term(right, th.table, th.signature, source, lineno)
    for t in (lhs, rhs):
        for x in variables(t):
            if x.symbol in schema:
                if x.params:
                    raise ParseError(f"schema variable ${x.symbol} takes no parameters", lineno, body_col, source)
            elif fixed.get(x.symbol) != len(x.params):
                raise ParseError(f"variable {x!r} is not in the context", lineno, body_col, source)
        if not has_depth(t, depth):
            raise ParseError(f"side of axiom does not have depth {depth}", lineno, body_col, source)
    return Axiom(label or str(index), depth, frozenset(schema), fixed, lhs, rhs)


def _decide_tr(t: Term, u: Term, n: int) -> bool:
    # pretraces are singleton normal forms, so set equality is alpha-equality
    return eq_bar(t, u)


BUILTIN_TEXT = {
    "tr": "",
    "bar": """
ax jsl-unit 0 {x} : $x + 0 = $x
ax jsl-idem 0 {x} : $x + $x = $x
ax jsl-comm 0 {x, y} : $x + $y = $y + $x
ax jsl-assoc 0 {x, y, z} : ($x + $y) + $z = $x + ($y + $z)
ax pre-dist 1 {x, y} : a.($x + $y) = a.$x + a.$y
ax pre-zero 1 {} : a.0 = 0
ax abs-dist 1 {x, y} : |a.($x + $y) = |a.$x + |a.$y
ax abs-zero 1 {} : |a.0 = 0
""",
}
BUILTIN_TEXT["loc"] = BUILTIN_TEXT["bar"] + "ax loc 1 {x} : a.$x + |a.$x = |a.$x\n"

_BUILTIN = {
    "tr": (SIGMA_TR, _decide_tr),
    "bar": (SIGMA_BAR, lambda t, u, n: eq_bar(t, u)),
    "loc": (SIGMA_BAR, lambda t, u, n: eq_loc(t, u)),
}


def builtin_theory(name: str, table: NameTable | None = None) -> Theory:
    try:
        sig, decide = _BUILTIN[name]
    except KeyError:
        raise KeyError(f"unknown built-in theory {name!r}") from None
    table = table or NameTable()
    th = parse_theory(BUILTIN_TEXT[name], name, f"<{name}>", table, base=sig)
    th.decide = decide
    return th


def load_theory(where: str, table: NameTable | None = None) -> Theory:
    """A built-in theory by name, or a theory file by path."""
    if where in _BUILTIN:
        return builtin_theory(where, table)
    path = Path(where)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read theory: {e.strerror}", 1, 1, where) from None
    try:
        return parse_theory(text, path.stem, where, table)
    except TermError as e:
        raise ParseError(str(e), 1, 1, where) from None

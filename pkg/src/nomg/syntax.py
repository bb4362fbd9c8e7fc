"""Concrete syntax: lexer, parsers and printers.

Names are identifiers (``a``, ``b2``, ``x'``) interned per input unit by a
:class:`NameTable`.  ``|`` and ``¦`` both mark a bound letter, ``$x`` and
``$x(a,b)`` are variables, ``$*`` is the unit variable.

Terms::

    t ::= 0 | t + t | ( t ) | $x(a,..)
        | a . t            prefix, a.pre(t)
        | |a . t           bound prefix, nu a. abs(t)
        | f(t, ..)         pure operation
        | a.f(t, ..)       free-name operation
        | nu a. f(t, ..)   bound-name operation

The dot after a prefix letter may be dropped, so ``|a b $x`` reads as
``|a.b.$x``.  ``nu`` and ``ν`` are reserved before a name followed by a dot.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Iterable

from .barstrings import BarLetter, Pretrace, TraceSet
from .nominal import UNIT, Name, NameTable, VarRef
from .terms import (
    ABS,
    PRE,
    App,
    BApp,
    FApp,
    Kind,
    SIGMA_BAR,
    Signature,
    Term,
    TermError,
    Var,
    check_term,
    zero,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1, source: str | None = None):
        self.message, self.line, self.col, self.source = message, line, col, source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{col}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT VAR BAR NU NUM and punctuation
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<VAR>\$(?:\*|[A-Za-z][A-Za-z0-9_']*))
  | (?P<IDENT>[A-Za-z][A-Za-z0-9_']*)
  | (?P<NUM>[0-9]+)
  | (?P<BAR>[|¦])
  | (?P<NU>ν)
  | (?P<EPS>ε)
  | (?P<punct>[().,+;{}=:])
    """,
    re.VERBOSE,
)


def tokenize(text: str, line: int = 1, source: str | None = None) -> list[Token]:
    out = []
    pos = 0
    col0 = 0
    while pos < len(text):
        if text[pos] == "\n":
            line += 1
            pos += 1
            col0 = pos
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1, source)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            out.append(Token(tok if kind == "punct" else kind, tok, line, pos - col0 + 1))
        pos = m.end()
    return out


class _Stream:
    def __init__(self, tokens: list[Token], table: NameTable, source: str | None, line: int = 1):
        self.toks = tokens
        self.i = 0
        self.table = table
        self.source = source
        self.line = line

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def kind(self, k: int = 0) -> str | None:
        t = self.peek(k)
        return t.kind if t else None

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else None
            line, col = (last.line, last.col + len(last.text)) if last else (self.line, 1)
            return ParseError(message + " at end of input", line, col, self.source)
        return ParseError(message, tok.line, tok.col, self.source)

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            raise self.error(f"expected {kind!r}")
        self.i += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.kind() == kind:
            return self.next()
        return None

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def finish(self) -> None:
        if not self.done():
            raise self.error(f"unexpected {self.peek().text!r}")

    def name(self) -> Name:
        tok = self.expect("IDENT")
        return self.table.intern(tok.text)

    def var(self) -> VarRef:
        tok = self.expect("VAR")
        symbol = tok.text[1:]
        params: list[Name] = []
        if symbol != "*" and self.kind() == "(":
            self.next()
            if self.kind() != ")":
                params.append(self.name())
                while self.accept(","):
                    params.append(self.name())
            self.expect(")")
        if len(set(params)) != len(params):
            raise self.error(f"variable ${symbol} has repeated parameters", tok)
        return VarRef(symbol, tuple(params))


def _stream(text: str, table: NameTable | None, source: str | None, line: int = 1) -> _Stream:
    return _Stream(tokenize(text, line, source), table if table is not None else NameTable(), source, line)


# bar strings and pretraces

def _pretrace(s: _Stream, stop: Iterable[str] = ()) -> Pretrace:
    stop = set(stop)
    letters: list[BarLetter] = []
    tail: Any = UNIT
    s.accept("EPS")
    while not s.done() and s.kind() not in stop:
        k = s.kind()
        if k == "BAR":
            s.next()
            letters.append(BarLetter(s.name(), True))
        elif k == "IDENT":
            letters.append(BarLetter(s.name(), False))
        elif k == "VAR":
            tail = s.var()
            break
        elif k == ".":
            s.next()
        else:
            raise s.error(f"unexpected {s.peek().text!r} in bar string")
    return Pretrace(tuple(letters), tail)


def parse_pretrace(text: str, table: NameTable | None = None, source: str | None = None) -> Pretrace:
    """Parse ``|a b a $x``; without a tail the result is a plain bar string."""
    s = _stream(text, table, source)
    p = _pretrace(s)
    s.finish()
    return p


def parse_data_word(text: str, table: NameTable | None = None, source: str | None = None) -> tuple[Name, ...]:
    s = _stream(text, table, source)
    s.accept("EPS")
    out = []
    while not s.done():
        out.append(s.name())
        s.accept(",")
    return tuple(out)


def parse_state(text: str, table: NameTable | None = None, source: str | None = None) -> tuple[str, tuple[Name, ...]]:
    """Parse ``s(a,b)`` (or a bare ``s``) into symbol and name tuple."""
    s = _stream(text, table, source)
    out = _state(s)
    s.finish()
    return out


def _state(s: _Stream) -> tuple[str, tuple[Name, ...]]:
    symbol = s.expect("IDENT").text
    args: list[Name] = []
    if s.accept("("):
        if s.kind() != ")":
            args.append(s.name())
            while s.accept(","):
                args.append(s.name())
        s.expect(")")
    return symbol, tuple(args)


# terms

class _TermParser:
    def __init__(self, s: _Stream, signature: Signature):
        self.s = s
        self.sig = signature

    def sum(self) -> Term:
        t = self.prefix()
        while self.s.accept("+"):
            t = App(self._op("+", Kind.PURE), (t, self.prefix()))
        return t

    def _op(self, name: str, kind: Kind, tok: Token | None = None):
        op = self.sig.get(name)
        if op is None:
            raise self.s.error(f"unknown operation {name!r}", tok)
        if op.kind is not kind:
            raise self.s.error(f"operation {name!r} is {op.kind.value}, used as {kind.value}", tok)
        return op

    def _args(self, op, tok: Token) -> tuple[Term, ...]:
        s = self.s
        s.expect("(")
        args = []
        if s.kind() != ")":
            args.append(self.sum())
            while s.accept(","):
                args.append(self.sum())
        s.expect(")")
        if len(args) != op.arity:
            raise s.error(f"operation {op.name!r} expects {op.arity} arguments, got {len(args)}", tok)
        return tuple(args)

    def _is_call(self, k: int = 0) -> bool:
        return self.s.kind(k) == "IDENT" and self.s.kind(k + 1) == "("

    def _binder(self, tok: Token) -> Term:
        # after "|a" or "nu a": either h(...) with h bound, or the abs sugar
        s = self.s
        a = s.name()
        dotted = s.accept(".") is not None
        if self._is_call():
            op = self.sig.get(s.peek().text)
            if op is not None and op.kind is Kind.BOUND:
                htok = s.next()
                return BApp(op, a, self._args(op, htok))
        if tok.kind == "NU" and not dotted:
            raise s.error("expected '.' after the bound name")
        return BApp(self._op(ABS.name, Kind.BOUND, tok), a, (self.prefix(),))

    def prefix(self) -> Term:
        s = self.s
        tok = s.peek()
        if tok is None:
            raise s.error("expected a term")
        k = tok.kind
        if k == "NUM":
            if tok.text != "0":
                raise s.error(f"unexpected number {tok.text!r}")
            s.next()
            return App(self._op("0", Kind.PURE, tok))
        if k == "VAR":
            return Var(s.var())
        if k == "(":
            s.next()
            t = self.sum()
            s.expect(")")
            return t
        if k == "BAR":
            s.next()
            return self._binder(tok)
        if k == "NU" or (k == "IDENT" and tok.text == "nu" and s.kind(1) == "IDENT" and s.kind(2) == "."):
            s.next()
            return self._binder(Token("NU", tok.text, tok.line, tok.col))
        if k == "IDENT":
            if self._is_call():
                op = self._op(tok.text, Kind.PURE, tok)
                s.next()
                return App(op, self._args(op, tok))
            s.next()
            a = s.table.intern(tok.text)
            if s.accept(".") and self._is_call():
                op = self.sig.get(s.peek().text)
                if op is not None and op.kind is Kind.FREE:
                    htok = s.next()
                    return FApp(op, a, self._args(op, htok))
            if s.done() or s.kind() in ("+", ")", ",", "="):
                raise s.error(f"expected a term after {tok.text!r}")
            return FApp(self._op(PRE.name, Kind.FREE, tok), a, (self.prefix(),))
        raise s.error(f"unexpected {tok.text!r}")


def parse_term(
    text: str,
    table: NameTable | None = None,
    signature: Signature = SIGMA_BAR,
    source: str | None = None,
    line: int = 1,
) -> Term:
    s = _stream(text, table, source, line)
    try:
        t = _TermParser(s, signature).sum()
    except TermError as e:
        raise s.error(str(e)) from None
    s.finish()
    check_term(t, signature)
    return t


def parse_term_stream(s: _Stream, signature: Signature) -> Term:
    return _TermParser(s, signature).sum()


# printing

def render_name(a: int, table: NameTable | None = None) -> str:
    return table.literal(a) if table is not None else repr(Name(a))


def render_tail(tail: Any, table: NameTable | None = None) -> str:
    if isinstance(tail, VarRef):
        if tail.symbol == "*":
            return "$*"
        if not tail.params:
            return f"${tail.symbol}"
        return f"${tail.symbol}(" + ",".join(render_name(a, table) for a in tail.params) + ")"
    if isinstance(tail, TraceSet):
        return render_set(tail, table)
    return repr(tail)


def render_pretrace(p: Pretrace, table: NameTable | None = None, empty: str = "ε") -> str:
    parts = [("|" if l.bound else "") + render_name(l.name, table) for l in p.letters]
    if p.tail != UNIT:
        parts.append(render_tail(p.tail, table))
    return " ".join(parts) if parts else empty


def render_word(u: Iterable[int], table: NameTable | None = None, empty: str = "ε") -> str:
    parts = [render_name(a, table) for a in u]
    return " ".join(parts) if parts else empty


def render_set(items: Iterable[Pretrace], table: NameTable | None = None) -> str:
    ps = items.sorted() if isinstance(items, TraceSet) else sorted(items, key=Pretrace.sort_key)
    return "{" + ", ".join(render_pretrace(p, table) for p in ps) + "}"


def render_term(t: Term, table: NameTable | None = None) -> str:
    return _render(t, table, top=True)


def _render(t: Term, table: NameTable | None, top: bool = False) -> str:
    if isinstance(t, Var):
        if isinstance(t.ref, VarRef):
            return render_tail(t.ref, table)
        return "[" + render_tail(t.ref, table) + "]"
    if isinstance(t, App):
        if t.op.name == "0" and not t.args:
            return "0"
        if t.op.name == "+" and len(t.args) == 2:
            left = _render(t.args[0], table, top=True)
            right = _render(t.args[1], table)
            s = f"{left} + {right}"
            return s if top else f"({s})"
        return f"{t.op.name}(" + ", ".join(_render(a, table, True) for a in t.args) + ")"
    if isinstance(t, FApp):
        a = render_name(t.name, table)
        if t.op == PRE:
            return f"{a}.{_render(t.args[0], table)}"
        return f"{a}.{t.op.name}(" + ", ".join(_render(x, table, True) for x in t.args) + ")"
    a = render_name(t.binder, table)
    if t.op == ABS:
        return f"|{a}.{_render(t.args[0], table)}"
    return f"nu {a}.{t.op.name}(" + ", ".join(_render(x, table, True) for x in t.args) + ")"

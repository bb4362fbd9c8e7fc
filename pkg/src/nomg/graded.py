"""The graded monad of bar languages and the decision procedures on terms.

An element of ``M_n X`` is a :class:`TraceSet` of depth ``n``: a finite set
of alpha-classes of length-``n`` pretraces over ``X``.  A term over
``{0, +, pre, abs}`` normalises to such a set by distributing the prefix
operations over sums and dropping ``0``.
"""
from __future__ import annotations

from typing import Any, Callable, Iterable, Mapping

from .barstrings import (
    BarLetter,
    IllFormedError,
    Pretrace,
    TraceSet,
    alpha_eq,
    d_set_leq,
)
from .nominal import Permutation, VarRef, act
from .terms import (
    ABS,
    PLUS,
    PRE,
    ZERO,
    App,
    BApp,
    FApp,
    Term,
    TermError,
    Var,
    _depth_info,
    has_depth,
    subterms,
)


def _pretraces(t: Term) -> list[Pretrace]:
    if isinstance(t, Var):
        return [Pretrace((), t.ref)]
    if isinstance(t, App):
        if t.op == ZERO:
            return []
        if t.op == PLUS:
            return _pretraces(t.args[0]) + _pretraces(t.args[1])
    elif isinstance(t, FApp) and t.op == PRE:
        l = BarLetter(t.name, False)
        return [p.cons(l) for p in _pretraces(t.args[0])]
    elif isinstance(t, BApp) and t.op == ABS:
        l = BarLetter(t.binder, True)
        return [p.cons(l) for p in _pretraces(t.args[0])]
    raise TermError(f"operation {t.op.name} is not one of 0, +, pre, abs")


def common_depth(*ts: Term) -> int:
    """The least depth all of ``ts`` inhabit; raises when there is none."""
    infos = []
    for t in ts:
        info = _depth_info(t)
        if info is None:
            raise TermError("term does not have a uniform depth")
        infos.append(info)
    exact = {d for d, e in infos if e}
    if len(exact) > 1:
        raise TermError(f"depth mismatch: {sorted(exact)}")
    if exact:
        n = exact.pop()
        if any(d > n for d, e in infos if not e):
            raise TermError(f"depth mismatch: constant part deeper than {n}")
        return n
    return max(d for d, _ in infos)


def normalize_bar(t: Term, depth: int | None = None) -> TraceSet:
    """Normal form of ``t`` as a canonical pretrace set; ``{}`` encodes ``0``."""
    n = common_depth(t) if depth is None else depth
    if not has_depth(t, n):
        raise TermError(f"term does not have depth {n}")
    return TraceSet(n, _pretraces(t))


def from_traceset(S: Iterable[Pretrace]) -> Term:
    """A term whose normal form is ``S`` (a sum of prefixed variables)."""
    from .terms import plus

    summands = []
    for p in sorted(S, key=Pretrace.sort_key):
        t: Term = Var(p.tail)
        for l in reversed(p.letters):
            t = BApp(ABS, l.name, (t,)) if l.bound else FApp(PRE, l.name, (t,))
        summands.append(t)
    return plus(*summands)


def eq_tr(w: Pretrace, v: Pretrace) -> bool:
    return alpha_eq(w, v)


def eq_bar(t: Term, u: Term) -> bool:
    n = common_depth(t, u)
    return normalize_bar(t, n) == normalize_bar(u, n)


def leq_loc(t: Term, u: Term) -> bool:
    n = common_depth(t, u)
    return d_set_leq(normalize_bar(t, n).items, normalize_bar(u, n).items)


def eq_loc(t: Term, u: Term) -> bool:
    return leq_loc(t, u) and leq_loc(u, t)


def eta(x: Any) -> TraceSet:
    return TraceSet(0, [Pretrace((), x)])


def fmap(f: Callable[[Any], Any], S: TraceSet) -> TraceSet:
    """``M_n f``; ``f`` must be equivariant for the result to be well defined."""
    return TraceSet(S.depth, (Pretrace(p.letters, f(p.tail)) for p in S.items))


def mu_bar(n: int, m: int, S: TraceSet) -> TraceSet:
    """Flatten ``M_n M_m X`` to ``M_{n+m} X`` by concatenating each prefix
    with the members of its tail set.

    Binders of the prefix scope over the tail set, so names bound in the
    prefix may be captured in the members, exactly as they are in the
    alpha-class of the outer pretrace.
    """
    if S.depth != n:
        raise IllFormedError(f"outer set has depth {S.depth}, expected {n}")
    out = []
    for p in S.items:
        V = p.tail
        if not isinstance(V, TraceSet) or V.depth != m:
            raise IllFormedError(f"tail {V!r} is not a set of depth {m}")
        out.extend(Pretrace(p.letters + v.letters, v.tail) for v in V.items)
    return TraceSet(n + m, out)


def split(n: int, t: Term) -> Term:
    """Cut a term of depth ``1 + n`` at depth 1.

    Depth-0 operations are kept; below each depth-1 operation the
    arguments are replaced by their depth-``n`` classes, so the result is
    a depth-1 term whose variables are :class:`TraceSet` values.
    """
    for s in subterms(t):
        if not isinstance(s, Var) and s.op.depth > 1:
            raise TermError(f"operation {s.op.name} has depth {s.op.depth} > 1")
    if not has_depth(t, 1 + n):
        raise TermError(f"term does not have depth {1 + n}")
    return _split(n, t)


def _split(n: int, t: Term) -> Term:
    if isinstance(t, Var):
        raise TermError("variable at depth 0 cannot be split")
    if t.op.depth == 0:
        args = tuple(_split(n, a) for a in t.args)
    else:
        args = tuple(Var(normalize_bar(a, n)) for a in t.args)
    if isinstance(t, App):
        return App(t.op, args)
    if isinstance(t, FApp):
        return FApp(t.op, t.name, args)
    return BApp(t.op, t.binder, args)


def equivariant_extension(sigma: Mapping[VarRef, Any]) -> Callable[[VarRef], Any]:
    """Extend a map given on one representative per variable symbol to the
    whole orbits: ``pi . x  |->  pi . sigma(x)``."""
    reps: dict[str, VarRef] = {}
    for x in sigma:
        if x.symbol in reps:
            raise TermError(f"two representatives given for ${x.symbol}")
        reps[x.symbol] = x

    def f(y: VarRef) -> Any:
        x = reps.get(y.symbol)
        if x is None or len(x.params) != len(y.params):
            raise TermError(f"no image for {y!r}")
        return act(Permutation.extending(x.params, y.params), sigma[x])

    return f

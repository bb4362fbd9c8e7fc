"""Graded nominal signatures and terms.

Terms follow the grammar ``x | f(t..) | a.g(t..) | nu a.h(t..)``.  The
permutation action is the raw one: binders are renamed along with
everything else, and substitution is literal replacement that may capture.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterable, Mapping, Union

from .nominal import Name, Permutation, VarRef, act, support


class TermError(ValueError):
    pass


class Kind(Enum):
    PURE = "pure"
    FREE = "free"
    BOUND = "bound"


@dataclass(frozen=True)
class OpSym:
    name: str
    kind: Kind
    arity: int
    depth: int


class Signature:
    def __init__(self, ops: Iterable[OpSym] = ()):
        self._ops: dict[str, OpSym] = {}
        for op in ops:
            self.add(op)

    def add(self, op: OpSym) -> None:
        if op.name in self._ops and self._ops[op.name] != op:
            raise TermError(f"operation {op.name} declared twice")
        self._ops[op.name] = op

    def get(self, name: str) -> OpSym | None:
        return self._ops.get(name)

    def __getitem__(self, name: str) -> OpSym:
        try:
            return self._ops[name]
        except KeyError:
            raise TermError(f"unknown operation {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._ops

    def __iter__(self):
        return iter(self._ops.values())

    def max_depth(self) -> int:
        return max((op.depth for op in self._ops.values()), default=0)


ZERO = OpSym("0", Kind.PURE, 0, 0)
PLUS = OpSym("+", Kind.PURE, 2, 0)
PRE = OpSym("pre", Kind.FREE, 1, 1)
ABS = OpSym("abs", Kind.BOUND, 1, 1)

SIGMA_TR = Signature([PRE, ABS])
SIGMA_BAR = Signature([ZERO, PLUS, PRE, ABS])


@dataclass(frozen=True)
class Var:
    ref: Any  # VarRef, or a class value (TraceSet) when terms are layered

    def permute(self, perm: Permutation) -> "Var":
        return Var(act(perm, self.ref))


@dataclass(frozen=True)
class App:
    op: OpSym
    args: tuple["Term", ...] = ()

    def permute(self, perm: Permutation) -> "App":
        return App(self.op, tuple(a.permute(perm) for a in self.args))


@dataclass(frozen=True)
class FApp:
    op: OpSym
    name: Name
    args: tuple["Term", ...]

    def permute(self, perm: Permutation) -> "FApp":
        return FApp(self.op, perm(self.name), tuple(a.permute(perm) for a in self.args))


@dataclass(frozen=True)
class BApp:
    op: OpSym
    binder: Name
    args: tuple["Term", ...]

    def permute(self, perm: Permutation) -> "BApp":
        return BApp(self.op, perm(self.binder), tuple(a.permute(perm) for a in self.args))


Term = Union[Var, App, FApp, BApp]


def _well_formed(t: Term) -> None:
    if isinstance(t, Var):
        return
    expected = {App: Kind.PURE, FApp: Kind.FREE, BApp: Kind.BOUND}[type(t)]
    if t.op.kind is not expected:
        raise TermError(f"operation {t.op.name} is {t.op.kind.value}, used as {expected.value}")
    if len(t.args) != t.op.arity:
        raise TermError(f"operation {t.op.name} expects {t.op.arity} arguments, got {len(t.args)}")
    for a in t.args:
        _well_formed(a)


# convenience constructors
def var(symbol: str, *params: int) -> Var:
    return Var(VarRef(symbol, tuple(Name(p) for p in params)))


def zero() -> App:
    return App(ZERO)


def plus(*ts: Term) -> Term:
    """Left-nested sum; the empty sum is 0."""
    if not ts:
        return zero()
    out = ts[0]
    for t in ts[1:]:
        out = App(PLUS, (out, t))
    return out


def pre(a: int, t: Term) -> FApp:
    return FApp(PRE, Name(a), (t,))


def nu(a: int, t: Term) -> BApp:
    return BApp(ABS, Name(a), (t,))


def act_term(perm: Permutation, t: Term) -> Term:
    return t.permute(perm)


def _depth_info(t: Term) -> tuple[int, bool] | None:
    """``(d, exact)``: exactly depth ``d``, or (when not exact) any depth ``>= d``."""
    if isinstance(t, Var):
        return (0, True)
    k = t.op.depth
    if not t.args:
        return (k, False)
    infos = []
    for a in t.args:
        info = _depth_info(a)
        if info is None:
            return None
        infos.append(info)
    exact = {d for d, e in infos if e}
    if len(exact) > 1:
        return None
    if exact:
        m = exact.pop()
        if any(d > m for d, e in infos if not e):
            return None
        return (m + k, True)
    return (max(d for d, _ in infos) + k, False)


def uniform_depth(t: Term) -> int | None:
    """Uniform depth of ``t``, or ``None`` when undefined.

    Constants of depth ``k`` inhabit every depth ``m >= k``; for terms built
    only from constants the least admissible depth is returned.
    """
    info = _depth_info(t)
    return None if info is None else info[0]


def has_depth(t: Term, n: int) -> bool:
    info = _depth_info(t)
    if info is None:
        return False
    d, exact = info
    return d == n if exact else d <= n


def free_names_term(t: Term) -> frozenset[Name]:
    if isinstance(t, Var):
        return support(t.ref)
    out: set[Name] = set()
    for a in t.args:
        out |= free_names_term(a)
    if isinstance(t, FApp):
        out.add(t.name)
    elif isinstance(t, BApp):
        out.discard(t.binder)
    return frozenset(out)


def names_term(t: Term) -> frozenset[Name]:
    """Every name occurring in ``t``, bound or free."""
    if isinstance(t, Var):
        return support(t.ref)
    out: set[Name] = set()
    for a in t.args:
        out |= names_term(a)
    if isinstance(t, FApp):
        out.add(t.name)
    elif isinstance(t, BApp):
        out.add(t.binder)
    return frozenset(out)


def variables(t: Term) -> list[Any]:
    """Variable payloads in left-to-right order (with repetitions)."""
    if isinstance(t, Var):
        return [t.ref]
    out = []
    for a in t.args:
        out.extend(variables(a))
    return out


def map_vars(t: Term, f: Callable[[Any], Term]) -> Term:
    if isinstance(t, Var):
        return f(t.ref)
    args = tuple(map_vars(a, f) for a in t.args)
    if isinstance(t, App):
        return App(t.op, args)
    if isinstance(t, FApp):
        return FApp(t.op, t.name, args)
    return BApp(t.op, t.binder, args)


def substitute(t: Term, sigma: Mapping[Any, Term] | Callable[[Any], Term]) -> Term:
    """Replace every variable ``x`` of ``t`` by ``sigma(x)`` (no capture avoidance).

    The images of the variables occurring in ``t`` must share one uniform depth.
    """
    lookup = sigma if callable(sigma) else (lambda x: _lookup(sigma, x))
    images = {x: lookup(x) for x in variables(t)}
    infos = {x: _depth_info(img) for x, img in images.items()}
    if any(i is None for i in infos.values()):
        raise TermError("substitution image without uniform depth")
    exact = {d for d, e in infos.values() if e}
    if len(exact) > 1 or (exact and any(d > min(exact) for d, e in infos.values() if not e)):
        raise TermError("substitution is not of uniform depth")
    return map_vars(t, lambda x: images[x])


def _lookup(sigma: Mapping[Any, Term], x: Any) -> Term:
    try:
        return sigma[x]
    except KeyError:
        raise TermError(f"substitution undefined on {x!r}") from None


def subterms(t: Term):
    yield t
    if not isinstance(t, Var):
        for a in t.args:
            yield from subterms(a)


def check_term(t: Term, signature: Signature | None = None) -> Term:
    """Validate kinds and arities (and membership in ``signature``)."""
    _well_formed(t)
    if signature is not None:
        for s in subterms(t):
            if not isinstance(s, Var) and signature.get(s.op.name) != s.op:
                raise TermError(f"operation {s.op.name} is not in the signature")
    return t

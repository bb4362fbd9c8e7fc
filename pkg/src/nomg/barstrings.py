"""Bar strings, pretraces and their freshness semantics.

A pretrace is a word over names and bound names (``|a``) followed by a
tail: a context variable, the unit variable ``$*`` (plain bar strings), or
any other supported value such as a :class:`TraceSet` when pretraces are
nested inside the graded monad.

The data languages ``D(w)`` are infinite and are never materialised; the
membership and inclusion procedures below decide them symbolically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .nominal import UNIT, Name, Permutation, act, fresh, support, swap


class IllFormedError(ValueError):
    """Raised when a comparison is asked between pretraces of different shape."""


@dataclass(frozen=True, slots=True)
class BarLetter:
    name: Name
    bound: bool = False

    def permute(self, perm: Permutation) -> "BarLetter":
        return BarLetter(perm(self.name), self.bound)

    def __repr__(self) -> str:
        return f"|{self.name!r}" if self.bound else repr(self.name)


def tail_key(tail: Any):
    key = getattr(tail, "sort_key", None)
    return key() if key is not None else (9, repr(tail))


@dataclass(frozen=True, slots=True)
class Pretrace:
    letters: tuple[BarLetter, ...]
    tail: Any = UNIT

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def head(self) -> BarLetter:
        return self.letters[0]

    def rest(self) -> "Pretrace":
        return Pretrace(self.letters[1:], self.tail)

    def cons(self, letter: BarLetter) -> "Pretrace":
        return Pretrace((letter,) + self.letters, self.tail)

    def permute(self, perm: Permutation) -> "Pretrace":
        if not perm:
            return self
        return Pretrace(tuple(l.permute(perm) for l in self.letters), act(perm, self.tail))

    def support(self) -> frozenset[Name]:
        # support of the raw word, not of its alpha-class
        out = set(support(self.tail))
        out.update(l.name for l in self.letters)
        return frozenset(out)

    def sort_key(self):
        return (tuple((l.bound, int(l.name)) for l in self.letters), tail_key(self.tail))

    def __repr__(self) -> str:
        parts = [repr(l) for l in self.letters]
        if self.tail != UNIT or not parts:
            parts.append(repr(self.tail))
        return " ".join(parts)


def bar_string(letters: Iterable[BarLetter]) -> Pretrace:
    return Pretrace(tuple(letters), UNIT)


def word(*parts: str | int) -> Pretrace:
    """Shorthand for tests: ``word(0, '|1')`` is ``n0 |n1``."""
    out = []
    for s in parts:
        if isinstance(s, str) and s.startswith("|"):
            out.append(BarLetter(Name(int(s[1:])), True))
        else:
            out.append(BarLetter(Name(int(s))))
    return bar_string(out)


def free_names(w: Pretrace) -> frozenset[Name]:
    """FN(w), with the tail's support counted as free."""
    fn = set(support(w.tail))
    for l in reversed(w.letters):
        if l.bound:
            fn.discard(l.name)
        else:
            fn.add(l.name)
    return frozenset(fn)


def _check_lengths(w: Pretrace, v: Pretrace) -> None:
    if len(w) != len(v):
        raise IllFormedError(f"length mismatch: {len(w)} vs {len(v)}")


def alpha_eq(w: Pretrace, v: Pretrace) -> bool:
    _check_lengths(w, v)
    while w.letters:
        x, y = w.head, v.head
        if x.bound != y.bound:
            return False
        if not x.bound:
            if x.name != y.name:
                return False
            w, v = w.rest(), v.rest()
        elif x.name == y.name:
            w, v = w.rest(), v.rest()
        else:
            a, b = x.name, y.name
            rest_v = v.rest()
            if a in free_names(rest_v):
                return False
            w, v = w.rest(), rest_v.permute(swap(a, b))
    return w.tail == v.tail


def canonicalize(w: Pretrace) -> Pretrace:
    """Canonical representative of the alpha-class of ``w``.

    Scanning left to right, each binder is moved to the least name that is
    not free in the remaining suffix (keeping the binder itself allowed).
    """
    letters = list(w.letters)
    tail = w.tail
    i = 0
    while i < len(letters):
        l = letters[i]
        if l.bound:
            suffix = Pretrace(tuple(letters[i + 1:]), tail)
            c = fresh(free_names(suffix) - {l.name})
            if c != l.name:
                p = swap(l.name, c)
                letters[i] = BarLetter(c, True)
                letters[i + 1:] = [x.permute(p) for x in letters[i + 1:]]
                tail = act(p, tail)
        i += 1
    return Pretrace(tuple(letters), tail)


def ub(w: Pretrace) -> tuple[Name, ...]:
    return tuple(l.name for l in w.letters)


def is_clean(w: Pretrace) -> bool:
    bound = [l.name for l in w.letters if l.bound]
    if len(set(bound)) != len(bound):
        return False
    return not (set(bound) & free_names(w))


def d_member(u: Sequence[int], w: Pretrace, tail: Any = UNIT) -> bool:
    """Decide ``u . tail`` in ``D([w])``."""
    if len(u) != len(w):
        raise IllFormedError(f"data word of length {len(u)} against pretrace of length {len(w)}")
    for i, b in enumerate(u):
        l = w.letters[i]
        if not l.bound:
            if l.name != b:
                return False
        elif l.name != b:
            rest = Pretrace(w.letters[i + 1:], w.tail)
            if b in free_names(rest):
                return False
            rest = rest.permute(swap(l.name, b))
            w = Pretrace(w.letters[: i + 1] + rest.letters, rest.tail)
    return w.tail == tail


def n_member(u: Sequence[int], w: Pretrace, tail: Any = UNIT) -> bool:
    """Decide ``u . tail`` in ``N([w])`` (global freshness)."""
    if len(u) != len(w):
        raise IllFormedError(f"data word of length {len(u)} against pretrace of length {len(w)}")
    candidate = Pretrace(
        tuple(BarLetter(Name(b), l.bound) for b, l in zip(u, w.letters)), tail
    )
    return is_clean(candidate) and alpha_eq(candidate, w)


def _check_family(w: Pretrace, family: Iterable[Pretrace]) -> None:
    for v in family:
        if len(v) != len(w):
            raise IllFormedError(f"length mismatch: {len(w)} vs {len(v)}")


def d_leq(w: Pretrace, family: Iterable[Pretrace]) -> bool:
    """Decide ``D([w]) <= union of D([v]) for v in family``.

    Equivalently, derivability of ``w <= sum(family)`` under the local
    freshness axioms.  Each step strips one letter from ``w`` and rewrites
    the family to the residuals that can still cover it.
    """
    family = frozenset(family)
    _check_family(w, family)
    while w.letters:
        if not family:
            return False
        l = w.head
        rest = w.rest()
        nxt: set[Pretrace] = set()
        if not l.bound:
            a = l.name
            for v in family:
                h, v_rest = v.head, v.rest()
                if h.name == a:
                    nxt.add(v_rest)
                elif h.bound and a not in free_names(v_rest):
                    nxt.add(v_rest.permute(swap(a, h.name)))
            w = rest
        else:
            heads = {v.head.name for v in family}
            c = fresh(free_names(rest) | {l.name} | heads)
            for v in family:
                h, v_rest = v.head, v.rest()
                if h.bound and c not in free_names(v_rest):
                    nxt.add(v_rest.permute(swap(h.name, c)))
            w = rest.permute(swap(l.name, c))
        family = frozenset(canonicalize(v) for v in nxt)
    return w.tail in {v.tail for v in family}


def d_set_leq(left: Iterable[Pretrace], right: Iterable[Pretrace]) -> bool:
    right = frozenset(right)
    return all(d_leq(w, right) for w in left)


def d_set_eq(left: Iterable[Pretrace], right: Iterable[Pretrace]) -> bool:
    left, right = frozenset(left), frozenset(right)
    return d_set_leq(left, right) and d_set_leq(right, left)


class TraceSet:
    """A finite set of alpha-classes of pretraces of one length.

    Elements are stored as canonical representatives, so structural
    equality is equality of class sets.  Used both for trace sets of
    transition systems and for elements of the graded monad ``M_n X``.
    """

    __slots__ = ("depth", "items", "_hash")

    def __init__(self, depth: int, items: Iterable[Pretrace] = (), *, canonical: bool = False):
        items = frozenset(items) if canonical else frozenset(canonicalize(p) for p in items)
        for p in items:
            if len(p) != depth:
                raise IllFormedError(f"pretrace {p!r} does not have length {depth}")
        self.depth = depth
        self.items = items
        self._hash = None

    def permute(self, perm: Permutation) -> "TraceSet":
        if not perm:
            return self
        return TraceSet(self.depth, (p.permute(perm) for p in self.items))

    def support(self) -> frozenset[Name]:
        out: set[Name] = set()
        for p in self.items:
            out |= free_names(p)
        return frozenset(out)

    def sorted(self) -> list[Pretrace]:
        return sorted(self.items, key=Pretrace.sort_key)

    def sort_key(self):
        return (1, self.depth, tuple(p.sort_key() for p in self.sorted()))

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, p: object) -> bool:
        return isinstance(p, Pretrace) and canonicalize(p) in self.items

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TraceSet):
            return NotImplemented
        return self.depth == other.depth and self.items == other.items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.depth, self.items))
        return self._hash

    def __or__(self, other: "TraceSet") -> "TraceSet":
        if self.depth != other.depth:
            raise IllFormedError("union of trace sets of different depth")
        return TraceSet(self.depth, self.items | other.items, canonical=True)

    def __repr__(self) -> str:
        return "{" + ", ".join(map(repr, self.sorted())) + "}"

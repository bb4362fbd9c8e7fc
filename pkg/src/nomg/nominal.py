"""Names, finite permutations and the group action on supported values.

Every value the library manipulates is finitely supported.  Values opt in
to the action by providing ``permute(perm)`` and ``support()``; names,
tuples and frozensets are handled here directly, anything else is treated
as discrete (trivial action, empty support).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping


class Name(int):
    """An atom.  Names are ordered by their index."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"n{int(self)}"

    __str__ = __repr__


def fresh(avoid: Iterable[int] = ()) -> Name:
    """Least name (by index) not in ``avoid``."""
    taken = set(avoid)
    i = 0
    while i in taken:
        i += 1
    return Name(i)


def fresh_many(k: int, avoid: Iterable[int] = ()) -> list[Name]:
    taken = set(avoid)
    out = []
    for _ in range(k):
        n = fresh(taken)
        taken.add(n)
        out.append(n)
    return out


class Permutation:
    """A finite permutation of names, stored sparsely (fixed points dropped)."""

    __slots__ = ("_map", "_key")

    def __init__(self, mapping: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = dict(mapping)
        m = {Name(a): Name(b) for a, b in items.items() if a != b}
        if set(m) != set(m.values()) or len(set(m.values())) != len(m):
            raise ValueError(f"not a permutation: {items!r}")
        self._map = m
        self._key = tuple(sorted(m.items()))

    @classmethod
    def identity(cls) -> "Permutation":
        return cls()

    @classmethod
    def extending(cls, src: Iterable[int], dst: Iterable[int]) -> "Permutation":
        """Deterministic permutation sending ``src[i]`` to ``dst[i]``.

        Both sequences must be duplicate-free and of equal length.
        """
        src, dst = list(src), list(dst)
        if len(src) != len(dst) or len(set(src)) != len(src) or len(set(dst)) != len(dst):
            raise ValueError("extending() needs two duplicate-free sequences of equal length")
        m = dict(zip(src, dst))
        dom, img = set(src), set(dst)
        for x, y in zip(sorted(img - dom), sorted(dom - img)):
            m[x] = y
        return cls(m)

    def __call__(self, a: int) -> Name:
        return self._map.get(a, Name(a))

    def __matmul__(self, other: "Permutation") -> "Permutation":
        """Composition: ``(p @ q)(a) == p(q(a))``."""
        keys = set(self._map) | set(other._map)
        return Permutation({a: self(other(a)) for a in keys})

    def inverse(self) -> "Permutation":
        return Permutation({b: a for a, b in self._map.items()})

    def support(self) -> frozenset[Name]:
        return frozenset(self._map)

    def items(self):
        return self._map.items()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __bool__(self) -> bool:
        return bool(self._map)

    def __repr__(self) -> str:
        if not self._map:
            return "Permutation()"
        return "Permutation({" + ", ".join(f"{a!r}: {b!r}" for a, b in self._key) + "})"


IDENTITY = Permutation()


def swap(a: int, b: int) -> Permutation:
    """The transposition ``(a b)``; the identity when ``a == b``."""
    return Permutation({a: b, b: a}) if a != b else IDENTITY


def act(perm: Permutation, x: Any) -> Any:
    if isinstance(x, Name):
        return perm(x)
    if not perm:
        return x
    if isinstance(x, tuple):
        return tuple(act(perm, y) for y in x)
    if isinstance(x, (frozenset, set)):
        return frozenset(act(perm, y) for y in x)
    permute = getattr(x, "permute", None)
    if permute is not None:
        return permute(perm)
    return x


def support(x: Any) -> frozenset[Name]:
    """Least finite support of ``x``.

    Finite sets are taken in the uniformly supported regime: the support of
    a set is the union of the supports of its members.
    """
    if isinstance(x, Name):
        return frozenset((x,))
    if isinstance(x, (tuple, frozenset, set)):
        out: set[Name] = set()
        for y in x:
            out |= support(y)
        return frozenset(out)
    supp = getattr(x, "support", None)
    if supp is not None:
        return supp()
    return frozenset()


def fresh_for(*xs: Any) -> Name:
    avoid: set[Name] = set()
    for x in xs:
        avoid |= support(x)
    return fresh(avoid)


@dataclass(frozen=True, eq=False)
class Abstraction:
    """Name abstraction ``<binder>body``; equality is alpha-equality."""

    binder: Name
    body: Any

    def permute(self, perm: Permutation) -> "Abstraction":
        return Abstraction(perm(self.binder), act(perm, self.body))

    def support(self) -> frozenset[Name]:
        return support(self.body) - {self.binder}

    def rename(self, c: int) -> "Abstraction":
        """Alpha-rename the binder to ``c``; ``c`` must be fresh for the abstraction."""
        if c != self.binder and c in self.support():
            raise ValueError(f"{c!r} is not fresh for {self!r}")
        return Abstraction(Name(c), act(swap(self.binder, c), self.body))

    def concrete(self, c: int) -> Any:
        return self.rename(c).body

    def normal(self) -> "Abstraction":
        # binder moved to the least name fresh for the abstraction
        return self.rename(fresh(self.support()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Abstraction):
            return NotImplemented
        return abs_eq(self, other)

    def __hash__(self) -> int:
        n = self.normal()
        return hash((n.binder, n.body))

    def __repr__(self) -> str:
        return f"<{self.binder!r}>{self.body!r}"


def abs_eq(p: Abstraction, q: Abstraction) -> bool:
    if p.binder == q.binder:
        return p.body == q.body
    return q.binder not in support(p.body) and q.body == act(swap(p.binder, q.binder), p.body)


@dataclass(frozen=True, order=True)
class VarRef:
    """Element of a strong orbit-finite context: a symbol applied to distinct names."""

    symbol: str
    params: tuple[Name, ...] = ()

    def __post_init__(self):
        if len(set(self.params)) != len(self.params):
            raise ValueError(f"variable ${self.symbol} has repeated parameters")

    def permute(self, perm: Permutation) -> "VarRef":
        return VarRef(self.symbol, tuple(perm(a) for a in self.params))

    def support(self) -> frozenset[Name]:
        return frozenset(self.params)

    def sort_key(self):
        return (0, self.symbol, tuple(int(a) for a in self.params))

    def __repr__(self) -> str:
        if self.symbol == "*":
            return "$*"
        if not self.params:
            return f"${self.symbol}"
        return f"${self.symbol}(" + ",".join(map(repr, self.params)) + ")"


UNIT = VarRef("*")

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")


@dataclass
class NameTable:
    """Interns name literals to indices in first-occurrence order."""

    _by_literal: dict[str, Name] = field(default_factory=dict)
    _by_name: dict[Name, str] = field(default_factory=dict)

    def intern(self, literal: str) -> Name:
        if not _NAME_RE.match(literal):
            raise ValueError(f"bad name literal {literal!r}")
        if literal not in self._by_literal:
            n = Name(len(self._by_literal))
            self._by_literal[literal] = n
            self._by_name[n] = literal
        return self._by_literal[literal]

    def literal(self, name: int) -> str:
        known = self._by_name.get(Name(name))
        if known is not None:
            return known
        lit = f"n{int(name)}"
        while lit in self._by_literal:
            lit += "'"
        return lit

    def __contains__(self, literal: str) -> bool:
        return literal in self._by_literal

    def __len__(self) -> int:
        return len(self._by_literal)

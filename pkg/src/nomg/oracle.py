"""Bounded name-pool brute force for the freshness semantics.

Any data word witnessing a failed inclusion can be permuted, fixing the
free names of the query, into the pool ``FN(w) + FN(S) + |w|`` fresh
names: every name outside the free names comes from one binder.  These
routines therefore decide inclusion exactly; they exist as an independent
check on the symbolic procedures and to produce concrete witnesses.

Alpha-variants are generated by closing under the single-binder renaming
step ``u |a v  ~>  u |b (a b).v`` (for ``b`` not free in ``v``), which does
not go through :func:`alpha_eq` or :func:`canonicalize`.
"""
from __future__ import annotations

from collections import deque
from typing import Any, Iterable

from .barstrings import BarLetter, Pretrace, d_member, free_names, ub
from .nominal import Name, fresh_many, support, swap


def oracle_pool(w: Pretrace, family: Iterable[Pretrace] = (), extra: int = 0) -> list[Name]:
    names = set(free_names(w))
    for v in family:
        names |= free_names(v)
    return sorted(names | set(fresh_many(len(w) + extra, names)))


def alpha_variants(w: Pretrace, pool: Iterable[int]) -> set[Pretrace]:
    """All pretraces alpha-equivalent to ``w`` whose names lie in ``pool``."""
    pool = frozenset(Name(a) for a in pool)
    targets = sorted(pool | w.support())
    seen = {w}
    todo = deque([w])
    while todo:
        v = todo.popleft()
        for i, l in enumerate(v.letters):
            if not l.bound:
                continue
            suffix = Pretrace(v.letters[i + 1:], v.tail)
            blocked = free_names(suffix)
            for b in targets:
                if b == l.name or b in blocked:
                    continue
                s = suffix.permute(swap(l.name, b))
                nv = Pretrace(v.letters[:i] + (BarLetter(b, True),) + s.letters, s.tail)
                if nv not in seen:
                    seen.add(nv)
                    todo.append(nv)
    return {v for v in seen if v.support() <= pool}


def d_image(w: Pretrace, pool: Iterable[int]) -> set[tuple[tuple[Name, ...], Any]]:
    """``D([w])`` restricted to words and tails over ``pool``."""
    pool = frozenset(pool)
    return {(ub(v), v.tail) for v in alpha_variants(w, pool) if support(v.tail) <= pool}


def _sorted_image(image):
    return sorted(image, key=lambda ut: (tuple(map(int, ut[0])), repr(ut[1])))


def brute_d_leq(w: Pretrace, family: Iterable[Pretrace], extra: int = 0):
    """Return ``(verdict, witness)``; the witness is a ``(word, tail)`` pair in
    ``D(w)`` but outside every ``D(v)``, or ``None``."""
    family = list(family)
    pool = oracle_pool(w, family, extra)
    for u, tail in _sorted_image(d_image(w, pool)):
        if not any(d_member(u, v, tail) for v in family):
            return False, (u, tail)
    return True, None


def brute_d_set_leq(left: Iterable[Pretrace], right: Iterable[Pretrace], extra: int = 0):
    """Return ``(verdict, witness)`` with witness ``(w, word, tail)``."""
    right = list(right)
    for w in sorted(left, key=Pretrace.sort_key):
        ok, wit = brute_d_leq(w, right, extra)
        if not ok:
            return False, (w,) + wit
    return True, None

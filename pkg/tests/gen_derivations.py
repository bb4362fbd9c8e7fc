"""Forward generation of derivations, and single-fault mutations of them."""
from __future__ import annotations

import json
import random

from gen import rand_term
from nomg.derivation import Derivation, derivation_to_json, parse_derivation
from nomg.nominal import Name, Permutation, VarRef, fresh, swap
from nomg.terms import ABS, PLUS, PRE, App, BApp, FApp, Var, _depth_info, free_names_term, map_vars, names_term
from nomg.theory import Theory, builtin_theory

ARITIES = {"x": 0, "y": 1, "z": 2}
NAMES = 5


def theory(name: str) -> Theory:
    th = builtin_theory(name)
    for i in range(1, 10):
        th.table.intern(f"n{i}")
    return th


def term(rng: random.Random, n: int, size: int = 1):
    return rand_term(rng, n, tuple(ARITIES), size, NAMES, arities=ARITIES)


def refl_deriv(t, n: int) -> Derivation:
    """Derivation of ``t = t`` at depth ``n`` by congruence down to variables."""
    if isinstance(t, Var):
        return Derivation("refl", 0, t, t)
    m = n - t.op.depth
    return Derivation("cong", n, t, t, {}, [refl_deriv(a, m) for a in t.args])


def _ax(rng: random.Random, th: Theory, n: int) -> Derivation | None:
    axioms = [a for a in th.axioms if a.depth <= n]
    if not axioms:
        return None
    ax = rng.choice(axioms)
    l = n - ax.depth
    tau = swap(Name(0), Name(rng.randrange(NAMES))) if rng.random() < 0.5 else Permutation()
    images = {s: term(rng, l) for s in sorted(ax.schema)}
    sigma = {s: (VarRef(s), img) for s, img in images.items()}
    data = {"axiom": ax.id, "tau": tau, "sigma": sigma}
    if rng.random() < 0.5:
        data["vars"] = {s: tuple(sorted(free_names_term(img))) for s, img in images.items()}
    inst = lambda t: map_vars(t.permute(tau), lambda ref: images[ref.symbol])  # noqa: E731
    return Derivation("ax", n, inst(ax.lhs), inst(ax.rhs), data)


def _perm(rng: random.Random, th: Theory, n: int, size: int) -> Derivation | None:
    if n < 1:
        return None
    d = derive(rng, th, n - 1, size - 1)
    a = Name(rng.randrange(NAMES))
    choices = [Name(b) for b in range(NAMES + 1) if b != a and Name(b) not in free_names_term(d.rhs)]
    b = rng.choice(choices)
    u = d.rhs.permute(swap(a, b))
    return Derivation("perm", n, BApp(ABS, a, (d.lhs,)), BApp(ABS, b, (u,)), {}, [d])


def derive(rng: random.Random, th: Theory, n: int, size: int = 3) -> Derivation:
    """A random valid derivation whose conclusion has depth ``n``."""
    while True:
        kinds = ["refl", "ax"] + (["cong1", "perm", "plus", "symm", "trans"] if size > 0 else [])
        kind = rng.choice(kinds)
        if kind == "refl":
            return refl_deriv(term(rng, n), n)
        if kind == "ax":
            d = _ax(rng, th, n)
        elif kind == "perm":
            d = _perm(rng, th, n, size)
        elif kind == "cong1":
            if n < 1:
                continue
            p = derive(rng, th, n - 1, size - 1)
            a = Name(rng.randrange(NAMES))
            if rng.random() < 0.5:
                d = Derivation("cong", n, FApp(PRE, a, (p.lhs,)), FApp(PRE, a, (p.rhs,)), {}, [p])
            else:
                d = Derivation("cong", n, BApp(ABS, a, (p.lhs,)), BApp(ABS, a, (p.rhs,)), {}, [p])
        elif kind == "plus":
            p, q = derive(rng, th, n, size - 1), derive(rng, th, n, size - 1)
            d = Derivation("cong", n, App(PLUS, (p.lhs, q.lhs)), App(PLUS, (p.rhs, q.rhs)), {}, [p, q])
        elif kind == "symm":
            p = derive(rng, th, n, size - 1)
            d = Derivation("symm", n, p.rhs, p.lhs, {}, [p])
        else:
            p = derive(rng, th, n, size - 1)
            q = Derivation("symm", n, p.rhs, p.lhs, {}, [p]) if rng.random() < 0.5 else refl_deriv(p.rhs, n)
            d = Derivation("trans", n, p.lhs, q.rhs, {}, [p, q])
        if d is not None:
            return d


def wrap(rng: random.Random, d: Derivation, layers: int) -> Derivation:
    """Embed ``d`` under valid rule applications."""
    for _ in range(layers):
        kind = rng.choice(["symm", "pre", "abs", "plus", "trans"])
        n = d.depth
        if kind == "symm":
            d = Derivation("symm", n, d.rhs, d.lhs, {}, [d])
        elif kind in ("pre", "abs"):
            a = Name(rng.randrange(NAMES))
            mk = (lambda t: FApp(PRE, a, (t,))) if kind == "pre" else (lambda t: BApp(ABS, a, (t,)))
            d = Derivation("cong", n + 1, mk(d.lhs), mk(d.rhs), {}, [d])
        elif kind == "plus":
            s = term(rng, n)
            r = refl_deriv(s, n)
            d = Derivation("cong", n, App(PLUS, (d.lhs, s)), App(PLUS, (d.rhs, s)), {}, [d, r])
        else:
            d = Derivation("trans", n, d.lhs, d.rhs, {}, [d, refl_deriv(d.rhs, n)])
    return d


def nodes(d: Derivation):
    yield d
    for p in d.premises:
        yield from nodes(p)


def _exact(t) -> bool:
    info = _depth_info(t)
    return info is not None and info[1]


# mutations: each returns a derivation with exactly one broken condition

def mut_perm_same_binder(rng, th, n):
    while True:
        d = _perm(rng, th, max(n, 1), 2)
        if d is not None:
            a = d.lhs.binder
            d.rhs = BApp(ABS, a, d.rhs.args)
            return d


def mut_perm_not_fresh(rng, th, n):
    n = max(n, 1)
    while True:
        p = derive(rng, th, n - 1, 2)
        fn = sorted(free_names_term(p.rhs))
        if not fn:
            continue
        b = rng.choice(fn)
        a = rng.choice([Name(c) for c in range(NAMES) if c != b])
        u = p.rhs.permute(swap(a, b))
        return Derivation("perm", n, BApp(ABS, a, (p.lhs,)), BApp(ABS, b, (u,)), {}, [p])


def mut_depth(rng, th, n):
    while True:
        d = derive(rng, th, n, 3)
        # inner nodes only, so that wrappers built from the root depth stay valid
        exact = [x for x in list(nodes(d))[1:] if _exact(x.lhs) or _exact(x.rhs)]
        if exact:
            x = rng.choice(exact)
            x.depth += 1 if x.depth == 0 or rng.random() < 0.5 else -1
            return d


def mut_stray(rng, th, n):
    candidates = [a for a in th.axioms if a.schema]
    n = max(n, 1 + max(a.depth for a in candidates))
    while True:
        ax = rng.choice(candidates)
        l = n - ax.depth
        tau = swap(Name(0), Name(rng.randrange(NAMES))) if rng.random() < 0.5 else Permutation()
        b = Name(rng.randrange(NAMES))
        images = {s: term(rng, l) for s in sorted(ax.schema)}
        victim = rng.choice(sorted(ax.schema))
        images[victim] = FApp(PRE, b, (term(rng, l - 1),))
        img = images[victim]
        c = fresh(names_term(img) | {b})
        if th.decide(img.permute(swap(b, c)), img, l):
            continue
        vars_ = {s: tuple(sorted(free_names_term(i))) for s, i in images.items()}
        vars_[victim] = tuple(x for x in vars_[victim] if x != b)
        inst = lambda t: map_vars(t.permute(tau), lambda ref: images[ref.symbol])  # noqa: E731
        data = {"axiom": ax.id, "tau": tau, "sigma": {s: (VarRef(s), i) for s, i in images.items()}, "vars": vars_}
        return Derivation("ax", n, inst(ax.lhs), inst(ax.rhs), data)


def mut_trans_middle(rng, th, n):
    while True:
        p, q = derive(rng, th, n, 2), derive(rng, th, n, 2)
        if p.rhs != q.lhs:
            return Derivation("trans", n, p.lhs, q.rhs, {}, [p, q])


def mut_cong_op(rng, th, n):
    n = max(n, 1)
    p = derive(rng, th, n - 1, 2)
    a = Name(rng.randrange(NAMES))
    return Derivation("cong", n, FApp(PRE, a, (p.lhs,)), BApp(ABS, a, (p.rhs,)), {}, [p])


MUTATIONS = {
    "perm-same-binder": mut_perm_same_binder,
    "perm-binder-not-fresh": mut_perm_not_fresh,
    "depth-changed": mut_depth,
    "ax-stray-name": mut_stray,
    "trans-middle": mut_trans_middle,
    "cong-op-mismatch": mut_cong_op,
}


def roundtrip(d: Derivation, th: Theory) -> Derivation:
    """Serialise to JSON text and parse back."""
    return parse_derivation(json.dumps(derivation_to_json(d, th.table)), th)

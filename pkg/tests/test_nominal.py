import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import names, perms, pretraces, varrefs
from nomg.nominal import (
    IDENTITY,
    Abstraction,
    Name,
    NameTable,
    Permutation,
    VarRef,
    abs_eq,
    act,
    fresh,
    fresh_many,
    support,
    swap,
)

a, b, c, d = (Name(i) for i in range(4))


def test_swap_basics():
    assert swap(a, b)(a) == b
    assert swap(a, a)(c) == c
    assert swap(a, a) == IDENTITY
    assert swap(a, b) @ swap(a, b) == IDENTITY


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation({0: 1})
    with pytest.raises(ValueError):
        Permutation({0: 2, 1: 2, 2: 0})


def test_permutation_drops_fixed_points():
    assert Permutation({0: 0, 1: 2, 2: 1}) == swap(1, 2)
    assert swap(1, 2).support() == {1, 2}


def test_extending_maps_prefix():
    p = Permutation.extending([0, 1], [1, 3])
    assert p(0) == 1 and p(1) == 3
    assert sorted(p.support()) == [0, 1, 3]


def test_act_examples():
    assert act(swap(a, b), (a, c)) == (b, c)
    assert act(IDENTITY, (a, b)) == (a, b)
    assert act(swap(a, b), frozenset({a, b})) == frozenset({a, b})


def test_support_examples():
    assert support(a) == {a}
    assert support((a, b, c)) == {a, b, c}
    assert support(Abstraction(a, (a, b))) == {b}
    assert support("discrete") == frozenset()


def test_abs_eq_examples():
    assert Abstraction(a, a) == Abstraction(b, b)
    assert Abstraction(a, (a, b)) != Abstraction(b, (b, a))
    assert Abstraction(a, c) == Abstraction(b, c)


def test_abstraction_rename():
    p = Abstraction(a, (a, c))
    assert p.rename(b) == p
    assert p.concrete(b) == (b, c)
    with pytest.raises(ValueError):
        p.rename(c)


def test_fresh():
    assert fresh(()) == Name(0)
    assert fresh({Name(0)}) == Name(1)
    assert fresh({Name(0), Name(2)}) == Name(1)
    assert fresh_many(2, {Name(1)}) == [Name(0), Name(2)]


def test_varref_repeated_params():
    with pytest.raises(ValueError):
        VarRef("x", (a, a))


def test_name_table():
    t = NameTable()
    assert t.intern("b") == Name(0)
    assert t.intern("a") == Name(1)
    assert t.intern("b") == Name(0)
    assert t.literal(Name(1)) == "a"
    assert t.literal(Name(5)) == "n5"
    t.intern("n5")
    assert t.literal(Name(5)) == "n5'"
    with pytest.raises(ValueError):
        t.intern("1a")


values = st.one_of(
    names,
    st.tuples(names, names),
    st.frozensets(names, max_size=3),
    varrefs,
    pretraces(max_size=3),
    st.builds(Abstraction, names, st.tuples(names, names)),
)


@given(values)
def test_identity_law(x):
    assert act(IDENTITY, x) == x


@given(perms, perms, values)
def test_composition_law(p, q, x):
    assert act(p @ q, x) == act(p, act(q, x))


@given(perms, values)
def test_support_is_equivariant(p, x):
    assert support(act(p, x)) == act(p, support(x))


@given(perms)
def test_inverse(p):
    assert p @ p.inverse() == IDENTITY


abstractions = st.builds(Abstraction, names, st.tuples(names, names))


@given(abstractions, abstractions, perms)
def test_abs_eq_equivariant(p, q, pi):
    assert abs_eq(p, q) == abs_eq(act(pi, p), act(pi, q))


@given(abstractions, abstractions)
def test_abs_eq_matches_fresh_name_definition(p, q):
    k = fresh(support(p.body) | support(q.body) | {p.binder, q.binder})
    expected = act(swap(k, p.binder), p.body) == act(swap(k, q.binder), q.body)
    assert abs_eq(p, q) == expected


@given(abstractions, abstractions, abstractions)
def test_abs_eq_is_equivalence(p, q, r):
    assert abs_eq(p, p)
    assert abs_eq(p, q) == abs_eq(q, p)
    if abs_eq(p, q) and abs_eq(q, r):
        assert abs_eq(p, r)
    if abs_eq(p, q):
        assert hash(p) == hash(q)

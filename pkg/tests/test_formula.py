from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indll.formula import (
    BOT_F,
    ONE_F,
    TOP_F,
    ZERO_F,
    Bang,
    ErasureMismatch,
    IllFormed,
    LBin,
    LExp,
    LVar,
    NVar,
    Plus,
    PVar,
    Quest,
    Tensor,
    With,
    base_change,
    check_def,
    empty_formula_like,
    erase,
    intersect,
    is_defined,
    ll_negate,
    negate,
)
from indll.gen import ENV, Gen
from indll.setfun import EMPTY, ONE, SetFun, atom, compose, coproduct, cst, identity, locus, preimage

X_LOC = ENV["X"]
seeds = st.integers(0, 2**31)


def xvar(dom, **graph) -> PVar:
    return PVar(SetFun(locus(*dom), X_LOC, {atom(k): atom(v) for k, v in graph.items()}), "X")


def drawn(seed: int, depth: int = 3, max_locus: int = 3):
    g = Gen(seed, max_locus=max_locus)
    i = g.locus()
    return g, i, g.formula(i, depth)


def test_zero_and_top_only_over_empty():
    check_def(EMPTY, ZERO_F, ENV)
    with pytest.raises(IllFormed):
        check_def(locus("k"), ZERO_F, ENV)
    with pytest.raises(IllFormed):
        check_def(locus("k"), TOP_F, ENV)


def test_one_always_defined():
    for i in (EMPTY, ONE, locus("a", "b", "c")):
        check_def(i, ONE_F, ENV)
        check_def(i, BOT_F, ENV)


def test_plus_needs_orthogonal_injections():
    k = locus("a")
    bad = Plus(identity(k), identity(k), ONE_F, ONE_F)
    with pytest.raises(IllFormed):
        check_def(k, bad, ENV)
    _, i1, i2 = coproduct(locus("a"), locus("b"))
    check_def(i1.cod, Plus(i1, i2, ONE_F, ONE_F), ENV)


def test_negation_clauses():
    assert negate(ONE_F) == BOT_F
    u = SetFun(locus("p"), locus("a"), {atom("p"): atom("a")})
    a = xvar("p", p="x")
    assert negate(Bang(u, a)) == Quest(u, NVar(a.f, "X"))


def test_erase_clauses():
    u = SetFun(locus("p"), locus("a"), {atom("p"): atom("a")})
    a = xvar("p", p="x")
    assert erase(Bang(u, a)) == LExp("bang", LVar("X", True))
    _, i1, i2 = coproduct(locus("a"), EMPTY)
    assert erase(With(i1, i2, ONE_F, a)) == LBin("with", erase(ONE_F), erase(a))


def test_base_change_clauses():
    f = SetFun(locus("a", "b"), locus("k"), {atom("a"): atom("k"), atom("b"): atom("k")})
    assert base_change(f, ONE_F) == ONE_F
    a, b = xvar("k", k="x"), xvar("k", k="y")
    assert base_change(f, Tensor(a, b)) == Tensor(base_change(f, a), base_change(f, b))


def test_base_change_of_bang_restricts_to_fiber():
    i = locus("a", "b")
    u = SetFun(locus("p", "q", "r"), i, {atom("p"): atom("a"), atom("q"): atom("a"), atom("r"): atom("b")})
    body = PVar(SetFun(u.dom, X_LOC, {x: atom("x") for x in u.dom}), "X")
    for x in i:
        bc = base_change(cst(x, i), Bang(u, body))
        assert isinstance(bc, Bang) and len(bc.u.dom) == len(preimage(u, x))


def test_intersect_two_variables():
    a = PVar(cst(atom("x"), X_LOC), "X")
    k, merged = intersect([(ONE, a), (ONE, a)], ENV)
    assert len(k) == 2 and isinstance(merged, PVar)
    check_def(k, merged, ENV)


def test_intersect_singleton_is_reindexing():
    a = xvar("ab", a="x", b="y")
    k, merged = intersect([(a.f.dom, a)], ENV)
    back = base_change(SetFun(a.f.dom, k, {x: ("inl", x) for x in a.f.dom}), merged)
    assert back == a


def test_intersect_rejects_mixed_erasures():
    with pytest.raises(ErasureMismatch):
        intersect([(ONE, ONE_F), (ONE, BOT_F)])


def test_empty_formula_like_erases_back():
    g, i, a = drawn(3)
    e = empty_formula_like(erase(a), ENV)
    assert erase(e) == erase(a)
    check_def(EMPTY, e, ENV)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_negation_involutive_and_erasure_commutes(seed):
    _, i, a = drawn(seed, depth=4, max_locus=4)
    check_def(i, a, ENV)
    assert negate(negate(a)) == a
    assert erase(negate(a)) == ll_negate(erase(a))


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_base_change_preserves_definedness_and_erasure(seed):
    g, i, a = drawn(seed)
    f = g.fun(g.locus(0 if not i else 1), i) if i else g.fun(EMPTY, i)
    b = base_change(f, a)
    check_def(f.dom, b, ENV)
    assert erase(b) == erase(a)
    assert negate(b) == base_change(f, negate(a))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_point_base_change_keeps_erasure(seed):
    _, i, a = drawn(seed)
    for x in i:
        assert erase(base_change(cst(x, i), a)) == erase(a)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_base_change_not_functorial_but_erasure_agrees(seed):
    g, i, a = drawn(seed)
    if not i:
        return
    j = g.locus(1)
    f2 = g.fun(j, i)
    f1 = g.fun(g.locus(1), j)
    two = base_change(f1, base_change(f2, a))
    one = base_change(compose(f1, f2), a)
    assert erase(two) == erase(one)
    assert is_defined(f1.dom, two, ENV) and is_defined(f1.dom, one, ENV)

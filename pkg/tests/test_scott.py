from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indll.cutelim import list_cuts, reduce_at
from indll.derived import seely
from indll.formula import ONE_F, Bang, LBin, LExp, LUnit, LVar, PVar, erase
from indll.gen import ENV, Gen
from indll.proof import Ax, Cut, OneIntro
from indll.scott import (
    STAR,
    CarrierBlowup,
    NotAPreorder,
    Preorder,
    SemEnv,
    SemVar,
    UnboundVariable,
    check_bc_prop,
    check_membership,
    default_env,
    discrete,
    interp_formula,
    interp_ll,
    interp_proof,
)
from indll.setfun import ONE, UNIT, SetFun, atom, locus

seeds = st.integers(0, 2**31)
X = LVar("X")
XL = ENV["X"]


def env2() -> SemEnv:
    return default_env(ENV)


def test_units():
    env = env2()
    assert interp_ll(LUnit("1"), env).carrier == (STAR,)
    assert interp_ll(LUnit("bot"), env).carrier == (STAR,)
    assert len(interp_ll(LUnit("0"), env)) == len(interp_ll(LUnit("top"), env)) == 0


def test_bang_over_two_discrete_points():
    p = interp_ll(LExp("bang", X), env2())
    assert len(p) == 4
    x, y = atom("x"), atom("y")
    assert p.leq(frozenset(), frozenset({x}))
    assert p.leq(frozenset({x}), frozenset({x, y}))
    assert not p.leq(frozenset({x}), frozenset({y}))


def test_quest_is_dual_of_bang():
    env = env2()
    q = interp_ll(LExp("quest", LVar("X", False)), env)
    b = interp_ll(LExp("bang", X), env)
    assert q.carrier == b.carrier
    assert all(q.leq(u, v) == b.leq(v, u) for u in b.carrier for v in b.carrier)


def test_hoare_order_against_enumeration():
    chain = Preorder(["lo", "hi"], lambda a, b: (a, b) != ("hi", "lo"))
    env = SemEnv({"X": SemVar(chain, {atom("x"): "lo", atom("y"): "hi"})})
    p = interp_ll(LExp("bang", X), env)
    subsets = [frozenset(c) for k in range(3) for c in itertools.combinations(["lo", "hi"], k)]
    for u, v in itertools.product(subsets, repeat=2):
        expected = all(any(chain.leq(a, b) for b in v) for a in u)
        assert p.leq(u, v) == expected
    assert p.leq(frozenset({"lo", "hi"}), frozenset({"hi"}))


def test_products_and_sums():
    env = env2()
    t = interp_ll(LBin("tensor", X, X), env)
    s = interp_ll(LBin("with", X, LUnit("1")), env)
    assert len(t) == 4 and len(s) == 3
    assert not s.leq((1, atom("x")), (2, STAR))


def test_preorder_validation():
    with pytest.raises(NotAPreorder):
        Preorder([1, 2, 3], lambda a, b: a == b or (a, b) in {(1, 2), (2, 3)})


def test_unbound_and_blowup():
    with pytest.raises(UnboundVariable):
        interp_ll(LVar("Z"), env2())
    env = SemEnv({"X": SemVar(discrete(range(5)), {})}, cap=16)
    with pytest.raises(CarrierBlowup):
        interp_ll(LExp("bang", X), env)


def test_interp_formula_bang_collects_fibres():
    i = locus("a", "b")
    u = SetFun(locus("p", "q", "r"), i, {atom("p"): atom("a"), atom("q"): atom("a"), atom("r"): atom("b")})
    body = PVar(SetFun(u.dom, XL, {atom("p"): atom("x"), atom("q"): atom("y"), atom("r"): atom("y")}), "X")
    pts = interp_formula(Bang(u, body), env2())
    assert pts == {atom("a"): frozenset({atom("x"), atom("y")}), atom("b"): frozenset({atom("y")})}


def test_interp_formula_unit_needs_locus():
    assert interp_formula(ONE_F, env2(), ONE) == {UNIT: STAR}


def test_axiom_and_cut_semantics():
    env = env2()
    f = SetFun(locus("a"), XL, {atom("a"): atom("x")})
    r = interp_proof(Ax(f, "X"), env)
    assert r.points == {(v, v) for v in (atom("x"), atom("y"))}
    assert interp_proof(Cut(Ax(f, "X"), Ax(f, "X"), 1, 0), env) == r
    assert check_membership(Ax(f, "X"), env)
    assert interp_proof(OneIntro(ONE), env).points == {(STAR,)}


def test_seely_forward_contains_its_points():
    u = SetFun(locus("p", "q"), ONE, {atom("p"): UNIT, atom("q"): UNIT})
    v = SetFun(locus("r"), ONE, {atom("r"): UNIT})
    a = PVar(SetFun(u.dom, XL, {atom("p"): atom("x"), atom("q"): atom("y")}), "X")
    fw, bw = seely(u, v, a, ONE_F)
    env = env2()
    assert check_membership(fw, env) and check_membership(bw, env)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_base_change_is_precomposition(seed):
    g = Gen(seed)
    i = g.locus(1)
    a = g.formula(i, 3)
    f = g.fun(g.locus(0, 3), i)
    try:
        assert check_bc_prop(f, a, env2())
    except CarrierBlowup:
        pass


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_interpretations_are_preorders(seed):
    g = Gen(seed)
    a = erase(g.formula(g.locus(), 2))
    try:
        p = interp_ll(a, env2())
    except CarrierBlowup:
        return
    p.validate()


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_membership_and_invariance_under_reduction(seed):
    p = Gen(seed).cut_proof(depth=3)
    env = env2()
    try:
        r = interp_proof(p, env)
    except CarrierBlowup:
        return
    assert r.is_closed()
    assert check_membership(p, env, r)
    for c in list_cuts(p):
        assert interp_proof(reduce_at(p, c), env) == r

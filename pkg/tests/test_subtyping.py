from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indll.formula import BOT_F, ONE_F, TOP_F, Bang, PVar, With, base_change, erase
from indll.gen import ENV, Gen
from indll.setfun import EMPTY, ONE, UNIT, SetFun, atom, compose, cst, identity, init, locus
from indll.subtyping import (
    AxUnit,
    BadSideCondition,
    BangRule,
    EndpointMismatch,
    MultCong,
    add_rule,
    ax_unit,
    bang_rule,
    bc_sub,
    check_sub,
    compose_iso,
    decide_subtype,
    decompose,
    equivalent,
    is_valid,
    mult_cong,
    refl,
    trans,
)

XL = ENV["X"]
seeds = st.integers(0, 2**31)


def bag(**pts) -> Bang:
    """``!_u X`` over the one-point locus with the given points of X."""
    d = frozenset(atom(k) for k in pts)
    u = SetFun(d, ONE, {x: UNIT for x in d})
    return Bang(u, PVar(SetFun(d, XL, {atom(k): atom(v) for k, v in pts.items()}), "X"))


def test_unit_axiom():
    i = locus("a", "b")
    assert check_sub(ax_unit(i, ONE_F), ENV) == (i, ONE_F, ONE_F)
    assert isinstance(refl(ONE_F, i), AxUnit)


def test_bang_rule_with_two_to_one_surjection():
    a = bag(al="x", be="y")
    g = SetFun(locus("s", "t", "r"), a.u.dom, {atom("s"): atom("al"), atom("t"): atom("al"), atom("r"): atom("be")})
    ga = base_change(g, a.body)
    d = bang_rule(a.u, a.body, g, refl(ga, g.dom))
    assert check_sub(d, ENV) == (ONE, a, Bang(compose(g, a.u), ga))


def test_with_rule_rejects_non_orthogonal_injections():
    k = locus("a")
    lo = With(identity(k), init(k), ONE_F, TOP_F)
    hi = With(identity(k), identity(k), ONE_F, TOP_F)
    d = add_rule(lo, hi, ax_unit(k, ONE_F), ax_unit(EMPTY, TOP_F))
    with pytest.raises(BadSideCondition):
        check_sub(d, ENV)


def test_stale_endpoints_are_caught():
    d = ax_unit(ONE, ONE_F)
    object.__setattr__(d, "rhs", BOT_F)
    with pytest.raises(EndpointMismatch):
        check_sub(d, ENV)


def test_refl_of_bang_and_with_check():
    a = bag(al="x", be="y")
    d = refl(a, ONE)
    assert isinstance(d, BangRule) and check_sub(d, ENV) == (ONE, a, a)
    g = Gen(7)
    k = g.locus(1)
    i, j = g.split(k)
    w = With(i, j, g.formula(i.dom, 1), g.formula(j.dom, 1))
    assert check_sub(refl(w, k), ENV)[1:] == (w, w)


def test_trans_with_refl_keeps_endpoints():
    g = Gen(3)
    i = g.locus(1)
    d = g.up(g.formula(i, 2), i)
    t = trans(refl(d.lhs, i), d)
    assert check_sub(t, ENV) == check_sub(d, ENV)


def test_trans_of_bang_steps():
    a = bag(al="x", be="y")
    g = SetFun(locus("s", "t"), a.u.dom, {atom("s"): atom("al"), atom("t"): atom("be")})
    d1 = bang_rule(a.u, a.body, g, refl(base_change(g, a.body), g.dom))
    b = d1.rhs
    h = SetFun(locus("m"), b.u.dom, {atom("m"): atom("s")})
    d2 = bang_rule(b.u, b.body, h, refl(base_change(h, b.body), h.dom))
    loc, lhs, rhs = check_sub(trans(d1, d2), ENV)
    assert (lhs, rhs) == (a, d2.rhs)


def test_trans_of_tensor_is_componentwise():
    d = mult_cong(refl(ONE_F, ONE), refl(BOT_F, ONE))
    t = trans(d, d)
    assert isinstance(t, MultCong) and is_valid(t, ENV)


def test_bc_sub_identity_and_point():
    a = bag(al="x", be="y")
    d = refl(a, ONE)
    assert check_sub(bc_sub(identity(ONE), d), ENV)[1] == base_change(identity(ONE), a)
    assert is_valid(bc_sub(cst(UNIT, ONE), d), ENV)


def test_compose_iso_identity_case():
    a = bag(al="x")
    i = identity(ONE)
    for d in compose_iso(i, i, a):
        loc, lhs, rhs = check_sub(d, ENV)
        assert erase(lhs) == erase(rhs) == erase(a)


def test_decompose_empty_and_pointwise():
    d = decompose({}, TOP_F, TOP_F, EMPTY)
    assert check_sub(d, ENV) == (EMPTY, TOP_F, TOP_F)
    a = bag(al="x", be="y")
    pts = {UNIT: refl(base_change(cst(UNIT, ONE), a), ONE)}
    assert check_sub(decompose(pts, a, a, ONE), ENV)[1:] == (a, a)


def test_decide_examples():
    a = bag(al="x", be="x")
    assert decide_subtype(a, a, ONE) is not None
    g = SetFun(locus("s", "t"), a.u.dom, {atom("s"): atom("al"), atom("t"): atom("al")})
    b = Bang(compose(g, a.u), base_change(g, a.body))
    d = decide_subtype(a, b, ONE)
    assert isinstance(d, BangRule) and check_sub(d, ENV)[1:] == (a, b)
    assert decide_subtype(a, bag(ga="y"), ONE) is None


def test_decide_rejects_different_erasures():
    assert decide_subtype(ONE_F, BOT_F, ONE) is None


def test_bags_are_ordered_by_inclusion():
    big, small = bag(al="x", be="y"), bag(ga="x")
    assert decide_subtype(big, small, ONE) is not None
    assert decide_subtype(small, big, ONE) is None
    assert equivalent(bag(al="x", be="x"), bag(ga="x"), ONE)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_generated_derivations_check_and_erase(seed):
    g = Gen(seed)
    d = g.derivation(depth=3)
    loc, lhs, rhs = check_sub(d, ENV)
    assert erase(lhs) == erase(rhs)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_decide_is_reflexive_and_transitive(seed):
    g = Gen(seed)
    i = g.locus()
    a = g.formula(i, 3)
    d1 = g.up(a, i)
    d2 = g.up(d1.rhs, i)
    assert decide_subtype(a, a, i) is not None
    assert decide_subtype(a, d1.rhs, i) is not None
    assert decide_subtype(d1.rhs, d2.rhs, i) is not None
    d = decide_subtype(a, d2.rhs, i)
    assert d is not None and check_sub(d, ENV) == (i, a, d2.rhs)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_compose_iso_checks(seed):
    g = Gen(seed)
    k = g.locus()
    a = g.formula(k, 3)
    j = g.locus(1) if k else EMPTY
    f2 = g.fun(j, k)
    f1 = g.fun(g.locus(1) if j else EMPTY, j)
    for d in compose_iso(f1, f2, a):
        assert is_valid(d, ENV)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_decomposition_round_trip(seed):
    g = Gen(seed)
    i = g.locus(1)
    d = g.up(g.formula(i, 2), i)
    a, b = d.lhs, d.rhs
    pts = {}
    for x in i:
        c = cst(x, i)
        px = decide_subtype(base_change(c, a), base_change(c, b), ONE)
        assert px is not None
        pts[x] = px
    assert check_sub(decompose(pts, a, b, i), ENV) == (i, a, b)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_constructor_outputs_check(seed):
    g = Gen(seed)
    i = g.locus(1)
    d = g.up(g.formula(i, 2), i)
    f = g.fun(g.locus(1), i)
    assert is_valid(bc_sub(f, d), ENV)
    assert is_valid(trans(d, refl(d.rhs, i)), ENV)

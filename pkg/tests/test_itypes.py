from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indll.formula import check_def, erase
from indll.gen import all_itypes
from indll.itypes import (
    Arrow,
    ITRuleViolation,
    ITVar,
    NotRefining,
    STArrow,
    STVar,
    STWith,
    ShapeMismatch,
    WithL,
    WithR,
    bridge_signature,
    check_it_deriv,
    derive,
    embed,
    encode_term,
    indll_to_it,
    it_env,
    it_equiv,
    it_leq,
    it_to_indll,
    ll_type,
    make_ctx,
    parse_itype,
    parse_term,
    refines,
    reify,
    show_itype,
    simple_type_of,
)
from indll.proof import check_proof, erase_proof, ll_check
from lambda_corpus import CORPUS

A, B = ITVar("a"), ITVar("b")
TYPES = all_itypes(2, ("a", "b"), 2)
types = st.sampled_from(TYPES)


def test_empty_bag_is_the_largest_argument():
    assert it_leq(Arrow((), A), Arrow((A,), A))
    assert not it_leq(Arrow((A,), A), Arrow((), A))
    assert it_leq(Arrow((A,), A), Arrow((A, B), A))


def test_bags_are_sets_up_to_equivalence():
    assert it_equiv(Arrow((A, A), B), Arrow((A,), B))
    assert Arrow((B, A), A) == Arrow((A, B), A)


def test_variables_and_with():
    assert not it_leq(A, B)
    assert it_leq(WithL(Arrow((), A)), WithL(Arrow((A,), A)))
    assert not it_leq(WithL(A), WithR(A))


def test_refines_examples():
    o = STVar("a")
    assert refines(Arrow((A, A), A), STArrow(o, o))
    assert not refines(Arrow((A, B), A), STArrow(o, o))
    assert refines(WithR(B), STWith(o, STVar("b")))
    assert refines(ITVar("a@x"), o)


def test_simple_type_defaults_empty_bags():
    assert simple_type_of(Arrow((), A)) == STArrow(STVar("o"), STVar("a"))
    with pytest.raises(NotRefining):
        simple_type_of(Arrow((A, B), A))


def test_derive_and_check():
    t = parse_term(r"\x. x")
    d = derive(t, parse_itype("[a] -> a"))
    ctx, term, ty = check_it_deriv(d)
    assert term == t and ty == parse_itype("[a] -> a") and ctx == make_ctx()


def test_derive_with_context_and_failure():
    d = derive(parse_term("x"), A, make_ctx({"x": [A, B]}))
    check_it_deriv(d)
    with pytest.raises(ShapeMismatch):
        derive(parse_term("x"), B, make_ctx({"x": [A]}))


def test_check_catches_tampering():
    d = derive(parse_term("x"), A, make_ctx({"x": [A]}))
    object.__setattr__(d, "typ", B)
    with pytest.raises(ITRuleViolation):
        check_it_deriv(d)


def test_encoding_of_identity():
    t = parse_term(r"\x. x")
    p = encode_term(t, STArrow(STVar("a"), STVar("a")))
    assert ll_check(p) == (ll_type(STArrow(STVar("a"), STVar("a"))),)


def test_reify_of_arrow_is_defined():
    a = parse_itype("[a@x, a@y] -> a@x")
    f = reify(a)
    check_def(frozenset(f.right.f.dom), f, it_env([a]))
    assert it_equiv(embed(f), a)
    assert erase(f) == ll_type(simple_type_of(a))


def test_reify_rejects_non_refining():
    with pytest.raises(NotRefining):
        reify(Arrow((A, B), A))


def test_itype_printing_round_trips():
    for a in TYPES:
        assert parse_itype(show_itype(a)) == a


@settings(max_examples=200, deadline=None)
@given(types, types, types)
def test_it_leq_is_a_preorder(a, b, c):
    assert it_leq(a, a)
    if it_leq(a, b) and it_leq(b, c):
        assert it_leq(a, c)


@settings(max_examples=150, deadline=None)
@given(types)
def test_reify_embeds_back_and_erases_to_the_simple_type(a):
    f = reify(a)
    assert it_equiv(embed(f), a)
    assert erase(f) == ll_type(simple_type_of(a))


@pytest.mark.parametrize("src,ty", CORPUS, ids=[f"{s} : {t}" for s, t in CORPUS])
def test_bridge_round_trip(src, ty):
    t, a = parse_term(src), parse_itype(ty)
    d = derive(t, a)
    check_it_deriv(d)
    p = it_to_indll(d)
    check_proof(p)
    term, sty, ctx = bridge_signature(d)
    assert erase_proof(p) == encode_term(term, sty, ctx)
    assert it_equiv(embed(p.concl[-1]), a)
    back = indll_to_it(p, t)
    check_it_deriv(back)
    assert it_equiv(back.typ, a)


def test_corpus_is_large_enough():
    assert len(CORPUS) >= 10
    srcs = {s for s, _ in CORPUS}
    assert {r"\x. x", r"\x y. x", r"\p. fst p", r"\y. (\x. x) y"} <= srcs


def test_embed_order_matches_pairs_of_small_types():
    for a, b in itertools.product(TYPES[:40], repeat=2):
        try:
            sa, sb = simple_type_of(a), simple_type_of(b)
        except NotRefining:
            continue
        if sa != sb:
            continue
        fa, fb = reify(a, sa), reify(b, sb)
        assert it_leq(embed(fa), embed(fb)) == it_leq(a, b)

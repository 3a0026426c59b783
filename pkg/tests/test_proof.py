from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indll.cutelim import normalize
from indll.derived import (
    collapses_to_identity,
    distrib,
    elaborate,
    eta,
    intersect_proofs,
    seely,
    sub_to_proof,
)
from indll.formula import BOT_F, ONE_F, NVar, PVar, Quest, negate
from indll.gen import ENV, Gen
from indll.proof import (
    Ax,
    BaseChangeStep,
    Cut,
    Dereliction,
    OneIntro,
    RuleViolation,
    SubtypeStep,
    Weakening,
    canonical_sequent,
    check_proof,
    erase_proof,
    is_core,
    is_valid,
    ll_check,
)
from indll.scott import CarrierBlowup, default_env, interp_proof
from indll.setfun import ONE, SetFun, atom, compose, identity, init, locus
from indll.subtyping import ax_unit, refl

XL = ENV["X"]
seeds = st.integers(0, 2**31)


def xmap(dom, **graph) -> SetFun:
    return SetFun(locus(*dom), XL, {atom(k): atom(v) for k, v in graph.items()})


def test_axiom_conclusion():
    f = xmap("ab", a="x", b="y")
    seq = check_proof(Ax(f, "X"), ENV)
    assert seq.right == (NVar(f, "X"), PVar(f, "X")) and seq.locus == f.dom


def test_one_over_any_locus():
    for i in (frozenset(), ONE, locus("a", "b")):
        assert check_proof(OneIntro(i), ENV).right == (ONE_F,)


def test_dereliction_needs_a_section():
    i = locus("a", "b")
    u = SetFun(locus("p"), i, {atom("p"): atom("a")})
    body = PVar(xmap("p", p="x"), "X")
    f = SetFun(i, u.dom, {atom("a"): atom("p"), atom("b"): atom("p")})
    premise = Ax(compose(f, body.f), "X")
    with pytest.raises(RuleViolation) as ei:
        check_proof(Dereliction(f, Quest(u, body), premise, 1), ENV)
    assert ei.value.path == ()


def test_violation_path_points_into_the_tree():
    f = xmap("a", a="x")
    bad = Cut(Ax(f, "X"), Ax(f, "X"), 1, 1)
    with pytest.raises(RuleViolation) as ei:
        check_proof(Weakening(Quest(init(f.dom), BOT_F), bad), ENV)
    assert ei.value.path == (0,)


def test_meta_rules_erase_transparently():
    p = Ax(xmap("ab", a="x", b="y"), "X")
    assert erase_proof(SubtypeStep(refl(p.concl[1], p.locus), p, 1)) == erase_proof(p)
    g = SetFun(locus("c"), p.locus, {atom("c"): atom("a")})
    assert erase_proof(BaseChangeStep(g, p)) == erase_proof(p)


def test_sub_to_proof_of_unit_axiom():
    p = sub_to_proof(ax_unit(ONE, ONE_F))
    assert check_proof(p, ENV).right == (BOT_F, ONE_F)
    assert collapses_to_identity(p)


def test_elaborate_core_and_identity_base_change():
    p = Ax(xmap("ab", a="x", b="y"), "X")
    assert elaborate(p) == p
    q = elaborate(BaseChangeStep(identity(p.locus), p))
    assert is_core(q) and erase_proof(q) == erase_proof(p)
    assert canonical_sequent(check_proof(q, ENV) and q) == canonical_sequent(BaseChangeStep(identity(p.locus), p))


def test_seely_degenerate_and_singletons():
    e = frozenset()
    fw, bw = seely(init(ONE), init(ONE), ONE_F, ONE_F)
    assert is_valid(fw, ENV) and is_valid(bw, ENV)
    u = SetFun(locus("p"), ONE, {atom("p"): ("unit",)})
    v = SetFun(locus("q"), ONE, {atom("q"): ("unit",)})
    fw, bw = seely(u, v, PVar(xmap("p", p="x"), "X"), ONE_F)
    check_proof(fw, ENV)
    check_proof(bw, ENV)
    ll_check(erase_proof(fw))
    assert e == frozenset()


def test_distrib_degenerate_and_split():
    k = locus("a", "b")
    a = PVar(xmap("ab", a="x", b="y"), "X")
    i = SetFun(k, k, {x: x for x in k})
    for fw in distrib(a, i, init(k), ONE_F, BOT_F):
        check_proof(fw, ENV)
    i = SetFun(locus("a"), k, {atom("a"): atom("a")})
    j = SetFun(locus("b"), k, {atom("b"): atom("b")})
    fw, bw = distrib(a, i, j, ONE_F, BOT_F)
    check_proof(fw, ENV)
    check_proof(bw, ENV)
    ll_check(erase_proof(fw))
    ll_check(erase_proof(bw))
    for l, r in ((fw, bw), (bw, fw)):
        n, _ = normalize(Cut(l, r, len(l.concl) - 1, 0))
        assert collapses_to_identity(n)


def test_intersect_proofs_examples():
    r = intersect_proofs([(ONE, OneIntro(ONE)), (ONE, OneIntro(ONE))])
    assert len(check_proof(r, ENV).locus) == 2
    f1, f2 = xmap("a", a="x"), xmap("b", b="y")
    r = intersect_proofs([(f1.dom, Ax(f1, "X")), (f2.dom, Ax(f2, "X"))])
    assert isinstance(r, Ax) and check_proof(r, ENV)
    single = intersect_proofs([(f1.dom, Ax(f1, "X"))])
    assert len(single.locus) == 1 and check_proof(single, ENV)


def test_identity_recognition():
    assert collapses_to_identity(Ax(xmap("a", a="x"), "X"))
    p = Weakening(Quest(init(ONE), NVar(init(XL), "X")), OneIntro(ONE))
    assert not collapses_to_identity(p)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_generated_proofs_check_and_erase(seed):
    p = Gen(seed).proof(depth=4)
    seq = check_proof(p, ENV)
    ll = erase_proof(p)
    assert ll_check(ll) == tuple(erase_proof(p).concl)
    assert len(seq.right) == len(ll.concl)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_elaborate_removes_meta_rules(seed):
    p = Gen(seed).proof(depth=4)
    q = elaborate(p)
    assert is_core(q) and is_valid(q, ENV)
    assert erase_proof(q) == erase_proof(p)
    assert canonical_sequent(q) == canonical_sequent(p)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_sub_to_proof_is_identity_shaped(seed):
    d = Gen(seed).derivation(depth=3)
    p = sub_to_proof(d)
    assert check_proof(p, ENV).right == (negate(d.lhs), d.rhs)
    assert collapses_to_identity(p)
    ll_check(erase_proof(p))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_seely_round_trip_is_semantic_identity(seed):
    g = Gen(seed)
    i = g.locus(1)
    u = g.fun(g.locus(0, 2, "pq"), i)
    v = g.fun(g.locus(0, 2, "rs"), i)
    fw, bw = seely(u, v, g.formula(u.dom, 1), g.formula(v.dom, 1))
    env = default_env(ENV)
    for l, r in ((fw, bw), (bw, fw)):
        n, _ = normalize(Cut(l, r, 1, 0))
        ident = eta(negate(l.concl[0]), l.locus)
        try:
            assert interp_proof(n, env).points == interp_proof(ident, env).points
        except CarrierBlowup:
            pass


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_intersect_generated_families(seed):
    g = Gen(seed)
    p = g.proof(depth=3)
    fam = []
    for _ in range(g.rng.randint(1, 3)):
        j = g.locus(1) if p.locus else frozenset()
        fam.append((j, elaborate(BaseChangeStep(g.fun(j, p.locus), p))))
    r = intersect_proofs(fam)
    assert is_valid(r, ENV)
    assert erase_proof(r) == erase_proof(fam[0][1])

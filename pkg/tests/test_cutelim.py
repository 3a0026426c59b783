from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indll.cutelim import (
    NotACut,
    SequentMismatch,
    StepBudgetExceeded,
    equiv,
    list_cuts,
    ll_path,
    ll_reduce_at,
    normalize,
    parallel_reduce,
    reduce_at,
    reduce_at_named,
    vnf,
)
from indll.derived import ll_cleanup
from indll.gen import ENV, Gen
from indll.proof import (
    Ax,
    BaseChangeStep,
    BotIntro,
    Cut,
    OneIntro,
    SubtypeStep,
    canonical_sequent,
    check_proof,
    erase_proof,
)
from indll.scott import CarrierBlowup, default_env, interp_proof
from indll.setfun import ONE, SetFun, atom, locus
from indll.subtyping import refl

XL = ENV["X"]
seeds = st.integers(0, 2**31)


def ax(**graph) -> Ax:
    return Ax(SetFun(locus(*graph), XL, {atom(k): atom(v) for k, v in graph.items()}), "X")


def test_axiom_cut_reduces_to_axiom():
    a = ax(a="x", b="y")
    c = Cut(a, a, 1, 0)
    q, name = reduce_at_named(c, ())
    assert name.startswith("ax-") and q == a


def test_one_bot_key_case():
    c = Cut(OneIntro(ONE), BotIntro(OneIntro(ONE)), 0, 0)
    q, name = reduce_at_named(c, ())
    assert name == "one-bot" and q == OneIntro(ONE)


def test_reduce_at_rejects_non_cut():
    with pytest.raises(NotACut):
        reduce_at(ax(a="x"), ())


def test_normalize_trace_replays():
    p = Gen(11).cut_proof(depth=4)
    n, tr = normalize(p)
    assert tr.replay() == n == tr.final
    assert tr.to_json()["count"] == len(tr.steps)


def test_budget_is_enforced():
    p = next(q for s in range(100) if len(list_cuts(q := Gen(s).cut_proof(depth=4))) > 1)
    with pytest.raises(StepBudgetExceeded):
        normalize(p, budget=1)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        normalize(Cut(ax(a="x"), ax(a="x"), 1, 0), "sideways")


def test_vnf_drops_reflexive_subtyping():
    a = ax(a="x")
    s = SubtypeStep(refl(a.concl[1], a.locus), a, 1)
    assert vnf(s) == a and equiv(s, a)


def test_vnf_fuses_adjacent_steps():
    a = ax(a="x")
    r = refl(a.concl[1], a.locus)
    s = SubtypeStep(r, SubtypeStep(r, a, 1), 1)
    assert vnf(s) == a


def test_equiv_requires_same_sequent():
    with pytest.raises(SequentMismatch):
        equiv(ax(a="x"), OneIntro(ONE))


def test_parallel_reduce_independent_cuts():
    p = next(q for s in range(200) if len(list_cuts(q := Gen(s).cut_proof(depth=4))) > 1)
    cuts = list_cuts(p)
    q = parallel_reduce(p, cuts)
    assert canonical_sequent(check_proof(q, ENV) and q) == canonical_sequent(p)
    assert parallel_reduce(p, []) == p
    with pytest.raises(NotACut):
        parallel_reduce(ax(a="x"), [()])


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_subject_reduction_and_simulation(seed):
    p = Gen(seed).cut_proof(depth=4)
    seq = canonical_sequent(p)
    e = erase_proof(p)
    for c in list_cuts(p):
        q = reduce_at(p, c)
        check_proof(q, ENV)
        assert canonical_sequent(q) == seq
        assert erase_proof(q) == ll_reduce_at(e, ll_path(p, c))


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_normalize_terminates_cut_free(seed):
    p = Gen(seed).cut_proof(depth=5)
    n, _ = normalize(p, budget=10**5)
    assert not list_cuts(n)
    check_proof(n, ENV)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_strategies_agree_on_oracles(seed):
    p = Gen(seed).cut_proof(depth=4)
    n1, _ = normalize(p, "upper")
    n2, _ = normalize(p, "lower")
    assert canonical_sequent(n1) == canonical_sequent(n2) == canonical_sequent(p)
    assert ll_cleanup(erase_proof(n1)) == ll_cleanup(erase_proof(n2))
    env = default_env(ENV)
    try:
        assert interp_proof(n1, env) == interp_proof(n2, env)
    except CarrierBlowup:
        pass


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_base_change_respects_normal_forms(seed):
    g = Gen(seed)
    p = g.cut_proof(depth=3)
    n1, _ = normalize(p, "upper")
    n2, _ = normalize(p, "lower")
    f = g.fun(g.locus(1) if p.locus else frozenset(), p.locus)
    b1, b2 = BaseChangeStep(f, n1), BaseChangeStep(f, n2)
    assert ll_cleanup(erase_proof(b1)) == ll_cleanup(erase_proof(b2))
    env = default_env(ENV)
    try:
        assert interp_proof(b1, env) == interp_proof(b2, env)
    except CarrierBlowup:
        pass

"""Derived rules over proofs.

* :func:`push_sub` / :func:`push_bc` move one subtyping step or one base
  change through the last core rule of a proof; :func:`expose` and
  :func:`elaborate` iterate them to obtain proofs without meta-rule nodes.
* :func:`sub_to_proof` turns a subtyping derivation into a proof of
  ``A ⊢ B`` (one-sided: ``⊢ A^⊥, B``).
* :func:`seely`, :func:`distrib`, :func:`intersect_proofs` and
  :func:`collapses_to_identity`.
"""

from __future__ import annotations

from typing import Sequence

from .formula import (
    Bot,
    Formula,
    One,
    Plus,
    Quest,
    Tensor,
    With,
    Zero,
    _intersect,
    base_change,
    negate,
    ZERO_F,
)
from .proof import (
    Ax,
    BaseChangeStep,
    BotIntro,
    Contraction,
    Cut,
    Dereliction,
    Exchange,
    LAx,
    LBot,
    LDereliction,
    LExchange,
    LLProof,
    LOne,
    LPar,
    LPlus,
    LPromotion,
    LTensor,
    LTop,
    LWith,
    OneIntro,
    ParIntro,
    PlusIntro,
    Promotion,
    Proof,
    ProofError,
    SubtypeStep,
    TensorIntro,
    TopIntro,
    Weakening,
    WithIntro,
    _put,
    erase_proof,
    exchange,
    ll_cleanup,
)
from .setfun import (
    Locus,
    SetFun,
    compose,
    coproduct,
    copair,
    copair_all,
    factor,
    identity,
    invert,
    pullback,
    sum_funs,
    sum_loci,
)
from .subtyping import (
    AddRule,
    AxUnit,
    AxVar,
    BangRule,
    MultCong,
    QuestRule,
    SubDeriv,
    _pull_through,
    bc_sub,
    decide_subtype,
    refl,
    tower_iso,
    trans,
    trans_all,
)


class WrongShape(ProofError):
    pass


class SkeletonMismatch(ProofError):
    pass


def subtype_at(rho: SubDeriv, p: Proof, idx: int) -> Proof:
    """``SubtypeStep`` that is skipped when the endpoints coincide."""
    if rho.lhs == rho.rhs:
        return p
    return SubtypeStep(rho, p, idx)


def iso_at(fs, gs, p: Proof, idx: int, a: Formula) -> Proof:
    """Rewrite position ``idx`` of ``p`` from ``fs(a)`` to ``gs(a)``."""
    return subtype_at(tower_iso(fs, gs, a, p.locus), p, idx)


# ===========================================================================
# pushing meta rules one layer


def push_sub(rho: SubDeriv, idx: int, q: Proof) -> Proof:
    """Equivalent of ``SubtypeStep(rho, q, idx)`` whose last rule is core.

    ``q`` itself must end with a core rule."""
    if rho.lhs == rho.rhs:
        return q
    t = type(q)
    if t is BotIntro:
        return BotIntro(SubtypeStep(rho, q.premise, idx - 1))
    if t is TopIntro:
        return TopIntro(_put(tuple(q.ctx), idx - 1, rho.rhs))
    if t is TensorIntro:
        nl = len(q.left.concl)
        if idx == q.li:
            return TensorIntro(subtype_at(rho.left, q.left, q.li), subtype_at(rho.right, q.right, q.ri), q.li, q.ri)
        if idx < nl:
            return TensorIntro(SubtypeStep(rho, q.left, idx), q.right, q.li, q.ri)
        k = idx - nl
        return TensorIntro(q.left, SubtypeStep(rho, q.right, k if k < q.ri else k + 1), q.li, q.ri)
    if t is ParIntro:
        pre = idx if idx < q.b else idx + 1
        if pre == q.a:
            inner = subtype_at(rho.left, q.premise, q.a)
            return ParIntro(subtype_at(rho.right, inner, q.b), q.a, q.b)
        return ParIntro(SubtypeStep(rho, q.premise, pre), q.a, q.b)
    if t is WithIntro:
        if idx == q.idx:
            return _push_sub_with(rho, q)
        m = idx if idx < q.idx else idx - 1
        ctx = _put(tuple(q.ctx), m, rho.rhs)
        return WithIntro(q.i, q.j, ctx, subtype_at(bc_sub(q.i, rho), q.left, idx),
                         subtype_at(bc_sub(q.j, rho), q.right, idx), q.idx)
    if t is PlusIntro:
        if idx == q.idx:
            return _push_sub_plus(rho, q)
        return PlusIntro(q.formula, SubtypeStep(rho, q.premise, idx), q.idx, q.side)
    if t is Contraction:
        pre = idx if idx < q.b else idx + 1
        if pre == q.a:
            inner = SubtypeStep(rho, SubtypeStep(rho, q.premise, q.a), q.b)
            return Contraction(inner, q.a, q.b)
        return Contraction(SubtypeStep(rho, q.premise, pre), q.a, q.b)
    if t is Weakening:
        if idx == 0:
            return Weakening(rho.rhs, q.premise)
        return Weakening(q.formula, SubtypeStep(rho, q.premise, idx - 1))
    if t is Dereliction:
        if idx == q.idx:
            # rho : ?_{g;u} C ⊑ ?_u D from C ⊑ g(D)
            g = rho.g
            fg = compose(q.f, g)
            sigma = trans(bc_sub(q.f, rho.premise), tower_iso([q.f, g], [fg], rho.rhs.body, q.f.dom))
            return Dereliction(fg, rho.rhs, subtype_at(sigma, q.premise, q.idx), q.idx)
        return Dereliction(q.f, q.formula, SubtypeStep(rho, q.premise, idx), q.idx)
    if t is Promotion:
        if idx == q.idx:
            # rho : !_v B ⊑ !_{g;v} B' from g(B) ⊑ B'
            g, v = rho.g, q.v
            gv = compose(g, v)
            p = BaseChangeStep(g, q.premise)
            p = subtype_at(rho.premise, p, q.idx)
            for m, a in enumerate(q.ctx):
                pos = m if m < q.idx else m + 1
                p = iso_at([g, v], [gv], p, pos, a)
            return Promotion(gv, q.ctx, p, q.idx)
        m = idx if idx < q.idx else idx - 1
        ctx = _put(tuple(q.ctx), m, rho.rhs)
        return Promotion(q.v, ctx, subtype_at(bc_sub(q.v, rho), q.premise, idx), q.idx)
    if t is Cut:
        nl = len(q.left.concl) - 1
        if idx < nl:
            return Cut(SubtypeStep(rho, q.left, idx if idx < q.li else idx + 1), q.right, q.li, q.ri)
        k = idx - nl
        return Cut(q.left, SubtypeStep(rho, q.right, k if k < q.ri else k + 1), q.li, q.ri)
    if t is Exchange:
        return Exchange(q.perm, SubtypeStep(rho, q.premise, q.perm[idx]))
    raise ProofError(f"cannot push a subtyping step through {t.__name__} at position {idx}")


def _push_sub_with(rho: SubDeriv, q: WithIntro) -> Proof:
    new = rho.rhs
    prem = []
    for d, inj, inj2, sub, comp2 in ((rho.left, q.i, new.i, q.left, new.left),
                                     (rho.right, q.j, new.j, q.right, new.right)):
        _, p1, p2 = pullback(inj, inj2)
        back = invert(p2)
        p = BaseChangeStep(p1, sub)
        p = subtype_at(d, p, q.idx)
        p = BaseChangeStep(back, p)
        p = iso_at([back, p2], [], p, q.idx, comp2)
        for m, a in enumerate(q.ctx):
            pos = m if m < q.idx else m + 1
            p = iso_at([back, p1, inj], [inj2], p, pos, a)
        prem.append(p)
    return WithIntro(new.i, new.j, q.ctx, prem[0], prem[1], q.idx)


def _push_sub_plus(rho: SubDeriv, q: PlusIntro) -> Proof:
    old, new = rho.lhs, rho.rhs
    if q.side == 1:
        inj, inj2, d, comp, comp2 = old.i, new.i, rho.left, old.left, new.left
    else:
        inj, inj2, d, comp, comp2 = old.j, new.j, rho.right, old.right, new.right
    _, p1, p2 = pullback(inj, inj2)
    k = compose(invert(inj), invert(p1))
    base = inj.cod
    sigma = trans_all([
        tower_iso([invert(inj)], [k, p1], comp, base),
        bc_sub(k, d),
        tower_iso([k, p2], [invert(inj2)], comp2, base),
    ])
    return PlusIntro(new, subtype_at(sigma, q.premise, q.idx), q.idx, q.side)


def push_bc(f: SetFun, q: Proof) -> Proof:
    """Equivalent of ``BaseChangeStep(f, q)`` whose last rule is core."""
    t = type(q)
    if t is Ax:
        return Ax(compose(f, q.f), q.name)
    if t is OneIntro:
        return OneIntro(f.dom)
    if t is BotIntro:
        return BotIntro(BaseChangeStep(f, q.premise))
    if t is TopIntro:
        return TopIntro(tuple(base_change(f, a) for a in q.ctx))
    if t is TensorIntro:
        return TensorIntro(BaseChangeStep(f, q.left), BaseChangeStep(f, q.right), q.li, q.ri)
    if t is ParIntro:
        return ParIntro(BaseChangeStep(f, q.premise), q.a, q.b)
    if t is Cut:
        return Cut(BaseChangeStep(f, q.left), BaseChangeStep(f, q.right), q.li, q.ri)
    if t is Contraction:
        return Contraction(BaseChangeStep(f, q.premise), q.a, q.b)
    if t is Weakening:
        return Weakening(base_change(f, q.formula), BaseChangeStep(f, q.premise))
    if t is Exchange:
        return Exchange(q.perm, BaseChangeStep(f, q.premise))
    if t is WithIntro:
        new_ctx = tuple(base_change(f, a) for a in q.ctx)
        prem, injs = [], []
        for inj, sub in ((q.i, q.left), (q.j, q.right)):
            pl, ii, ai = pullback(f, inj)
            p = BaseChangeStep(ai, sub)
            for m, a in enumerate(q.ctx):
                pos = m if m < q.idx else m + 1
                p = iso_at([ai, inj], [ii, f], p, pos, a)
            prem.append(p)
            injs.append(ii)
        return WithIntro(injs[0], injs[1], new_ctx, prem[0], prem[1], q.idx)
    if t is PlusIntro:
        form = q.formula
        new = base_change(f, form)
        inj, comp = (form.i, form.left) if q.side == 1 else (form.j, form.right)
        _, ii, ai = pullback(f, inj)
        p = BaseChangeStep(f, q.premise)
        p = iso_at([f, invert(inj)], [invert(ii), ai], p, q.idx, comp)
        return PlusIntro(new, p, q.idx, q.side)
    if t is Dereliction:
        qf = q.formula
        u = qf.u
        _, pu, au = pullback(f, u)
        fg = compose(f, q.f)
        h = factor(identity(f.dom), fg, f, u)
        p = BaseChangeStep(f, q.premise)
        p = iso_at([f, q.f], [h, au], p, q.idx, qf.body)
        return Dereliction(h, base_change(f, qf), p, q.idx)
    if t is Promotion:
        v = q.v
        _, pv, av = pullback(f, v)
        p = BaseChangeStep(av, q.premise)
        for m, a in enumerate(q.ctx):
            pos = m if m < q.idx else m + 1
            p = iso_at([av, v], [pv, f], p, pos, a)
        return Promotion(pv, tuple(base_change(f, a) for a in q.ctx), p, q.idx)
    raise ProofError(f"cannot push a base change through {t.__name__}")


def expose(p: Proof) -> Proof:
    """An equivalent proof (same conclusion and erasure) ending in a core rule."""
    if isinstance(p, SubtypeStep):
        return push_sub(p.rho, p.idx, expose(p.premise))
    if isinstance(p, BaseChangeStep):
        return push_bc(p.f, expose(p.premise))
    return p


def elaborate(p: Proof) -> Proof:
    """Remove every ``SubtypeStep`` and ``BaseChangeStep``."""
    e = expose(p)
    kids = e.children()
    if not kids:
        return e
    return e.with_children([elaborate(c) for c in kids])


# ===========================================================================
# subtyping derivations as proofs


def sub_to_proof(rho: SubDeriv) -> Proof:
    """A proof of ``⊢_I lhs^⊥, rhs`` built from ``rho`` with core rules only."""
    a, b, locus = rho.lhs, rho.rhs, rho.locus
    if isinstance(rho, AxVar):
        ax = Ax(rho.f, rho.name)
        return ax if rho.positive else Exchange((1, 0), ax)
    if isinstance(rho, AxUnit):
        if isinstance(a, One):
            return BotIntro(OneIntro(locus))
        if isinstance(a, Bot):
            return Exchange((1, 0), BotIntro(OneIntro(locus)))
        if isinstance(a, Zero):
            return TopIntro((ZERO_F,))
        return Exchange((1, 0), TopIntro((ZERO_F,)))
    if isinstance(rho, MultCong):
        p1, p2 = sub_to_proof(rho.left), sub_to_proof(rho.right)
        if isinstance(a, Tensor):
            return ParIntro(TensorIntro(p1, p2, 1, 1), 0, 2)
        return ParIntro(TensorIntro(p1, p2, 0, 0), 1, 2)
    if isinstance(rho, AddRule):
        if isinstance(a, With):
            # & on the right; each branch selects the matching summand on the left
            neg = negate(a)
            prem = []
            for side, d, ia, ib, comp in ((1, rho.left, a.i, b.i, a.left), (2, rho.right, a.j, b.j, a.right)):
                pulled = base_change(ib, neg)
                _, q, ai = pullback(ib, ia)
                _, p1, p2 = pullback(ia, ib)
                k = factor(compose(invert(q), ai), identity(ib.dom), ia, ib)
                sigma = trans_all([
                    tower_iso([invert(q), ai], [k, p1], comp, ib.dom),
                    bc_sub(k, d),
                    tower_iso([k, p2], [], (b.left if side == 1 else b.right), ib.dom),
                ])
                prem.append(PlusIntro(pulled, sub_to_proof(sigma), 0, side))
            return WithIntro(b.i, b.j, (neg,), prem[0], prem[1], 1)
        # ⊕: & on the left formula (the negation of a)
        prem = []
        for side, d, ia, ib, comp in ((1, rho.left, a.i, b.i, a.left), (2, rho.right, a.j, b.j, a.right)):
            pulled = base_change(ia, b)
            _, p1, p2 = pullback(ia, ib)
            sigma = trans(tower_iso([], [invert(p1), p1], comp, ia.dom), bc_sub(invert(p1), d))
            prem.append(PlusIntro(pulled, sub_to_proof(sigma), 1, side))
        return WithIntro(a.i, a.j, (b,), prem[0], prem[1], 0)
    if isinstance(rho, BangRule):
        u, g = a.u, rho.g
        v = b.u
        ctx = Quest(u, negate(a.body))
        vctx = base_change(v, ctx)
        _, p1, p2 = pullback(v, u)
        f = factor(identity(v.dom), g, v, u)
        sigma = trans(tower_iso([f, p2], [g], a.body, v.dom), rho.premise)
        der = Dereliction(f, vctx, sub_to_proof(sigma), 0)
        return Promotion(v, (ctx,), der, 1)
    if isinstance(rho, QuestRule):
        u, g = b.u, rho.g
        v = a.u
        ctx = b
        vctx = base_change(v, ctx)
        _, p1, p2 = pullback(v, u)
        f = factor(identity(v.dom), g, v, u)
        sigma = trans(rho.premise, tower_iso([g], [f, p2], b.body, v.dom))
        der = Dereliction(f, vctx, sub_to_proof(sigma), 1)
        return Promotion(v, (ctx,), der, 0)
    raise ProofError(f"unknown derivation node {type(rho).__name__}")


def eta(a: Formula, locus) -> Proof:
    """The η-expanded identity proof ``⊢ a^⊥, a``."""
    return sub_to_proof(refl(a, locus))


# ===========================================================================
# Seely and distribution


def seely(u: SetFun, v: SetFun, a: Formula, b: Formula) -> tuple[Proof, Proof]:
    """Proofs of ``!_u A ⊗ !_v B ⊢ !_[u,v](A &_{ι1,ι2} B)`` and the converse."""
    w = copair(u, v)
    lsum, i1, i2 = coproduct(u.dom, v.dom)
    ca, cb = Quest(u, negate(a)), Quest(v, negate(b))
    wca, wcb = base_change(w, ca), base_change(w, cb)
    branches = []
    for inj, orig, keep, drop, body in ((i1, ca, wca, wcb, a), (i2, cb, wcb, wca, b)):
        kept = base_change(inj, keep)
        outer, conts = _pull_through([inj, w], orig.u)
        comp = compose(conts[0], conts[1])
        h = SetFun(inj.dom, outer.dom, {x: next(z for z in outer.dom if outer(z) == x and comp(z) == x)
                                        for x in inj.dom})
        core = sub_to_proof(tower_iso([h] + conts, [], body, inj.dom))
        der = Dereliction(h, kept, core, 0)
        weak = Weakening(base_change(inj, drop), der)
        order = (1, 0, 2) if inj is i1 else (0, 1, 2)
        branches.append(exchange(order, weak))
    with_ = WithIntro(i1, i2, (wca, wcb), branches[0], branches[1], 2)
    fwd = ParIntro(Promotion(w, (ca, cb), with_, 2), 0, 1)

    c = Quest(w, negate(With(i1, i2, a, b)))
    proms = []
    for f, side, body in ((u, 1, a), (v, 2, b)):
        fc = base_change(f, c)
        _, q, cc = pullback(f, w)
        inj = i1 if side == 1 else i2
        h = factor(identity(f.dom), inj, f, w)
        plus = base_change(h, fc.body)
        outer, conts = _pull_through([h, cc], inj)
        core = sub_to_proof(tower_iso([invert(plus.i if side == 1 else plus.j)] + conts, [], body, f.dom))
        pl = PlusIntro(plus, core, 0, side)
        der = Dereliction(h, fc, pl, 0)
        proms.append(Promotion(f, (c,), der, 1))
    bwd = Contraction(TensorIntro(proms[0], proms[1], 1, 1), 0, 2)
    return fwd, bwd


def distrib(a: Formula, i: SetFun, j: SetFun, b: Formula, c: Formula) -> tuple[Proof, Proof]:
    """Proofs of ``A ⊗ (B ⊕_{i,j} C) ⊢ (i(A) ⊗ B) ⊕_{i,j} (j(A) ⊗ C)`` and back."""
    src = Tensor(a, Plus(i, j, b, c))
    tgt = Plus(i, j, Tensor(base_change(i, a), b), Tensor(base_change(j, a), c))
    branches = []
    for side, inj, body in ((1, i, b), (2, j, c)):
        _, q, ai = pullback(inj, inj)
        back = invert(q)
        left = sub_to_proof(tower_iso([inj], [back, ai, inj], a, inj.dom))
        right = sub_to_proof(tower_iso([], [back, ai], body, inj.dom))
        tens = exchange((0, 2, 1), TensorIntro(left, right, 1, 1))
        branches.append(PlusIntro(base_change(inj, tgt), tens, 2, side))
    fwd = ParIntro(WithIntro(i, j, (negate(a), tgt), branches[0], branches[1], 1), 0, 1)

    branches = []
    for side, inj, body in ((1, i, b), (2, j, c)):
        ia = base_change(inj, a)
        plus = base_change(inj, Plus(i, j, b, c))
        _, q, ai = pullback(inj, inj)
        pl = PlusIntro(plus, sub_to_proof(tower_iso([], [invert(q), ai], body, inj.dom)), 1, side)
        tens = TensorIntro(eta(ia, inj.dom), pl, 1, 1)
        branches.append(ParIntro(tens, 0, 2))
    bwd = WithIntro(i, j, (src,), branches[0], branches[1], 0)
    return fwd, bwd


# ===========================================================================
# intersection of proofs with a common skeleton


def coerce(p: Proof, target: Sequence[Formula]) -> Proof:
    """Rewrite mismatching positions of ``p`` to ``target`` by subtyping steps."""
    for k, (have, want) in enumerate(zip(p.concl, target)):
        if have != want:
            d = decide_subtype(have, want, p.locus)
            if d is None:
                raise SkeletonMismatch(f"position {k}: no subtyping to the intersected formula")
            p = SubtypeStep(d, p, k)
    return p


def intersect_proofs(family: Sequence[tuple[Locus, Proof]]) -> Proof:
    """Merge proofs with equal erasures into one over the sum of their loci."""
    family = list(family)
    if not family:
        raise SkeletonMismatch("empty family")
    e = erase_proof(family[0][1])
    for _, p in family[1:]:
        if erase_proof(p) != e:
            raise SkeletonMismatch("proofs do not share a skeleton")
    return _meet([p for _, p in family])


def _mf(forms: Sequence[Formula], loci) -> Formula:
    return _intersect(list(forms), list(loci), None)


def _meet(ps: list[Proof]) -> Proof:
    head = ps[0]
    t = type(head)
    if any(type(p) is not t for p in ps):
        raise SkeletonMismatch("different rules at the same position")
    loci = [p.locus for p in ps]
    k, _ = sum_loci(loci)
    kid = lambda n: _meet([p.children()[n] for p in ps])
    if t is Ax:
        return Ax(copair_all([p.f for p in ps], head.f.cod), head.name)
    if t is OneIntro:
        return OneIntro(k)
    if t is TopIntro:
        return TopIntro(tuple(_mf([p.ctx[m] for p in ps], loci) for m in range(len(head.ctx))))
    if t in (BotIntro, TensorIntro, ParIntro, Contraction, Exchange, Cut):
        return head.with_children([kid(n) for n in range(len(head.children()))])
    if t is Weakening:
        return Weakening(_mf([p.formula for p in ps], loci), kid(0))
    if t is WithIntro:
        si, sj = sum_funs([p.i for p in ps]), sum_funs([p.j for p in ps])
        ctx = tuple(_mf([p.ctx[m] for p in ps], loci) for m in range(len(head.ctx)))
        prem = []
        for n, inj in ((0, si), (1, sj)):
            sub = kid(n)
            target = list(sub.concl)
            for m, a in enumerate(ctx):
                target[m if m < head.idx else m + 1] = base_change(inj, a)
            prem.append(coerce(sub, target))
        return WithIntro(si, sj, ctx, prem[0], prem[1], head.idx)
    if t is PlusIntro:
        form = _mf([p.formula for p in ps], loci)
        sub = kid(0)
        inj, comp = (form.i, form.left) if head.side == 1 else (form.j, form.right)
        target = _put(sub.concl, head.idx, base_change(invert(inj), comp))
        return PlusIntro(form, coerce(sub, target), head.idx, head.side)
    if t is Dereliction:
        form = _mf([p.formula for p in ps], loci)
        f = sum_funs([p.f for p in ps])
        sub = kid(0)
        target = _put(sub.concl, head.idx, base_change(f, form.body))
        return Dereliction(f, form, coerce(sub, target), head.idx)
    if t is Promotion:
        v = sum_funs([p.v for p in ps])
        ctx = tuple(_mf([p.ctx[m] for p in ps], loci) for m in range(len(head.ctx)))
        sub = kid(0)
        target = list(sub.concl)
        for m, a in enumerate(ctx):
            target[m if m < head.idx else m + 1] = base_change(v, a)
        return Promotion(v, ctx, coerce(sub, target), head.idx)
    if t is SubtypeStep:
        sub = kid(0)
        want = _mf([p.rho.rhs for p in ps], loci)
        return coerce(sub, _put(sub.concl, head.idx, want))
    if t is BaseChangeStep:
        f = sum_funs([p.f for p in ps])
        sub = BaseChangeStep(f, kid(0))
        target = [_mf([p.concl[m] for p in ps], loci) for m in range(len(head.concl))]
        return coerce(sub, target)
    raise SkeletonMismatch(f"unknown rule {t.__name__}")


# ===========================================================================
# identity recognition


def collapses_to_identity(p: Proof) -> bool:
    """Is the erasure of ``p`` (a proof of ``⊢ A^⊥, A'``) an η-expanded identity?

    The check is insensitive to the order in which rules are applied: it
    tracks, for every formula occurrence, its address in one of the two
    conclusion formulae and requires axioms, units and ⊤ to link matching
    addresses of opposite sides.  Weakening, contraction and cuts make the
    answer false."""
    if len(p.concl) != 2:
        raise WrongShape("identity check needs a conclusion with exactly two formulae")
    q = ll_cleanup(erase_proof(p))
    return _is_id(q, ((0, ()), (1, ())), frozenset())


def ll_collapses_to_identity(q: LLProof) -> bool:
    if len(q.concl) != 2:
        raise WrongShape("identity check needs a conclusion with exactly two formulae")
    return _is_id(ll_cleanup(q), ((0, ()), (1, ())), frozenset())


def _partner(addr):
    return (1 - addr[0], addr[1])


def _is_id(q: LLProof, addrs: tuple, bots: frozenset) -> bool:
    t = type(q)
    ext = lambda a, s: (a[0], a[1] + (s,))
    if t is LAx:
        return addrs[0] == _partner(addrs[1])
    if t is LOne:
        return _partner(addrs[0]) in bots
    if t is LBot:
        return _is_id(q.premise, addrs[1:], bots | {addrs[0]})
    if t is LTop:
        return len(addrs) == 2 and addrs[1] == _partner(addrs[0])
    if t is LExchange:
        pre = [None] * len(addrs)
        for k, src in enumerate(q.perm):
            pre[src] = addrs[k]
        return _is_id(q.premise, tuple(pre), bots)
    if t is LPar:
        head = addrs[q.a if q.a < q.b else q.a - 1]
        pre = []
        for m in range(len(q.premise.concl)):
            if m == q.a:
                pre.append(ext(head, 0))
            elif m == q.b:
                pre.append(ext(head, 1))
            else:
                pre.append(addrs[m if m < q.b else m - 1])
        return _is_id(q.premise, tuple(pre), bots)
    if t is LTensor:
        nl = len(q.left.concl)
        head = addrs[q.li]
        left = tuple(ext(head, 0) if m == q.li else addrs[m] for m in range(nl))
        right = []
        for m in range(len(q.right.concl)):
            right.append(ext(head, 1) if m == q.ri else addrs[nl + (m if m < q.ri else m - 1)])
        return _is_id(q.left, left, bots) and _is_id(q.right, tuple(right), bots)
    if t is LWith:
        l = tuple(ext(a, 0) if m == q.idx else a for m, a in enumerate(addrs))
        r = tuple(ext(a, 1) if m == q.idx else a for m, a in enumerate(addrs))
        return _is_id(q.left, l, bots) and _is_id(q.right, r, bots)
    if t is LPlus:
        pre = tuple(ext(a, q.side - 1) if m == q.idx else a for m, a in enumerate(addrs))
        return _is_id(q.premise, pre, bots)
    if t in (LDereliction, LPromotion):
        pre = tuple(ext(a, 0) if m == q.idx else a for m, a in enumerate(addrs))
        return _is_id(q.premise, pre, bots)
    return False

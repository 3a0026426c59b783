"""Cut elimination.

:func:`reduce_at` eliminates one designated cut by a single rewrite step
(key case, commutation or axiom case).  :func:`ll_reduce_at` is an
independent implementation of the same step on plain LL proofs; the two
are related by erasure, which is what the simulation tests check.

Before the case analysis both premises are *exposed*: meta-rule nodes on
top of a premise are pushed upwards until a core rule appears, and leading
exchanges are absorbed into the cut indices.  Neither operation changes the
erased proof, so decisions made on the exposed IndLL premises coincide with
decisions made on the erased LL premises.

Strategies for :func:`normalize`: ``upper`` reduces the first cut (in
preorder) with no cut above it; ``lower`` reduces the first cut in preorder
whose premises are not themselves cuts.  Commuting a cut into another cut
is only done on explicit request through :func:`reduce_at`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .derived import expose, iso_at
from .formula import negate
from .proof import (
    META_RULES,
    Ax,
    BaseChangeStep,
    BotIntro,
    Contraction,
    Cut,
    Dereliction,
    Exchange,
    LAx,
    LBot,
    LContraction,
    LCut,
    LDereliction,
    LExchange,
    LLProof,
    LOne,
    LPar,
    LPlus,
    LPromotion,
    LTensor,
    LTop,
    LWeakening,
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
    canonical_sequent,
    exchange,
    ll_exchange,
    move_to_front,
    replace_at,
    subproof,
)
from .setfun import invert
from .subtyping import decide_subtype


class CutElimError(ProofError):
    pass


class NotACut(CutElimError):
    pass


class Irreducible(CutElimError):
    pass


class StepBudgetExceeded(CutElimError):
    pass


class SequentMismatch(CutElimError):
    pass


DEFAULT_BUDGET = 10**5


# ===========================================================================
# index arithmetic shared by both reducers


def _blocks(sizes: Sequence[int], order: Sequence[int]) -> tuple:
    """Permutation listing the blocks of ``sizes`` in ``order``."""
    starts, s = [], 0
    for n in sizes:
        starts.append(s)
        s += n
    return tuple(starts[b] + k for b in order for k in range(sizes[b]))


def _after_drop(k: int, dropped: int) -> int:
    return k if k < dropped else k - 1


def _before_drop(k: int, dropped: int) -> int:
    return k if k < dropped else k + 1


def _strip_perm(perm: Sequence[int], li: int, n_rest: int) -> tuple:
    """Exchange restoring ``(p[perm[k]] for k != li) + rest`` from ``p \\ perm[li] + rest``."""
    src = perm[li]
    head = tuple(_after_drop(perm[k], src) for k in range(len(perm)) if k != li)
    n = len(perm) - 1
    return head + tuple(range(n, n + n_rest))


def _principal(rule: str, p) -> int | None:
    """Position of the principal formula of the last rule (None for cuts)."""
    if rule in ("one", "bot", "top", "weakening"):
        return 0
    if rule == "tensor":
        return p.li
    if rule in ("par", "contraction"):
        return _after_drop(p.a, p.b)
    if rule in ("with", "plus", "dereliction", "promotion"):
        return p.idx
    return None


# ===========================================================================
# IndLL


def _expose_head(p: Proof) -> tuple[tuple | None, Proof]:
    """Strip meta rules and exchanges; returns ``(perm, core)`` with
    ``p.concl[k] == core.concl[perm[k]]`` (``perm`` None when identity)."""
    perm = None
    while True:
        if isinstance(p, META_RULES):
            p = expose(p)
            continue
        if isinstance(p, Exchange):
            perm = p.perm if perm is None else tuple(p.perm[k] for k in perm)
            p = p.premise
            continue
        return perm, p


def _swap(cut_fn, l, r, li, ri):
    out = cut_fn(r, l, ri, li)
    nl, nr = len(l.concl) - 1, len(r.concl) - 1
    return exchange(_blocks([nr, nl], [1, 0]), out)


def reduce_cut(c: Cut) -> tuple[Proof, str]:
    """One elimination step on the cut ``c``; returns the reduct and the case name."""
    if not isinstance(c, Cut):
        raise NotACut(f"{c.rule} is not a cut")
    return _reduce(c.left, c.right, c.li, c.ri)


def _reduce(l: Proof, r: Proof, li: int, ri: int) -> tuple[Proof, str]:
    pl, l = _expose_head(l)
    pr, r = _expose_head(r)
    if pl is not None or pr is not None:
        nl, nr = len(l.concl), len(r.concl)
        li2 = pl[li] if pl is not None else li
        ri2 = pr[ri] if pr is not None else ri
        out, name = _reduce_core(l, r, li2, ri2)
        left_fix = _strip_perm(pl, li, 0)[: nl - 1] if pl is not None else tuple(range(nl - 1))
        right_fix = (_strip_perm(pr, ri, 0)[: nr - 1] if pr is not None else tuple(range(nr - 1)))
        perm = left_fix + tuple(nl - 1 + k for k in right_fix)
        return exchange(perm, out), name
    return _reduce_core(l, r, li, ri)


def _reduce_core(l: Proof, r: Proof, li: int, ri: int) -> tuple[Proof, str]:
    if isinstance(l, Ax):
        return exchange(move_to_front(len(r.concl), ri), r), "ax-left"
    if isinstance(r, Ax):
        n = len(l.concl)
        return exchange(tuple(k for k in range(n) if k != li) + (li,), l), "ax-right"
    lp = _principal(l.rule, l) == li
    rp = _principal(r.rule, r) == ri
    if lp and rp:
        return _key(l, r, li, ri)
    if not lp and not isinstance(l, Promotion):
        return _commute_left(l, r, li, ri), "commute-" + l.rule
    if not rp and not isinstance(r, Promotion):
        out = _swap(lambda a, b, i, j: _commute_left(a, b, i, j), l, r, li, ri)
        return out, "commute-" + r.rule
    if not rp:
        return _promo_promo(l, r, li, ri), "promotion-promotion"
    if not lp:
        return _swap(_promo_promo, l, r, li, ri), "promotion-promotion"
    raise Irreducible("no reduction applies")


def _key(l, r, li, ri) -> tuple[Proof, str]:
    tl, tr = type(l), type(r)
    flip = {BotIntro: OneIntro, ParIntro: TensorIntro, PlusIntro: WithIntro,
            Dereliction: Promotion, Weakening: Promotion, Contraction: Promotion}
    if tl in flip and tr is flip[tl]:
        out, name = _key(r, l, ri, li)
        return exchange(_blocks([len(r.concl) - 1, len(l.concl) - 1], [1, 0]), out), name
    if tl is OneIntro and tr is BotIntro:
        return r.premise, "one-bot"
    if tl is TensorIntro and tr is ParIntro:
        p = r.premise
        x, y = (r.a, r.b)
        inner = Cut(l.right, p, l.ri, y)
        pos = len(l.right.concl) - 1 + _after_drop(x, y)
        return Cut(l.left, inner, l.li, pos), "tensor-par"
    if tl is WithIntro and tr is PlusIntro:
        side = r.side
        inj = l.i if side == 1 else l.j
        prem = l.left if side == 1 else l.right
        back = invert(inj)
        q = BaseChangeStep(back, prem)
        for m, a in enumerate(l.ctx):
            q = iso_at([back, inj], [], q, _before_drop(m, l.idx), a)
        return Cut(q, r.premise, l.idx, ri), "with-plus"
    if tl is Promotion:
        if tr is Dereliction:
            f = r.f
            q = BaseChangeStep(f, l.premise)
            for m, a in enumerate(l.ctx):
                q = iso_at([f, l.v], [], q, m if m < l.idx else m + 1, a)
            return Cut(q, r.premise, l.idx, ri), "promotion-dereliction"
        if tr is Weakening:
            q = r.premise
            for a in reversed(l.ctx):
                q = Weakening(a, q)
            return q, "promotion-weakening"
        if tr is Contraction:
            q = r.premise
            a, b = r.a, r.b
            c1 = Cut(l, q, li, a)
            pos = len(l.concl) - 1 + _after_drop(b, a)
            c2 = Cut(l, c1, li, pos)
            n = len(l.ctx)
            out = c2
            for m in range(n):
                out = Contraction(out, m, n)
            return out, "promotion-contraction"
    raise Irreducible(f"no key case for {l.rule} against {r.rule}")


def _promo_promo(l: Promotion, r: Promotion, li: int, ri: int) -> Proof:
    """``l`` promotes the cut formula; it sits in the context of ``r``."""
    w = r.v
    inner = Cut(BaseChangeStep(w, l), r.premise, li, ri)
    m = _after_drop(ri, r.idx)
    ctx = tuple(l.ctx) + tuple(r.ctx[:m]) + tuple(r.ctx[m + 1:])
    k = len(l.ctx) + _after_drop(r.idx, ri)
    return Promotion(w, ctx, inner, k)


def _commute_left(l: Proof, r: Proof, li: int, ri: int) -> Proof:
    """Move the cut above the last rule of ``l`` (cut formula not principal)."""
    t = type(l)
    nr = len(r.concl) - 1
    if t is BotIntro:
        return BotIntro(Cut(l.premise, r, li - 1, ri))
    if t is TopIntro:
        ctx = tuple(l.ctx)
        return TopIntro(ctx[: li - 1] + ctx[li:] + tuple(r.concl[:ri]) + tuple(r.concl[ri + 1:]))
    if t is TensorIntro:
        n1 = len(l.left.concl)
        n2 = len(l.right.concl) - 1
        if li < n1:
            inner = Cut(l.left, r, li, ri)
            out = TensorIntro(inner, l.right, _after_drop(l.li, li), l.ri)
            return exchange(_blocks([n1 - 1, nr, n2], [0, 2, 1]), out)
        pos = _before_drop(li - n1, l.ri)
        inner = Cut(l.right, r, pos, ri)
        return TensorIntro(l.left, inner, l.li, _after_drop(l.ri, pos))
    if t is ParIntro:
        pre = _before_drop(li, l.b)
        inner = Cut(l.premise, r, pre, ri)
        return ParIntro(inner, _after_drop(l.a, pre), _after_drop(l.b, pre))
    if t is Contraction:
        pre = _before_drop(li, l.b)
        inner = Cut(l.premise, r, pre, ri)
        return Contraction(inner, _after_drop(l.a, pre), _after_drop(l.b, pre))
    if t is WithIntro:
        m = _after_drop(li, l.idx)
        rest = tuple(r.concl[:ri]) + tuple(r.concl[ri + 1:])
        ctx = tuple(l.ctx[:m]) + tuple(l.ctx[m + 1:]) + rest
        left = Cut(l.left, BaseChangeStep(l.i, r), li, ri)
        right = Cut(l.right, BaseChangeStep(l.j, r), li, ri)
        return WithIntro(l.i, l.j, ctx, left, right, _after_drop(l.idx, li))
    if t is PlusIntro:
        return PlusIntro(l.formula, Cut(l.premise, r, li, ri), _after_drop(l.idx, li), l.side)
    if t is Weakening:
        return Weakening(l.formula, Cut(l.premise, r, li - 1, ri))
    if t is Dereliction:
        return Dereliction(l.f, l.formula, Cut(l.premise, r, li, ri), _after_drop(l.idx, li))
    if t is Cut:
        n1 = len(l.left.concl) - 1
        n2 = len(l.right.concl) - 1
        if li < n1:
            pos = _before_drop(li, l.li)
            inner = Cut(l.left, r, pos, ri)
            out = Cut(inner, l.right, _after_drop(l.li, pos), l.ri)
            return exchange(_blocks([n1 - 1, nr, n2], [0, 2, 1]), out)
        pos = _before_drop(li - n1, l.ri)
        inner = Cut(l.right, r, pos, ri)
        return Cut(l.left, inner, l.li, _after_drop(l.ri, pos))
    raise Irreducible(f"cannot commute a cut above {l.rule}")


# ===========================================================================
# Plain LL mirror


def _ll_strip(p: LLProof) -> tuple[tuple | None, LLProof]:
    perm = None
    while isinstance(p, LExchange):
        perm = p.perm if perm is None else tuple(p.perm[k] for k in perm)
        p = p.premise
    return perm, p


def ll_reduce_cut(c: LCut) -> tuple[LLProof, str]:
    if not isinstance(c, LCut):
        raise NotACut(f"{c.rule} is not a cut")
    l, r, li, ri = c.left, c.right, c.li, c.ri
    pl, l = _ll_strip(l)
    pr, r = _ll_strip(r)
    if pl is not None or pr is not None:
        nl, nr = len(l.concl), len(r.concl)
        out, name = _ll_core(l, r, pl[li] if pl is not None else li, pr[ri] if pr is not None else ri)
        left_fix = _strip_perm(pl, li, 0)[: nl - 1] if pl is not None else tuple(range(nl - 1))
        right_fix = _strip_perm(pr, ri, 0)[: nr - 1] if pr is not None else tuple(range(nr - 1))
        return ll_exchange(left_fix + tuple(nl - 1 + k for k in right_fix), out), name
    return _ll_core(l, r, li, ri)


def _ll_swap(fn, l, r, li, ri):
    out = fn(r, l, ri, li)
    return ll_exchange(_blocks([len(r.concl) - 1, len(l.concl) - 1], [1, 0]), out)


def _ll_core(l, r, li, ri):
    if isinstance(l, LAx):
        return ll_exchange(move_to_front(len(r.concl), ri), r), "ax-left"
    if isinstance(r, LAx):
        n = len(l.concl)
        return ll_exchange(tuple(k for k in range(n) if k != li) + (li,), l), "ax-right"
    lp = _principal(l.rule, l) == li
    rp = _principal(r.rule, r) == ri
    if lp and rp:
        return _ll_key(l, r, li, ri)
    if not lp and not isinstance(l, LPromotion):
        return _ll_commute(l, r, li, ri), "commute-" + l.rule
    if not rp and not isinstance(r, LPromotion):
        return _ll_swap(_ll_commute, l, r, li, ri), "commute-" + r.rule
    if not rp:
        return _ll_promo_promo(l, r, li, ri), "promotion-promotion"
    if not lp:
        return _ll_swap(_ll_promo_promo, l, r, li, ri), "promotion-promotion"
    raise Irreducible("no reduction applies")


def _ll_key(l, r, li, ri):
    flip = {LBot: LOne, LPar: LTensor, LPlus: LWith, LDereliction: LPromotion,
            LWeakening: LPromotion, LContraction: LPromotion}
    tl, tr = type(l), type(r)
    if tl in flip and tr is flip[tl]:
        out, name = _ll_key(r, l, ri, li)
        return ll_exchange(_blocks([len(r.concl) - 1, len(l.concl) - 1], [1, 0]), out), name
    if tl is LOne and tr is LBot:
        return r.premise, "one-bot"
    if tl is LTensor and tr is LPar:
        inner = LCut(l.right, r.premise, l.ri, r.b)
        return LCut(l.left, inner, l.li, len(l.right.concl) - 1 + _after_drop(r.a, r.b)), "tensor-par"
    if tl is LWith and tr is LPlus:
        prem = l.left if r.side == 1 else l.right
        return LCut(prem, r.premise, l.idx, ri), "with-plus"
    if tl is LPromotion:
        if tr is LDereliction:
            return LCut(l.premise, r.premise, l.idx, ri), "promotion-dereliction"
        if tr is LWeakening:
            q = r.premise
            ctx = [a for k, a in enumerate(l.concl) if k != l.idx]
            for a in reversed(ctx):
                q = LWeakening(a, q)
            return q, "promotion-weakening"
        if tr is LContraction:
            c1 = LCut(l, r.premise, li, r.a)
            c2 = LCut(l, c1, li, len(l.concl) - 1 + _after_drop(r.b, r.a))
            n = len(l.concl) - 1
            out = c2
            for m in range(n):
                out = LContraction(out, m, n)
            return out, "promotion-contraction"
    raise Irreducible(f"no key case for {l.rule} against {r.rule}")


def _ll_promo_promo(l, r, li, ri):
    inner = LCut(l, r.premise, li, ri)
    return LPromotion(inner, len(l.concl) - 1 + _after_drop(r.idx, ri))


def _ll_commute(l, r, li, ri):
    t = type(l)
    nr = len(r.concl) - 1
    rest = tuple(r.concl[:ri]) + tuple(r.concl[ri + 1:])
    if t is LBot:
        return LBot(LCut(l.premise, r, li - 1, ri))
    if t is LTop:
        ctx = tuple(l.ctx)
        return LTop(ctx[: li - 1] + ctx[li:] + rest)
    if t is LTensor:
        n1 = len(l.left.concl)
        n2 = len(l.right.concl) - 1
        if li < n1:
            out = LTensor(LCut(l.left, r, li, ri), l.right, _after_drop(l.li, li), l.ri)
            return ll_exchange(_blocks([n1 - 1, nr, n2], [0, 2, 1]), out)
        pos = _before_drop(li - n1, l.ri)
        return LTensor(l.left, LCut(l.right, r, pos, ri), l.li, _after_drop(l.ri, pos))
    if t in (LPar, LContraction):
        pre = _before_drop(li, l.b)
        return t(LCut(l.premise, r, pre, ri), _after_drop(l.a, pre), _after_drop(l.b, pre))
    if t is LWith:
        return LWith(LCut(l.left, r, li, ri), LCut(l.right, r, li, ri), _after_drop(l.idx, li))
    if t is LPlus:
        return LPlus(l.formula, LCut(l.premise, r, li, ri), _after_drop(l.idx, li), l.side)
    if t is LWeakening:
        return LWeakening(l.formula, LCut(l.premise, r, li - 1, ri))
    if t is LDereliction:
        return LDereliction(LCut(l.premise, r, li, ri), _after_drop(l.idx, li))
    if t is LCut:
        n1 = len(l.left.concl) - 1
        n2 = len(l.right.concl) - 1
        if li < n1:
            pos = _before_drop(li, l.li)
            out = LCut(LCut(l.left, r, pos, ri), l.right, _after_drop(l.li, pos), l.ri)
            return ll_exchange(_blocks([n1 - 1, nr, n2], [0, 2, 1]), out)
        pos = _before_drop(li - n1, l.ri)
        return LCut(l.left, LCut(l.right, r, pos, ri), l.li, _after_drop(l.ri, pos))
    raise Irreducible(f"cannot commute a cut above {l.rule}")


def ll_list_cuts(p: LLProof, _path: tuple = ()) -> list[tuple]:
    out = [_path] if isinstance(p, LCut) else []
    for k, c in enumerate(p.children()):
        out.extend(ll_list_cuts(c, _path + (k,)))
    return out


def ll_subproof(p: LLProof, path: Sequence[int]) -> LLProof:
    for k in path:
        p = p.children()[k]
    return p


def ll_replace_at(p: LLProof, path: Sequence[int], new: LLProof) -> LLProof:
    if not path:
        return new
    kids = list(p.children())
    kids[path[0]] = ll_replace_at(kids[path[0]], path[1:], new)
    return p.with_children(kids)


def ll_reduce_at(p: LLProof, path: Sequence[int]) -> LLProof:
    node = ll_subproof(p, path)
    out, _ = ll_reduce_cut(node)
    return ll_replace_at(p, tuple(path), out)


# ===========================================================================
# pointed reduction on proofs


def list_cuts(p: Proof, _path: tuple = ()) -> list[tuple]:
    """Paths of all cuts in preorder."""
    out = [_path] if isinstance(p, Cut) else []
    for k, c in enumerate(p.children()):
        out.extend(list_cuts(c, _path + (k,)))
    return out


def ll_path(p: Proof, path: Sequence[int]) -> tuple:
    """The path of the same node in ``erase_proof(p)`` (meta nodes vanish)."""
    out = []
    for k in path:
        if not isinstance(p, META_RULES):
            out.append(k)
        p = p.children()[k]
    return tuple(out)


def reduce_at(p: Proof, path: Sequence[int]) -> Proof:
    return reduce_at_named(p, path)[0]


def reduce_at_named(p: Proof, path: Sequence[int]) -> tuple[Proof, str]:
    path = tuple(path)
    try:
        node = subproof(p, path)
    except (IndexError, AttributeError):
        raise NotACut(f"no node at {list(path)}") from None
    if not isinstance(node, Cut):
        raise NotACut(f"node at {list(path)} is {node.rule}, not a cut")
    out, name = reduce_cut(node)
    return replace_at(p, path, out), name


def _head_is_cut(p: Proof) -> bool:
    while isinstance(p, META_RULES + (Exchange,)):
        p = p.premise
    return isinstance(p, Cut)


def _has_cut(p: Proof) -> bool:
    return isinstance(p, Cut) or any(_has_cut(c) for c in p.children())


def pick_cut(p: Proof, strategy: str = "upper") -> tuple | None:
    if strategy == "upper":
        for c in list_cuts(p):
            node = subproof(p, c)
            if not any(_has_cut(k) for k in node.children()):
                return c
        return None
    if strategy == "lower":
        for c in list_cuts(p):
            node = subproof(p, c)
            if not _head_is_cut(node.left) and not _head_is_cut(node.right):
                return c
        return None
    raise ValueError(f"unknown strategy {strategy!r}")


@dataclass
class ReductionTrace:
    initial: Proof
    steps: list = field(default_factory=list)  # (path, case name)
    final: Proof | None = None

    def replay(self) -> Proof:
        p = self.initial
        for path, _ in self.steps:
            p = reduce_at(p, path)
        return p

    def to_json(self) -> dict:
        return {"steps": [{"path": list(path), "case": name} for path, name in self.steps],
                "count": len(self.steps)}


def normalize(p: Proof, strategy: str = "upper", budget: int = DEFAULT_BUDGET,
              trace: bool = True) -> tuple[Proof, ReductionTrace]:
    """Eliminate all cuts; raises :class:`StepBudgetExceeded` after ``budget`` steps."""
    tr = ReductionTrace(p)
    steps = 0
    while True:
        c = pick_cut(p, strategy)
        if c is None:
            break
        if steps >= budget:
            raise StepBudgetExceeded(f"no normal form within {budget} steps")
        p, name = reduce_at_named(p, c)
        steps += 1
        if trace:
            tr.steps.append((c, name))
    tr.final = p
    if not trace:
        tr.steps = [None] * steps
    return p, tr


def parallel_reduce(p: Proof, cuts: Iterable[Sequence[int]]) -> Proof:
    """Eliminate the given cuts top-down (deepest first).

    Reducing a cut only rewrites its own subtree, so the remaining
    (shallower or disjoint) paths stay valid."""
    cuts = sorted({tuple(c) for c in cuts}, key=lambda c: (-len(c), c))
    for c in cuts:
        if not isinstance(subproof(p, c), Cut):
            raise NotACut(f"node at {list(c)} is not a cut")
    for c in cuts:
        p = reduce_at(p, c)
    return p


# ===========================================================================
# vertical equivalence


def _canon_sub(lhs, rhs, locus):
    d = decide_subtype(lhs, rhs, locus)
    if d is None:
        raise CutElimError("subtyping step whose endpoints are unrelated")
    return d


def vnf(p: Proof) -> Proof:
    """Canonical representative modulo the decidable part of vertical equivalence."""
    kids = [vnf(c) for c in p.children()]
    if kids:
        p = p.with_children(kids)
    if isinstance(p, SubtypeStep):
        rho, q, k = p.rho, p.premise, p.idx
        lhs = rho.lhs
        if isinstance(q, SubtypeStep) and q.idx == k:
            lhs, q = q.rho.lhs, q.premise
        if lhs == rho.rhs:
            return q
        return SubtypeStep(_canon_sub(lhs, rho.rhs, q.locus), q, k)
    if isinstance(p, Cut) and isinstance(p.left, SubtypeStep) and p.left.idx == p.li:
        s = p.left
        a, a2 = s.rho.lhs, s.rho.rhs
        moved = vnf(SubtypeStep(_canon_sub(negate(a2), negate(a), p.locus), p.right, p.ri))
        return Cut(s.premise, moved, p.li, p.ri)
    return p


def equiv(p1: Proof, p2: Proof) -> bool:
    """Sound but incomplete test for vertical equivalence."""
    if canonical_sequent(p1) != canonical_sequent(p2):
        raise SequentMismatch("proofs have different conclusions")
    return vnf(p1) == vnf(p2)

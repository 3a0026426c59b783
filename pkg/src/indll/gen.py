"""Seeded random generators for loci, functions, formulae, subtyping
derivations and proofs.  Used by the test-suite and ``indll selftest``.

Everything produced here is well defined by construction; generated proofs
pass :func:`~indll.proof.check_proof` under :data:`ENV`.
"""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from .derived import coerce, sub_to_proof
from .formula import (
    BOT_F,
    ONE_F,
    TOP_F,
    ZERO_F,
    Bang,
    Formula,
    LBin,
    LUnit,
    LVar,
    NVar,
    Par,
    Plus,
    PVar,
    Quest,
    Tensor,
    With,
    _intersect,
    base_change,
    erase,
    negate,
)
from .proof import (
    Ax,
    BaseChangeStep,
    BotIntro,
    Contraction,
    Cut,
    Dereliction,
    Exchange,
    OneIntro,
    ParIntro,
    PlusIntro,
    Promotion,
    Proof,
    SubtypeStep,
    TensorIntro,
    TopIntro,
    Weakening,
    WithIntro,
)
from .setfun import (
    EMPTY,
    all_functions,
    inclusion,
    Locus,
    SetFun,
    atom,
    compose,
    copair_all,
    identity,
    init,
    invert,
    pair,
    pullback,
    sorted_elems,
    sum_loci,
)
from .subtyping import (
    SubDeriv,
    add_rule,
    ax_unit,
    ax_var,
    bang_rule,
    bc_sub,
    mult_cong,
    quest_rule,
    tower_iso,
    trans,
)

ENV = {"X": frozenset({atom("x"), atom("y")}), "Y": frozenset({atom("x")})}

_TAG = atom("r")


class Gen:
    """A small random source for IndLL objects.

    ``max_locus`` bounds the size of freshly drawn loci; derived loci
    (pullbacks, coproducts) can be larger."""

    def __init__(self, seed: int | random.Random = 0, env=None, max_locus: int = 3):
        self.rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        self.env = dict(ENV if env is None else env)
        self.max_locus = max_locus

    # -- sets and maps ------------------------------------------------------

    def locus(self, lo: int = 0, hi: int | None = None, pool: str = "abc") -> Locus:
        hi = self.max_locus if hi is None else hi
        n = self.rng.randint(lo, min(hi, len(pool)))
        return frozenset(atom(c) for c in self.rng.sample(pool, n))

    def fun(self, dom, cod) -> SetFun:
        dom, cod = frozenset(dom), frozenset(cod)
        if dom and not cod:
            raise ValueError("no function from a nonempty set into ∅")
        targets = sorted_elems(cod)
        return SetFun(dom, cod, {x: self.rng.choice(targets) for x in sorted_elems(dom)})

    def relabel(self, dom) -> SetFun:
        """A bijection ``D' -> dom`` with freshly tagged elements."""
        dom = frozenset(dom)
        return SetFun({pair(_TAG, x) for x in dom}, dom, {pair(_TAG, x): x for x in dom})

    def split(self, k) -> tuple[SetFun, SetFun]:
        """An orthogonal covering pair of injections into ``k``."""
        k = sorted_elems(k)
        left = {x for x in k if self.rng.random() < 0.5}
        right = [x for x in k if x not in left]
        i = SetFun(left, k, {x: x for x in left})
        j = SetFun(right, k, {x: x for x in right})
        if self.rng.random() < 0.3:
            i = compose(self.relabel(i.dom), i)
        if self.rng.random() < 0.3:
            j = compose(self.relabel(j.dom), j)
        return i, j

    def bag_locus(self, target) -> Locus:
        if not target:
            return EMPTY
        return self.locus(0, 2, pool="pqs")

    def onto(self, dom, target) -> SetFun:
        if dom and not target:
            dom = EMPTY
        return self.fun(dom, target)

    # -- formulae -----------------------------------------------------------

    def var(self, locus, name: str | None = None, positive: bool | None = None) -> Formula:
        name = name or self.rng.choice(sorted(self.env))
        f = self.fun(locus, self.env[name])
        positive = self.rng.random() < 0.5 if positive is None else positive
        return PVar(f, name) if positive else NVar(f, name)

    def formula(self, locus, depth: int = 2) -> Formula:
        locus = frozenset(locus)
        leaves = ["var", "var", "one", "bot"] + (["zero", "top"] if not locus else [])
        kinds = leaves if depth <= 0 else leaves + ["tensor", "par", "with", "plus", "bang", "quest"] * 2
        k = self.rng.choice(kinds)
        if k == "var":
            return self.var(locus)
        if k in ("one", "bot", "zero", "top"):
            return {"one": ONE_F, "bot": BOT_F, "zero": ZERO_F, "top": TOP_F}[k]
        if k in ("tensor", "par"):
            t = Tensor if k == "tensor" else Par
            return t(self.formula(locus, depth - 1), self.formula(locus, depth - 1))
        if k in ("with", "plus"):
            i, j = self.split(locus)
            t = With if k == "with" else Plus
            return t(i, j, self.formula(i.dom, depth - 1), self.formula(j.dom, depth - 1))
        u = self.onto(self.bag_locus(locus), locus)
        t = Bang if k == "bang" else Quest
        return t(u, self.formula(u.dom, depth - 1))

    def shaped(self, locus, shape) -> Formula | None:
        """A random formula over ``locus`` erasing to ``shape`` (None if impossible)."""
        locus = frozenset(locus)
        if isinstance(shape, LVar):
            return self.var(locus, shape.name, shape.positive)
        if isinstance(shape, LUnit):
            if shape.kind in ("0", "top") and locus:
                return None
            return {"1": ONE_F, "bot": BOT_F, "0": ZERO_F, "top": TOP_F}[shape.kind]
        if isinstance(shape, LBin):
            if shape.op in ("tensor", "par"):
                a, b = self.shaped(locus, shape.left), self.shaped(locus, shape.right)
                if a is None or b is None:
                    return None
                return (Tensor if shape.op == "tensor" else Par)(a, b)
            for _ in range(4):
                i, j = self.split(locus)
                a, b = self.shaped(i.dom, shape.left), self.shaped(j.dom, shape.right)
                if a is not None and b is not None:
                    return (With if shape.op == "with" else Plus)(i, j, a, b)
            return None
        for _ in range(4):
            u = self.onto(self.bag_locus(locus), locus)
            a = self.shaped(u.dom, shape.body)
            if a is not None:
                return (Bang if shape.op == "bang" else Quest)(u, a)
        return None

    # -- derivations --------------------------------------------------------

    def up(self, a: Formula, locus) -> SubDeriv:
        """A random derivation ``a ⊑ b`` (``b`` chosen by the generator)."""
        locus = frozenset(locus)
        t = type(a)
        if t in (PVar, NVar):
            return ax_var(a)
        if t in (Tensor, Par):
            return mult_cong(self.up(a.left, locus), self.up(a.right, locus), t is Tensor)
        if t in (With, Plus):
            new, prem = [], []
            for inj, sub in ((a.i, a.left), (a.j, a.right)):
                r = self.relabel(inj.dom) if self.rng.random() < 0.4 else identity(inj.dom)
                inj2 = compose(r, inj)
                d = self.up(sub, inj.dom)
                p, p1, p2 = pullback(inj, inj2)
                prem.append(trans(bc_sub(p1, d), tower_iso([p1], [p2, r], d.rhs, p)))
                new.append((inj2, base_change(r, d.rhs)))
            rhs = t(new[0][0], new[1][0], new[0][1], new[1][1])
            return add_rule(a, rhs, prem[0], prem[1])
        if t is Bang:
            j = self.bag_locus(a.u.dom) if a.u.dom else EMPTY
            if self.rng.random() < 0.3:
                j = EMPTY
            g = self.onto(j, a.u.dom)
            return bang_rule(a.u, a.body, g, self.up(base_change(g, a.body), g.dom))
        if t is Quest:
            w = a.u
            r = self.relabel(w.dom) if self.rng.random() < 0.5 else identity(w.dom)
            g = invert(r)
            u = compose(r, w)
            d = self.up(a.body, w.dom)
            prem = trans(d, tower_iso([], [g, r], d.rhs, w.dom))
            return quest_rule(u, base_change(r, d.rhs), g, prem)
        return ax_unit(locus, a)

    def derivation(self, locus=None, depth: int = 2) -> SubDeriv:
        locus = self.locus() if locus is None else frozenset(locus)
        return self.up(self.formula(locus, depth), locus)

    # -- proofs -------------------------------------------------------------

    def leaf(self, locus) -> Proof:
        locus = frozenset(locus)
        r = self.rng.random()
        if not locus and r < 0.2:
            return TopIntro(tuple(self.formula(EMPTY, 1) for _ in range(self.rng.randint(0, 2))))
        if r < 0.4:
            return Ax(self.fun(locus, self.env["X"]), "X")
        if r < 0.6:
            return OneIntro(locus)
        return sub_to_proof(self.up(self.formula(locus, 1), locus))

    def proof(self, locus=None, depth: int = 3) -> Proof:
        """A random checked proof of depth at most about ``depth`` rule layers."""
        locus = self.locus(0, 2) if locus is None else frozenset(locus)
        if depth <= 0:
            return self.leaf(locus)
        rules = ["tensor", "par", "bot", "weakening", "dereliction", "promotion", "with", "plus",
                 "cut", "subtype", "basechange", "exchange", "contraction", "leaf"]
        for _ in range(20):
            k = self.rng.choice(rules)
            p = getattr(self, "_r_" + k)(locus, depth - 1)
            if p is not None:
                return p
        return self.leaf(locus)

    def cut_proof(self, locus=None, depth: int = 3) -> Proof:
        """A random proof whose last rule is a cut."""
        locus = self.locus(0, 2) if locus is None else frozenset(locus)
        for _ in range(50):
            p = self._r_cut(locus, depth)
            if p is not None:
                return p
        raise RuntimeError("could not generate a cut")

    def _r_leaf(self, locus, d):
        return self.leaf(locus)

    def _r_tensor(self, locus, d):
        l, r = self.proof(locus, d), self.proof(locus, d)
        return TensorIntro(l, r, self.rng.randrange(len(l.concl)), self.rng.randrange(len(r.concl))) \
            if l.concl and r.concl else None

    def _r_par(self, locus, d):
        p = self.proof(locus, d)
        if len(p.concl) < 2:
            return None
        a, b = self.rng.sample(range(len(p.concl)), 2)
        return ParIntro(p, a, b)

    def _r_bot(self, locus, d):
        return BotIntro(self.proof(locus, d))

    def _r_weakening(self, locus, d):
        u = self.onto(self.bag_locus(locus), locus)
        f = Quest(u, self.formula(u.dom, 1))
        return Weakening(f, self.proof(locus, d))

    def _r_exchange(self, locus, d):
        p = self.proof(locus, d)
        perm = list(range(len(p.concl)))
        self.rng.shuffle(perm)
        return Exchange(tuple(perm), p) if len(perm) > 1 else None

    def _r_subtype(self, locus, d):
        p = self.proof(locus, d)
        if not p.concl:
            return None
        k = self.rng.randrange(len(p.concl))
        return SubtypeStep(self.up(p.concl[k], locus), p, k)

    def _r_basechange(self, locus, d):
        src = self.locus(0, 2) if locus else EMPTY
        p = self.proof(src, d)
        return BaseChangeStep(self.fun(locus, src), p) if (src or not locus) else None

    def _derelict(self, p: Proof, k: int) -> Proof:
        """Derelict position ``k``; the bag may contain extra points."""
        locus = p.locus
        b = p.concl[k]
        if self.rng.random() < 0.5:
            extra = self.bag_locus(locus)
            shape = erase(b)
            other = self.shaped(extra, shape)
            if other is not None and locus:
                bag, (i1, i2) = sum_loci([locus, extra])
                u = copair_all([identity(locus), self.onto(extra, locus)], locus)
                body = _intersect([b, other], [locus, extra], None)
                q = coerce(p, _replace(p.concl, k, base_change(i1, body)))
                return Dereliction(i1, Quest(u, body), q, k)
        idl = identity(locus)
        q = coerce(p, _replace(p.concl, k, base_change(idl, b)))
        return Dereliction(idl, Quest(idl, b), q, k)

    def _r_dereliction(self, locus, d):
        p = self.proof(locus, d)
        if not p.concl:
            return None
        return self._derelict(p, self.rng.randrange(len(p.concl)))

    def _r_promotion(self, locus, d):
        src = self.locus(0, 2) if locus else EMPTY
        p = self.proof(src, d)
        if not p.concl or len(p.concl) > 3:
            return None
        k = self.rng.randrange(len(p.concl))
        for m in range(len(p.concl)):
            if m != k and not isinstance(p.concl[m], Quest):
                p = self._derelict(p, m)
        v = self.fun(src, locus)
        ctx = []
        for m, c in enumerate(p.concl):
            if m != k:
                ctx.append(Quest(compose(c.u, v), c.body))
        target = list(p.concl)
        it = iter(ctx)
        for m in range(len(target)):
            if m != k:
                target[m] = base_change(v, next(it))
        try:
            q = coerce(p, target)
        except Exception:
            return None
        return Promotion(v, tuple(ctx), q, k)

    def _r_with(self, locus, d):
        if len(locus) > 2:
            return None
        k_all = sorted_elems(locus)
        left = frozenset(x for x in k_all if self.rng.random() < 0.6)
        right = frozenset(k_all) - left
        i = SetFun(left, locus, {x: x for x in left})
        j = SetFun(right, locus, {x: x for x in right})
        l = self.proof(left, d)
        if not l.concl:
            return None
        if right and not left:
            return None
        h = self.fun(right, left)
        r = BaseChangeStep(h, l)
        idx = self.rng.randrange(len(l.concl))
        if self.rng.random() < 0.5:
            r = SubtypeStep(self.up(r.concl[idx], right), r, idx)
        ctx_l = _drop(l.concl, idx)
        ctx_r = _drop(r.concl, idx)
        ctx = tuple(_intersect([a, b], [left, right], None) for a, b in zip(ctx_l, ctx_r))
        # rename the sum locus back onto ``locus``
        bag, (s1, s2) = sum_loci([left, right])
        back = SetFun(bag, locus, {**{s1(x): x for x in left}, **{s2(x): x for x in right}})
        ctx = tuple(base_change(invert(back), a) for a in ctx)

        def fit(p, inj):
            target = list(p.concl)
            for m, a in enumerate(ctx):
                target[m if m < idx else m + 1] = base_change(inj, a)
            return coerce(p, target)

        try:
            return WithIntro(i, j, ctx, fit(l, i), fit(r, j), idx)
        except Exception:
            return None

    def _r_plus(self, locus, d):
        p = self.proof(locus, d)
        if not p.concl:
            return None
        k = self.rng.randrange(len(p.concl))
        a = p.concl[k]
        idl = identity(locus)
        other = self.formula(EMPTY, 1)
        side = self.rng.choice((1, 2))
        e = init(locus)
        form = Plus(idl, e, a, other) if side == 1 else Plus(e, idl, other, a)
        q = coerce(p, _replace(p.concl, k, base_change(invert(idl), a)))
        return PlusIntro(form, q, k, side)

    def _r_contraction(self, locus, d):
        p = self.proof(locus, d)
        c = p.concl
        pairs = [(a, b) for a in range(len(c)) for b in range(len(c))
                 if a != b and isinstance(c[a], Quest) and c[a] == c[b]]
        if pairs:
            a, b = self.rng.choice(pairs)
            return Contraction(p, a, b)
        u = self.onto(self.bag_locus(locus), locus)
        bang = Bang(u, self.formula(u.dom, 1))
        e1, e2 = sub_to_proof(self.up(bang, locus)), sub_to_proof(self.up(bang, locus))
        return Contraction(TensorIntro(e1, e2, 1, 1), 0, 2)

    def dual_of(self, a: Formula, locus, d: int) -> Proof:
        """A proof with ``a^⊥`` at position 0."""
        r = self.rng.random()
        na = negate(a)
        if isinstance(na, Quest) and r < 0.25:
            return Weakening(na, self.proof(locus, max(d - 1, 0)))
        if isinstance(na, Quest) and r < 0.45:
            e1, e2 = sub_to_proof(self.up(a, locus)), sub_to_proof(self.up(a, locus))
            return Contraction(TensorIntro(e1, e2, 1, 1), 0, 2)
        return sub_to_proof(self.up(a, locus))

    def _r_cut(self, locus, d):
        p = self.proof(locus, d)
        if not p.concl:
            return None
        k = self.rng.randrange(len(p.concl))
        q = self.dual_of(p.concl[k], locus, d)
        if self.rng.random() < 0.5:
            return Cut(p, q, k, 0)
        return Cut(q, p, 0, k)


def _replace(seq: Sequence, k: int, x) -> tuple:
    seq = list(seq)
    seq[k] = x
    return tuple(seq)


def _drop(seq: Sequence, k: int) -> tuple:
    return tuple(seq[:k]) + tuple(seq[k + 1:])


# ---------------------------------------------------------------------------
# exhaustive enumeration of the embeddable fragment


def fragment_formulas(locus, depth: int, env, max_bag: int = 3, _memo=None) -> list[Formula]:
    """Every formula of the grammar ``f(X) | (!_u A)^⊥ ⅋ B | A &_{i,j} B``
    over ``locus`` with at most ``depth`` nested connectives and every bag
    locus of at most ``max_bag`` elements (up to renaming of bag loci)."""
    memo = {} if _memo is None else _memo
    locus = frozenset(locus)
    key = (locus, depth)
    if key in memo:
        return memo[key]
    pts = sorted_elems(locus)
    out: list[Formula] = []
    for name in sorted(env):
        for f in all_functions(locus, env[name]):
            out.append(PVar(f, name))
    if depth > 0:
        bodies = lambda loc: fragment_formulas(loc, depth - 1, env, max_bag, memo)
        rights = bodies(locus)
        for sizes in itertools.product(range(max_bag + 1), repeat=len(pts)):
            if sum(sizes) > max_bag:
                continue
            graph = {pair(x, atom(f"k{n}")): x for x, k in zip(pts, sizes) for n in range(k)}
            u = SetFun(graph, locus, graph)
            for a in bodies(u.dom):
                for b in rights:
                    out.append(Par(Quest(u, negate(a)), b))
        for mask in itertools.product((0, 1), repeat=len(pts)):
            left = frozenset(x for x, m in zip(pts, mask) if m)
            right = locus - left
            i, j = inclusion(left, locus), inclusion(right, locus)
            for a in bodies(left):
                for b in bodies(right):
                    out.append(With(i, j, a, b))
    memo[key] = out
    return out


def all_itypes(depth: int, names: Sequence[str] = ("a",), max_bag: int = 3, _memo=None) -> list:
    """Intersection types of at most ``depth`` nested constructors refining
    some simple type, with bags of at most ``max_bag`` distinct members."""
    from .itypes import Arrow, ITVar, WithL, WithR, simple_type_of, NotRefining

    memo = {} if _memo is None else _memo
    if depth in memo:
        return memo[depth]
    out = [ITVar(n) for n in names]
    if depth > 0:
        smaller = all_itypes(depth - 1, names, max_bag, memo)
        for b in smaller:
            out.append(WithL(b))
            out.append(WithR(b))
        for k in range(max_bag + 1):
            for bag in itertools.combinations(smaller, k):
                for b in smaller:
                    a = Arrow(bag, b)
                    try:
                        simple_type_of(a)
                    except NotRefining:
                        continue
                    out.append(a)
    memo[depth] = out
    return out

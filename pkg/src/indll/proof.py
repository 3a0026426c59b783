"""Proof trees over indexed sequents, the kernel checker, and erasure to
plain linear-logic proofs (with an independent LL checker).

Sequents are one-sided and ordered: a proof concludes ``⊢_I Γ`` with ``Γ`` a
tuple of formulae.  A two-sided sequent ``Γ ⊢ Δ`` corresponds to
``⊢ Γ^⊥, Δ``.  Rules address their active formulae by position:

========================  =====================================================
node                      conclusion (``p`` is the premise conclusion)
========================  =====================================================
``Ax(f, X)``              ``(f(X)^⊥, f(X))``
``OneIntro(I)``           ``(1,)``
``BotIntro(p)``           ``(⊥,) + p``
``TopIntro(Γ)``           ``(⊤,) + Γ`` over ∅
``TensorIntro(l,r,a,b)``  ``l[a := l[a] ⊗ r[b]] + r \\ b``
``ParIntro(p,a,b)``       ``p[a := p[a] ⅋ p[b]] \\ b``
``WithIntro(i,j,Γ,l,r,k)````Γ`` with ``A &_{i,j} B`` inserted at ``k``;
                          ``l = i(Γ)`` with ``A`` at ``k``, ``r`` likewise
``PlusIntro(C,p,k,side)`` ``p[k := C]``; ``p[k]`` is ``inv(i)(A)``
``Contraction(p,a,b)``    ``p \\ b`` where ``p[a] = p[b]``
``Weakening(C,p)``        ``(C,) + p``
``Dereliction(f,C,p,k)``  ``p[k := C]``; ``C = ?_u B``, ``p[k] = f(B)``, ``f;u = id``
``Promotion(v,Γ,p,k)``    ``Γ`` with ``!_v p[k]`` inserted at ``k``; ``p \\ k = v(Γ)``
``Cut(l,r,a,b)``          ``l \\ a + r \\ b`` with ``r[b] = l[a]^⊥``
``SubtypeStep(ρ,p,k)``    ``p[k := rhs ρ]``, ``p[k] = lhs ρ``
``BaseChangeStep(f,p)``   ``f(p)`` over ``dom f``
``Exchange(σ,p)``         ``(p[σ0], p[σ1], ...)``
========================  =====================================================
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, fields
from typing import Sequence

from .formula import (
    ONE_F,
    BOT_F,
    TOP_F,
    Bang,
    Bot,
    Formula,
    FormulaError,
    LBin,
    LExp,
    LUnit,
    LVar,
    NVar,
    Par,
    Plus,
    PVar,
    Quest,
    Tensor,
    VarEnv,
    With,
    base_change,
    check_def,
    erase,
    ll_negate,
    negate,
)
from .setfun import EMPTY, Locus, SetFun, SetFunError, compose, invert, is_bot_pair, show_locus
from .subtyping import SubDeriv, SubtypingError, check_sub


class ProofError(ValueError):
    pass


class RuleViolation(ProofError):
    def __init__(self, path, rule: str, reason: str):
        self.path, self.rule, self.reason = tuple(path), rule, reason
        super().__init__(f"{rule} at {list(self.path)}: {reason}")


def _drop(seq: tuple, k: int) -> tuple:
    return seq[:k] + seq[k + 1:]


def _put(seq: tuple, k: int, x) -> tuple:
    return seq[:k] + (x,) + seq[k + 1:]


def _ins(seq: tuple, k: int, x) -> tuple:
    return seq[:k] + (x,) + seq[k:]


def _node(cls):
    cls = dataclass(frozen=True, repr=False)(cls)
    names = tuple(f.name for f in fields(cls))

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((cls.__name__,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_h", h)
        return h

    cls.__hash__ = __hash__
    cls._fieldnames = names
    return cls


class _Cached:
    """Lazily computed ``concl`` and ``locus`` stored next to the fields."""

    def _memo(self, key, fn):
        d = self.__dict__
        if key not in d:
            object.__setattr__(self, key, fn())
        return d[key]


# ===========================================================================
# Indexed proofs


class Proof(_Cached):
    rule = "?"

    @property
    def concl(self) -> tuple:
        return self._memo("_c", self._concl)

    @property
    def locus(self) -> Locus:
        return self._memo("_l", self._locus)

    def children(self) -> tuple["Proof", ...]:
        return ()

    def with_children(self, kids: Sequence["Proof"]) -> "Proof":
        if not kids:
            return self
        raise ProofError("node has no children")

    def __repr__(self) -> str:
        from .syntax import show_proof

        return show_proof(self)


@_node
class Ax(Proof):
    f: SetFun
    name: str
    rule = "ax"

    def _concl(self):
        return (NVar(self.f, self.name), PVar(self.f, self.name))

    def _locus(self):
        return self.f.dom


@_node
class OneIntro(Proof):
    at: Locus
    rule = "one"

    def _concl(self):
        return (ONE_F,)

    def _locus(self):
        return self.at


@_node
class BotIntro(Proof):
    premise: Proof
    rule = "bot"

    def _concl(self):
        return (BOT_F,) + self.premise.concl

    def _locus(self):
        return self.premise.locus

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return BotIntro(kids[0])


@_node
class TopIntro(Proof):
    ctx: tuple
    rule = "top"

    def _concl(self):
        return (TOP_F,) + tuple(self.ctx)

    def _locus(self):
        return EMPTY


@_node
class TensorIntro(Proof):
    left: Proof
    right: Proof
    li: int
    ri: int
    rule = "tensor"

    def _concl(self):
        l, r = self.left.concl, self.right.concl
        return _put(l, self.li, Tensor(l[self.li], r[self.ri])) + _drop(r, self.ri)

    def _locus(self):
        return self.left.locus

    def children(self):
        return (self.left, self.right)

    def with_children(self, kids):
        return TensorIntro(kids[0], kids[1], self.li, self.ri)


@_node
class ParIntro(Proof):
    premise: Proof
    a: int
    b: int
    rule = "par"

    def _concl(self):
        p = self.premise.concl
        return _drop(_put(p, self.a, Par(p[self.a], p[self.b])), self.b)

    def _locus(self):
        return self.premise.locus

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return ParIntro(kids[0], self.a, self.b)


@_node
class WithIntro(Proof):
    i: SetFun
    j: SetFun
    ctx: tuple
    left: Proof
    right: Proof
    idx: int
    rule = "with"

    def _concl(self):
        a, b = self.left.concl[self.idx], self.right.concl[self.idx]
        return _ins(tuple(self.ctx), self.idx, With(self.i, self.j, a, b))

    def _locus(self):
        return self.i.cod

    def children(self):
        return (self.left, self.right)

    def with_children(self, kids):
        return WithIntro(self.i, self.j, self.ctx, kids[0], kids[1], self.idx)


@_node
class PlusIntro(Proof):
    formula: Formula
    premise: Proof
    idx: int
    side: int  # 1: A ⊕_{i,init} B from inv(i)(A); 2: A ⊕_{init,j} B from inv(j)(B)
    rule = "plus"

    def _concl(self):
        return _put(self.premise.concl, self.idx, self.formula)

    def _locus(self):
        return self.premise.locus

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return PlusIntro(self.formula, kids[0], self.idx, self.side)


@_node
class Contraction(Proof):
    premise: Proof
    a: int
    b: int
    rule = "contraction"

    def _concl(self):
        return _drop(self.premise.concl, self.b)

    def _locus(self):
        return self.premise.locus

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return Contraction(kids[0], self.a, self.b)


@_node
class Weakening(Proof):
    formula: Formula
    premise: Proof
    rule = "weakening"

    def _concl(self):
        return (self.formula,) + self.premise.concl

    def _locus(self):
        return self.premise.locus

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return Weakening(self.formula, kids[0])


@_node
class Dereliction(Proof):
    f: SetFun
    formula: Formula
    premise: Proof
    idx: int
    rule = "dereliction"

    def _concl(self):
        return _put(self.premise.concl, self.idx, self.formula)

    def _locus(self):
        return self.premise.locus

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return Dereliction(self.f, self.formula, kids[0], self.idx)


@_node
class Promotion(Proof):
    v: SetFun
    ctx: tuple
    premise: Proof
    idx: int
    rule = "promotion"

    def _concl(self):
        return _ins(tuple(self.ctx), self.idx, Bang(self.v, self.premise.concl[self.idx]))

    def _locus(self):
        return self.v.cod

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return Promotion(self.v, self.ctx, kids[0], self.idx)


@_node
class Cut(Proof):
    left: Proof
    right: Proof
    li: int
    ri: int
    rule = "cut"

    @property
    def cut_formula(self) -> Formula:
        return self.left.concl[self.li]

    def _concl(self):
        return _drop(self.left.concl, self.li) + _drop(self.right.concl, self.ri)

    def _locus(self):
        return self.left.locus

    def children(self):
        return (self.left, self.right)

    def with_children(self, kids):
        return Cut(kids[0], kids[1], self.li, self.ri)


@_node
class SubtypeStep(Proof):
    rho: SubDeriv
    premise: Proof
    idx: int
    rule = "subtype"

    def _concl(self):
        return _put(self.premise.concl, self.idx, self.rho.rhs)

    def _locus(self):
        return self.premise.locus

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return SubtypeStep(self.rho, kids[0], self.idx)


@_node
class BaseChangeStep(Proof):
    f: SetFun
    premise: Proof
    rule = "basechange"

    def _concl(self):
        return tuple(base_change(self.f, a) for a in self.premise.concl)

    def _locus(self):
        return self.f.dom

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return BaseChangeStep(self.f, kids[0])


@_node
class Exchange(Proof):
    perm: tuple
    premise: Proof
    rule = "exchange"

    def _concl(self):
        p = self.premise.concl
        return tuple(p[k] for k in self.perm)

    def _locus(self):
        return self.premise.locus

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return Exchange(self.perm, kids[0])


META_RULES = (SubtypeStep, BaseChangeStep)


def exchange(perm: Sequence[int], p: Proof) -> Proof:
    """``Exchange`` that disappears when ``perm`` is the identity."""
    perm = tuple(perm)
    if perm == tuple(range(len(perm))):
        return p
    if isinstance(p, Exchange):
        return exchange(tuple(p.perm[k] for k in perm), p.premise)
    return Exchange(perm, p)


def move_to_front(n: int, k: int) -> tuple:
    """Permutation bringing position ``k`` to the front, others in order."""
    return (k,) + tuple(x for x in range(n) if x != k)


# ---------------------------------------------------------------------------
# Sequents


@dataclass(frozen=True)
class Sequent:
    """An ordered sequent ``Γ ⊢_I Δ``; equality of the canonical form is up to
    moving formulae across by negation, dropping ``1`` on the left, and
    reordering."""

    locus: Locus
    left: tuple = ()
    right: tuple = ()

    @staticmethod
    def of_proof(p: Proof) -> "Sequent":
        return Sequent(p.locus, (), p.concl)

    def canonical(self) -> tuple:
        forms = [negate(a) for a in self.left] + list(self.right)
        forms = [a for a in forms if not isinstance(a, Bot)]
        return (self.locus, frozenset(Counter(forms).items()))

    def same_as(self, other: "Sequent") -> bool:
        return self.canonical() == other.canonical()

    def __str__(self) -> str:
        from .syntax import show_formula

        lhs = ", ".join(show_formula(a) for a in self.left)
        rhs = ", ".join(show_formula(a) for a in self.right)
        return f"{lhs} |-{show_locus(self.locus)} {rhs}".strip()


def canonical_sequent(p: Proof) -> tuple:
    return Sequent.of_proof(p).canonical()


# ---------------------------------------------------------------------------
# Checking


def check_proof(p: Proof, env: VarEnv | None = None) -> Sequent:
    """Validate every rule of ``p``; returns its conclusion sequent."""
    _check(p, env, ())
    return Sequent.of_proof(p)


def is_valid(p: Proof, env: VarEnv | None = None) -> bool:
    try:
        check_proof(p, env)
    except (ProofError, FormulaError, SubtypingError, SetFunError):
        return False
    return True


def _check(p: Proof, env, path) -> None:
    for k, c in enumerate(p.children()):
        _check(c, env, path + (k,))

    def fail(msg):
        raise RuleViolation(path, p.rule, msg)

    def idx_ok(seq, *ks):
        for k in ks:
            if not isinstance(k, int) or not 0 <= k < len(seq):
                fail(f"position {k} out of range")

    def defined(locus, a):
        if env is not None:
            try:
                check_def(locus, a, env)
            except FormulaError as e:
                fail(str(e))

    try:
        _check_node(p, env, fail, idx_ok, defined)
    except RuleViolation:
        raise
    except (FormulaError, SubtypingError, SetFunError) as e:
        fail(str(e))


def _check_node(p, env, fail, idx_ok, defined):
    t = type(p)
    if t is Ax:
        if env is not None:
            defined(p.f.dom, PVar(p.f, p.name))
    elif t is OneIntro:
        pass
    elif t is BotIntro:
        pass
    elif t is TopIntro:
        for a in p.ctx:
            defined(EMPTY, a)
    elif t is TensorIntro:
        l, r = p.left.concl, p.right.concl
        idx_ok(l, p.li)
        idx_ok(r, p.ri)
        if p.left.locus != p.right.locus:
            fail("premises over different loci")
    elif t is ParIntro:
        idx_ok(p.premise.concl, p.a, p.b)
        if p.a == p.b:
            fail("the two active positions coincide")
    elif t is WithIntro:
        if p.i.cod != p.j.cod or not is_bot_pair(p.i, p.j):
            fail("injections are not an orthogonal covering pair")
        n = len(p.ctx)
        for prem, inj in ((p.left, p.i), (p.right, p.j)):
            c = prem.concl
            if len(c) != n + 1:
                fail("premise does not have one formula more than the context")
            idx_ok(c, p.idx)
            if prem.locus != inj.dom:
                fail("premise is not over the domain of its injection")
            if _drop(c, p.idx) != tuple(base_change(inj, a) for a in p.ctx):
                fail("premise context is not the base-changed context")
        for a in p.ctx:
            defined(p.i.cod, a)
    elif t is PlusIntro:
        c = p.premise.concl
        idx_ok(c, p.idx)
        f = p.formula
        if not isinstance(f, Plus):
            fail("principal formula is not a ⊕")
        if p.side == 1:
            inj, other, comp = f.i, f.j, f.left
        elif p.side == 2:
            inj, other, comp = f.j, f.i, f.right
        else:
            fail("side must be 1 or 2")
        if other.dom:
            fail("the other injection must be the empty map")
        if not inj.is_bijective():
            fail("the active injection must be a bijection")
        if inj.cod != p.premise.locus:
            fail("injection does not target the premise locus")
        if c[p.idx] != base_change(invert(inj), comp):
            fail("premise formula is not the inverse base change of the summand")
        defined(p.premise.locus, f)
    elif t is Contraction:
        c = p.premise.concl
        idx_ok(c, p.a, p.b)
        if p.a == p.b:
            fail("the two active positions coincide")
        if c[p.a] != c[p.b]:
            fail("contracted formulae differ")
        if not isinstance(c[p.a], Quest):
            fail("only ?-formulae contract")
    elif t is Weakening:
        if not isinstance(p.formula, Quest):
            fail("only ?-formulae weaken")
        defined(p.premise.locus, p.formula)
    elif t is Dereliction:
        c = p.premise.concl
        idx_ok(c, p.idx)
        q = p.formula
        if not isinstance(q, Quest):
            fail("principal formula is not a ?")
        if p.f.dom != p.premise.locus or p.f.cod != q.u.dom:
            fail("witness has the wrong type")
        if not compose(p.f, q.u).is_identity():
            fail("witness is not a section of the bag index (u ∘ f ≠ id)")
        if c[p.idx] != base_change(p.f, q.body):
            fail("premise formula is not the witness base change of the body")
        defined(p.premise.locus, q)
    elif t is Promotion:
        c = p.premise.concl
        if len(c) != len(p.ctx) + 1:
            fail("premise does not have one formula more than the context")
        idx_ok(c, p.idx)
        if p.premise.locus != p.v.dom:
            fail("premise is not over the domain of the promotion index")
        for a in p.ctx:
            if not isinstance(a, Quest):
                fail("promotion context must consist of ?-formulae")
            defined(p.v.cod, a)
        if _drop(c, p.idx) != tuple(base_change(p.v, a) for a in p.ctx):
            fail("premise context is not the base-changed context")
    elif t is Cut:
        l, r = p.left.concl, p.right.concl
        idx_ok(l, p.li)
        idx_ok(r, p.ri)
        if p.left.locus != p.right.locus:
            fail("premises over different loci")
        if r[p.ri] != negate(l[p.li]):
            fail("cut formulae are not dual")
    elif t is SubtypeStep:
        c = p.premise.concl
        idx_ok(c, p.idx)
        locus, lhs, _ = check_sub(p.rho, env)
        if locus != p.premise.locus:
            fail("derivation is over another locus")
        if lhs != c[p.idx]:
            fail("derivation does not start at the pointed formula")
    elif t is BaseChangeStep:
        if p.f.cod != p.premise.locus:
            fail("base change along a map not targeting the premise locus")
        p.concl  # noqa: B018 - forces the base change, raising on mismatch
    elif t is Exchange:
        n = len(p.premise.concl)
        if sorted(p.perm) != list(range(n)):
            fail("not a permutation of the premise positions")
    else:
        fail(f"unknown rule {t.__name__}")


def size(p: Proof) -> int:
    return 1 + sum(size(c) for c in p.children())


def depth(p: Proof) -> int:
    return 1 + max((depth(c) for c in p.children()), default=0)


def subproof(p: Proof, path: Sequence[int]) -> Proof:
    for k in path:
        p = p.children()[k]
    return p


def replace_at(p: Proof, path: Sequence[int], new: Proof) -> Proof:
    if not path:
        return new
    kids = list(p.children())
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return p.with_children(kids)


def is_core(p: Proof) -> bool:
    return not isinstance(p, META_RULES) and all(is_core(c) for c in p.children())


# ===========================================================================
# Plain LL proofs


class LLProof(_Cached):
    rule = "?"

    @property
    def concl(self) -> tuple:
        return self._memo("_c", self._concl)

    def children(self):
        return ()

    def with_children(self, kids):
        return self

    def __repr__(self):
        from .syntax import show_ll_proof

        return show_ll_proof(self)


@_node
class LAx(LLProof):
    name: str
    rule = "ax"

    def _concl(self):
        return (LVar(self.name, False), LVar(self.name, True))


@_node
class LOne(LLProof):
    rule = "one"

    def _concl(self):
        return (LUnit("1"),)


@_node
class LBot(LLProof):
    premise: LLProof
    rule = "bot"

    def _concl(self):
        return (LUnit("bot"),) + self.premise.concl

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return LBot(kids[0])


@_node
class LTop(LLProof):
    ctx: tuple
    rule = "top"

    def _concl(self):
        return (LUnit("top"),) + tuple(self.ctx)


@_node
class LTensor(LLProof):
    left: LLProof
    right: LLProof
    li: int
    ri: int
    rule = "tensor"

    def _concl(self):
        l, r = self.left.concl, self.right.concl
        return _put(l, self.li, LBin("tensor", l[self.li], r[self.ri])) + _drop(r, self.ri)

    def children(self):
        return (self.left, self.right)

    def with_children(self, kids):
        return LTensor(kids[0], kids[1], self.li, self.ri)


@_node
class LPar(LLProof):
    premise: LLProof
    a: int
    b: int
    rule = "par"

    def _concl(self):
        p = self.premise.concl
        return _drop(_put(p, self.a, LBin("par", p[self.a], p[self.b])), self.b)

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return LPar(kids[0], self.a, self.b)


@_node
class LWith(LLProof):
    left: LLProof
    right: LLProof
    idx: int
    rule = "with"

    def _concl(self):
        l, r = self.left.concl, self.right.concl
        return _put(l, self.idx, LBin("with", l[self.idx], r[self.idx]))

    def children(self):
        return (self.left, self.right)

    def with_children(self, kids):
        return LWith(kids[0], kids[1], self.idx)


@_node
class LPlus(LLProof):
    formula: object
    premise: LLProof
    idx: int
    side: int
    rule = "plus"

    def _concl(self):
        return _put(self.premise.concl, self.idx, self.formula)

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return LPlus(self.formula, kids[0], self.idx, self.side)


@_node
class LContraction(LLProof):
    premise: LLProof
    a: int
    b: int
    rule = "contraction"

    def _concl(self):
        return _drop(self.premise.concl, self.b)

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return LContraction(kids[0], self.a, self.b)


@_node
class LWeakening(LLProof):
    formula: object
    premise: LLProof
    rule = "weakening"

    def _concl(self):
        return (self.formula,) + self.premise.concl

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return LWeakening(self.formula, kids[0])


@_node
class LDereliction(LLProof):
    premise: LLProof
    idx: int
    rule = "dereliction"

    def _concl(self):
        p = self.premise.concl
        return _put(p, self.idx, LExp("quest", p[self.idx]))

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return LDereliction(kids[0], self.idx)


@_node
class LPromotion(LLProof):
    premise: LLProof
    idx: int
    rule = "promotion"

    def _concl(self):
        p = self.premise.concl
        return _put(p, self.idx, LExp("bang", p[self.idx]))

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return LPromotion(kids[0], self.idx)


@_node
class LCut(LLProof):
    left: LLProof
    right: LLProof
    li: int
    ri: int
    rule = "cut"

    def _concl(self):
        return _drop(self.left.concl, self.li) + _drop(self.right.concl, self.ri)

    def children(self):
        return (self.left, self.right)

    def with_children(self, kids):
        return LCut(kids[0], kids[1], self.li, self.ri)


@_node
class LExchange(LLProof):
    perm: tuple
    premise: LLProof
    rule = "exchange"

    def _concl(self):
        p = self.premise.concl
        return tuple(p[k] for k in self.perm)

    def children(self):
        return (self.premise,)

    def with_children(self, kids):
        return LExchange(self.perm, kids[0])


def ll_exchange(perm: Sequence[int], p: LLProof) -> LLProof:
    perm = tuple(perm)
    if perm == tuple(range(len(perm))):
        return p
    if isinstance(p, LExchange):
        return ll_exchange(tuple(p.perm[k] for k in perm), p.premise)
    return LExchange(perm, p)


def ll_check(p: LLProof, _path: tuple = ()) -> tuple:
    """Validate a plain LL proof; returns its conclusion."""
    for k, c in enumerate(p.children()):
        ll_check(c, _path + (k,))

    def fail(msg):
        raise RuleViolation(_path, "LL " + p.rule, msg)

    def rng(seq, *ks):
        for k in ks:
            if not isinstance(k, int) or not 0 <= k < len(seq):
                fail(f"position {k} out of range")

    t = type(p)
    if t in (LAx, LOne, LBot):
        pass
    elif t is LTop:
        pass
    elif t in (LTensor, LCut):
        rng(p.left.concl, p.li)
        rng(p.right.concl, p.ri)
        if t is LCut and p.right.concl[p.ri] != ll_negate(p.left.concl[p.li]):
            fail("cut formulae are not dual")
    elif t is LPar:
        rng(p.premise.concl, p.a, p.b)
        if p.a == p.b:
            fail("same position twice")
    elif t is LWith:
        l, r = p.left.concl, p.right.concl
        rng(l, p.idx)
        rng(r, p.idx)
        if _drop(l, p.idx) != _drop(r, p.idx):
            fail("premise contexts differ")
    elif t is LPlus:
        c = p.premise.concl
        rng(c, p.idx)
        f = p.formula
        if not (isinstance(f, LBin) and f.op == "plus"):
            fail("principal formula is not a ⊕")
        if p.side not in (1, 2) or c[p.idx] != (f.left if p.side == 1 else f.right):
            fail("premise is not the chosen summand")
    elif t is LContraction:
        c = p.premise.concl
        rng(c, p.a, p.b)
        if p.a == p.b or c[p.a] != c[p.b] or not (isinstance(c[p.a], LExp) and c[p.a].op == "quest"):
            fail("bad contraction")
    elif t is LWeakening:
        if not (isinstance(p.formula, LExp) and p.formula.op == "quest"):
            fail("only ?-formulae weaken")
    elif t is LDereliction:
        rng(p.premise.concl, p.idx)
    elif t is LPromotion:
        c = p.premise.concl
        rng(c, p.idx)
        for k, a in enumerate(c):
            if k != p.idx and not (isinstance(a, LExp) and a.op == "quest"):
                fail("promotion context must consist of ?-formulae")
    elif t is LExchange:
        if sorted(p.perm) != list(range(len(p.premise.concl))):
            fail("not a permutation")
    else:
        fail(f"unknown rule {t.__name__}")
    return p.concl


def ll_is_valid(p: LLProof) -> bool:
    try:
        ll_check(p)
    except ProofError:
        return False
    return True


# ---------------------------------------------------------------------------
# Erasure


def erase_proof(p: Proof) -> LLProof:
    t = type(p)
    if t is Ax:
        return LAx(p.name)
    if t is OneIntro:
        return LOne()
    if t is BotIntro:
        return LBot(erase_proof(p.premise))
    if t is TopIntro:
        return LTop(tuple(erase(a) for a in p.ctx))
    if t is TensorIntro:
        return LTensor(erase_proof(p.left), erase_proof(p.right), p.li, p.ri)
    if t is ParIntro:
        return LPar(erase_proof(p.premise), p.a, p.b)
    if t is WithIntro:
        return LWith(erase_proof(p.left), erase_proof(p.right), p.idx)
    if t is PlusIntro:
        return LPlus(erase(p.formula), erase_proof(p.premise), p.idx, p.side)
    if t is Contraction:
        return LContraction(erase_proof(p.premise), p.a, p.b)
    if t is Weakening:
        return LWeakening(erase(p.formula), erase_proof(p.premise))
    if t is Dereliction:
        return LDereliction(erase_proof(p.premise), p.idx)
    if t is Promotion:
        return LPromotion(erase_proof(p.premise), p.idx)
    if t is Cut:
        return LCut(erase_proof(p.left), erase_proof(p.right), p.li, p.ri)
    if t in META_RULES:
        return erase_proof(p.premise)
    if t is Exchange:
        return LExchange(p.perm, erase_proof(p.premise))
    raise ProofError(f"unknown rule {t.__name__}")


def ll_size(p: LLProof) -> int:
    return 1 + sum(ll_size(c) for c in p.children())


def ll_cleanup(p: LLProof) -> LLProof:
    """Remove cuts against axioms and fuse or drop exchanges."""
    kids = [ll_cleanup(c) for c in p.children()]
    p = p.with_children(kids) if kids else p
    if isinstance(p, LCut):
        if isinstance(p.left, LAx):
            # ⊢ X^⊥, X cut at li against r: the survivor replaces r's cut formula
            n = len(p.right.concl)
            return ll_exchange(move_to_front(n, p.ri), p.right)
        if isinstance(p.right, LAx):
            n = len(p.left.concl)
            perm = tuple(k for k in range(n) if k != p.li) + (p.li,)
            return ll_exchange(perm, p.left)
    if isinstance(p, LExchange):
        return ll_exchange(p.perm, p.premise)
    return p

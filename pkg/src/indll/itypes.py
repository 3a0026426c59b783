"""Idempotent intersection types for a λ-calculus with pairs, and the bridge
to indexed formulae and proofs over the one-point locus.

Intersection types refine simple types.  The embedding sends the fragment
``f(X) | (!_u A)^⊥ ⅋ B | A &_{i,j} B`` over a singleton locus to types, and
``reify`` goes back through the intersection of formulae.  Terms are encoded
call-by-name into one-sided LL sequents ``⊢ ?σ1^⊥, ..., ?σn^⊥, τ``.

IT-variables are named ``X`` or ``X@e``: the part before ``@`` is the simple
type variable it refines and ``e`` the element of ``X``'s locus picked by the
annotation (``unit`` when omitted).
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .derived import coerce, intersect_proofs, sub_to_proof, elaborate
from .formula import (
    Formula,
    LBin,
    LExp,
    LVar,
    Par,
    PVar,
    Quest,
    VarEnv,
    With,
    _intersect,
    base_change,
    empty_formula_like,
    erase,
    ll_negate,
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
    TensorIntro,
    TopIntro,
    Weakening,
    WithIntro,
    erase_proof,
    exchange,
    ll_exchange,
)
from .setfun import EMPTY, ONE, UNIT, Elem, SetFun, cst, identity, init, invert, show_elem, sum_loci, terminal
from .subtyping import decide_subtype, refl


class ITypeError(ValueError):
    pass


class NotInFragment(ITypeError):
    """The formula is outside the embeddable fragment."""


class NotRefining(ITypeError):
    pass


class NotSimplyTyped(ITypeError):
    pass


class ShapeMismatch(ITypeError):
    pass


class ITParseError(ITypeError):
    pass


class ITRuleViolation(ITypeError):
    def __init__(self, path, reason: str):
        self.path = tuple(path)
        super().__init__(f"at {list(self.path)}: {reason}")


# ===========================================================================
# intersection types


class IType:
    def __repr__(self):
        return show_itype(self)


@dataclass(frozen=True, repr=False)
class ITVar(IType):
    name: str


@dataclass(frozen=True, repr=False)
class Arrow(IType):
    """``[a1 ... an] -> b``; the multiset is kept sorted."""

    args: tuple
    result: IType

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(sorted(self.args, key=it_key)))


@dataclass(frozen=True, repr=False)
class WithL(IType):
    body: IType


@dataclass(frozen=True, repr=False)
class WithR(IType):
    body: IType


@functools.lru_cache(maxsize=None)
def it_key(a: IType) -> str:
    return show_itype(a)


@functools.lru_cache(maxsize=None)
def it_leq(a: IType, b: IType) -> bool:
    """The subtyping preorder.  Arrows are contravariant on bags: every
    argument on the left must be bounded below by one on the right."""
    if isinstance(a, ITVar):
        return a == b
    if isinstance(a, Arrow):
        return (
            isinstance(b, Arrow)
            and all(any(it_leq(y, x) for y in b.args) for x in a.args)
            and it_leq(a.result, b.result)
        )
    return type(a) is type(b) and it_leq(a.body, b.body)


def it_equiv(a: IType, b: IType) -> bool:
    return it_leq(a, b) and it_leq(b, a)


def it_depth(a: IType) -> int:
    if isinstance(a, ITVar):
        return 0
    if isinstance(a, Arrow):
        return 1 + max([it_depth(x) for x in a.args] + [it_depth(a.result)])
    return 1 + it_depth(a.body)


def var_base(name: str) -> str:
    return name.split("@", 1)[0]


def var_elem(name: str) -> Elem:
    if "@" not in name:
        return UNIT
    from .syntax import parse_elem_text

    text = name.split("@", 1)[1]
    if text.startswith("(") and text.endswith(")") and not re.fullmatch(r"\([^()]*,[^()]*\)", text):
        text = text[1:-1]
    return parse_elem_text(text)


def var_name(x: str, e: Elem) -> str:
    if e == UNIT:
        return x
    s = show_elem(e)
    return f"{x}@{s}" if re.fullmatch(r"\w+", s) else f"{x}@({s})"


# ---------------------------------------------------------------------------
# simple types


class SimpleType:
    def __repr__(self):
        return show_simple(self)


@dataclass(frozen=True, repr=False)
class STVar(SimpleType):
    name: str


@dataclass(frozen=True, repr=False)
class STArrow(SimpleType):
    dom: SimpleType
    cod: SimpleType


@dataclass(frozen=True, repr=False)
class STWith(SimpleType):
    left: SimpleType
    right: SimpleType


DEFAULT_ST = STVar("o")


def refines(a: IType, t: SimpleType, assign: Mapping[str, str] | None = None) -> bool:
    """``a : t``.  An IT-variable refines the simple variable it is assigned
    to, by default the part of its name before ``@``."""
    if isinstance(a, ITVar):
        base = assign[a.name] if assign is not None and a.name in assign else var_base(a.name)
        return isinstance(t, STVar) and t.name == base
    if isinstance(a, Arrow):
        return (
            isinstance(t, STArrow)
            and all(refines(x, t.dom, assign) for x in a.args)
            and refines(a.result, t.cod, assign)
        )
    if isinstance(t, STWith):
        return refines(a.body, t.left if isinstance(a, WithL) else t.right, assign)
    return False


def ll_type(t: SimpleType):
    """Call-by-name LL encoding: ``A -> B`` is ``?A^⊥ ⅋ B``."""
    if isinstance(t, STVar):
        return LVar(t.name)
    if isinstance(t, STArrow):
        return LBin("par", LExp("quest", ll_negate(ll_type(t.dom))), ll_type(t.cod))
    return LBin("with", ll_type(t.left), ll_type(t.right))


# ---------------------------------------------------------------------------
# unification of simple types with holes


@dataclass(frozen=True, repr=False)
class _Hole(SimpleType):
    n: int


class _Unifier:
    def __init__(self):
        self.sub: dict = {}
        self._n = itertools.count()

    def fresh(self) -> SimpleType:
        return _Hole(next(self._n))

    def walk(self, t):
        while isinstance(t, _Hole) and t in self.sub:
            t = self.sub[t]
        return t

    def occurs(self, h, t) -> bool:
        t = self.walk(t)
        if t == h:
            return True
        if isinstance(t, STArrow):
            return self.occurs(h, t.dom) or self.occurs(h, t.cod)
        if isinstance(t, STWith):
            return self.occurs(h, t.left) or self.occurs(h, t.right)
        return False

    def unify(self, a, b) -> None:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if isinstance(a, _Hole) or isinstance(b, _Hole):
            h, t = (a, b) if isinstance(a, _Hole) else (b, a)
            if self.occurs(h, t):
                raise NotSimplyTyped("recursive type")
            self.sub[h] = t
            return
        if isinstance(a, STArrow) and isinstance(b, STArrow):
            self.unify(a.dom, b.dom)
            self.unify(a.cod, b.cod)
        elif isinstance(a, STWith) and isinstance(b, STWith):
            self.unify(a.left, b.left)
            self.unify(a.right, b.right)
        else:
            raise NotSimplyTyped(f"cannot match {show_simple(a)} with {show_simple(b)}")

    def resolve(self, t) -> SimpleType:
        t = self.walk(t)
        if isinstance(t, _Hole):
            return DEFAULT_ST
        if isinstance(t, STArrow):
            return STArrow(self.resolve(t.dom), self.resolve(t.cod))
        if isinstance(t, STWith):
            return STWith(self.resolve(t.left), self.resolve(t.right))
        return t

    def shape(self, a: IType) -> SimpleType:
        if isinstance(a, ITVar):
            return STVar(var_base(a.name))
        if isinstance(a, Arrow):
            dom = self.fresh()
            for x in a.args:
                self.unify(dom, self.shape(x))
            return STArrow(dom, self.shape(a.result))
        if isinstance(a, WithL):
            return STWith(self.shape(a.body), self.fresh())
        return STWith(self.fresh(), self.shape(a.body))


def simple_type_of(a: IType) -> SimpleType:
    """The simple type refined by ``a``; unconstrained parts default to ``o``."""
    u = _Unifier()
    try:
        return u.resolve(u.shape(a))
    except NotSimplyTyped as e:
        raise NotRefining(str(e)) from None


# ===========================================================================
# terms


class Term:
    def __repr__(self):
        return show_term(self)


@dataclass(frozen=True, repr=False)
class Var(Term):
    name: str


@dataclass(frozen=True, repr=False)
class Lam(Term):
    var: str
    body: Term


@dataclass(frozen=True, repr=False)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True, repr=False)
class PairT(Term):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class Fst(Term):
    body: Term


@dataclass(frozen=True, repr=False)
class Snd(Term):
    body: Term


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    if isinstance(t, (App, PairT)):
        a, b = (t.fun, t.arg) if isinstance(t, App) else (t.left, t.right)
        return free_vars(a) | free_vars(b)
    return free_vars(t.body)


def _infer(t: Term, ctx: dict, path: tuple, table: dict, u: _Unifier):
    if isinstance(t, Var):
        if t.name not in ctx:
            raise NotSimplyTyped(f"unbound variable {t.name}")
        ty = ctx[t.name]
    elif isinstance(t, Lam):
        if t.var in ctx:
            raise NotSimplyTyped(f"variable {t.var} is bound twice")
        dom = u.fresh()
        table[path + ("bind",)] = dom
        ty = STArrow(dom, _infer(t.body, {**ctx, t.var: dom}, path + (0,), table, u))
    elif isinstance(t, App):
        f = _infer(t.fun, ctx, path + (0,), table, u)
        a = _infer(t.arg, ctx, path + (1,), table, u)
        ty = u.fresh()
        u.unify(f, STArrow(a, ty))
    elif isinstance(t, PairT):
        ty = STWith(_infer(t.left, ctx, path + (0,), table, u), _infer(t.right, ctx, path + (1,), table, u))
    else:
        l, r = u.fresh(), u.fresh()
        u.unify(_infer(t.body, ctx, path + (0,), table, u), STWith(l, r))
        ty = l if isinstance(t, Fst) else r
    table[path] = ty
    return ty


def simple_typing(t: Term, a: SimpleType | None = None, ctx: Sequence[tuple[str, SimpleType]] = ()) -> dict:
    """Types of every subterm (keyed by path) and of every λ-binder
    (``path + ('bind',)``).  Raises :class:`NotSimplyTyped`."""
    u = _Unifier()
    table: dict = {}
    root = _infer(t, dict(ctx), (), table, u)
    if a is not None:
        u.unify(root, a)
    return {k: u.resolve(v) for k, v in table.items()}


# ---------------------------------------------------------------------------
# the call-by-name encoding


_ETA_CACHE: dict = {}


def ll_eta(a) -> LLProof:
    """The η-expanded identity on an LL formula, shaped exactly like the
    erasure of indexed identities."""
    if a not in _ETA_CACHE:
        env = {x: {UNIT} for x in _ll_vars(a)}
        f = empty_formula_like(a, env)
        _ETA_CACHE[a] = erase_proof(sub_to_proof(refl(f, EMPTY)))
    return _ETA_CACHE[a]


def _ll_vars(a) -> set:
    if isinstance(a, LVar):
        return {a.name}
    if isinstance(a, LBin):
        return _ll_vars(a.left) | _ll_vars(a.right)
    if isinstance(a, LExp):
        return _ll_vars(a.body)
    return set()


def _arrange(cur: list, want: list) -> tuple:
    return tuple(cur.index(w) for w in want)


def _var_leaf(k: int, n: int, ctx_forms: Sequence, der, weaken, exch):
    p = der
    others = [j for j in range(n) if j != k]
    for j in reversed(others):
        p = weaken(ctx_forms[j], p)
    return exch(_arrange(others + [k, "r"], list(range(n)) + ["r"]), p)


def _contract_all(p, n: int, contract):
    for k in reversed(range(n)):
        p = contract(p, k, n + k)
    return p


def encode_term(t: Term, a: SimpleType | None = None, ctx: Sequence[tuple[str, SimpleType]] = ()) -> LLProof:
    """The LL proof of ``⊢ ?σ1^⊥, ..., ?σn^⊥, a`` encoding ``t``."""
    ctx = list(ctx)
    types = simple_typing(t, a, ctx)
    return _encode(t, [x for x, _ in ctx], [s for _, s in ctx], (), types)


def _ctx_form(s: SimpleType):
    return LExp("quest", ll_negate(ll_type(s)))


def _encode(t: Term, names: list, sts: list, path: tuple, types: dict) -> LLProof:
    n = len(names)
    forms = [_ctx_form(s) for s in sts]
    if isinstance(t, Var):
        k = names.index(t.name)
        der = LDereliction(ll_eta(ll_type(sts[k])), 0)
        return _var_leaf(k, n, forms, der, LWeakening, ll_exchange)
    if isinstance(t, Lam):
        body = _encode(t.body, names + [t.var], sts + [types[path + ("bind",)]], path + (0,), types)
        return LPar(body, n, n + 1)
    if isinstance(t, App):
        p1 = _encode(t.fun, names, sts, path + (0,), types)
        p2 = _encode(t.arg, names, sts, path + (1,), types)
        tens = LTensor(LPromotion(p2, n), ll_eta(ll_type(types[path])), n, 0)
        return _contract_all(LCut(p1, tens, n, n), n, LContraction)
    if isinstance(t, PairT):
        return LWith(
            _encode(t.left, names, sts, path + (0,), types),
            _encode(t.right, names, sts, path + (1,), types),
            n,
        )
    side = 1 if isinstance(t, Fst) else 2
    body_t = types[path + (0,)]
    pick = body_t.left if side == 1 else body_t.right
    proj = LPlus(ll_negate(ll_type(body_t)), ll_eta(ll_type(pick)), 0, side)
    return LCut(_encode(t.body, names, sts, path + (0,), types), proj, n, 0)


# ===========================================================================
# derivations


def _ctx(d: Mapping[str, Iterable[IType]]) -> tuple:
    return tuple(sorted((x, tuple(sorted(bag, key=it_key))) for x, bag in d.items()))


def make_ctx(d: Mapping[str, Iterable[IType]] | None = None) -> tuple:
    return _ctx(d or {})


class ITDeriv:
    ctx: tuple

    @property
    def env(self) -> dict:
        return dict(self.ctx)


@dataclass(frozen=True)
class DVar(ITDeriv):
    """``Γ, x : [a1..an] ⊢ x : a`` using ``a_witness ≤ a``."""

    ctx: tuple
    var: str
    typ: IType
    witness: int

    @property
    def term(self):
        return Var(self.var)


@dataclass(frozen=True)
class DLam(ITDeriv):
    ctx: tuple
    var: str
    body: ITDeriv

    @property
    def term(self):
        return Lam(self.var, self.body.term)

    @property
    def typ(self):
        return Arrow(self.body.env.get(self.var, ()), self.body.typ)


@dataclass(frozen=True)
class DApp(ITDeriv):
    """One premise for the function and one per argument type."""

    ctx: tuple
    fun: ITDeriv
    args: tuple
    arg: Term

    @property
    def term(self):
        return App(self.fun.term, self.arg)

    @property
    def typ(self):
        return self.fun.typ.result if isinstance(self.fun.typ, Arrow) else None


@dataclass(frozen=True)
class DPair(ITDeriv):
    ctx: tuple
    side: int  # 1: a & •, 2: • & a
    premise: ITDeriv
    other: Term

    @property
    def term(self):
        t = self.premise.term
        return PairT(t, self.other) if self.side == 1 else PairT(self.other, t)

    @property
    def typ(self):
        return (WithL if self.side == 1 else WithR)(self.premise.typ)


@dataclass(frozen=True)
class DProj(ITDeriv):
    ctx: tuple
    side: int  # 1: fst, 2: snd
    premise: ITDeriv

    @property
    def term(self):
        return (Fst if self.side == 1 else Snd)(self.premise.term)

    @property
    def typ(self):
        want = WithL if self.side == 1 else WithR
        t = self.premise.typ
        return t.body if isinstance(t, want) else None


def check_it_deriv(d: ITDeriv, _path: tuple = ()) -> tuple:
    """Validate every rule; returns ``(context, term, type)``."""

    def fail(msg):
        raise ITRuleViolation(_path, msg)

    env = d.env
    if isinstance(d, DVar):
        if d.var not in env:
            fail(f"{d.var} is not in the context")
        bag = env[d.var]
        if not 0 <= d.witness < len(bag):
            fail("witness index out of range")
        if not it_leq(bag[d.witness], d.typ):
            fail(f"{show_itype(bag[d.witness])} is not below {show_itype(d.typ)}")
    elif isinstance(d, DLam):
        if d.var in env:
            fail(f"{d.var} is already bound")
        check_it_deriv(d.body, _path + (0,))
        inner = d.body.env
        inner.pop(d.var, None)
        if _ctx(inner) != d.ctx:
            fail("premise context is not the context extended by the bound variable")
    elif isinstance(d, DApp):
        check_it_deriv(d.fun, _path + (0,))
        if d.fun.ctx != d.ctx:
            fail("function premise has a different context")
        ft = d.fun.typ
        if not isinstance(ft, Arrow):
            fail("function premise does not have an arrow type")
        got = []
        for k, a in enumerate(d.args):
            check_it_deriv(a, _path + (k + 1,))
            if a.ctx != d.ctx:
                fail(f"argument premise {k} has a different context")
            if a.term != d.arg:
                fail(f"argument premise {k} types another term")
            got.append(a.typ)
        if sorted(got, key=it_key) != list(ft.args):
            fail("argument premises do not match the bag of the arrow")
    elif isinstance(d, DPair):
        check_it_deriv(d.premise, _path + (0,))
        if d.premise.ctx != d.ctx:
            fail("premise has a different context")
    elif isinstance(d, DProj):
        check_it_deriv(d.premise, _path + (0,))
        if d.premise.ctx != d.ctx:
            fail("premise has a different context")
        if d.typ is None:
            fail("premise type does not have the projected shape")
    else:
        fail(f"unknown node {type(d).__name__}")
    return d.ctx, d.term, d.typ


def with_context(d: ITDeriv, ctx: tuple) -> ITDeriv:
    """Move ``d`` to a context whose bags bound the old ones from below,
    re-choosing variable witnesses."""
    if isinstance(d, DVar):
        bag = dict(ctx).get(d.var, ())
        for k, a in enumerate(bag):
            if it_leq(a, d.typ):
                return DVar(ctx, d.var, d.typ, k)
        raise ShapeMismatch(f"no witness for {d.var} in the new context")
    if isinstance(d, DLam):
        inner = dict(ctx)
        inner[d.var] = d.body.env.get(d.var, ())
        return DLam(ctx, d.var, with_context(d.body, _ctx(inner)))
    if isinstance(d, DApp):
        return DApp(ctx, with_context(d.fun, ctx), tuple(with_context(a, ctx) for a in d.args), d.arg)
    if isinstance(d, DPair):
        return DPair(ctx, d.side, with_context(d.premise, ctx), d.other)
    return DProj(ctx, d.side, with_context(d.premise, ctx))


def subsume(d: ITDeriv, b: IType) -> ITDeriv:
    """A derivation of the same judgment at a supertype ``b ≥ d.typ``."""
    a = d.typ
    if a == b:
        return d
    if not it_leq(a, b):
        raise ShapeMismatch(f"{show_itype(a)} is not below {show_itype(b)}")
    if isinstance(d, DVar):
        return DVar(d.ctx, d.var, b, d.witness)
    if isinstance(d, DLam):
        inner = d.body.env
        inner[d.var] = b.args
        return DLam(d.ctx, d.var, subsume(with_context(d.body, _ctx(inner)), b.result))
    if isinstance(d, DApp):
        return DApp(d.ctx, subsume(d.fun, Arrow(d.fun.typ.args, b)), d.args, d.arg)
    if isinstance(d, DPair):
        return DPair(d.ctx, d.side, subsume(d.premise, b.body), d.other)
    wrap = WithL if d.side == 1 else WithR
    return DProj(d.ctx, d.side, subsume(d.premise, wrap(b)))


# ---------------------------------------------------------------------------
# building derivations for small terms


def derive(t: Term, a: IType, ctx: tuple = ()) -> ITDeriv:
    """Search for a derivation of ``ctx ⊢ t : a`` in the syntax-directed
    fragment (arguments of applications are typed by synthesis)."""
    env = dict(ctx)
    if isinstance(t, Var):
        for k, b in enumerate(env.get(t.name, ())):
            if it_leq(b, a):
                return DVar(ctx, t.name, a, k)
        raise ShapeMismatch(f"no type for {t.name} below {show_itype(a)}")
    if isinstance(t, Lam):
        if not isinstance(a, Arrow):
            raise ShapeMismatch("λ needs an arrow type")
        inner = _ctx({**env, t.var: a.args})
        return DLam(ctx, t.var, derive(t.body, a.result, inner))
    if isinstance(t, PairT):
        if isinstance(a, WithL):
            return DPair(ctx, 1, derive(t.left, a.body, ctx), t.right)
        if isinstance(a, WithR):
            return DPair(ctx, 2, derive(t.right, a.body, ctx), t.left)
        raise ShapeMismatch("pair needs a & type")
    if isinstance(t, (Fst, Snd)):
        want = _synth(t.body, ctx)
        wrap = WithL if isinstance(t, Fst) else WithR
        if want is None:
            return DProj(ctx, 1 if wrap is WithL else 2, derive(t.body, wrap(a), ctx))
        d = derive(t.body, want, ctx)
        return subsume(DProj(ctx, 1 if wrap is WithL else 2, d), a)
    fun_t = _synth(t.fun, ctx)
    if fun_t is None:
        arg_ts = _synth_all(t.arg, ctx)
        fun_t = Arrow(arg_ts, a)
    if not isinstance(fun_t, Arrow):
        raise ShapeMismatch("applied term is not a function")
    f = derive(t.fun, fun_t, ctx)
    args = tuple(derive(t.arg, x, ctx) for x in fun_t.args)
    return subsume(DApp(ctx, f, args, t.arg), a)


def _synth(t: Term, ctx: tuple) -> IType | None:
    if isinstance(t, Var):
        bag = dict(ctx).get(t.name, ())
        return bag[0] if bag else None
    if isinstance(t, App):
        f = _synth(t.fun, ctx)
        return f.result if isinstance(f, Arrow) else None
    if isinstance(t, (Fst, Snd)):
        b = _synth(t.body, ctx)
        want = WithL if isinstance(t, Fst) else WithR
        return b.body if isinstance(b, want) else None
    return None


def _synth_all(t: Term, ctx: tuple) -> tuple:
    s = _synth(t, ctx)
    return () if s is None else (s,)


# ===========================================================================
# embedding of formulae


def _singleton(locus) -> Elem:
    locus = list(locus)
    if len(locus) != 1:
        raise NotInFragment("formula is not over a one-point locus")
    return locus[0]


def embed(a: Formula) -> IType:
    if isinstance(a, PVar):
        return ITVar(var_name(a.name, a.f(_singleton(a.f.dom))))
    if isinstance(a, Par) and isinstance(a.left, Quest):
        q = a.left
        _singleton(q.u.cod)
        body = negate(q.body)
        args = [embed(base_change(cst(y, q.u.dom), body)) for y in sorted(q.u.dom)]
        return Arrow(tuple(args), embed(a.right))
    if isinstance(a, With):
        if not a.j.dom and len(a.i.dom) == 1 and len(a.i.cod) == 1:
            return WithL(embed(a.left))
        if not a.i.dom and len(a.j.dom) == 1 and len(a.j.cod) == 1:
            return WithR(embed(a.right))
    raise NotInFragment(f"{type(a).__name__} is outside the embeddable fragment")


def in_fragment(a: Formula) -> bool:
    try:
        embed(a)
    except NotInFragment:
        return False
    return True


def it_env(types: Iterable[IType] = (), sts: Iterable[SimpleType] = ()) -> dict:
    """Variable loci making every IT-variable and simple variable well defined."""
    env: dict = {}

    def go_it(a):
        if isinstance(a, ITVar):
            env.setdefault(var_base(a.name), set()).add(var_elem(a.name))
        elif isinstance(a, Arrow):
            for x in a.args:
                go_it(x)
            go_it(a.result)
        else:
            go_it(a.body)

    def go_st(t):
        if isinstance(t, STVar):
            env.setdefault(t.name, set())
        elif isinstance(t, STArrow):
            go_st(t.dom)
            go_st(t.cod)
        else:
            go_st(t.left)
            go_st(t.right)

    for a in types:
        go_it(a)
    for t in sts:
        go_st(t)
    return {x: frozenset(s) if s else frozenset({UNIT}) for x, s in env.items()}


def reify(a: IType, st: SimpleType | None = None, env: VarEnv | None = None) -> Formula:
    """A formula over the one-point locus embedding to ``a`` (up to ≃)."""
    st = simple_type_of(a) if st is None else st
    if not refines(a, st):
        raise NotRefining(f"{show_itype(a)} does not refine {show_simple(st)}")
    env = it_env([a], [st]) if env is None else env
    return _reify(a, st, env)


def _reify(a: IType, st: SimpleType, env) -> Formula:
    if isinstance(a, ITVar):
        x = var_base(a.name)
        return PVar(cst(var_elem(a.name), env[x]), x)
    if isinstance(a, Arrow):
        u, m = reify_bag(a.args, st.dom, env)
        return Par(Quest(u, negate(m)), _reify(a.result, st.cod, env))
    left = isinstance(a, WithL)
    body = _reify(a.body, st.left if left else st.right, env)
    other = empty_formula_like(ll_type(st.right if left else st.left), env)
    nil = init(ONE)
    if left:
        return With(identity(ONE), nil, body, other)
    return With(nil, identity(ONE), other, body)


def reify_bag(bag: Sequence[IType], st: SimpleType, env) -> tuple[SetFun, Formula]:
    """The map ``u`` and the intersection ``M`` with ``!_u M`` standing for the bag."""
    bag = list(bag)
    if not bag:
        return SetFun(EMPTY, ONE, {}), empty_formula_like(ll_type(st), env)
    locus, _ = sum_loci([ONE] * len(bag))
    forms = [_reify(b, st, env) for b in bag]
    return terminal(locus), _intersect(forms, [ONE] * len(bag), env)


def bag_points(n: int) -> list[Elem]:
    """Elements of the bag locus, in the order of the sorted bag."""
    _, injs = sum_loci([ONE] * n)
    return [inj(UNIT) for inj in injs]


# ===========================================================================
# proofs


def empty_refinement(q: LLProof, env: VarEnv) -> Proof:
    """An indexed proof over ∅ whose erasure is ``q``; its conclusion is
    ``empty_formula_like`` of each formula."""
    target = [empty_formula_like(a, env) for a in q.concl]
    t = type(q)
    rec = lambda c: empty_refinement(c, env)
    e = init(EMPTY)
    if t is LAx:
        out = Ax(init(env[q.name]), q.name)
    elif t is LOne:
        out = OneIntro(EMPTY)
    elif t is LBot:
        out = BotIntro(rec(q.premise))
    elif t is LTop:
        out = TopIntro(tuple(target[1:]))
    elif t in (LTensor, LCut):
        cls = TensorIntro if t is LTensor else Cut
        l, r = rec(q.left), rec(q.right)
        if t is LCut:
            r = coerce(r, _put(r.concl, q.ri, negate(l.concl[q.li])))
        out = cls(l, r, q.li, q.ri)
    elif t is LPar:
        out = ParIntro(rec(q.premise), q.a, q.b)
    elif t is LContraction:
        out = Contraction(rec(q.premise), q.a, q.b)
    elif t is LExchange:
        out = Exchange(q.perm, rec(q.premise))
    elif t is LWith:
        ctx = tuple(x for k, x in enumerate(target) if k != q.idx)
        w = target[q.idx]
        prem = []
        for sub, comp in ((q.left, w.left), (q.right, w.right)):
            want = [base_change(e, x) for x in ctx]
            want.insert(q.idx, comp)
            prem.append(coerce(rec(sub), want))
        out = WithIntro(e, e, ctx, prem[0], prem[1], q.idx)
    elif t is LPlus:
        form = target[q.idx]
        comp = form.left if q.side == 1 else form.right
        p = rec(q.premise)
        out = PlusIntro(form, coerce(p, _put(p.concl, q.idx, base_change(invert(e), comp))), q.idx, q.side)
    elif t is LWeakening:
        out = Weakening(target[0], rec(q.premise))
    elif t is LDereliction:
        form = target[q.idx]
        p = rec(q.premise)
        out = Dereliction(e, form, coerce(p, _put(p.concl, q.idx, base_change(e, form.body))), q.idx)
    elif t is LPromotion:
        ctx = tuple(x for k, x in enumerate(target) if k != q.idx)
        p = rec(q.premise)
        want = [base_change(e, x) for x in ctx]
        want.insert(q.idx, p.concl[q.idx])
        out = Promotion(e, ctx, coerce(p, want), q.idx)
    else:
        raise ShapeMismatch(f"unknown rule {q.rule}")
    return coerce(out, target)


def _put(seq, k, x) -> tuple:
    seq = list(seq)
    seq[k] = x
    return tuple(seq)


@dataclass
class _Bridge:
    """Shared state of one translation: simple types per path and the
    variable loci used by every reified formula."""

    types: dict
    env: dict
    ctx_sts: dict = field(default_factory=dict)

    def form(self, a: IType, st: SimpleType) -> Formula:
        return _reify(a, st, self.env)

    def ctx_form(self, bag, st) -> Formula:
        u, m = reify_bag(bag, st, self.env)
        return Quest(u, negate(m))


def _all_types(d: ITDeriv):
    for _, bag in d.ctx:
        yield from bag
    yield d.typ
    for c in _kids(d):
        yield from _all_types(c)


def _kids(d: ITDeriv) -> tuple:
    if isinstance(d, DLam):
        return (d.body,)
    if isinstance(d, DApp):
        return (d.fun,) + tuple(d.args)
    if isinstance(d, (DPair, DProj)):
        return (d.premise,)
    return ()


def _solve(d: ITDeriv) -> tuple[dict, dict]:
    """Simple types of every subterm of ``d.term`` and of its context."""
    u = _Unifier()
    ctx_st = {x: u.fresh() for x, _ in d.ctx}
    table: dict = {}
    _infer(d.term, dict(ctx_st), (), table, u)

    def walk(n: ITDeriv, path: tuple, scope: dict):
        u.unify(table[path], u.shape(n.typ))
        for x, bag in n.ctx:
            if x in scope:
                for b in bag:
                    u.unify(scope[x], u.shape(b))
        if isinstance(n, DLam):
            walk(n.body, path + (0,), {**scope, n.var: table[path + ("bind",)]})
        elif isinstance(n, DApp):
            walk(n.fun, path + (0,), scope)
            for a in n.args:
                walk(a, path + (1,), scope)
        elif isinstance(n, DPair):
            walk(n.premise, path + (0 if n.side == 1 else 1,), scope)
        elif isinstance(n, DProj):
            walk(n.premise, path + (0,), scope)

    walk(d, (), dict(ctx_st))
    return {k: u.resolve(v) for k, v in table.items()}, {x: u.resolve(s) for x, s in ctx_st.items()}


def it_to_indll(d: ITDeriv) -> Proof:
    """Translate a derivation ``Γ ⊢ t : a`` into an indexed proof over the
    one-point locus of ``⊢ Γ*, a*``; context variables are ordered by name.
    Its erasure is ``encode_term(t, ...)`` for the inferred simple types."""
    check_it_deriv(d)
    types, ctx_st = _solve(d)
    env = it_env(list(_all_types(d)), list(types.values()) + list(ctx_st.values()))
    b = _Bridge(types, env, ctx_st)
    names = [x for x, _ in d.ctx]
    return _to_proof(d, names, [ctx_st[x] for x in names], (), b)


def bridge_signature(d: ITDeriv) -> tuple[Term, SimpleType, list]:
    """``(term, simple type, [(name, simple type)])`` matching :func:`it_to_indll`."""
    types, ctx_st = _solve(d)
    return d.term, types[()], [(x, ctx_st[x]) for x, _ in d.ctx]


def _to_proof(d: ITDeriv, names: list, sts: list, path: tuple, b: _Bridge) -> Proof:
    n = len(names)
    env = d.env
    gamma = [b.ctx_form(env[x], s) for x, s in zip(names, sts)]
    goal = gamma + [b.form(d.typ, b.types[path])]
    if isinstance(d, DVar):
        k = names.index(d.var)
        bag = env[d.var]
        u, m = reify_bag(bag, sts[k], b.env)
        f = cst(bag_points(len(bag))[d.witness], u.dom)
        picked = base_change(f, m)
        rho = decide_subtype(picked, goal[-1], ONE)
        if rho is None:
            raise ShapeMismatch("witness is not a subtype of the goal")
        prem = coerce(sub_to_proof(rho), [base_change(f, negate(m)), goal[-1]])
        der = Dereliction(f, gamma[k], prem, 0)
        out = _var_leaf(k, n, gamma, der, Weakening, exchange)
    elif isinstance(d, DLam):
        st = b.types[path + ("bind",)]
        body = _to_proof(d.body, names + [d.var], sts + [st], path + (0,), b)
        out = ParIntro(body, n, n + 1)
    elif isinstance(d, DApp):
        p1 = _to_proof(d.fun, names, sts, path + (0,), b)
        arg_st = b.types[path + (1,)]
        u, m = reify_bag(d.fun.typ.args, arg_st, b.env)
        if d.args:
            ordered = sorted(d.args, key=lambda a: it_key(a.typ))
            parts = [_to_proof(a, names, sts, path + (1,), b) for a in ordered]
            prem = intersect_proofs([(ONE, p) for p in parts])
        else:
            q = _encode(d.arg, names, sts, path + (1,), b.types)
            prem = empty_refinement(q, b.env)
        prem = coerce(prem, [base_change(u, g) for g in gamma] + [m])
        prom = Promotion(u, tuple(gamma), prem, n)
        res = goal[-1]
        tens = TensorIntro(prom, sub_to_proof(refl(res, ONE)), n, 0)
        p1 = coerce(p1, gamma + [negate(tens.concl[n])])
        out = _contract_all(Cut(p1, tens, n, n), n, Contraction)
    elif isinstance(d, DPair):
        w = goal[-1]
        inj, nil = (w.i, w.j) if d.side == 1 else (w.j, w.i)
        here = _to_proof(d.premise, names, sts, path + ((0,) if d.side == 1 else (1,)), b)
        here = coerce(here, [base_change(inj, g) for g in gamma] + [w.left if d.side == 1 else w.right])
        other_path = path + ((1,) if d.side == 1 else (0,))
        q = _encode(d.other, names, sts, other_path, b.types)
        there = empty_refinement(q, b.env)
        there = coerce(there, [base_change(nil, g) for g in gamma] + [w.right if d.side == 1 else w.left])
        l, r = (here, there) if d.side == 1 else (there, here)
        out = WithIntro(w.i, w.j, tuple(gamma), l, r, n)
    else:
        p = _to_proof(d.premise, names, sts, path + (0,), b)
        w = p.concl[n]
        inj, comp = (w.i, w.left) if d.side == 1 else (w.j, w.right)
        picked = base_change(invert(inj), comp)
        rho = decide_subtype(picked, goal[-1], ONE)
        if rho is None:
            raise ShapeMismatch("projection does not reach the goal type")
        prem = coerce(sub_to_proof(rho), [base_change(invert(inj), negate(comp)), goal[-1]])
        proj = PlusIntro(negate(w), prem, 0, d.side)
        out = Cut(p, proj, n, 0)
    return coerce(out, goal)


# ---------------------------------------------------------------------------
# back from proofs


def indll_to_it(p: Proof, t: Term, names: Sequence[str] | None = None) -> ITDeriv:
    """Read off a derivation typing ``t`` at the embedding of the last
    conclusion formula of ``p`` (a proof over a one-point locus)."""
    n = len(p.concl) - 1
    if names is None:
        names = sorted(free_vars(t))
        if len(names) != n:
            raise ShapeMismatch("context names are needed for this proof")
    names = list(names)
    if len(names) != n:
        raise ShapeMismatch("number of context names does not match the proof")
    sts = [_st_of_ll(_unquest(p.concl[k])) for k in range(n)]
    try:
        want = encode_term(t, _st_of_ll(erase(p.concl[-1])), list(zip(names, sts)))
    except NotSimplyTyped as e:
        raise ShapeMismatch(str(e)) from None
    if erase_proof(p) != want:
        raise ShapeMismatch("erasure is not the encoding of the term")
    return _from_proof(elaborate(p), t, names)


def _unquest(a: Formula):
    e = erase(a)
    if not (isinstance(e, LExp) and e.op == "quest"):
        raise ShapeMismatch("context formulae must be ?-formulae")
    return ll_negate(e.body)


def _st_of_ll(a) -> SimpleType:
    if isinstance(a, LVar) and a.positive:
        return STVar(a.name)
    if isinstance(a, LBin) and a.op == "with":
        return STWith(_st_of_ll(a.left), _st_of_ll(a.right))
    if isinstance(a, LBin) and a.op == "par" and isinstance(a.left, LExp) and a.left.op == "quest":
        return STArrow(_st_of_ll(ll_negate(a.left.body)), _st_of_ll(a.right))
    raise ShapeMismatch("formula is not the encoding of a simple type")


def _bag_of(a: Formula) -> tuple:
    body = negate(a.body)
    return tuple(embed(base_change(cst(y, a.u.dom), body)) for y in sorted(a.u.dom))


def _context_of(p: Proof, names: list) -> tuple:
    return _ctx({x: _bag_of(p.concl[k]) for k, x in enumerate(names)})


def _strip_exchange(p: Proof) -> Proof:
    while isinstance(p, Exchange):
        p = p.premise
    return p


def _from_proof(p: Proof, t: Term, names: list) -> ITDeriv:
    return subsume(_read(p, t, names), embed(p.concl[-1]))


def _read(p: Proof, t: Term, names: list) -> ITDeriv:
    n = len(names)
    ctx = _context_of(p, names)
    if isinstance(t, Var):
        q = _strip_exchange(p)
        while isinstance(q, Weakening):
            q = q.premise
        if not isinstance(q, Dereliction):
            raise ShapeMismatch("variable leaf without dereliction")
        bag_form = q.formula
        e = q.f(_singleton(q.f.dom))
        picked = embed(base_change(cst(e, bag_form.u.dom), negate(bag_form.body)))
        return with_context(DVar(_ctx({t.name: (picked,)}), t.name, picked, 0), ctx)
    if isinstance(t, Lam):
        if not isinstance(p, ParIntro):
            raise ShapeMismatch("abstraction without ⅋")
        body = _from_proof(p.premise, t.body, names + [t.var])
        return DLam(ctx, t.var, body)
    if isinstance(t, App):
        q = p
        for _ in range(n):
            if not isinstance(q, Contraction):
                raise ShapeMismatch("application without contractions")
            q = q.premise
        if not isinstance(q, Cut) or not isinstance(q.right, TensorIntro):
            raise ShapeMismatch("application without cut")
        fun = with_context(_from_proof(q.left, t.fun, names), ctx)
        prom = q.right.left
        if not isinstance(prom, Promotion):
            raise ShapeMismatch("argument without promotion")
        args = []
        for y in sorted(prom.v.dom):
            piece = elaborate(BaseChangeStep(cst(y, prom.v.dom), prom.premise))
            args.append(with_context(_from_proof(piece, t.arg, names), ctx))
        want = fun.typ.args
        by_type: dict = {}
        for a in args:
            by_type.setdefault(a.typ, a)
        chosen = []
        for a in want:
            if a not in by_type:
                raise ShapeMismatch("argument type missing from the promoted proof")
            chosen.append(by_type[a])
        return DApp(ctx, fun, tuple(chosen), t.arg)
    if isinstance(t, PairT):
        if not isinstance(p, WithIntro):
            raise ShapeMismatch("pair without &")
        if p.i.dom:
            return DPair(ctx, 1, with_context(_from_proof(p.left, t.left, names), ctx), t.right)
        return DPair(ctx, 2, with_context(_from_proof(p.right, t.right, names), ctx), t.left)
    if not isinstance(p, Cut) or not isinstance(p.right, PlusIntro):
        raise ShapeMismatch("projection without cut")
    inner = with_context(_from_proof(p.left, t.body, names), ctx)
    side = 1 if isinstance(t, Fst) else 2
    return DProj(ctx, side, inner)


# ===========================================================================
# concrete syntax


def show_itype(a: IType) -> str:
    if isinstance(a, ITVar):
        return a.name
    if isinstance(a, Arrow):
        return "[" + ", ".join(show_itype(x) for x in a.args) + "] -> " + show_itype(a.result)
    if isinstance(a, WithL):
        inner = show_itype(a.body)
        if isinstance(a.body, (Arrow, WithR)):
            inner = f"({inner})"
        return inner + " &."
    return ".& " + show_itype(a.body)


def show_simple(t: SimpleType) -> str:
    if isinstance(t, STVar):
        return t.name
    if isinstance(t, _Hole):
        return f"?{t.n}"
    if isinstance(t, STArrow):
        d = show_simple(t.dom)
        if isinstance(t.dom, STArrow):
            d = f"({d})"
        return f"{d} -> {show_simple(t.cod)}"
    l, r = show_simple(t.left), show_simple(t.right)
    if not isinstance(t.left, STVar):
        l = f"({l})"
    if not isinstance(t.right, STVar):
        r = f"({r})"
    return f"{l} & {r}"


def show_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"\\{t.var}. {show_term(t.body)}"
    if isinstance(t, App):
        f = show_term(t.fun)
        if isinstance(t.fun, Lam):
            f = f"({f})"
        a = show_term(t.arg)
        if isinstance(t.arg, (Lam, App, Fst, Snd)):
            a = f"({a})"
        return f"{f} {a}"
    if isinstance(t, PairT):
        return f"({show_term(t.left)}, {show_term(t.right)})"
    a = show_term(t.body)
    if isinstance(t.body, (Lam, App, Fst, Snd)):
        a = f"({a})"
    return ("fst " if isinstance(t, Fst) else "snd ") + a


_TOKEN = re.compile(
    r"\s*(?:(?P<sym>->|&\.|\.&|[\[\](),\\.&])|(?P<name>[A-Za-z_][\w']*(?:@(?:\w+|\([^()]*(?:\([^()]*\)[^()]*)*\)))?))"
)


def _tokens(src: str) -> list[str]:
    out, pos = [], 0
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ITParseError(f"unexpected character at {pos}: {src[pos:pos + 10]!r}")
        out.append(m.group("sym") or m.group("name"))
        pos = m.end()
    return out


class _P:
    def __init__(self, src: str):
        self.toks = _tokens(src)
        self.k = 0

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ITParseError("unexpected end of input")
        self.k += 1
        return t

    def expect(self, s):
        t = self.next()
        if t != s:
            raise ITParseError(f"expected {s!r}, found {t!r}")

    def done(self):
        if self.peek() is not None:
            raise ITParseError(f"trailing input at {self.peek()!r}")


def _is_name(t) -> bool:
    return t is not None and (t[0].isalpha() or t[0] == "_")


def parse_itype(src: str) -> IType:
    p = _P(src)
    a = _itype(p)
    p.done()
    return a


def _itype(p: _P) -> IType:
    t = p.peek()
    if t == "[":
        p.next()
        args = []
        if p.peek() != "]":
            args.append(_itype(p))
            while p.peek() == ",":
                p.next()
                args.append(_itype(p))
        p.expect("]")
        p.expect("->")
        return Arrow(tuple(args), _itype(p))
    if t == ".&":
        p.next()
        return WithR(_itype(p))
    if t == "(":
        p.next()
        a = _itype(p)
        p.expect(")")
    elif _is_name(t):
        a = ITVar(p.next())
    else:
        raise ITParseError(f"unexpected {t!r} in a type")
    while p.peek() == "&.":
        p.next()
        a = WithL(a)
    return a


def parse_simple(src: str) -> SimpleType:
    p = _P(src)
    a = _simple(p)
    p.done()
    return a


def _simple(p: _P) -> SimpleType:
    left = _simple_with(p)
    if p.peek() == "->":
        p.next()
        return STArrow(left, _simple(p))
    return left


def _simple_with(p: _P) -> SimpleType:
    left = _simple_atom(p)
    while p.peek() == "&":
        p.next()
        left = STWith(left, _simple_atom(p))
    return left


def _simple_atom(p: _P) -> SimpleType:
    t = p.next()
    if t == "(":
        a = _simple(p)
        p.expect(")")
        return a
    if _is_name(t):
        return STVar(t)
    raise ITParseError(f"unexpected {t!r} in a simple type")


_KEYWORDS = {"fst", "snd"}


def parse_term(src: str) -> Term:
    p = _P(src)
    t = _term(p)
    p.done()
    return t


def _term(p: _P) -> Term:
    if p.peek() == "\\":
        p.next()
        xs = []
        while _is_name(p.peek()) and p.peek() not in _KEYWORDS:
            xs.append(p.next())
        if not xs:
            raise ITParseError("λ without a variable")
        p.expect(".")
        body = _term(p)
        for x in reversed(xs):
            body = Lam(x, body)
        return body
    t = _unit(p)
    while p.peek() not in (None, ")", ",", "."):
        if p.peek() == "\\":
            t = App(t, _term(p))
            break
        t = App(t, _unit(p))
    return t


def _unit(p: _P) -> Term:
    t = p.peek()
    if t in _KEYWORDS:
        p.next()
        arg = _atom(p)
        return Fst(arg) if t == "fst" else Snd(arg)
    return _atom(p)


def _atom(p: _P) -> Term:
    t = p.next()
    if t == "(":
        a = _term(p)
        if p.peek() == ",":
            p.next()
            b = _term(p)
            p.expect(")")
            return PairT(a, b)
        p.expect(")")
        return a
    if _is_name(t) and t not in _KEYWORDS and "@" not in t:
        return Var(t)
    raise ITParseError(f"unexpected {t!r} in a term")

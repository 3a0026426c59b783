"""Proof-relevant subtyping derivations.

Every derivation node caches its endpoints ``(locus, lhs, rhs)``;
:func:`check_sub` re-derives them from the premises and rejects stale caches.
The derived constructions (:func:`refl`, :func:`trans`, :func:`bc_sub`,
:func:`tower_iso`, :func:`decompose`) are built by structural recursion and
always return derivations accepted by :func:`check_sub`.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable, Mapping, Sequence

from .formula import (
    Bang,
    Bot,
    Formula,
    LocusMismatch,
    NVar,
    One,
    Par,
    Plus,
    PVar,
    Quest,
    Tensor,
    Top,
    VarEnv,
    With,
    Zero,
    base_change,
    base_change_tower,
    check_def,
    erase,
)
from .setfun import (
    ONE,
    UNIT,
    Elem,
    Locus,
    SetFun,
    compose,
    compose_all,
    cst,
    factor,
    identity,
    orthogonal,
    pair,
    pullback,
    preimage,
)


class SubtypingError(ValueError):
    pass


class BadSideCondition(SubtypingError):
    def __init__(self, path, reason):
        self.path = tuple(path)
        super().__init__(f"at {list(self.path)}: {reason}")


class EndpointMismatch(SubtypingError):
    def __init__(self, path, reason):
        self.path = tuple(path)
        super().__init__(f"at {list(self.path)}: {reason}")


class MissingPoint(SubtypingError):
    pass


class SearchBoundExceeded(SubtypingError):
    pass


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
    return cls


class SubDeriv:
    locus: Locus
    lhs: Formula
    rhs: Formula

    def premises(self) -> tuple["SubDeriv", ...]:
        return ()

    def __repr__(self) -> str:
        from .syntax import show_sub

        return show_sub(self)


@_node
class AxVar(SubDeriv):
    f: SetFun
    name: str
    positive: bool
    locus: Locus
    lhs: Formula
    rhs: Formula


@_node
class AxUnit(SubDeriv):
    """``1 ⊑ 1``, ``⊥ ⊑ ⊥``, ``0 ⊑ 0`` or ``⊤ ⊑ ⊤`` (kind read from the endpoint)."""

    locus: Locus
    lhs: Formula
    rhs: Formula


@_node
class MultCong(SubDeriv):
    """Congruence for ⊗ and ⅋."""

    left: SubDeriv
    right: SubDeriv
    locus: Locus
    lhs: Formula
    rhs: Formula

    def premises(self):
        return (self.left, self.right)


@_node
class AddRule(SubDeriv):
    """The & / ⊕ rule; premises live over the pullbacks of the injections."""

    left: SubDeriv
    right: SubDeriv
    locus: Locus
    lhs: Formula
    rhs: Formula

    def premises(self):
        return (self.left, self.right)


@_node
class BangRule(SubDeriv):
    """``g(A) ⊑ A'`` gives ``!_u A ⊑ !_{g;u} A'``."""

    g: SetFun
    premise: SubDeriv
    locus: Locus
    lhs: Formula
    rhs: Formula

    def premises(self):
        return (self.premise,)


@_node
class QuestRule(SubDeriv):
    """``A ⊑ g(A')`` gives ``?_{g;u} A ⊑ ?_u A'``."""

    g: SetFun
    premise: SubDeriv
    locus: Locus
    lhs: Formula
    rhs: Formula

    def premises(self):
        return (self.premise,)


# -- smart constructors -----------------------------------------------------


def ax_var(a: Formula) -> AxVar:
    if not isinstance(a, (PVar, NVar)):
        raise BadSideCondition((), "the variable axiom needs a variable")
    return AxVar(a.f, a.name, isinstance(a, PVar), a.f.dom, a, a)


def ax_unit(locus: Iterable, a: Formula) -> AxUnit:
    return AxUnit(frozenset(locus), a, a)


def mult_cong(d1: SubDeriv, d2: SubDeriv, tensor: bool = True) -> MultCong:
    t = Tensor if tensor else Par
    return MultCong(d1, d2, d1.locus, t(d1.lhs, d2.lhs), t(d1.rhs, d2.rhs))


def add_rule(lhs: Formula, rhs: Formula, d1: SubDeriv, d2: SubDeriv) -> AddRule:
    if not isinstance(lhs, (With, Plus)):
        raise BadSideCondition((), "the additive rule relates & or ⊕ formulae")
    return AddRule(d1, d2, lhs.i.cod, lhs, rhs)


def bang_rule(u: SetFun, a: Formula, g: SetFun, d: SubDeriv) -> BangRule:
    return BangRule(g, d, u.cod, Bang(u, a), Bang(compose(g, u), d.rhs))


def quest_rule(u: SetFun, b: Formula, g: SetFun, d: SubDeriv) -> QuestRule:
    return QuestRule(g, d, u.cod, Quest(compose(g, u), d.lhs), Quest(u, b))


# -- checking ---------------------------------------------------------------


def check_sub(d: SubDeriv, env: VarEnv | None = None, _path: tuple = ()) -> tuple[Locus, Formula, Formula]:
    """Validate ``d`` and return its endpoints."""
    lhs, rhs, locus = d.lhs, d.rhs, d.locus

    def bad(msg):
        raise BadSideCondition(_path, msg)

    def mismatch(msg):
        raise EndpointMismatch(_path, msg)

    if isinstance(d, AxVar):
        expect = (PVar if d.positive else NVar)(d.f, d.name)
        if lhs != expect or rhs != expect or locus != d.f.dom:
            mismatch("variable axiom endpoints differ")
    elif isinstance(d, AxUnit):
        if lhs != rhs or not isinstance(lhs, (One, Bot, Zero, Top)):
            mismatch("unit axiom needs equal unit endpoints")
        if isinstance(lhs, (Zero, Top)) and locus:
            bad("additive units live over the empty locus")
    elif isinstance(d, MultCong):
        t = type(lhs)
        if t not in (Tensor, Par) or type(rhs) is not t:
            mismatch("congruence endpoints are not both ⊗ or both ⅋")
        for k, (sub, a, b) in enumerate(((d.left, lhs.left, rhs.left), (d.right, lhs.right, rhs.right))):
            l2, a2, b2 = check_sub(sub, env, _path + (k,))
            if l2 != locus or a2 != a or b2 != b:
                mismatch("congruence premise does not match the conclusion")
    elif isinstance(d, AddRule):
        t = type(lhs)
        if t not in (With, Plus) or type(rhs) is not t:
            mismatch("additive rule endpoints are not both & or both ⊕")
        i, j, i2, j2 = lhs.i, lhs.j, rhs.i, rhs.j
        if not (i.cod == j.cod == i2.cod == j2.cod == locus):
            mismatch("injections do not target the shared locus")
        if not orthogonal(i, j2):
            bad("left injection of the lower formula meets the right injection of the upper one")
        if not orthogonal(j, i2):
            bad("right injection of the lower formula meets the left injection of the upper one")
        for k, (sub, a, b, x, y) in enumerate(((d.left, lhs.left, rhs.left, i, i2), (d.right, lhs.right, rhs.right, j, j2))):
            p, p1, p2 = pullback(x, y)
            l2, a2, b2 = check_sub(sub, env, _path + (k,))
            if l2 != p:
                mismatch("additive premise is not over the pullback")
            if a2 != base_change(p1, a) or b2 != base_change(p2, b):
                mismatch("additive premise endpoints are not the pulled-back components")
    elif isinstance(d, BangRule):
        if not isinstance(lhs, Bang) or not isinstance(rhs, Bang):
            mismatch("! rule endpoints are not exponentials")
        if d.g.cod != lhs.u.dom:
            bad("witness codomain differs from the bag of the lower formula")
        if rhs.u != compose(d.g, lhs.u):
            bad("upper index is not the witness composed with the lower index")
        if locus != lhs.u.cod:
            mismatch("locus differs from the bag index codomain")
        l2, a2, b2 = check_sub(d.premise, env, _path + (0,))
        if l2 != d.g.dom or a2 != base_change(d.g, lhs.body) or b2 != rhs.body:
            mismatch("! rule premise does not match g(A) ⊑ A'")
    elif isinstance(d, QuestRule):
        if not isinstance(lhs, Quest) or not isinstance(rhs, Quest):
            mismatch("? rule endpoints are not exponentials")
        if d.g.cod != rhs.u.dom:
            bad("witness codomain differs from the bag of the upper formula")
        if lhs.u != compose(d.g, rhs.u):
            bad("lower index is not the witness composed with the upper index")
        if locus != rhs.u.cod:
            mismatch("locus differs from the bag index codomain")
        l2, a2, b2 = check_sub(d.premise, env, _path + (0,))
        if l2 != d.g.dom or a2 != lhs.body or b2 != base_change(d.g, rhs.body):
            mismatch("? rule premise does not match A ⊑ g(A')")
    else:
        raise SubtypingError(f"unknown derivation node {type(d).__name__}")
    if env is not None and not _path:
        check_def(locus, lhs, env)
        check_def(locus, rhs, env)
    return locus, lhs, rhs


def is_valid(d: SubDeriv, env: VarEnv | None = None) -> bool:
    try:
        check_sub(d, env)
    except (SubtypingError, LocusMismatch, ValueError):
        return False
    return True


def deriv_size(d: SubDeriv) -> int:
    return 1 + sum(deriv_size(p) for p in d.premises())


# -- pseudofunctoriality ----------------------------------------------------


def _pull_through(fs: Sequence[SetFun], idx: SetFun) -> tuple[SetFun, list[SetFun]]:
    """Push an index map ``idx`` through the tower ``fs`` as base change does.

    Returns ``(outer, conts)`` with ``fs(Bang(idx, B)) = Bang(outer, conts(B))``."""
    conts: list[SetFun] = []
    for f in reversed(fs):
        _, p, q = pullback(f, idx)
        idx = p
        conts.insert(0, q)
    return idx, conts


def _composite(maps: Sequence[SetFun], start: Locus) -> SetFun:
    return compose_all(maps, start)


def tower_iso(fs: Sequence[SetFun], gs: Sequence[SetFun], a: Formula, base: Iterable) -> SubDeriv:
    """Derive ``fs(a) ⊑ gs(a)`` over ``base`` when both towers compose to the same map.

    ``fs = [f1, ..., fn]`` denotes ``f1(f2(... fn(a)))``; an empty tower is the
    identity on ``base``."""
    base = frozenset(base)
    fs, gs = list(fs), list(gs)
    if fs and fs[0].dom != base or gs and gs[0].dom != base:
        raise LocusMismatch("tower does not start at the base locus")
    if _composite(fs, base) != _composite(gs, base):
        raise LocusMismatch("towers do not compose to the same function")
    return _tower(fs, gs, a, base)


def _tower(fs, gs, a, base) -> SubDeriv:
    t = type(a)
    if t in (PVar, NVar):
        return ax_var(base_change_tower(fs, a))
    if t in (One, Bot, Zero, Top):
        return ax_unit(base, a)
    if t in (Tensor, Par):
        return mult_cong(_tower(fs, gs, a.left, base), _tower(fs, gs, a.right, base), t is Tensor)
    lhs = base_change_tower(fs, a)
    rhs = base_change_tower(gs, a)
    if t in (With, Plus):
        prem = []
        for idx, sub, li, ri in ((a.i, a.left, lhs.i, rhs.i), (a.j, a.right, lhs.j, rhs.j)):
            _, cl = _pull_through(fs, idx)
            _, cr = _pull_through(gs, idx)
            q, q1, q2 = pullback(li, ri)
            prem.append(_tower([q1] + cl, [q2] + cr, sub, q))
        return add_rule(lhs, rhs, prem[0], prem[1])
    ul, cl = _pull_through(fs, a.u)
    ur, cr = _pull_through(gs, a.u)
    cl_all = _composite(cl, ul.dom)
    cr_all = _composite(cr, ur.dom)
    if t is Bang:
        # g : dom ur -> dom ul, the unique point with matching coordinates
        key = {(ul(x), cl_all(x)): x for x in ul.dom}
        g = SetFun(ur.dom, ul.dom, {y: key[(ur(y), cr_all(y))] for y in ur.dom})
        return bang_rule(ul, lhs.body, g, _tower([g] + cl, cr, a.body, ur.dom))
    key = {(ur(y), cr_all(y)): y for y in ur.dom}
    g = SetFun(ul.dom, ur.dom, {x: key[(ul(x), cl_all(x))] for x in ul.dom})
    return quest_rule(ur, rhs.body, g, _tower(cl, [g] + cr, a.body, ul.dom))


def compose_iso(f: SetFun, g: SetFun, a: Formula) -> tuple[SubDeriv, SubDeriv]:
    """``f(g(a)) ⊑ (f;g)(a)`` and its converse."""
    fg = compose(f, g)
    return tower_iso([f, g], [fg], a, f.dom), tower_iso([fg], [f, g], a, f.dom)


def id_iso(a: Formula, locus: Iterable) -> tuple[SubDeriv, SubDeriv]:
    """``id(a) ⊑ a`` and ``a ⊑ id(a)``."""
    i = identity(locus)
    return tower_iso([i], [], a, i.dom), tower_iso([], [i], a, i.dom)


def refl(a: Formula, locus: Iterable) -> SubDeriv:
    return tower_iso([], [], a, locus)


# -- base change of derivations ---------------------------------------------


def bc_sub(f: SetFun, d: SubDeriv) -> SubDeriv:
    """From ``A ⊑ A'`` over ``cod f`` derive ``f(A) ⊑ f(A')`` over ``dom f``."""
    if f.cod != d.locus:
        raise LocusMismatch("base change of a derivation along a map with the wrong codomain")
    if isinstance(d, AxVar):
        return ax_var(base_change(f, d.lhs))
    if isinstance(d, AxUnit):
        return ax_unit(f.dom, d.lhs)
    if isinstance(d, MultCong):
        return mult_cong(bc_sub(f, d.left), bc_sub(f, d.right), isinstance(d.lhs, Tensor))
    lhs, rhs = base_change(f, d.lhs), base_change(f, d.rhs)
    if isinstance(d, AddRule):
        prem = []
        for sub, x, y, a, b in ((d.left, d.lhs.i, d.rhs.i, d.lhs.left, d.rhs.left),
                                (d.right, d.lhs.j, d.rhs.j, d.lhs.right, d.rhs.right)):
            _, il, al = pullback(f, x)
            _, ir, ar = pullback(f, y)
            q, q1, q2 = pullback(il, ir)
            _, p1, p2 = pullback(x, y)
            m = factor(compose(q1, al), compose(q2, ar), x, y)
            prem.append(trans_all([
                tower_iso([q1, al], [m, p1], a, q),
                bc_sub(m, sub),
                tower_iso([m, p2], [q2, ar], b, q),
            ]))
        return add_rule(lhs, rhs, prem[0], prem[1])
    if isinstance(d, BangRule):
        u, g = d.lhs.u, d.g
        _, ul, cl = pullback(f, u)
        _, ur, cr = pullback(f, d.rhs.u)
        g2 = factor(ur, compose(cr, g), f, u)
        prem = trans_all([
            tower_iso([g2, cl], [cr, g], d.lhs.body, ur.dom),
            bc_sub(cr, d.premise),
        ])
        return bang_rule(ul, lhs.body, g2, prem)
    if isinstance(d, QuestRule):
        u, g = d.rhs.u, d.g
        _, ul, cl = pullback(f, d.lhs.u)
        _, ur, cr = pullback(f, u)
        g2 = factor(ul, compose(cl, g), f, u)
        prem = trans_all([
            bc_sub(cl, d.premise),
            tower_iso([cl, g], [g2, cr], d.rhs.body, ul.dom),
        ])
        return quest_rule(ur, rhs.body, g2, prem)
    raise SubtypingError(f"unknown derivation node {type(d).__name__}")


# -- transitivity ------------------------------------------------------------


def trans(d1: SubDeriv, d2: SubDeriv) -> SubDeriv:
    if d1.rhs != d2.lhs or d1.locus != d2.locus:
        raise EndpointMismatch((), "cannot chain derivations with different middle formulae")
    if isinstance(d1, (AxVar, AxUnit)):
        return d2
    if isinstance(d2, (AxVar, AxUnit)):
        return d1
    if isinstance(d1, MultCong):
        return mult_cong(trans(d1.left, d2.left), trans(d1.right, d2.right), isinstance(d1.lhs, Tensor))
    if isinstance(d1, AddRule):
        a, b, c = d1.lhs, d1.rhs, d2.rhs
        prem = []
        for s1, s2, x1, x2, x3, fa, fb, fc in (
            (d1.left, d2.left, a.i, b.i, c.i, a.left, b.left, c.left),
            (d1.right, d2.right, a.j, b.j, c.j, a.right, b.right, c.right),
        ):
            p13, r1, r3 = pullback(x1, x3)
            _, p12a, p12b = pullback(x1, x2)
            _, p23a, p23b = pullback(x2, x3)
            back = {x2(y): y for y in x2.dom}
            k = SetFun(p13, x2.dom, {z: back[x1(r1(z))] for z in p13})
            m1 = factor(r1, k, x1, x2)
            m2 = factor(k, r3, x2, x3)
            prem.append(trans_all([
                tower_iso([r1], [m1, p12a], fa, p13),
                bc_sub(m1, s1),
                tower_iso([m1, p12b], [m2, p23a], fb, p13),
                bc_sub(m2, s2),
                tower_iso([m2, p23b], [r3], fc, p13),
            ]))
        return add_rule(a, c, prem[0], prem[1])
    if isinstance(d1, BangRule):
        g, h = d1.g, d2.g
        hg = compose(h, g)
        prem = trans_all([
            tower_iso([hg], [h, g], d1.lhs.body, h.dom),
            bc_sub(h, d1.premise),
            d2.premise,
        ])
        return bang_rule(d1.lhs.u, d1.lhs.body, hg, prem)
    if isinstance(d1, QuestRule):
        g, h = d1.g, d2.g
        gh = compose(g, h)
        prem = trans_all([
            d1.premise,
            bc_sub(g, d2.premise),
            tower_iso([g, h], [gh], d2.rhs.body, g.dom),
        ])
        return quest_rule(d2.rhs.u, d2.rhs.body, gh, prem)
    raise SubtypingError(f"unknown derivation node {type(d1).__name__}")


def trans_all(ds: Sequence[SubDeriv]) -> SubDeriv:
    out = ds[0]
    for d in ds[1:]:
        out = trans(out, d)
    return out


# -- point decomposition ----------------------------------------------------


def _point_bridge(b: Elem, w: Elem, dx: SubDeriv, left_tower: list, right_tower: list, a, c) -> SubDeriv:
    """Rebase a fibre derivation ``dx`` at the single point ``w`` of its locus.

    ``left_tower``/``right_tower`` name the base-change chains whose
    composites (after ``cst_w``) pick the same element as ``cst_b``."""
    bw = cst(w, dx.locus)
    return trans_all([
        tower_iso(left_tower[0], [bw] + left_tower[1], a, ONE),
        bc_sub(bw, dx),
        tower_iso([bw] + right_tower[1], right_tower[0], c, ONE),
    ])


def decompose(points: Mapping[Elem, SubDeriv], a: Formula, b: Formula, locus: Iterable) -> SubDeriv:
    """Glue point derivations ``cst_x(a) ⊑ cst_x(b)`` into ``a ⊑ b`` over ``locus``."""
    locus = frozenset(locus)
    for x in locus:
        if x not in points:
            raise MissingPoint(f"no derivation at point {x}")
        d = points[x]
        c = cst(x, locus)
        if d.locus != ONE or d.lhs != base_change(c, a) or d.rhs != base_change(c, b):
            raise EndpointMismatch((), f"point derivation at {x} has the wrong endpoints")
    return _decompose(points, a, b, locus)


def _decompose(points, a, b, locus) -> SubDeriv:
    t = type(a)
    if type(b) is not t:
        raise EndpointMismatch((), "formulae of different shapes")
    if t in (PVar, NVar):
        if a != b:
            raise EndpointMismatch((), "distinct variable annotations")
        return ax_var(a)
    if t in (One, Bot, Zero, Top):
        return ax_unit(locus, a)
    if t in (Tensor, Par):
        l = _decompose({x: d.left for x, d in points.items()}, a.left, b.left, locus)
        r = _decompose({x: d.right for x, d in points.items()}, a.right, b.right, locus)
        return mult_cong(l, r, t is Tensor)
    if t in (With, Plus):
        if not orthogonal(a.i, b.j) or not orthogonal(a.j, b.i):
            raise EndpointMismatch((), "injections are not compatible")
        prem = []
        for k, (x1, x2, fa, fb) in enumerate(((a.i, b.i, a.left, b.left), (a.j, b.j, a.right, b.right))):
            p, p1, p2 = pullback(x1, x2)
            sub = {}
            for z in p:
                x = x1(p1(z))
                dx = points[x].premises()[k]
                # the unique point of dx's locus lying over z
                (w,) = dx.locus
                cx = cst(x, locus)
                _, _, al = pullback(cx, x1)
                _, _, ar = pullback(cx, x2)
                _, q1, q2 = pullback(_pull_idx(cx, x1), _pull_idx(cx, x2))
                cz = cst(z, p)
                sub[z] = _point_bridge(z, w, dx, ([cz, p1], [q1, al]), ([cz, p2], [q2, ar]), fa, fb)
            prem.append(_decompose(sub, base_change(p1, fa), base_change(p2, fb), p))
        return add_rule(a, b, prem[0], prem[1])
    if t is Bang:
        u, u2 = a.u, b.u
        gmap, sub = {}, {}
        for y in u2.dom:
            x = u2(y)
            dx = points[x]
            cx = cst(x, locus)
            _, _, cl = pullback(cx, u)
            _, _, cr = pullback(cx, u2)
            w = pair(UNIT, y)
            gmap[y] = cl(dx.g(w))
        g = SetFun(u2.dom, u.dom, gmap)
        for y in u2.dom:
            x = u2(y)
            dx = points[x]
            cx = cst(x, locus)
            _, _, cl = pullback(cx, u)
            _, _, cr = pullback(cx, u2)
            w = pair(UNIT, y)
            cy = cst(y, u2.dom)
            sub[y] = _point_bridge(y, w, dx.premise, ([cy, g], [dx.g, cl]), ([cy], [cr]), a.body, b.body)
        return bang_rule(u, a.body, g, _decompose(sub, base_change(g, a.body), b.body, u2.dom))
    # Quest
    u, u2 = a.u, b.u
    gmap = {}
    for x0 in u.dom:
        x = u(x0)
        dx = points[x]
        cx = cst(x, locus)
        _, _, cr = pullback(cx, u2)
        gmap[x0] = cr(dx.g(pair(UNIT, x0)))
    g = SetFun(u.dom, u2.dom, gmap)
    sub = {}
    for x0 in u.dom:
        x = u(x0)
        dx = points[x]
        cx = cst(x, locus)
        _, _, cl = pullback(cx, u)
        _, _, cr = pullback(cx, u2)
        w = pair(UNIT, x0)
        c0 = cst(x0, u.dom)
        sub[x0] = _point_bridge(x0, w, dx.premise, ([c0], [cl]), ([c0, g], [dx.g, cr]), a.body, b.body)
    return quest_rule(u2, b.body, g, _decompose(sub, a.body, base_change(g, b.body), u.dom))


def _pull_idx(f: SetFun, idx: SetFun) -> SetFun:
    return pullback(f, idx)[1]


# -- decision procedure -----------------------------------------------------


DEFAULT_CAP = 10**6


class _Search:
    def __init__(self, cap: int):
        self.cap = cap
        self.count = 0
        self.memo: dict = {}

    def tick(self, n: int = 1) -> None:
        self.count += n
        if self.count > self.cap:
            raise SearchBoundExceeded(f"more than {self.cap} witness candidates examined")

    def decide(self, a: Formula, b: Formula, locus: Locus) -> SubDeriv | None:
        key = (a, b, locus)
        if key in self.memo:
            return self.memo[key]
        out = self._decide(a, b, locus)
        self.memo[key] = out
        return out

    def _decide(self, a, b, locus):
        t = type(a)
        if type(b) is not t:
            return None
        if t in (PVar, NVar):
            return ax_var(a) if a == b else None
        if t in (One, Bot, Zero, Top):
            return ax_unit(locus, a)
        if t in (Tensor, Par):
            l = self.decide(a.left, b.left, locus)
            if l is None:
                return None
            r = self.decide(a.right, b.right, locus)
            return None if r is None else mult_cong(l, r, t is Tensor)
        if t in (With, Plus):
            if not orthogonal(a.i, b.j) or not orthogonal(a.j, b.i):
                return None
            prem = []
            for x1, x2, fa, fb in ((a.i, b.i, a.left, b.left), (a.j, b.j, a.right, b.right)):
                p, p1, p2 = pullback(x1, x2)
                d = self.decide(base_change(p1, fa), base_change(p2, fb), p)
                if d is None:
                    return None
                prem.append(d)
            return add_rule(a, b, prem[0], prem[1])
        if t is Bang:
            u, u2 = a.u, b.u
            gmap, pts = {}, {}
            for y in sorted(u2.dom):
                by = base_change(cst(y, u2.dom), b.body)
                for x in sorted(preimage(u, u2(y))):
                    self.tick()
                    d = self.decide(base_change(cst(x, u.dom), a.body), by, ONE)
                    if d is not None:
                        gmap[y], pts[y] = x, d
                        break
                else:
                    return None
            g = SetFun(u2.dom, u.dom, gmap)
            points = {y: trans(tower_iso([cst(y, u2.dom), g], [cst(gmap[y], u.dom)], a.body, ONE), pts[y])
                      for y in u2.dom}
            return bang_rule(u, a.body, g, decompose(points, base_change(g, a.body), b.body, u2.dom))
        u, u2 = a.u, b.u
        gmap, pts = {}, {}
        for x in sorted(u.dom):
            ax = base_change(cst(x, u.dom), a.body)
            for y in sorted(preimage(u2, u(x))):
                self.tick()
                d = self.decide(ax, base_change(cst(y, u2.dom), b.body), ONE)
                if d is not None:
                    gmap[x], pts[x] = y, d
                    break
            else:
                return None
        g = SetFun(u.dom, u2.dom, gmap)
        points = {x: trans(pts[x], tower_iso([cst(gmap[x], u2.dom)], [cst(x, u.dom), g], b.body, ONE))
                  for x in u.dom}
        return quest_rule(u2, b.body, g, decompose(points, a.body, base_change(g, b.body), u.dom))


def decide_subtype(a: Formula, b: Formula, locus: Iterable, cap: int = DEFAULT_CAP) -> SubDeriv | None:
    """Search for a derivation of ``a ⊑ b`` over ``locus``.

    Witnesses for the exponential rules are chosen point by point; by the
    decomposition lemma a global witness exists iff every point has one, so the
    search is complete.  ``cap`` bounds the number of candidate points tried."""
    if erase(a) != erase(b):
        return None
    return _Search(cap).decide(a, b, frozenset(locus))


def equivalent(a: Formula, b: Formula, locus: Iterable, cap: int = DEFAULT_CAP) -> bool:
    return decide_subtype(a, b, locus, cap) is not None and decide_subtype(b, a, locus, cap) is not None

"""Indexed formulae: syntax, well-definedness, negation, erasure, base change
and intersection of families with a common erasure."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable, Mapping, Sequence

from .setfun import (
    EMPTY,
    Locus,
    SetFun,
    compose,
    copair_all,
    is_bot_pair,
    pullback,
    show_locus,
    sum_funs,
    sum_loci,
)

VarEnv = Mapping[str, Locus]


class FormulaError(ValueError):
    pass


class IllFormed(FormulaError):
    def __init__(self, path: tuple, reason: str):
        self.path = tuple(path)
        self.reason = reason
        super().__init__(f"at {list(self.path)}: {reason}")


class LocusMismatch(FormulaError):
    pass


class ErasureMismatch(FormulaError):
    pass


def _node(cls):
    """Frozen dataclass with a cached structural hash."""
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


class Formula:
    __slots__ = ()

    def __repr__(self) -> str:
        from .syntax import show_formula

        return show_formula(self)


@_node
class PVar(Formula):
    f: SetFun
    name: str


@_node
class NVar(Formula):
    f: SetFun
    name: str


@_node
class One(Formula):
    pass


@_node
class Bot(Formula):
    pass


@_node
class Zero(Formula):
    pass


@_node
class Top(Formula):
    pass


@_node
class Tensor(Formula):
    left: Formula
    right: Formula


@_node
class Par(Formula):
    left: Formula
    right: Formula


@_node
class With(Formula):
    i: SetFun
    j: SetFun
    left: Formula
    right: Formula


@_node
class Plus(Formula):
    i: SetFun
    j: SetFun
    left: Formula
    right: Formula


@_node
class Bang(Formula):
    u: SetFun
    body: Formula


@_node
class Quest(Formula):
    u: SetFun
    body: Formula


ONE_F, BOT_F, ZERO_F, TOP_F = One(), Bot(), Zero(), Top()

_DUAL_BIN = {Tensor: Par, Par: Tensor}
_DUAL_ADD = {With: Plus, Plus: With}
_DUAL_EXP = {Bang: Quest, Quest: Bang}
_DUAL_UNIT = {One: Bot, Bot: One, Zero: Top, Top: Zero}


def negate(a: Formula) -> Formula:
    t = type(a)
    if t is PVar:
        return NVar(a.f, a.name)
    if t is NVar:
        return PVar(a.f, a.name)
    if t in _DUAL_UNIT:
        return _DUAL_UNIT[t]()
    if t in _DUAL_BIN:
        return _DUAL_BIN[t](negate(a.left), negate(a.right))
    if t in _DUAL_ADD:
        return _DUAL_ADD[t](a.i, a.j, negate(a.left), negate(a.right))
    return _DUAL_EXP[t](a.u, negate(a.body))


def is_positive(a: Formula) -> bool:
    return isinstance(a, (PVar, One, Zero, Tensor, Plus, Bang))


# ---------------------------------------------------------------------------
# Plain linear logic formulae


@_node
class LVar:
    name: str
    positive: bool = True

    def __repr__(self):
        return self.name if self.positive else self.name + "^"


@_node
class LUnit:
    kind: str  # '1', 'bot', '0', 'top'

    def __repr__(self):
        return self.kind


@_node
class LBin:
    op: str  # 'tensor', 'par', 'with', 'plus'
    left: object
    right: object

    def __repr__(self):
        sym = {"tensor": "*", "par": "|", "with": "&", "plus": "+"}[self.op]
        return f"({self.left!r} {sym} {self.right!r})"


@_node
class LExp:
    op: str  # 'bang', 'quest'
    body: object

    def __repr__(self):
        return ("!" if self.op == "bang" else "?") + repr(self.body)


LLFormula = LVar | LUnit | LBin | LExp

_LL_DUAL = {"tensor": "par", "par": "tensor", "with": "plus", "plus": "with", "bang": "quest",
            "quest": "bang", "1": "bot", "bot": "1", "0": "top", "top": "0"}


def ll_negate(a: LLFormula) -> LLFormula:
    if isinstance(a, LVar):
        return LVar(a.name, not a.positive)
    if isinstance(a, LUnit):
        return LUnit(_LL_DUAL[a.kind])
    if isinstance(a, LBin):
        return LBin(_LL_DUAL[a.op], ll_negate(a.left), ll_negate(a.right))
    return LExp(_LL_DUAL[a.op], ll_negate(a.body))


_UNIT_NAME = {One: "1", Bot: "bot", Zero: "0", Top: "top"}
_BIN_NAME = {Tensor: "tensor", Par: "par", With: "with", Plus: "plus"}


def erase(a: Formula) -> LLFormula:
    t = type(a)
    if t is PVar:
        return LVar(a.name, True)
    if t is NVar:
        return LVar(a.name, False)
    if t in _UNIT_NAME:
        return LUnit(_UNIT_NAME[t])
    if t in (Tensor, Par, With, Plus):
        return LBin(_BIN_NAME[t], erase(a.left), erase(a.right))
    return LExp("bang" if t is Bang else "quest", erase(a.body))


# ---------------------------------------------------------------------------
# Well-definedness


def check_def(locus: Iterable, a: Formula, env: VarEnv, _path: tuple = ()) -> None:
    """Raise :class:`IllFormed` unless ``locus ⊢ a def`` under ``env``."""
    locus = frozenset(locus)
    t = type(a)
    if t in (PVar, NVar):
        if a.name not in env:
            raise IllFormed(_path, f"unbound variable {a.name}")
        if a.f.dom != locus:
            raise IllFormed(_path, f"variable annotation has domain {show_locus(a.f.dom)}, expected {show_locus(locus)}")
        if a.f.cod != frozenset(env[a.name]):
            raise IllFormed(_path, f"variable {a.name} lives over {show_locus(env[a.name])}")
    elif t in (One, Bot):
        pass
    elif t in (Zero, Top):
        if locus:
            raise IllFormed(_path, f"{_UNIT_NAME[t]} is only defined over the empty locus")
    elif t in (Tensor, Par):
        check_def(locus, a.left, env, _path + (0,))
        check_def(locus, a.right, env, _path + (1,))
    elif t in (With, Plus):
        if a.i.cod != locus or a.j.cod != locus:
            raise IllFormed(_path, "injections must target the locus")
        if not is_bot_pair(a.i, a.j):
            raise IllFormed(_path, "injections are not an orthogonal covering pair")
        check_def(a.i.dom, a.left, env, _path + (0,))
        check_def(a.j.dom, a.right, env, _path + (1,))
    elif t in (Bang, Quest):
        if a.u.cod != locus:
            raise IllFormed(_path, "exponential index must target the locus")
        check_def(a.u.dom, a.body, env, _path + (0,))
    else:
        raise IllFormed(_path, f"not a formula: {a!r}")


def is_defined(locus, a: Formula, env: VarEnv) -> bool:
    try:
        check_def(locus, a, env)
    except IllFormed:
        return False
    return True


def variables(a: Formula) -> set[str]:
    t = type(a)
    if t in (PVar, NVar):
        return {a.name}
    if t in (Tensor, Par, With, Plus):
        return variables(a.left) | variables(a.right)
    if t in (Bang, Quest):
        return variables(a.body)
    return set()


def size(a: Formula) -> int:
    t = type(a)
    if t in (Tensor, Par, With, Plus):
        return 1 + size(a.left) + size(a.right)
    if t in (Bang, Quest):
        return 1 + size(a.body)
    return 1


# ---------------------------------------------------------------------------
# Base change


def base_change(f: SetFun, a: Formula) -> Formula:
    """Reindex ``a`` (over ``cod f``) to a formula over ``dom f``.

    Only the locus of variables and connectives is consulted; a mismatch
    surfaces as :class:`LocusMismatch` where it can be detected."""
    t = type(a)
    if t in (PVar, NVar):
        if a.f.dom != f.cod:
            raise LocusMismatch("base change along a function with the wrong codomain")
        return t(compose(f, a.f), a.name)
    if t in (One, Bot):
        return a
    if t in (Zero, Top):
        if f.cod or f.dom:
            raise LocusMismatch("additive units live over the empty locus only")
        return a
    if t in (Tensor, Par):
        return t(base_change(f, a.left), base_change(f, a.right))
    if t in (With, Plus):
        if a.i.cod != f.cod:
            raise LocusMismatch("base change along a function with the wrong codomain")
        _, qi, ri = pullback(f, a.i)
        _, qj, rj = pullback(f, a.j)
        return t(qi, qj, base_change(ri, a.left), base_change(rj, a.right))
    if a.u.cod != f.cod:
        raise LocusMismatch("base change along a function with the wrong codomain")
    _, p, q = pullback(f, a.u)
    return t(p, base_change(q, a.body))


def base_change_tower(fs: Sequence[SetFun], a: Formula) -> Formula:
    """``fs[0](fs[1](... fs[-1](a)))``."""
    for f in reversed(fs):
        a = base_change(f, a)
    return a


# ---------------------------------------------------------------------------
# Intersection of a family with equal erasures


def intersect(family: Sequence[tuple[Locus, Formula]], env: VarEnv | None = None) -> tuple[Locus, Formula]:
    """Merge formulae over ``I_0, ..., I_n`` into one over ``I_0 + ... + I_n``.

    Base change along the ``k``-th injection gives back a formula
    equivalent to ``family[k]``."""
    family = [(frozenset(i), a) for i, a in family]
    if family:
        e = erase(family[0][1])
        for _, a in family[1:]:
            if erase(a) != e:
                raise ErasureMismatch("intersection needs formulae with the same erasure")
    k, _ = sum_loci([i for i, _ in family])
    return k, _intersect([a for _, a in family], [i for i, _ in family], env)


def _intersect(forms: list[Formula], loci: list[Locus], env: VarEnv | None) -> Formula:
    if not forms:
        raise FormulaError("cannot intersect an empty family without a shape")
    head = forms[0]
    t = type(head)
    if t in (PVar, NVar):
        cod = head.f.cod if env is None else frozenset(env[head.name])
        return t(copair_all([a.f for a in forms], cod), head.name)
    if t in (One, Bot, Zero, Top):
        return head
    if t in (Tensor, Par):
        return t(_intersect([a.left for a in forms], loci, env), _intersect([a.right for a in forms], loci, env))
    if t in (With, Plus):
        return t(
            sum_funs([a.i for a in forms]),
            sum_funs([a.j for a in forms]),
            _intersect([a.left for a in forms], [a.i.dom for a in forms], env),
            _intersect([a.right for a in forms], [a.j.dom for a in forms], env),
        )
    return t(sum_funs([a.u for a in forms]), _intersect([a.body for a in forms], [a.u.dom for a in forms], env))


def empty_formula_like(shape: LLFormula, env: VarEnv) -> Formula:
    """Some formula over ∅ erasing to ``shape`` (variables use the empty map)."""
    from .setfun import init

    if isinstance(shape, LVar):
        f = init(env[shape.name])
        return PVar(f, shape.name) if shape.positive else NVar(f, shape.name)
    if isinstance(shape, LUnit):
        return {"1": ONE_F, "bot": BOT_F, "0": ZERO_F, "top": TOP_F}[shape.kind]
    if isinstance(shape, LBin):
        a, b = empty_formula_like(shape.left, env), empty_formula_like(shape.right, env)
        if shape.op in ("tensor", "par"):
            return (Tensor if shape.op == "tensor" else Par)(a, b)
        e = init(EMPTY)
        return (With if shape.op == "with" else Plus)(e, e, a, b)
    e = init(EMPTY)
    return (Bang if shape.op == "bang" else Quest)(e, empty_formula_like(shape.body, env))

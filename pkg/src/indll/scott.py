"""Preorder (Scott) semantics used as an oracle.

* LL formulae are interpreted as finite preorders: ``⊗``/``⅋`` are products,
  ``&``/``⊕`` tagged sums, units are one point (``1``, ``⊥``) or empty
  (``0``, ``⊤``).  ``!A`` has the finite subsets of ``A`` ordered by the
  lower (Hoare) order; negation keeps the carrier and reverses the order, so
  ``?A`` is the reversed ``!(A^⊥)``.
* An indexed formula over ``I`` denotes a point of its erasure for every
  ``x ∈ I``.
* A proof of ``⊢ A1, ..., An`` denotes a down-closed set of tuples in the
  product of the carriers (a monotone relation from the unit to the par of
  the sequent).  Cut is relational composition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .formula import (
    Bot,
    Formula,
    LBin,
    LExp,
    LUnit,
    LVar,
    NVar,
    One,
    Par,
    Plus,
    PVar,
    Tensor,
    Top,
    With,
    Zero,
    ll_negate,
)
from .proof import (
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
    Proof,
    erase_proof,
)
from .setfun import Elem, SetFun


class ScottError(ValueError):
    pass


class UnboundVariable(ScottError):
    pass


class CarrierBlowup(ScottError):
    pass


class NotAPreorder(ScottError):
    pass


DEFAULT_CAP = 10**4
STAR = "*"


def _key(x) -> str:
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(_key(y) for y in x)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(_key(y) for y in x) + ")"
    return repr(x)


class Preorder:
    """A finite carrier with a reflexive and transitive relation."""

    def __init__(self, carrier: Iterable, le: Callable[[object, object], bool], check: bool = True):
        self.carrier = tuple(sorted(set(carrier), key=_key))
        self._le = le
        self._memo: dict = {}
        self._down: dict = {}
        if check:
            self.validate()

    def leq(self, x, y) -> bool:
        k = (x, y)
        v = self._memo.get(k)
        if v is None:
            v = self._memo[k] = bool(self._le(x, y))
        return v

    def validate(self) -> None:
        c = self.carrier
        for x in c:
            if not self.leq(x, x):
                raise NotAPreorder(f"{_key(x)} is not below itself")
        for x in c:
            for y in c:
                if self.leq(x, y):
                    for z in c:
                        if self.leq(y, z) and not self.leq(x, z):
                            raise NotAPreorder("relation is not transitive")

    @property
    def pairs(self) -> frozenset:
        return frozenset((x, y) for x in self.carrier for y in self.carrier if self.leq(x, y))

    def down(self, x) -> tuple:
        d = self._down.get(x)
        if d is None:
            d = self._down[x] = tuple(y for y in self.carrier if self.leq(y, x))
        return d

    def reverse(self) -> "Preorder":
        return Preorder(self.carrier, lambda x, y: self.leq(y, x), check=False)

    def __len__(self) -> int:
        return len(self.carrier)

    def __eq__(self, other) -> bool:
        return isinstance(other, Preorder) and self.carrier == other.carrier and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.carrier)

    def __repr__(self) -> str:
        return f"Preorder({len(self.carrier)} points)"


def discrete(points: Iterable) -> Preorder:
    return Preorder(points, lambda x, y: x == y)


@dataclass
class SemVar:
    """Interpretation of a variable: a base preorder and the indexed family
    giving the point at each element of the variable's locus."""

    order: Preorder
    family: Mapping[Elem, object]


@dataclass
class SemEnv:
    vars: dict = field(default_factory=dict)
    cap: int = DEFAULT_CAP
    _cache: dict = field(default_factory=dict, repr=False)

    def var(self, name: str) -> SemVar:
        if name not in self.vars:
            raise UnboundVariable(f"variable {name} has no interpretation")
        return self.vars[name]


def default_env(var_loci: Mapping[str, Iterable[Elem]], cap: int = DEFAULT_CAP) -> SemEnv:
    """Each variable denotes the discrete order on its own locus."""
    out = SemEnv(cap=cap)
    for name, loc in var_loci.items():
        loc = frozenset(loc)
        out.vars[name] = SemVar(discrete(loc), {x: x for x in loc})
    return out


# ---------------------------------------------------------------------------
# formulae


def interp_ll(a, env: SemEnv) -> Preorder:
    key = ("ll", a)
    hit = env._cache.get(key)
    if hit is not None:
        return hit
    out = _interp_ll(a, env)
    if len(out) > env.cap:
        raise CarrierBlowup(f"carrier of {a!r} has {len(out)} points")
    env._cache[key] = out
    return out


def _interp_ll(a, env: SemEnv) -> Preorder:
    if isinstance(a, LVar):
        base = env.var(a.name).order
        return base if a.positive else base.reverse()
    if isinstance(a, LUnit):
        return Preorder((STAR,) if a.kind in ("1", "bot") else (), lambda x, y: True, check=False)
    if isinstance(a, LBin):
        l, r = interp_ll(a.left, env), interp_ll(a.right, env)
        if a.op in ("tensor", "par"):
            if len(l) * len(r) > env.cap:
                raise CarrierBlowup("product carrier too large")
            return Preorder(itertools.product(l.carrier, r.carrier),
                            lambda x, y: l.leq(x[0], y[0]) and r.leq(x[1], y[1]), check=False)
        pts = [(1, x) for x in l.carrier] + [(2, y) for y in r.carrier]
        return Preorder(pts, lambda x, y: x[0] == y[0] and (l if x[0] == 1 else r).leq(x[1], y[1]), check=False)
    if a.op == "quest":
        return interp_ll(LExp("bang", ll_negate(a.body)), env).reverse()
    base = interp_ll(a.body, env)
    n = len(base)
    if n >= 20 or 2**n > env.cap:
        raise CarrierBlowup(f"exponential over {n} points")
    subsets = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(base.carrier, k)]
    return Preorder(subsets, lambda u, v: all(any(base.leq(x, y) for y in v) for x in u), check=False)


def interp_formula(a: Formula, env: SemEnv, locus: Iterable[Elem] | None = None) -> dict:
    """The point of ``erase(a)`` denoted at each element of the locus."""
    t = type(a)
    if t in (PVar, NVar):
        fam = env.var(a.name).family
        return {x: fam[a.f(x)] for x in a.f.dom}
    if t in (One, Bot):
        if locus is None:
            raise ScottError("the locus of a unit must be given")
        return {x: STAR for x in locus}
    if t in (Zero, Top):
        return {}
    if t in (Tensor, Par):
        l = interp_formula(a.left, env, locus)
        r = interp_formula(a.right, env, locus)
        keys = l.keys() if locus is None else locus
        if locus is None and not l:
            keys = r.keys()
        return {x: (l[x], r[x]) for x in keys}
    if t in (With, Plus):
        out = {}
        l = interp_formula(a.left, env, a.i.dom)
        r = interp_formula(a.right, env, a.j.dom)
        for y, v in l.items():
            out[a.i(y)] = (1, v)
        for y, v in r.items():
            out[a.j(y)] = (2, v)
        return out
    body = interp_formula(a.body, env, a.u.dom)
    out = {x: set() for x in a.u.cod}
    for y, v in body.items():
        out[a.u(y)].add(v)
    return {x: frozenset(s) for x, s in out.items()}


def check_bc_prop(f: SetFun, a: Formula, env: SemEnv) -> bool:
    """Base change is precomposition: the point of ``f(a)`` at ``x`` is the point of ``a`` at ``f(x)``."""
    from .formula import base_change

    lhs = interp_formula(base_change(f, a), env, f.dom)
    rhs = interp_formula(a, env, f.cod)
    return all(lhs[x] == rhs[f(x)] for x in f.dom)


# ---------------------------------------------------------------------------
# proofs


@dataclass(frozen=True)
class MonotoneRel:
    """A down-closed set of tuples over the product of ``parts``."""

    parts: tuple
    points: frozenset

    def is_closed(self) -> bool:
        for t in self.points:
            for below in itertools.product(*(p.down(x) for p, x in zip(self.parts, t))):
                if below not in self.points:
                    return False
        return True

    def as_relation(self, k: int) -> frozenset:
        """View as a relation from the first ``k`` components to the rest."""
        return frozenset((t[:k], t[k:]) for t in self.points)


def interp_proof(p: Proof | LLProof, env: SemEnv, rel_cap: int = 10**5) -> MonotoneRel:
    q = erase_proof(p) if isinstance(p, Proof) else p
    pts = _interp(q, env, rel_cap)
    parts = tuple(interp_ll(a, env) for a in q.concl)
    return MonotoneRel(parts, frozenset(pts))


def _guard(s, cap):
    if len(s) > cap:
        raise CarrierBlowup(f"relation with more than {cap} tuples")
    return s


def _interp(q: LLProof, env: SemEnv, cap: int) -> set:
    t = type(q)
    if t is LAx:
        order = interp_ll(q.concl[1], env)
        return {(a, b) for a in order.carrier for b in order.carrier if order.leq(b, a)}
    if t is LOne:
        return {(STAR,)}
    if t is LBot:
        return {(STAR,) + s for s in _interp(q.premise, env, cap)}
    if t is LTop:
        return set()
    if t is LTensor:
        left = _interp(q.left, env, cap)
        right = _interp(q.right, env, cap)
        _guard(range(len(left) * len(right)), cap)
        out = set()
        for s in left:
            for u in right:
                out.add(s[: q.li] + ((s[q.li], u[q.ri]),) + s[q.li + 1:] + u[: q.ri] + u[q.ri + 1:])
        return _guard(out, cap)
    if t is LPar:
        out = set()
        for s in _interp(q.premise, env, cap):
            m = list(s)
            m[q.a] = (s[q.a], s[q.b])
            del m[q.b]
            out.add(tuple(m))
        return out
    if t is LWith:
        k = q.idx
        out = {s[:k] + ((1, s[k]),) + s[k + 1:] for s in _interp(q.left, env, cap)}
        out |= {s[:k] + ((2, s[k]),) + s[k + 1:] for s in _interp(q.right, env, cap)}
        return out
    if t is LPlus:
        k = q.idx
        return {s[:k] + ((q.side, s[k]),) + s[k + 1:] for s in _interp(q.premise, env, cap)}
    if t is LWeakening:
        carrier = interp_ll(q.formula, env).carrier
        prem = _interp(q.premise, env, cap)
        _guard(range(len(carrier) * len(prem)), cap)
        return _guard({(u,) + s for u in carrier for s in prem}, cap)
    if t is LContraction:
        out = set()
        for s in _interp(q.premise, env, cap):
            if s[q.a] == s[q.b]:
                out.add(s[: q.b] + s[q.b + 1:])
        return out
    if t is LDereliction:
        k = q.idx
        groups: dict = {}
        for s in _interp(q.premise, env, cap):
            groups.setdefault(s[:k] + s[k + 1:], set()).add(s[k])
        carrier = interp_ll(q.concl[k], env).carrier
        out = set()
        for rest, hits in groups.items():
            for u in carrier:
                if not hits.isdisjoint(u):
                    out.add(rest[:k] + (u,) + rest[k:])
        return _guard(out, cap)
    if t is LPromotion:
        k = q.idx
        groups = {}
        for s in _interp(q.premise, env, cap):
            groups.setdefault(s[:k] + s[k + 1:], set()).add(s[k])
        ctx = [interp_ll(a, env).carrier for n, a in enumerate(q.concl) if n != k]
        size = 1
        for c in ctx:
            size *= len(c)
        if size > cap:
            raise CarrierBlowup("promotion context too large")
        out = set()
        for rest in itertools.product(*ctx):
            hits = groups.get(rest, ())
            if 2 ** len(hits) > cap:
                raise CarrierBlowup("promoted carrier too large")
            for u in _subsets(hits):
                out.add(rest[:k] + (u,) + rest[k:])
            _guard(out, cap)
        return out
    if t is LCut:
        right: dict = {}
        for u in _interp(q.right, env, cap):
            right.setdefault(u[q.ri], []).append(u[: q.ri] + u[q.ri + 1:])
        out = set()
        for s in _interp(q.left, env, cap):
            rest = s[: q.li] + s[q.li + 1:]
            for u in right.get(s[q.li], ()):
                out.add(rest + u)
        return _guard(out, cap)
    if t is LExchange:
        return {tuple(s[k] for k in q.perm) for s in _interp(q.premise, env, cap)}
    raise ScottError(f"unknown rule {q.rule}")


def _subsets(xs) -> list:
    xs = sorted(xs, key=_key)
    return [frozenset(c) for k in range(len(xs) + 1) for c in itertools.combinations(xs, k)]


def check_membership(p: Proof, env: SemEnv, rel: MonotoneRel | None = None) -> bool:
    """Every indexed point of the conclusion lies in the interpretation."""
    rel = interp_proof(p, env) if rel is None else rel
    locus = p.locus
    fams = [interp_formula(a, env, locus) for a in p.concl]
    return all(tuple(f[x] for f in fams) in rel.points for x in locus)

"""Finite loci and total functions between them.

Elements are tagged tuples so that pullbacks and coproducts have literal,
hashable, totally ordered members:

    ('atom', name) | ('unit',) | ('pair', x, y) | ('inl', x) | ('inr', x)

A locus is a ``frozenset`` of such elements.  Functions are extensional
values (:class:`SetFun`), composed in diagrammatic order: ``compose(f, g)``
is ``x -> g(f(x))``.
"""

from __future__ import annotations

from itertools import product
from typing import Any, Iterable, Iterator, Mapping

Elem = tuple
Locus = frozenset

UNIT: Elem = ("unit",)
EMPTY: Locus = frozenset()
ONE: Locus = frozenset({UNIT})


class SetFunError(ValueError):
    """Base class for errors raised by locus operations."""


class CodomainMismatch(SetFunError):
    pass


class NotBijective(SetFunError):
    pass


class NotInCodomain(SetFunError):
    pass


class NotAFunction(SetFunError):
    pass


def atom(name: str) -> Elem:
    return ("atom", str(name))


def pair(x: Elem, y: Elem) -> Elem:
    return ("pair", x, y)


def inl(x: Elem) -> Elem:
    return ("inl", x)


def inr(x: Elem) -> Elem:
    return ("inr", x)


def is_elem(x: Any) -> bool:
    if not isinstance(x, tuple) or not x:
        return False
    tag = x[0]
    if tag == "atom":
        return len(x) == 2 and isinstance(x[1], str)
    if tag == "unit":
        return len(x) == 1
    if tag == "pair":
        return len(x) == 3 and is_elem(x[1]) and is_elem(x[2])
    if tag in ("inl", "inr"):
        return len(x) == 2 and is_elem(x[1])
    return False


def locus(*elems: Elem | str) -> Locus:
    """Build a locus; bare strings are promoted to atoms."""
    return frozenset(atom(e) if isinstance(e, str) else e for e in elems)


def sorted_elems(xs: Iterable[Elem]) -> list[Elem]:
    return sorted(xs)


def show_elem(x: Elem) -> str:
    tag = x[0]
    if tag == "atom":
        return x[1]
    if tag == "unit":
        return "unit"
    if tag == "pair":
        return f"({show_elem(x[1])},{show_elem(x[2])})"
    inner = show_elem(x[1])
    return f"{tag} ({inner})" if x[1][0] in ("inl", "inr") else f"{tag} {inner}"


def show_locus(xs: Iterable[Elem]) -> str:
    return "{" + ", ".join(show_elem(x) for x in sorted_elems(xs)) + "}"


class SetFun:
    """A total function ``dom -> cod`` between finite loci."""

    __slots__ = ("dom", "cod", "graph", "_hash")

    def __init__(self, dom: Iterable[Elem], cod: Iterable[Elem], graph: Mapping[Elem, Elem]):
        dom = frozenset(dom)
        cod = frozenset(cod)
        graph = dict(graph)
        if set(graph) != dom:
            raise NotAFunction("graph must be defined exactly on the domain")
        for x, y in graph.items():
            if y not in cod:
                raise NotAFunction(f"image {show_elem(y)} of {show_elem(x)} is not in the codomain")
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("SetFun is immutable")

    def __call__(self, x: Elem) -> Elem:
        return self.graph[x]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, SetFun):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and self.graph == other.graph

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.dom, self.cod, frozenset(self.graph.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __lt__(self, other: "SetFun") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple:
        return (sorted_elems(self.dom), sorted_elems(self.cod), sorted(self.graph.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{show_elem(x)} => {show_elem(self.graph[x])}" for x in sorted_elems(self.dom))
        return f"SetFun({show_locus(self.dom)} -> {show_locus(self.cod)} {{{body}}})"

    def image(self) -> Locus:
        return frozenset(self.graph.values())

    def is_injective(self) -> bool:
        return len(self.image()) == len(self.dom)

    def is_surjective(self) -> bool:
        return self.image() == self.cod

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def is_identity(self) -> bool:
        return self.dom == self.cod and all(x == y for x, y in self.graph.items())


def identity(i: Iterable[Elem]) -> SetFun:
    i = frozenset(i)
    return SetFun(i, i, {x: x for x in i})


def init(i: Iterable[Elem]) -> SetFun:
    """The unique map out of the empty locus."""
    return SetFun(EMPTY, i, {})


def cst(x: Elem, i: Iterable[Elem]) -> SetFun:
    """The point ``1 -> I`` picking ``x``."""
    return SetFun(ONE, i, {UNIT: x})


def const_map(i: Iterable[Elem], y: Elem, j: Iterable[Elem]) -> SetFun:
    """The constant map ``I -> J`` with value ``y``."""
    i = frozenset(i)
    return SetFun(i, j, {x: y for x in i})


def terminal(i: Iterable[Elem]) -> SetFun:
    return const_map(i, UNIT, ONE)


def compose(f: SetFun, g: SetFun) -> SetFun:
    """Diagrammatic composition ``f ; g``."""
    if f.cod != g.dom:
        raise CodomainMismatch(f"cannot compose: {show_locus(f.cod)} vs {show_locus(g.dom)}")
    return SetFun(f.dom, g.cod, {x: g.graph[y] for x, y in f.graph.items()})


def compose_all(fs: Iterable[SetFun], start: Iterable[Elem] | None = None) -> SetFun:
    """``f1 ; f2 ; ... ; fn``; the empty chain needs ``start`` and is its identity."""
    fs = list(fs)
    if not fs:
        if start is None:
            raise ValueError("empty composite needs a locus")
        return identity(start)
    out = fs[0]
    for g in fs[1:]:
        out = compose(out, g)
    return out


def pullback(f: SetFun, g: SetFun) -> tuple[Locus, SetFun, SetFun]:
    """The pullback ``{(x, y) | f(x) = g(y)}`` with its two projections."""
    if f.cod != g.cod:
        raise CodomainMismatch("pullback of functions with different codomains")
    fib: dict[Elem, list[Elem]] = {}
    for y, k in g.graph.items():
        fib.setdefault(k, []).append(y)
    pts = [pair(x, y) for x, k in f.graph.items() for y in fib.get(k, ())]
    p = frozenset(pts)
    p1 = SetFun(p, f.dom, {z: z[1] for z in pts})
    p2 = SetFun(p, g.dom, {z: z[2] for z in pts})
    return p, p1, p2


def factor(h1: SetFun, h2: SetFun, f: SetFun, g: SetFun) -> SetFun:
    """The unique ``u`` into ``pullback(f, g)`` with ``u;p1 = h1`` and ``u;p2 = h2``."""
    if h1.dom != h2.dom or h1.cod != f.dom or h2.cod != g.dom:
        raise CodomainMismatch("cone legs do not match the cospan")
    p, _, _ = pullback(f, g)
    graph = {}
    for z in h1.dom:
        x, y = h1(z), h2(z)
        if f(x) != g(y):
            raise CodomainMismatch("cone does not commute")
        graph[z] = pair(x, y)
    return SetFun(h1.dom, p, graph)


def coproduct(i: Iterable[Elem], j: Iterable[Elem]) -> tuple[Locus, SetFun, SetFun]:
    i, j = frozenset(i), frozenset(j)
    k = frozenset({inl(x) for x in i} | {inr(y) for y in j})
    return k, SetFun(i, k, {x: inl(x) for x in i}), SetFun(j, k, {y: inr(y) for y in j})


def copair(f: SetFun, g: SetFun) -> SetFun:
    if f.cod != g.cod:
        raise CodomainMismatch("copair of functions with different codomains")
    k, _, _ = coproduct(f.dom, g.dom)
    graph = {inl(x): y for x, y in f.graph.items()}
    graph.update({inr(x): y for x, y in g.graph.items()})
    return SetFun(k, f.cod, graph)


def sum_loci(loci: Iterable[Iterable[Elem]]) -> tuple[Locus, list[SetFun]]:
    """n-ary coproduct, nested to the right: ``I0 + (I1 + (... + ∅))``."""
    loci = [frozenset(x) for x in loci]
    if not loci:
        return EMPTY, []
    rest, injs = sum_loci(loci[1:])
    k, a, b = coproduct(loci[0], rest)
    return k, [a] + [compose(m, b) for m in injs]


def copair_all(fs: list[SetFun], cod: Iterable[Elem]) -> SetFun:
    """n-ary copairing out of :func:`sum_loci` of the domains."""
    cod = frozenset(cod)
    if not fs:
        return init(cod)
    rest = copair_all(fs[1:], cod)
    return copair(fs[0], rest)


def sum_funs(fs: list[SetFun]) -> SetFun:
    """``f0 + f1 + ...`` between the n-ary coproducts of domains and codomains."""
    _, dinj = sum_loci([f.dom for f in fs])
    cod, cinj = sum_loci([f.cod for f in fs])
    graph = {}
    for f, di, ci in zip(fs, dinj, cinj):
        for x in f.dom:
            graph[di(x)] = ci(f(x))
    dom = frozenset(graph)
    if not fs:
        return init(EMPTY)
    return SetFun(dom, cod, graph)


def invert(f: SetFun) -> SetFun:
    if not f.is_bijective():
        raise NotBijective(f"{f!r} is not a bijection")
    return SetFun(f.cod, f.dom, {y: x for x, y in f.graph.items()})


def preimage(f: SetFun, x: Elem) -> Locus:
    if x not in f.cod:
        raise NotInCodomain(f"{show_elem(x)} is not in the codomain")
    return frozenset(y for y, z in f.graph.items() if z == x)


def restrict(f: SetFun, sub: Iterable[Elem]) -> SetFun:
    sub = frozenset(sub)
    return SetFun(sub, f.cod, {x: f(x) for x in sub})


def inclusion(sub: Iterable[Elem], sup: Iterable[Elem]) -> SetFun:
    sub = frozenset(sub)
    return SetFun(sub, sup, {x: x for x in sub})


def is_bot_pair(i: SetFun, j: SetFun) -> bool:
    """Injective, disjoint images, jointly covering the shared codomain."""
    if i.cod != j.cod:
        raise CodomainMismatch("is_bot_pair needs a common codomain")
    if not (i.is_injective() and j.is_injective()):
        return False
    a, b = i.image(), j.image()
    return not (a & b) and (a | b) == i.cod


def orthogonal(i: SetFun, j: SetFun) -> bool:
    """Empty pullback."""
    return not (i.image() & j.image())


def all_functions(dom: Iterable[Elem], cod: Iterable[Elem]) -> Iterator[SetFun]:
    dom = sorted_elems(dom)
    cods = sorted_elems(cod)
    for images in product(cods, repeat=len(dom)):
        yield SetFun(dom, cods, dict(zip(dom, images)))


def count_functions(dom: Iterable[Elem], cod: Iterable[Elem]) -> int:
    return len(frozenset(cod)) ** len(frozenset(dom))

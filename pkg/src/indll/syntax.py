"""Concrete s-expression syntax: printing and parsing of loci, functions,
formulae, subtyping derivations and proofs.

Elements and loci use a small infix grammar inside braces::

    {a, b, (a,c), inl a, inr (inl b), unit}

Functions are written inline as ``(fn {a, b} {k} {a => k, b => k})`` or
referenced by name when a workspace defines them."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .setfun import Elem, SetFun, atom, inl, inr, pair, show_elem, show_locus, sorted_elems, UNIT


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0, file: str = "<input>"):
        self.msg, self.line, self.col, self.file = msg, line, col, file
        super().__init__(f"{file}:{line}:{col}: {msg}")


class UnresolvedName(ParseError):
    pass


# ---------------------------------------------------------------------------
# printing


def show_fun(f: SetFun, names: Mapping[SetFun, str] | None = None) -> str:
    if names and f in names:
        return names[f]
    body = ", ".join(f"{show_elem(x)} => {show_elem(f(x))}" for x in sorted_elems(f.dom))
    return f"(fn {show_locus(f.dom)} {show_locus(f.cod)} {{{body}}})"


def show_formula(a, names=None) -> str:
    from . import formula as F

    sf = lambda f: show_fun(f, names)
    t = type(a)
    if t is F.PVar:
        return f"(pvar {sf(a.f)} {a.name})"
    if t is F.NVar:
        return f"(nvar {sf(a.f)} {a.name})"
    if t in (F.One, F.Bot, F.Zero, F.Top):
        return {F.One: "(one)", F.Bot: "(bot)", F.Zero: "(zero)", F.Top: "(top)"}[t]
    if t in (F.Tensor, F.Par):
        return f"({'tensor' if t is F.Tensor else 'par'} {show_formula(a.left, names)} {show_formula(a.right, names)})"
    if t in (F.With, F.Plus):
        kw = "with" if t is F.With else "plus"
        return f"({kw} {sf(a.i)} {sf(a.j)} {show_formula(a.left, names)} {show_formula(a.right, names)})"
    kw = "bang" if t is F.Bang else "quest"
    return f"({kw} {sf(a.u)} {show_formula(a.body, names)})"


def show_sub(d, names=None) -> str:
    from . import subtyping as S
    from .formula import Tensor

    sf = lambda f: show_fun(f, names)
    fm = lambda a: show_formula(a, names)
    if isinstance(d, S.AxVar):
        return f"(ax-var {sf(d.f)} {d.name} {'+' if d.positive else '-'})"
    if isinstance(d, S.AxUnit):
        return f"(ax-unit {show_locus(d.locus)} {fm(d.lhs)})"
    if isinstance(d, S.MultCong):
        kw = "tensor-cong" if isinstance(d.lhs, Tensor) else "par-cong"
        return f"({kw} {show_sub(d.left, names)} {show_sub(d.right, names)})"
    if isinstance(d, S.AddRule):
        return f"(add-rule {fm(d.lhs)} {fm(d.rhs)} {show_sub(d.left, names)} {show_sub(d.right, names)})"
    if isinstance(d, S.BangRule):
        return f"(bang-rule {sf(d.lhs.u)} {fm(d.lhs.body)} {sf(d.g)} {show_sub(d.premise, names)})"
    return f"(quest-rule {sf(d.rhs.u)} {fm(d.rhs.body)} {sf(d.g)} {show_sub(d.premise, names)})"


_PROOF_FIELDS = {
    # field name -> printing/parsing kind
    "f": "fun", "i": "fun", "j": "fun", "v": "fun",
    "name": "word", "at": "locus", "ctx": "formulas", "perm": "ints",
    "formula": "formula", "rho": "sub",
    "premise": "proof", "left": "proof", "right": "proof",
}


def _field_kind(name: str) -> str:
    return _PROOF_FIELDS.get(name, "int")


def show_proof(p, names=None) -> str:
    """One keyword per rule, fields in declaration order, witnesses inline."""
    parts = [p.rule]
    for fname in p._fieldnames:
        val = getattr(p, fname)
        kind = _field_kind(fname)
        if kind == "fun":
            parts.append(show_fun(val, names))
        elif kind == "word":
            parts.append(val)
        elif kind == "locus":
            parts.append(show_locus(val))
        elif kind == "formulas":
            parts.append("[" + " ".join(show_formula(a, names) for a in val) + "]")
        elif kind == "ints":
            parts.append("[" + " ".join(str(k) for k in val) + "]")
        elif kind == "formula":
            parts.append(show_formula(val, names))
        elif kind == "sub":
            parts.append(show_sub(val, names))
        elif kind == "proof":
            parts.append(show_proof(val, names))
        else:
            parts.append(str(val))
    return "(" + " ".join(parts) + ")"


def show_ll_formula(a) -> str:
    from .formula import LBin, LUnit, LVar

    if isinstance(a, LVar):
        return a.name if a.positive else f"(dual {a.name})"
    if isinstance(a, LUnit):
        return {"1": "(one)", "bot": "(bot)", "0": "(zero)", "top": "(top)"}[a.kind]
    if isinstance(a, LBin):
        return f"({a.op} {show_ll_formula(a.left)} {show_ll_formula(a.right)})"
    return f"({a.op} {show_ll_formula(a.body)})"


def show_ll_proof(p) -> str:
    parts = [p.rule]
    for fname in p._fieldnames:
        val = getattr(p, fname)
        if fname in ("premise", "left", "right"):
            parts.append(show_ll_proof(val))
        elif fname == "ctx":
            parts.append("[" + " ".join(show_ll_formula(a) for a in val) + "]")
        elif fname == "perm":
            parts.append("[" + " ".join(str(k) for k in val) + "]")
        elif fname == "formula":
            parts.append(show_ll_formula(val))
        else:
            parts.append(str(val))
    return "(" + " ".join(parts) + ")"


def show_sequent(concl, locus) -> str:
    return f"|-_{show_locus(locus)} " + ", ".join(show_formula(a) for a in concl)


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|(\{)|(\})|(\[)|(\])|(=>)|(->)|(,)|([^\s(){}\[\],;]+))")


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str, file: str = "<input>") -> list[Tok]:
    toks = []
    pos, line, lstart = 0, 1, 0
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        if not m:
            # only trailing whitespace can fail to match
            if src[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - lstart + 1, file)
        start = m.start(m.lastindex) if m.lastindex else m.end()
        chunk = src[pos:start]
        line += chunk.count("\n")
        if "\n" in chunk:
            lstart = pos + chunk.rfind("\n") + 1
        col = start - lstart + 1
        text = m.group(m.lastindex) if m.lastindex else ""
        kinds = {1: "comment", 2: "(", 3: ")", 4: "{", 5: "}", 6: "[", 7: "]", 8: "=>", 9: "->", 10: ",", 11: "word"}
        kind = kinds.get(m.lastindex, "eof")
        if kind != "comment" and text:
            toks.append(Tok(kind, text, line, col))
        if m.end() == pos:
            break
        pos = m.end()
    return toks


class Cursor:
    def __init__(self, toks: list[Tok], file: str = "<input>"):
        self.toks, self.i, self.file = toks, 0, file

    def peek(self) -> Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> Tok:
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else Tok("eof", "", 1, 1)
            raise ParseError("unexpected end of input", last.line, last.col, self.file)
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Tok:
        t = self.next()
        if t.kind != kind or (text is not None and t.text != text):
            raise ParseError(f"expected {text or kind}, found {t.text!r}", t.line, t.col, self.file)
        return t

    def error(self, msg: str, tok: Tok | None = None) -> ParseError:
        tok = tok or self.peek() or (self.toks[-1] if self.toks else Tok("eof", "", 1, 1))
        return ParseError(msg, tok.line, tok.col, self.file)

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind and (text is None or t.text == text)


# ---------------------------------------------------------------------------
# elements, loci, functions


def parse_elem(c: Cursor) -> Elem:
    t = c.next()
    if t.kind == "(":
        x = parse_elem(c)
        if c.at(","):
            c.next()
            y = parse_elem(c)
            c.expect(")")
            return pair(x, y)
        c.expect(")")
        return x
    if t.kind != "word":
        raise c.error(f"expected an element, found {t.text!r}", t)
    if t.text == "unit":
        return UNIT
    if t.text in ("inl", "inr"):
        x = parse_elem(c)
        return inl(x) if t.text == "inl" else inr(x)
    return atom(t.text)


def parse_locus_literal(c: Cursor) -> frozenset:
    c.expect("{")
    out = []
    while not c.at("}"):
        out.append(parse_elem(c))
        if c.at(","):
            c.next()
        elif not c.at("}"):
            raise c.error("expected ',' or '}' in locus")
    c.expect("}")
    return frozenset(out)


def parse_graph_literal(c: Cursor) -> dict:
    c.expect("{")
    out = {}
    while not c.at("}"):
        tok = c.peek()
        x = parse_elem(c)
        c.expect("=>")
        y = parse_elem(c)
        if x in out:
            raise c.error(f"element {show_elem(x)} mapped twice", tok)
        out[x] = y
        if c.at(","):
            c.next()
        elif not c.at("}"):
            raise c.error("expected ',' or '}' in function body")
    c.expect("}")
    return out


def parse_elem_text(text: str) -> Elem:
    c = Cursor(tokenize(text))
    x = parse_elem(c)
    if c.peek() is not None:
        raise c.error("trailing input after element")
    return x


def parse_locus_text(text: str) -> frozenset:
    c = Cursor(tokenize(text))
    x = parse_locus_literal(c)
    if c.peek() is not None:
        raise c.error("trailing input after locus")
    return x


# ---------------------------------------------------------------------------
# formulae, derivations, proofs


@dataclass
class Scope:
    """Named objects visible to the parser."""

    loci: dict = field(default_factory=dict)
    funs: dict = field(default_factory=dict)
    vars: dict = field(default_factory=dict)
    formulas: dict = field(default_factory=dict)
    subs: dict = field(default_factory=dict)
    proofs: dict = field(default_factory=dict)


def _lookup(c: Cursor, table: dict, kind: str):
    t = c.expect("word")
    if t.text not in table:
        raise UnresolvedName(f"unknown {kind} {t.text!r}", t.line, t.col, c.file)
    return table[t.text]


def parse_locus(c: Cursor, scope: Scope) -> frozenset:
    if c.at("{"):
        return parse_locus_literal(c)
    return _lookup(c, scope.loci, "locus")


def parse_fun(c: Cursor, scope: Scope) -> SetFun:
    if not c.at("("):
        return _lookup(c, scope.funs, "function")
    c.expect("(")
    c.expect("word", "fn")
    dom = parse_locus(c, scope)
    cod = parse_locus(c, scope)
    tok = c.peek()
    graph = parse_graph_literal(c)
    c.expect(")")
    return make_fun(c, tok, dom, cod, graph)


def make_fun(c: Cursor, tok: Tok, dom, cod, graph) -> SetFun:
    from .setfun import SetFunError

    try:
        return SetFun(dom, cod, graph)
    except SetFunError as e:
        raise c.error(f"bad function: {e}", tok) from None


def _int(c: Cursor) -> int:
    t = c.expect("word")
    try:
        return int(t.text)
    except ValueError:
        raise c.error(f"expected an integer, found {t.text!r}", t) from None


_FORMULA_KW = ("pvar", "nvar", "one", "bot", "zero", "top", "tensor", "par", "with", "plus", "bang", "quest")


def parse_formula(c: Cursor, scope: Scope):
    from . import formula as F

    if not c.at("("):
        return _lookup(c, scope.formulas, "formula")
    c.expect("(")
    t = c.expect("word")
    kw = t.text
    if kw in ("pvar", "nvar"):
        f = parse_fun(c, scope)
        name = c.expect("word").text
        out = (F.PVar if kw == "pvar" else F.NVar)(f, name)
    elif kw in ("one", "bot", "zero", "top"):
        out = {"one": F.ONE_F, "bot": F.BOT_F, "zero": F.ZERO_F, "top": F.TOP_F}[kw]
    elif kw in ("tensor", "par"):
        a = parse_formula(c, scope)
        b = parse_formula(c, scope)
        out = (F.Tensor if kw == "tensor" else F.Par)(a, b)
    elif kw in ("with", "plus"):
        i = parse_fun(c, scope)
        j = parse_fun(c, scope)
        a = parse_formula(c, scope)
        b = parse_formula(c, scope)
        out = (F.With if kw == "with" else F.Plus)(i, j, a, b)
    elif kw in ("bang", "quest"):
        u = parse_fun(c, scope)
        a = parse_formula(c, scope)
        out = (F.Bang if kw == "bang" else F.Quest)(u, a)
    else:
        raise c.error(f"unknown formula keyword {kw!r}", t)
    c.expect(")")
    return out


def parse_sub(c: Cursor, scope: Scope):
    from . import formula as F
    from . import subtyping as S

    if not c.at("("):
        return _lookup(c, scope.subs, "derivation")
    c.expect("(")
    t = c.expect("word")
    kw = t.text
    if kw == "ax-var":
        f = parse_fun(c, scope)
        name = c.expect("word").text
        sign = c.expect("word")
        if sign.text not in ("+", "-"):
            raise c.error("expected + or -", sign)
        out = S.ax_var((F.PVar if sign.text == "+" else F.NVar)(f, name))
    elif kw == "ax-unit":
        out = S.ax_unit(parse_locus(c, scope), parse_formula(c, scope))
    elif kw in ("tensor-cong", "par-cong"):
        d1 = parse_sub(c, scope)
        d2 = parse_sub(c, scope)
        out = S.mult_cong(d1, d2, kw == "tensor-cong")
    elif kw == "add-rule":
        a = parse_formula(c, scope)
        b = parse_formula(c, scope)
        out = S.add_rule(a, b, parse_sub(c, scope), parse_sub(c, scope))
    elif kw in ("bang-rule", "quest-rule"):
        u = parse_fun(c, scope)
        a = parse_formula(c, scope)
        g = parse_fun(c, scope)
        d = parse_sub(c, scope)
        out = (S.bang_rule if kw == "bang-rule" else S.quest_rule)(u, a, g, d)
    else:
        raise c.error(f"unknown derivation keyword {kw!r}", t)
    c.expect(")")
    return out


def _proof_classes():
    from . import proof as P

    return {cls.rule: cls for cls in (
        P.Ax, P.OneIntro, P.BotIntro, P.TopIntro, P.TensorIntro, P.ParIntro, P.WithIntro,
        P.PlusIntro, P.Contraction, P.Weakening, P.Dereliction, P.Promotion, P.Cut,
        P.SubtypeStep, P.BaseChangeStep, P.Exchange)}


def parse_proof(c: Cursor, scope: Scope):
    if not c.at("("):
        return _lookup(c, scope.proofs, "proof")
    c.expect("(")
    t = c.expect("word")
    cls = _proof_classes().get(t.text)
    if cls is None:
        raise c.error(f"unknown proof rule {t.text!r}", t)
    args = []
    for fname in cls._fieldnames:
        kind = _field_kind(fname)
        if kind == "fun":
            args.append(parse_fun(c, scope))
        elif kind == "word":
            args.append(c.expect("word").text)
        elif kind == "locus":
            args.append(parse_locus(c, scope))
        elif kind in ("formulas", "ints"):
            c.expect("[")
            items = []
            while not c.at("]"):
                items.append(parse_formula(c, scope) if kind == "formulas" else _int(c))
                if c.at(","):
                    c.next()
            c.expect("]")
            args.append(tuple(items))
        elif kind == "formula":
            args.append(parse_formula(c, scope))
        elif kind == "sub":
            args.append(parse_sub(c, scope))
        elif kind == "proof":
            args.append(parse_proof(c, scope))
        else:
            args.append(_int(c))
    c.expect(")")
    return cls(*args)


def _whole(parser: Callable, text: str, scope: Scope | None, file: str = "<input>"):
    c = Cursor(tokenize(text, file), file)
    out = parser(c, scope or Scope())
    if c.peek() is not None:
        raise c.error("trailing input")
    return out


def parse_formula_text(text: str, scope: Scope | None = None):
    return _whole(parse_formula, text, scope)


def parse_sub_text(text: str, scope: Scope | None = None):
    return _whole(parse_sub, text, scope)


def parse_proof_text(text: str, scope: Scope | None = None):
    return _whole(parse_proof, text, scope)


def parse_fun_text(text: str, scope: Scope | None = None) -> SetFun:
    return _whole(parse_fun, text, scope)

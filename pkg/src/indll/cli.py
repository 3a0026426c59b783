"""Workspace files and the ``indll`` command line.

A workspace file is a sequence of declarations::

    locus I = {a, b}
    fun f : I -> {x} { a => x, b => x }
    var X : {x, y}
    formula A : I = (tensor (pvar f X) (one))
    sub d = (ax-var f X +)
    proof p = (ax f X)
    sem X carrier {x, y} order {(x, y)} family {x => x, y => y}

Names are unique per kind and must be declared before use.  ``sem``
declarations give the preorder interpretation of a variable; the order is
the reflexive-transitive closure of the listed pairs.

Exit codes: 0 success, 1 a check failed, 2 parse or name-resolution error,
3 a step or search budget was exhausted.
"""

from __future__ import annotations

import json
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import click

from . import cutelim, derived, formula as F, proof as P, scott, subtyping as S
from .setfun import SetFunError, is_elem, show_elem, show_locus, sorted_elems
from .syntax import (
    Cursor,
    ParseError,
    Scope,
    Tok,
    UnresolvedName,
    make_fun,
    parse_elem,
    parse_formula,
    parse_graph_literal,
    parse_locus,
    parse_proof,
    parse_sub,
    show_formula,
    show_ll_formula,
    show_ll_proof,
    show_proof,
    show_sub,
    tokenize,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_BUDGET = 0, 1, 2, 3

CHECK_ERRORS = (P.ProofError, F.FormulaError, S.SubtypingError, SetFunError, scott.ScottError)


class DuplicateName(ParseError):
    pass


class IllFormedDecl(ParseError):
    """A declaration that parses but whose object cannot be constructed."""


@dataclass
class Diagnostic:
    severity: str
    file: str
    line: int
    col: int
    message: str
    path: list | None = None

    def __str__(self) -> str:
        where = f"{self.file}:{self.line}:{self.col}"
        tail = f" (at {self.path})" if self.path is not None else ""
        return f"{where}: {self.severity}: {self.message}{tail}"

    @staticmethod
    def of_parse(e: ParseError) -> "Diagnostic":
        return Diagnostic("error", e.file, e.line, e.col, e.msg)


@dataclass
class Decl:
    kind: str
    name: str
    value: object
    file: str
    line: int
    col: int
    locus: frozenset | None = None


@dataclass
class Workspace:
    loci: dict = field(default_factory=dict)
    funs: dict = field(default_factory=dict)
    vars: dict = field(default_factory=dict)
    formulas: dict = field(default_factory=dict)
    subs: dict = field(default_factory=dict)
    proofs: dict = field(default_factory=dict)
    sems: dict = field(default_factory=dict)
    decls: list = field(default_factory=list)

    def scope(self) -> Scope:
        return Scope(self.loci, self.funs, self.vars, self.formulas, self.subs, self.proofs)

    def decl(self, kind: str, name: str) -> Decl:
        for d in self.decls:
            if d.kind == kind and d.name == name:
                return d
        raise KeyError(name)

    def sem_env(self, cap: int = scott.DEFAULT_CAP) -> scott.SemEnv:
        """Declared interpretations, with discrete defaults for the rest."""
        env = scott.default_env(self.vars, cap)
        env.vars.update(self.sems)
        return env


# ---------------------------------------------------------------------------
# parsing

_TABLE = {"locus": "loci", "fun": "funs", "var": "vars", "formula": "formulas", "sub": "subs",
          "proof": "proofs", "sem": "sems"}


def _closure(points: Sequence, gens: Iterable[tuple]) -> scott.Preorder:
    le = {(x, x) for x in points} | set(gens)
    changed = True
    while changed:
        extra = {(x, w) for (x, y) in le for (z, w) in le if y == z} - le
        le |= extra
        changed = bool(extra)
    return scott.Preorder(points, lambda x, y: (x, y) in le)


def _parse_sem(c: Cursor, ws: Workspace, name_tok: Tok) -> scott.SemVar:
    if name_tok.text not in ws.vars:
        raise UnresolvedName(f"unknown variable {name_tok.text!r}", name_tok.line, name_tok.col, c.file)
    c.expect("word", "carrier")
    carrier = parse_locus(c, ws.scope())
    c.expect("word", "order")
    c.expect("{")
    gens = []
    while not c.at("}"):
        tok = c.peek()
        p = parse_elem(c)
        if not (isinstance(p, tuple) and p[0] == "pair"):
            raise c.error("order entries are pairs (p, q)", tok)
        if p[1] not in carrier or p[2] not in carrier:
            raise c.error("order pair outside the carrier", tok)
        gens.append((p[1], p[2]))
        if c.at(","):
            c.next()
    c.expect("}")
    c.expect("word", "family")
    tok = c.peek()
    fam = parse_graph_literal(c)
    loc = ws.vars[name_tok.text]
    if set(fam) != set(loc):
        raise c.error("family must map every element of the variable's locus", tok)
    if not set(fam.values()) <= carrier:
        raise c.error("family value outside the carrier", tok)
    order = _closure(sorted_elems(carrier), gens)
    return scott.SemVar(order, fam)


def _parse_decl(c: Cursor, ws: Workspace) -> Decl:
    kw = c.expect("word")
    if kw.text not in _TABLE:
        raise c.error(f"unknown declaration {kw.text!r}", kw)
    name = c.expect("word")
    table = getattr(ws, _TABLE[kw.text])
    if name.text in table:
        raise DuplicateName(f"{kw.text} {name.text!r} is already defined", name.line, name.col, c.file)
    scope = ws.scope()
    locus = None
    if kw.text == "locus":
        c.expect("word", "=")
        value = parse_locus(c, scope)
    elif kw.text == "fun":
        c.expect("word", ":")
        dom = parse_locus(c, scope)
        c.expect("->")
        cod = parse_locus(c, scope)
        tok = c.peek()
        value = make_fun(c, tok, dom, cod, parse_graph_literal(c))
    elif kw.text == "var":
        c.expect("word", ":")
        value = parse_locus(c, scope)
    elif kw.text == "sem":
        value = _parse_sem(c, ws, name)
    else:
        if c.at("word", ":"):
            c.next()
            locus = parse_locus(c, scope)
        c.expect("word", "=")
        parser = {"formula": parse_formula, "sub": parse_sub, "proof": parse_proof}[kw.text]
        try:
            value = parser(c, scope)
        except ParseError:
            raise
        except (*CHECK_ERRORS, AttributeError, TypeError) as e:
            # the smart constructors reject some ill-shaped input outright
            raise IllFormedDecl(f"{kw.text} {name.text}: {type(e).__name__}: {e}", kw.line, kw.col, c.file) from None
    table[name.text] = value
    return Decl(kw.text, name.text, value, c.file, kw.line, kw.col, locus)


def parse_workspace_text(src: str, file: str = "<input>", ws: Workspace | None = None) -> Workspace:
    ws = Workspace() if ws is None else ws
    c = Cursor(tokenize(src, file), file)
    while c.peek() is not None:
        ws.decls.append(_parse_decl(c, ws))
    return ws


def parse_workspace(files: Sequence[str | Path]) -> Workspace:
    ws = Workspace()
    for f in files:
        parse_workspace_text(Path(f).read_text(), str(f), ws)
    return ws


def show_workspace(ws: Workspace) -> str:
    """Print every declaration with all references expanded inline."""
    out = []
    for d in ws.decls:
        v = d.value
        if d.kind in ("locus", "var"):
            sep = "=" if d.kind == "locus" else ":"
            out.append(f"{d.kind} {d.name} {sep} {show_locus(v)}")
        elif d.kind == "fun":
            body = ", ".join(f"{show_elem(x)} => {show_elem(v(x))}" for x in sorted_elems(v.dom))
            out.append(f"fun {d.name} : {show_locus(v.dom)} -> {show_locus(v.cod)} {{{body}}}")
        elif d.kind == "sem":
            pairs = sorted((x, y) for x, y in v.order.pairs if x != y)
            order = ", ".join(f"({show_elem(x)}, {show_elem(y)})" for x, y in pairs)
            fam = ", ".join(f"{show_elem(x)} => {show_elem(v.family[x])}" for x in sorted_elems(v.family))
            out.append(f"sem {d.name} carrier {show_locus(v.order.carrier)} order {{{order}}} family {{{fam}}}")
        else:
            shown = {"formula": show_formula, "sub": show_sub, "proof": show_proof}[d.kind](v)
            at = f" : {show_locus(d.locus)}" if d.locus is not None else ""
            out.append(f"{d.kind} {d.name}{at} = {shown}")
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# helpers


def formula_locus(a: F.Formula):
    """The locus a formula lives over, or ``None`` for closed unit formulae."""
    t = type(a)
    if t in (F.PVar, F.NVar):
        return a.f.dom
    if t in (F.With, F.Plus):
        return a.i.cod
    if t in (F.Bang, F.Quest):
        return a.u.cod
    if t in (F.Tensor, F.Par):
        return formula_locus(a.left) or formula_locus(a.right)
    return None


def show_point(x) -> str:
    if is_elem(x):
        return show_elem(x)
    if isinstance(x, frozenset):
        return "{" + ", ".join(sorted(show_point(y) for y in x)) + "}"
    if isinstance(x, tuple):
        return "(" + ", ".join(show_point(y) for y in x) + ")"
    return str(x)


def _diag_of(e: Exception, decl: Decl | None) -> Diagnostic:
    path = getattr(e, "path", None)
    file, line, col = (decl.file, decl.line, decl.col) if decl else ("<cli>", 0, 0)
    name = f"{decl.kind} {decl.name}: " if decl else ""
    return Diagnostic("error", file, line, col, f"{name}{type(e).__name__}: {e}",
                      list(path) if path is not None else None)


class Report:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: list[str] = []
        self.data: dict = {}
        self.diagnostics: list[Diagnostic] = []

    def say(self, line: str) -> None:
        self.lines.append(line)

    def fail(self, d: Diagnostic) -> None:
        self.diagnostics.append(d)

    def finish(self, code: int) -> None:
        if self.as_json:
            payload = dict(self.data, ok=code == EXIT_OK, exit=code,
                           diagnostics=[asdict(d) for d in self.diagnostics])
            click.echo(json.dumps(payload, indent=2, sort_keys=True))
        else:
            for line in self.lines:
                click.echo(line)
            for d in self.diagnostics:
                click.echo(str(d), err=True)
        sys.exit(code)


def _load(files: Sequence[str], rep: Report) -> Workspace:
    try:
        return parse_workspace(files)
    except ParseError as e:
        rep.fail(Diagnostic.of_parse(e))
        rep.finish(EXIT_FAIL if isinstance(e, IllFormedDecl) else EXIT_PARSE)
    except OSError as e:
        rep.fail(Diagnostic("error", str(getattr(e, "filename", "")), 0, 0, str(e)))
    rep.finish(EXIT_PARSE)
    raise AssertionError  # unreachable


def _pick(ws: Workspace, kind: str, name: str | None, rep: Report) -> list[Decl]:
    ds = [d for d in ws.decls if d.kind == kind and (name is None or d.name == name)]
    if name is not None and not ds:
        rep.fail(Diagnostic("error", "<cli>", 0, 0, f"no {kind} named {name!r}"))
        rep.finish(EXIT_PARSE)
    return ds


def _named(ws: Workspace, name: str, rep: Report, kinds=("formula", "proof")) -> Decl:
    for d in ws.decls:
        if d.kind in kinds and d.name == name:
            return d
    rep.fail(Diagnostic("error", "<cli>", 0, 0, f"no {' or '.join(kinds)} named {name!r}"))
    rep.finish(EXIT_PARSE)
    raise AssertionError


json_opt = click.option("--json", "as_json", is_flag=True, help="Emit a machine-readable report.")


@click.group()
def main() -> None:
    """Indexed linear logic toolkit."""


# ---------------------------------------------------------------------------
# check


def _check_decl(d: Decl, ws: Workspace) -> str:
    env = ws.vars
    if d.kind == "formula":
        loc = d.locus if d.locus is not None else formula_locus(d.value)
        F.check_def(loc if loc is not None else frozenset(), d.value, env)
        return f"formula {d.name}: defined over {show_locus(loc or ())}"
    if d.kind == "sub":
        loc, lhs, rhs = S.check_sub(d.value, env)
        if d.locus is not None and frozenset(d.locus) != loc:
            raise S.EndpointMismatch((), "declared locus differs from the derivation's")
        return f"sub {d.name}: {show_formula(lhs)} <= {show_formula(rhs)} over {show_locus(loc)}"
    seq = P.check_proof(d.value, env)
    if d.locus is not None and frozenset(d.locus) != seq.locus:
        raise P.RuleViolation((), d.value.rule, "declared locus differs from the proof's")
    return f"proof {d.name}: {seq}"


def _run_checks(ws: Workspace, decls: Sequence[Decl], rep: Report) -> int:
    results = []
    for d in decls:
        try:
            line = _check_decl(d, ws)
            rep.say(line)
            results.append({"kind": d.kind, "name": d.name, "ok": True, "summary": line})
        except CHECK_ERRORS as e:
            rep.fail(_diag_of(e, d))
            results.append({"kind": d.kind, "name": d.name, "ok": False})
    rep.data["results"] = results
    return EXIT_FAIL if rep.diagnostics else EXIT_OK


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path())
@json_opt
def check(files, as_json):
    """Check every formula, derivation and proof in the workspace."""
    rep = Report(as_json)
    ws = _load(files, rep)
    decls = [d for d in ws.decls if d.kind in ("formula", "sub", "proof")]
    rep.finish(_run_checks(ws, decls, rep))


@main.group()
def sub() -> None:
    """Subtyping derivations."""


@sub.command("check")
@click.argument("file", type=click.Path())
@click.argument("name", required=False)
@json_opt
def sub_check(file, name, as_json):
    """Check one or all subtyping derivations."""
    rep = Report(as_json)
    ws = _load([file], rep)
    rep.finish(_run_checks(ws, _pick(ws, "sub", name, rep), rep))


@sub.command("decide")
@click.argument("file", type=click.Path())
@click.argument("lhs")
@click.argument("rhs")
@click.option("--cap", default=S.DEFAULT_CAP, show_default=True, help="Search node budget.")
@json_opt
def sub_decide(file, lhs, rhs, cap, as_json):
    """Search for a derivation of LHS <= RHS (formula names in FILE)."""
    rep = Report(as_json)
    ws = _load([file], rep)
    da, db = _named(ws, lhs, rep, ("formula",)), _named(ws, rhs, rep, ("formula",))
    loc = da.locus if da.locus is not None else formula_locus(da.value)
    if loc is None:
        loc = db.locus if db.locus is not None else formula_locus(db.value)
    loc = frozenset() if loc is None else loc
    try:
        d = S.decide_subtype(da.value, db.value, loc, cap)
    except S.SearchBoundExceeded as e:
        rep.fail(_diag_of(e, da))
        rep.finish(EXIT_BUDGET)
    except CHECK_ERRORS as e:
        rep.fail(_diag_of(e, da))
        rep.finish(EXIT_FAIL)
    rep.data["holds"] = d is not None
    if d is None:
        rep.say(f"{lhs} <= {rhs}: no")
        rep.fail(Diagnostic("error", da.file, da.line, da.col, f"{lhs} is not a subtype of {rhs}"))
        rep.finish(EXIT_FAIL)
    rep.data["derivation"] = show_sub(d)
    rep.say(f"{lhs} <= {rhs}: yes")
    rep.say(show_sub(d))
    rep.finish(EXIT_OK)


# ---------------------------------------------------------------------------
# cut elimination


def _checked_proof(ws: Workspace, name: str | None, rep: Report) -> Decl:
    ds = _pick(ws, "proof", name, rep)
    if not ds:
        rep.fail(Diagnostic("error", "<cli>", 0, 0, "workspace has no proof"))
        rep.finish(EXIT_PARSE)
    d = ds[-1] if name is None else ds[0]
    try:
        P.check_proof(d.value, ws.vars)
    except CHECK_ERRORS as e:
        rep.fail(_diag_of(e, d))
        rep.finish(EXIT_FAIL)
    return d


def _has_cut(p: P.Proof) -> bool:
    return bool(cutelim.list_cuts(p))


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name", required=False)
@click.option("--strategy", type=click.Choice(["upper", "lower"]), default="upper", show_default=True)
@click.option("--budget", default=cutelim.DEFAULT_BUDGET, show_default=True, help="Maximum reduction steps.")
@click.option("--trace", "trace_file", type=click.Path(), default=None, help="Write the reduction trace as JSON.")
@json_opt
def normalize(file, name, strategy, budget, trace_file, as_json):
    """Eliminate the cuts of a proof (the last one in FILE by default)."""
    rep = Report(as_json)
    ws = _load([file], rep)
    d = _checked_proof(ws, name, rep)
    try:
        nf, tr = cutelim.normalize(d.value, strategy, budget)
    except cutelim.StepBudgetExceeded as e:
        rep.fail(_diag_of(e, d))
        rep.finish(EXIT_BUDGET)
    except CHECK_ERRORS as e:
        rep.fail(_diag_of(e, d))
        rep.finish(EXIT_FAIL)
    if trace_file:
        Path(trace_file).write_text(json.dumps(dict(tr.to_json(), strategy=strategy), indent=2) + "\n")
    cut_free = not _has_cut(nf)
    rep.data.update(steps=len(tr.steps), cut_free=cut_free, strategy=strategy, normal_form=show_proof(nf))
    rep.say(f"proof {d.name}: {len(tr.steps)} steps ({strategy}), cut-free: {'yes' if cut_free else 'no'}")
    rep.say(show_proof(nf))
    rep.finish(EXIT_OK if cut_free else EXIT_FAIL)


def confluence_oracles(p: P.Proof, env: dict | None = None, budget: int = cutelim.DEFAULT_BUDGET,
                       sem: scott.SemEnv | None = None) -> dict:
    """Normalize with both strategies and compare the results.

    The Scott comparison is ``None`` when the interpretation exceeds its cap."""
    up, _ = cutelim.normalize(p, "upper", budget, trace=False)
    lo, _ = cutelim.normalize(p, "lower", budget, trace=False)
    out = {
        "sequent": P.canonical_sequent(up) == P.canonical_sequent(lo),
        "erasure": P.ll_cleanup(P.erase_proof(up)) == P.ll_cleanup(P.erase_proof(lo)),
        "equiv": cutelim.equiv(up, lo),
    }
    sem = sem if sem is not None else scott.default_env(env or {})
    try:
        out["scott"] = scott.interp_proof(up, sem).points == scott.interp_proof(lo, sem).points
    except scott.CarrierBlowup:
        out["scott"] = None
    return out


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name", required=False)
@click.option("--budget", default=cutelim.DEFAULT_BUDGET, show_default=True)
@json_opt
def confluence(file, name, budget, as_json):
    """Compare the uppermost and lowermost normal forms of a proof."""
    rep = Report(as_json)
    ws = _load([file], rep)
    d = _checked_proof(ws, name, rep)
    try:
        res = confluence_oracles(d.value, ws.vars, budget, ws.sem_env())
    except cutelim.StepBudgetExceeded as e:
        rep.fail(_diag_of(e, d))
        rep.finish(EXIT_BUDGET)
    rep.data["oracles"] = res
    for k in ("sequent", "erasure", "scott", "equiv"):
        v = res[k]
        rep.say(f"{k}: {'skipped' if v is None else 'agree' if v else 'differ'}")
    bad = [k for k in ("sequent", "erasure", "scott") if res[k] is False]
    for k in bad:
        rep.fail(Diagnostic("error", d.file, d.line, d.col, f"normal forms differ on the {k} oracle"))
    rep.finish(EXIT_FAIL if bad else EXIT_OK)


# ---------------------------------------------------------------------------
# semantics, erasure, intersection types


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name")
@click.option("--env", "env_file", type=click.Path(), default=None,
              help="Workspace file with var and sem declarations (default: discrete orders).")
@json_opt
def interp(file, name, env_file, as_json):
    """Preorder interpretation of a formula or proof."""
    rep = Report(as_json)
    ws = _load([file], rep)
    d = _named(ws, name, rep)
    sem = ws.sem_env()
    if env_file:
        sem.vars.update(_load([env_file], rep).sems)
    try:
        if d.kind == "formula":
            loc = d.locus if d.locus is not None else formula_locus(d.value)
            pts = scott.interp_formula(d.value, sem, loc if loc is not None else frozenset())
            shown = {show_elem(x): show_point(pts[x]) for x in sorted_elems(pts)}
            rep.data["points"] = shown
            for k, v in shown.items():
                rep.say(f"{k} |-> {v}")
        else:
            P.check_proof(d.value, ws.vars)
            rel = scott.interp_proof(d.value, sem)
            tuples = sorted(show_point(t) for t in rel.points)
            member = scott.check_membership(d.value, sem, rel)
            rep.data.update(size=len(tuples), tuples=tuples, membership=member)
            rep.say(f"proof {d.name}: {len(tuples)} tuples, membership: {'yes' if member else 'no'}")
            for t in tuples:
                rep.say(t)
            if not member:
                rep.fail(Diagnostic("error", d.file, d.line, d.col, "conclusion not in its interpretation"))
                rep.finish(EXIT_FAIL)
    except scott.CarrierBlowup as e:
        rep.fail(_diag_of(e, d))
        rep.finish(EXIT_BUDGET)
    except CHECK_ERRORS as e:
        rep.fail(_diag_of(e, d))
        rep.finish(EXIT_FAIL)
    rep.finish(EXIT_OK)


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name")
@json_opt
def erase(file, name, as_json):
    """Erase a formula or proof to plain linear logic."""
    rep = Report(as_json)
    ws = _load([file], rep)
    d = _named(ws, name, rep)
    try:
        if d.kind == "formula":
            out = show_ll_formula(F.erase(d.value))
        else:
            P.check_proof(d.value, ws.vars)
            out = show_ll_proof(P.erase_proof(d.value))
    except CHECK_ERRORS as e:
        rep.fail(_diag_of(e, d))
        rep.finish(EXIT_FAIL)
    rep.data["erasure"] = out
    rep.say(out)
    rep.finish(EXIT_OK)


@main.command()
@click.argument("file", type=click.Path())
@click.argument("name")
@json_opt
def embed(file, name, as_json):
    """Read a formula of the intersection-type fragment as a type."""
    from . import itypes as T

    rep = Report(as_json)
    ws = _load([file], rep)
    d = _named(ws, name, rep, ("formula",))
    try:
        a = T.embed(d.value)
    except T.ITypeError as e:
        rep.fail(_diag_of(e, d))
        rep.finish(EXIT_FAIL)
    rep.data.update(itype=T.show_itype(a), simple=T.show_simple(T.simple_type_of(a)))
    rep.say(T.show_itype(a))
    rep.finish(EXIT_OK)


@main.command()
@click.argument("itype")
@click.option("--simple", "simple", default=None, help="Simple type the intersection type refines.")
@json_opt
def reify(itype, simple, as_json):
    """Translate an intersection type into an indexed formula."""
    from . import itypes as T

    rep = Report(as_json)
    try:
        a = T.parse_itype(itype)
        st = T.parse_simple(simple) if simple else None
    except T.ITParseError as e:
        rep.fail(Diagnostic("error", "<arg>", 1, 1, str(e)))
        rep.finish(EXIT_PARSE)
    try:
        f = T.reify(a, st)
    except (T.ITypeError, *CHECK_ERRORS) as e:
        rep.fail(_diag_of(e, None))
        rep.finish(EXIT_FAIL)
    rep.data["formula"] = show_formula(f)
    rep.say(show_formula(f))
    rep.finish(EXIT_OK)


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path())
@json_opt
def fmt(files, as_json):
    """Print the workspace in normal form (references expanded)."""
    rep = Report(as_json)
    ws = _load(files, rep)
    text = show_workspace(ws)
    rep.data["text"] = text
    rep.lines.extend(text.splitlines())
    rep.finish(EXIT_OK)


# ---------------------------------------------------------------------------
# selftest


def selftest_corpus(count: int = 20, seed: int = 0) -> dict:
    """Random invariant checks across the modules; returns failures per check."""
    from .gen import Gen

    g = Gen(random.Random(seed))
    fails = {"negation": 0, "erasure": 0, "subtyping": 0, "proof": 0, "normalize": 0, "scott": 0}
    sem = scott.default_env(g.env)
    for _ in range(count):
        loc = g.locus(0, 2)
        a = g.formula(loc, 2)
        fails["negation"] += F.negate(F.negate(a)) != a
        f = g.fun(g.locus(0, 2), loc) if loc else None
        if f is not None:
            fails["erasure"] += F.erase(F.base_change(f, a)) != F.erase(a)
        rho = g.up(a, loc)
        fails["subtyping"] += not S.is_valid(rho, g.env)
        p = g.cut_proof(depth=3)
        fails["proof"] += not P.is_valid(p, g.env) or not derived.collapses_to_identity(derived.sub_to_proof(rho))
        try:
            nf, _ = cutelim.normalize(p, "upper", trace=False)
            fails["normalize"] += _has_cut(nf) or P.canonical_sequent(nf) != P.canonical_sequent(p)
        except cutelim.StepBudgetExceeded:
            fails["normalize"] += 1
        try:
            fails["scott"] += not scott.check_membership(p, sem)
        except scott.CarrierBlowup:
            pass
    return fails


@main.command()
@click.option("--count", default=20, show_default=True)
@click.option("--seed", default=0, show_default=True)
@json_opt
def selftest(count, seed, as_json):
    """Run the bundled invariant corpus."""
    rep = Report(as_json)
    t0 = time.perf_counter()
    fails = selftest_corpus(count, seed)
    rep.data.update(failures=fails, count=count, seconds=round(time.perf_counter() - t0, 2))
    for k, v in fails.items():
        rep.say(f"{k}: {'ok' if v == 0 else f'{v} failures'}")
        if v:
            rep.fail(Diagnostic("error", "<selftest>", 0, 0, f"{k}: {v} of {count} cases failed"))
    rep.finish(EXIT_FAIL if any(fails.values()) else EXIT_OK)


if __name__ == "__main__":  # pragma: no cover
    main()

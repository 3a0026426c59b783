"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every test records its verdict before asserting, so a failing criterion
still shows up in the summary printed at the end of the run."""

from __future__ import annotations

import collections
import itertools
import random
import time

from conftest import ACCEPTANCE_LINES
from lambda_corpus import CORPUS

from indll.cutelim import list_cuts, ll_path, ll_reduce_at, normalize, equiv, reduce_at
from indll.derived import (
    collapses_to_identity,
    distrib,
    elaborate,
    intersect_proofs,
    ll_cleanup,
    seely,
    sub_to_proof,
)
from indll.formula import base_change, erase, ll_negate, negate
from indll.gen import ENV, Gen, all_itypes, fragment_formulas
from indll.itypes import (
    bridge_signature,
    check_it_deriv,
    derive,
    embed,
    encode_term,
    indll_to_it,
    it_equiv,
    it_leq,
    it_to_indll,
    parse_itype,
    parse_term,
    reify,
)
from indll.proof import BaseChangeStep, canonical_sequent, check_proof, erase_proof, ll_check
from indll.scott import CarrierBlowup, check_bc_prop, check_membership, default_env, interp_proof
from indll.setfun import ONE, SetFun, all_functions, atom, compose, factor, is_bot_pair, locus, pullback
from indll.subtyping import compose_iso, decide_subtype, is_valid


def report(n: int, ok: bool, elapsed: float, limit: float | None, detail: str) -> None:
    in_time = limit is None or elapsed < limit
    verdict = "PASS" if ok and in_time else "FAIL"
    budget = f" (limit {limit:.0f}s)" if limit is not None else ""
    line = f"{verdict} criterion {n}: {detail}; {elapsed:.1f}s{budget}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert in_time, line


def test_criterion_1_negation_and_erasure():
    t = time.perf_counter()
    bad = 0
    for s in range(1000):
        g = Gen(s, max_locus=4)
        i = g.locus()
        a = g.formula(i, 4)
        f = g.fun(g.locus(1 if i else 0, 4), i) if i else g.fun(frozenset(), i)
        bad += negate(negate(a)) != a
        bad += erase(base_change(f, a)) != erase(a)
        bad += erase(negate(a)) != ll_negate(erase(a))
    report(1, bad == 0, time.perf_counter() - t, 5, f"1000 formulae, {bad} failures")


def _random_fun(rng: random.Random, dom, cod) -> SetFun:
    cod_l = sorted(cod)
    return SetFun(dom, cod, {x: rng.choice(cod_l) for x in dom})


def test_criterion_2_pullback_laws():
    t = time.perf_counter()
    rng = random.Random(2)
    bad = universal = 0
    for _ in range(500):
        k = locus(*"klm"[: rng.randint(1, 3)])
        f = _random_fun(rng, locus(*"abc"[: rng.randint(0, 3)]), k)
        g = _random_fun(rng, locus(*"pqr"[: rng.randint(0, 3)]), k)
        p, p1, p2 = pullback(f, g)
        bad += compose(p1, f) != compose(p2, g)
        if len(p) <= 6:
            universal += 1
            z = locus(*"uv"[: rng.randint(0, 2)])
            for h1 in all_functions(z, f.dom):
                for h2 in all_functions(z, g.dom):
                    if compose(h1, f) != compose(h2, g):
                        continue
                    us = [u for u in all_functions(z, p) if compose(u, p1) == h1 and compose(u, p2) == h2]
                    bad += us != [factor(h1, h2, f, g)]
        left = frozenset(x for x in k if rng.random() < 0.5)
        i = SetFun(left, k, {x: x for x in left})
        j = SetFun(k - left, k, {x: x for x in k - left})
        bad += not is_bot_pair(pullback(f, i)[1], pullback(f, j)[1])
    report(2, bad == 0, time.perf_counter() - t, 10,
           f"500 cospans ({universal} with universal property enumerated), {bad} failures")


def _relation_laws(family, loc) -> tuple[int, int]:
    classes = collections.defaultdict(list)
    for a in family:
        classes[erase(a)].append(a)
    pairs = bad = 0
    for v in classes.values():
        m = [[decide_subtype(a, b, loc) is not None for b in v] for a in v]
        pairs += len(v) ** 2
        n = len(v)
        bad += sum(not m[x][x] for x in range(n))
        for x, y in itertools.product(range(n), repeat=2):
            if m[x][y]:
                bad += sum(m[y][z] and not m[x][z] for z in range(n))
    return pairs, bad


def test_criterion_3_subtyping_preorder_and_pseudofunctoriality():
    t = time.perf_counter()
    env = {"X": frozenset({atom("x")})}
    pairs = bad = isos = 0
    families = [(ONE, 2, 3), (locus("a", "b"), 1, 3), (locus("a", "b", "c"), 1, 3), (locus("a", "b"), 2, 2)]
    for loc, depth, bag in families:
        fam = fragment_formulas(loc, depth, env, bag)
        n, b = _relation_laws(fam, loc)
        pairs += n
        bad += b
        for a in fam[:300]:
            for f2 in itertools.islice(all_functions(locus("p", "q"), loc), 4):
                for f1 in itertools.islice(all_functions(locus("r"), f2.dom), 2):
                    for d in compose_iso(f1, f2, a):
                        isos += 1
                        bad += not is_valid(d, env)
    chains = 0
    for s in range(200):
        g = Gen(s)
        i = g.locus()
        a = g.formula(i, 3)
        d1 = g.up(a, i)
        d2 = g.up(d1.rhs, i)
        chains += 1
        bad += decide_subtype(a, a, i) is None
        bad += decide_subtype(a, d2.rhs, i) is None
        k = g.locus(1) if i else frozenset()
        f2 = g.fun(k, i)
        f1 = g.fun(g.locus(1) if k else frozenset(), k)
        for d in compose_iso(f1, f2, a):
            isos += 1
            bad += not is_valid(d, ENV)
    report(3, bad == 0, time.perf_counter() - t, 60,
           f"{pairs} ordered pairs, {chains} generated chains, {isos} compose_iso outputs, {bad} failures")


def test_criterion_4_proof_checking_and_derived_rules():
    t = time.perf_counter()
    bad = built = 0

    def ok(p) -> bool:
        nonlocal built
        built += 1
        try:
            check_proof(p, ENV)
            ll_check(erase_proof(p))
        except Exception:
            return False
        return True

    for s in range(200):
        p = sub_to_proof(Gen(s).derivation(depth=3))
        bad += not (ok(p) and collapses_to_identity(p))
    for s in range(20):
        g = Gen(1000 + s)
        i = g.locus(1)
        u = g.fun(g.locus(0, 2, "pq"), i)
        v = g.fun(g.locus(0, 2, "rs"), i)
        for p in seely(u, v, g.formula(u.dom, 1), g.formula(v.dom, 1)):
            bad += not ok(p)
    for s in range(20):
        g = Gen(2000 + s)
        k = g.locus(1)
        i, j = g.split(k)
        a = g.formula(k, 1)
        for p in distrib(a, i, j, g.formula(i.dom, 1), g.formula(j.dom, 1)):
            bad += not ok(p)
    for s in range(50):
        g = Gen(3000 + s)
        p = g.proof(depth=3)
        fam = []
        for _ in range(g.rng.randint(1, 3)):
            j = g.locus(1) if p.locus else frozenset()
            fam.append((j, elaborate(BaseChangeStep(g.fun(j, p.locus), p))))
        bad += not ok(intersect_proofs(fam))
    report(4, bad == 0, time.perf_counter() - t, 30, f"{built} constructed proofs, {bad} failures")


def _cut_corpus(n: int = 300, depth: int = 3) -> list:
    return [Gen(s).cut_proof(depth=depth) for s in range(n)]


def test_criterion_5_subject_reduction_and_simulation():
    t = time.perf_counter()
    bad = steps = 0
    for p in _cut_corpus():
        check_proof(p, ENV)
        seq, e = canonical_sequent(p), erase_proof(p)
        for c in list_cuts(p):
            steps += 1
            q = reduce_at(p, c)
            try:
                check_proof(q, ENV)
            except Exception:
                bad += 1
                continue
            bad += canonical_sequent(q) != seq
            bad += erase_proof(q) != ll_reduce_at(e, ll_path(p, c))
    report(5, bad == 0, time.perf_counter() - t, 60, f"300 proofs, {steps} reduction steps, {bad} failures")


def test_criterion_6_termination():
    t = time.perf_counter()
    bad = longest = 0
    for s in range(600):
        p = Gen(s).cut_proof(depth=1 + s % 6)
        n, tr = normalize(p, budget=10**5, trace=False)
        longest = max(longest, len(tr.steps))
        bad += bool(list_cuts(n))
    report(6, bad == 0, time.perf_counter() - t, 120,
           f"600 proofs of depth 1..6, longest normalization {longest} steps, {bad} failures")


def test_criterion_7_confluence_oracles():
    t = time.perf_counter()
    seq = ers = sem = agree = skipped = 0
    env = default_env(ENV)
    n = 100
    for s in range(n):
        p = Gen(s).cut_proof(depth=4)
        n1, _ = normalize(p, "upper")
        n2, _ = normalize(p, "lower")
        seq += canonical_sequent(n1) == canonical_sequent(n2)
        ers += ll_cleanup(erase_proof(n1)) == ll_cleanup(erase_proof(n2))
        try:
            sem += interp_proof(n1, env).points == interp_proof(n2, env).points
        except CarrierBlowup:
            skipped += 1
        agree += equiv(n1, n2)
    ok = seq == ers == n and sem + skipped == n and skipped < n // 5
    report(7, ok, time.perf_counter() - t, 300,
           f"sequent {seq}/{n}, erasure {ers}/{n}, scott {sem}/{n - skipped} ({skipped} over the cap), "
           f"equiv agreement {agree}/{n}")


def test_criterion_8_scott_oracle():
    t = time.perf_counter()
    env = default_env(ENV)
    bad = total = skipped = 0
    for s in range(200):
        g = Gen(s)
        i = g.locus(1)
        a = g.formula(i, 3)
        f = g.fun(g.locus(0, 3), i)
        total += 1
        try:
            bad += not check_bc_prop(f, a, env)
        except CarrierBlowup:
            skipped += 1
    for p in _cut_corpus():
        total += 1
        try:
            r = interp_proof(p, env)
        except CarrierBlowup:
            skipped += 1
            continue
        bad += not check_membership(p, env, r)
        for c in list_cuts(p):
            q = reduce_at(p, c)
            total += 1
            try:
                bad += interp_proof(q, env) != r
                bad += not check_membership(q, env)
            except CarrierBlowup:
                skipped += 1
    rate = skipped / total
    report(8, bad == 0 and rate < 0.2, time.perf_counter() - t, None,
           f"{total} instances, {bad} failures, skip rate {rate:.1%}")


def test_criterion_9_intersection_types():
    t = time.perf_counter()
    bad = 0
    fam = fragment_formulas(ONE, 2, {"X": frozenset({atom("x")})}, 3)
    classes = collections.defaultdict(list)
    for a in fam:
        classes[erase(a)].append(a)
    pairs = 0
    for v in classes.values():
        es = [embed(a) for a in v]
        for (a, ea), (b, eb) in itertools.product(zip(v, es), repeat=2):
            pairs += 1
            bad += (decide_subtype(a, b, ONE) is not None) != it_leq(ea, eb)
    its = all_itypes(2, ("a", "b"), 3)
    for a in its:
        bad += not it_equiv(embed(reify(a)), a)
    for src, ty in CORPUS:
        term, a = parse_term(src), parse_itype(ty)
        d = derive(term, a)
        check_it_deriv(d)
        p = it_to_indll(d)
        check_proof(p)
        ll_term, st, ctx = bridge_signature(d)
        bad += erase_proof(p) != encode_term(ll_term, st, ctx)
        bad += not it_equiv(embed(p.concl[-1]), a)
        back = indll_to_it(p, term)
        check_it_deriv(back)
        bad += not it_equiv(back.typ, a)
    report(9, bad == 0 and pairs >= 2000, time.perf_counter() - t, 300,
           f"{pairs} biconditional pairs, {len(its)} reify round trips, {len(CORPUS)} bridged terms, {bad} failures")


def test_criterion_10_cli_contract(tmp_path):
    import shutil

    import test_cli as tc
    from indll import cli
    from indll.cli import parse_workspace, parse_workspace_text, show_workspace

    t = time.perf_counter()
    for f in tc.FIXTURES.glob("*.indll"):
        shutil.copy(f, tmp_path / f.name)
    bad = 0
    for name, argv, code in tc.CASES:
        res = tc.run_cli(argv, tmp_path)
        golden = tc.GOLDEN / f"{name}.txt"
        bad += res.exit_code != code or not golden.exists() or tc.render(res) != golden.read_text()
    covered = {a[0] if a[0] != "sub" else f"sub {a[1]}" for _, a, _ in tc.CASES}
    commands = {c for c in cli.main.commands if c != "sub"} | {f"sub {c}" for c in cli.sub.commands}
    bad += not commands <= covered
    fixtures = tc.positive_fixtures()
    for path in fixtures:
        ws = parse_workspace([path])
        printed = show_workspace(ws)
        bad += show_workspace(parse_workspace_text(printed, "printed")) != printed
    bad += not all(c in cli.__doc__ for c in ("0 success", "1 a check failed", "2 parse", "3 a step"))
    report(10, bad == 0, time.perf_counter() - t, 10,
           f"{len(tc.CASES)} golden runs, {len(fixtures)} round trips, {bad} failures")

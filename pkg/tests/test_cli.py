from __future__ import annotations

import json
import os
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from indll import cli
from indll.cli import parse_workspace, parse_workspace_text, show_workspace
from indll.syntax import ParseError, UnresolvedName

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"
REGEN = os.environ.get("INDLL_REGEN") == "1"

# (golden name, argv, expected exit code)
CASES = [
    ("check_ok", ["check", "ok.indll"], 0),
    ("check_ok_json", ["check", "ok.indll", "--json"], 0),
    ("check_empty", ["check", "empty.indll"], 0),
    ("check_redex", ["check", "redex.indll"], 0),
    ("check_types", ["check", "types.indll"], 0),
    ("check_two_files", ["check", "ok.indll", "types.indll"], 0),
    ("sub_check_all", ["sub", "check", "ok.indll"], 0),
    ("sub_check_one_json", ["sub", "check", "ok.indll", "d", "--json"], 0),
    ("sub_decide_yes", ["sub", "decide", "ok.indll", "B", "B"], 0),
    ("sub_decide_no", ["sub", "decide", "ok.indll", "A", "B"], 1),
    ("sub_decide_unknown", ["sub", "decide", "ok.indll", "A", "Q"], 2),
    ("normalize_redex", ["normalize", "redex.indll"], 0),
    ("normalize_redex_lower_json", ["normalize", "redex.indll", "--strategy", "lower", "--json"], 0),
    ("normalize_cut", ["normalize", "ok.indll", "c", "--trace", "trace.json"], 0),
    ("normalize_budget", ["normalize", "redex.indll", "--budget", "1"], 3),
    ("normalize_unknown", ["normalize", "ok.indll", "nope"], 2),
    ("normalize_bad_proof", ["normalize", "bad_proof.indll"], 1),
    ("confluence_redex", ["confluence", "redex.indll"], 0),
    ("confluence_cut_json", ["confluence", "ok.indll", "c", "--json"], 0),
    ("confluence_budget", ["confluence", "redex.indll", "--budget", "2"], 3),
    ("interp_proof", ["interp", "ok.indll", "c"], 0),
    ("interp_formula_env", ["interp", "ok.indll", "B", "--env", "env.indll"], 0),
    ("interp_proof_env_json", ["interp", "ok.indll", "p", "--env", "env.indll", "--json"], 0),
    ("interp_redex", ["interp", "redex.indll", "redex"], 0),
    ("interp_bad_env", ["interp", "ok.indll", "c", "--env", "bad_sem.indll"], 2),
    ("erase_proof", ["erase", "ok.indll", "c"], 0),
    ("erase_formula", ["erase", "types.indll", "id"], 0),
    ("erase_redex_json", ["erase", "redex.indll", "redex", "--json"], 0),
    ("embed_id", ["embed", "types.indll", "id", "--json"], 0),
    ("embed_outside", ["embed", "types.indll", "tensor"], 1),
    ("reify_arrow", ["reify", "[a] -> a"], 0),
    ("reify_variants", ["reify", "[a@x, a@y] -> a@x", "--json"], 0),
    ("reify_with", ["reify", "a &.", "--simple", "a & b"], 0),
    ("reify_not_refining", ["reify", "[a, b] -> a"], 1),
    ("reify_parse_error", ["reify", "[a ->"], 2),
    ("fmt_ok", ["fmt", "ok.indll"], 0),
    ("fmt_redex", ["fmt", "redex.indll"], 0),
    ("selftest", ["selftest", "--count", "5"], 0),
    ("bad_parse", ["check", "bad_parse.indll"], 2),
    ("bad_unresolved", ["check", "bad_unresolved.indll"], 2),
    ("bad_duplicate", ["check", "bad_duplicate.indll"], 2),
    ("bad_duplicate_across", ["check", "ok.indll", "ok.indll"], 2),
    ("bad_keyword", ["check", "bad_keyword.indll"], 2),
    ("bad_fun", ["check", "bad_fun.indll"], 2),
    ("bad_sem", ["check", "bad_sem.indll"], 2),
    ("bad_formula", ["check", "bad_formula.indll"], 1),
    ("bad_formula_json", ["check", "bad_formula.indll", "--json"], 1),
    ("bad_proof", ["check", "bad_proof.indll"], 1),
    ("bad_sub", ["check", "bad_sub.indll"], 1),
    ("bad_missing_file", ["check", "missing.indll"], 2),
]


def run_cli(argv: list[str], workdir: Path):
    runner = CliRunner()
    cwd = os.getcwd()
    os.chdir(workdir)
    try:
        return runner.invoke(cli.main, argv, catch_exceptions=False)
    finally:
        os.chdir(cwd)


def render(result) -> str:
    return f"{result.stdout}--- stderr\n{result.stderr}--- exit {result.exit_code}\n"


@pytest.fixture
def workdir(tmp_path: Path) -> Path:
    for f in FIXTURES.glob("*.indll"):
        shutil.copy(f, tmp_path / f.name)
    return tmp_path


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code, workdir):
    result = run_cli(argv, workdir)
    assert result.exit_code == code, render(result)
    text = render(result)
    golden = GOLDEN / f"{name}.txt"
    if REGEN:
        golden.write_text(text)
    assert golden.exists(), f"missing golden file {golden.name}"
    assert text == golden.read_text()


def test_every_command_has_a_golden():
    covered = {argv[0] if argv[0] != "sub" else f"sub {argv[1]}" for _, argv, _ in CASES}
    commands = {c for c in cli.main.commands if c != "sub"} | {f"sub {c}" for c in cli.sub.commands}
    assert commands <= covered


def test_exit_codes_documented():
    doc = cli.__doc__
    for code in ("0 success", "1 a check failed", "2 parse", "3 a step"):
        assert code in doc


def test_trace_file_written(workdir):
    run_cli(["normalize", "redex.indll", "--trace", "t.json"], workdir)
    data = json.loads((workdir / "t.json").read_text())
    assert data["count"] == len(data["steps"]) == 5
    assert data["strategy"] == "upper"


def positive_fixtures() -> list[Path]:
    return sorted(f for f in FIXTURES.glob("*.indll") if not f.name.startswith("bad_"))


def _decl_view(ws):
    return [(d.kind, d.name, d.value, d.locus) for d in ws.decls]


@pytest.mark.parametrize("path", positive_fixtures(), ids=lambda p: p.name)
def test_print_parse_round_trip(path):
    ws = parse_workspace([path])
    printed = show_workspace(ws)
    again = parse_workspace_text(printed, "printed")
    assert _decl_view(again) == _decl_view(ws)
    assert show_workspace(again) == printed


@pytest.mark.parametrize("path", sorted(FIXTURES.glob("bad_*.indll")), ids=lambda p: p.name)
def test_negative_fixtures_are_rejected(path):
    try:
        ws = parse_workspace([path])
    except ParseError as e:
        assert e.line >= 1 and e.col >= 1
        return
    for d in ws.decls:
        if d.kind in ("formula", "sub", "proof"):
            with pytest.raises(cli.CHECK_ERRORS):
                cli._check_decl(d, ws)


def test_empty_workspace():
    ws = parse_workspace_text("")
    assert ws.decls == [] and show_workspace(ws) == ""


def test_unit_workspace_resolves():
    ws = parse_workspace_text("locus I = {unit}\nfun id : I -> I { unit => unit }\nformula A : I = (one)\n")
    assert set(ws.funs) == {"id"} and set(ws.formulas) == {"A"}


def test_dangling_name_location():
    with pytest.raises(UnresolvedName) as ei:
        parse_workspace_text("var X : {x}\nformula A = (pvar nope X)\n", "w.indll")
    assert (ei.value.file, ei.value.line, ei.value.col) == ("w.indll", 2, 19)


def test_sem_order_is_closed():
    ws = parse_workspace_text("var X : {x}\nsem X carrier {p, q, r} order {(p, q), (q, r)} family {x => p}\n")
    order = ws.sems["X"].order
    assert order.leq(("atom", "p"), ("atom", "r")) and not order.leq(("atom", "r"), ("atom", "p"))


def test_diagnostic_carries_path(workdir):
    result = run_cli(["check", "bad_proof.indll", "--json"], workdir)
    diag = json.loads(result.stdout)["diagnostics"]
    assert len(diag) == 1 and diag[0]["path"] == [] and diag[0]["line"] == 4

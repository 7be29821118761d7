"""Command-line interface: exit codes, JSON outputs, file formats."""

import json

from fixtures import flat_game_arena_model
from rhagames.cli import main
from rhagames.rsm import model_to_json, node
from rhagames.tcm import Halt, Inc, TwoCounterMachine, machine_to_json

INC_HALT_TEXT = "L0: INC c1 GOTO L1\nL1: HALT\n"
LOOP_TEXT = "L0: IFZ c1 THEN L0 ELSE L1\nL1: HALT\n"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write(tmp_path, name, content):
    path = tmp_path / name
    path.write_text(content, encoding="utf-8")
    return str(path)


# -- tcm-run ---------------------------------------------------------------------


def test_tcm_run_halting(tmp_path, capsys):
    path = write(tmp_path, "m.tcm", INC_HALT_TEXT)
    code, out, _ = run_cli(capsys, "tcm-run", path)
    assert code == 0
    data = json.loads(out)
    assert data["halted"] is True and data["status"] == "halted"
    assert data["final"] == {"pc": 1, "c1": 1, "c2": 0}


def test_tcm_run_nonhalting(tmp_path, capsys):
    path = write(tmp_path, "m.tcm", LOOP_TEXT)
    code, out, _ = run_cli(capsys, "tcm-run", path, "--max-steps", "50")
    assert code == 0
    data = json.loads(out)
    assert data["halted"] is False and data["status"] == "exhausted"
    assert data["steps"] == 50


def test_tcm_run_accepts_json_mirror(tmp_path, capsys):
    machine = TwoCounterMachine((Inc("c2", 1), Halt()))
    path = write(tmp_path, "m.json", json.dumps(machine_to_json(machine)))
    code, out, _ = run_cli(capsys, "tcm-run", path)
    assert code == 0
    assert json.loads(out)["final"]["c2"] == 1


def test_tcm_run_malformed_file_exits_2(tmp_path, capsys):
    path = write(tmp_path, "bad.tcm", "L0: JUMP somewhere\n")
    code, _, err = run_cli(capsys, "tcm-run", path)
    assert code == 2
    assert "error" in err


# -- compile ----------------------------------------------------------------------


def test_compile_halt_only(tmp_path, capsys):
    machine_path = write(tmp_path, "m.tcm", "L0: HALT\n")
    out_path = str(tmp_path / "arena.json")
    code, out, _ = run_cli(capsys, "compile", machine_path, "--target", "rta3", "--out", out_path)
    assert code == 0
    arena_json = json.loads((tmp_path / "arena.json").read_text())
    sidecar = json.loads((tmp_path / "arena.sidecar.json").read_text())
    assert sidecar["time_bound"] == "4/1"
    assert arena_json["variables"] == ["x", "y", "z"]
    assert "node:Main.HALT" in arena_json["finals"]


def test_compile_targets_have_declared_variables(tmp_path, capsys):
    machine_path = write(tmp_path, "m.tcm", INC_HALT_TEXT)
    code, out, _ = run_cli(capsys, "compile", machine_path, "--target", "rsa4")
    assert code == 0
    data = json.loads(out)
    assert data["model"]["variables"] == ["x", "y", "z", "u"]
    assert data["sidecar"]["target"] == "rsa4"


# -- simulate ----------------------------------------------------------------------


def _compiled(tmp_path, capsys, text=INC_HALT_TEXT, target="rta3"):
    machine_path = write(tmp_path, "m.tcm", text)
    arena_path = str(tmp_path / "arena.json")
    code, _, _ = run_cli(capsys, "compile", machine_path, "--target", target, "--out", arena_path)
    assert code == 0
    return arena_path, machine_path


def test_simulate_skip_reaches_halt(tmp_path, capsys):
    arena_path, machine_path = _compiled(tmp_path, capsys)
    code, out, _ = run_cli(capsys, "simulate", arena_path, machine_path, "--tortoise", "skip")
    assert code == 0
    data = json.loads(out)
    assert data["outcome"] == "final"
    assert data["location"] == "node:Main.HALT"
    assert data["elapsed"] == "7/6"


def test_simulate_verify_reaches_pass_node(tmp_path, capsys):
    arena_path, machine_path = _compiled(tmp_path, capsys)
    code, out, _ = run_cli(
        capsys, "simulate", arena_path, machine_path, "--tortoise", "verify:0:div1"
    )
    assert code == 0
    data = json.loads(out)
    assert data["outcome"] == "final"
    assert data["location"] == "node:Div_y_2.pass"


def test_simulate_deviation_plus_verify_misses_finals(tmp_path, capsys):
    arena_path, machine_path = _compiled(tmp_path, capsys)
    code, out, _ = run_cli(
        capsys,
        "simulate", arena_path, machine_path,
        "--deviate", "0:1/64", "--tortoise", "verify:0:div1",
    )
    assert code == 0
    data = json.loads(out)
    assert data["outcome"] != "final"


def test_simulate_writes_trace(tmp_path, capsys):
    arena_path, machine_path = _compiled(tmp_path, capsys, target="rsa4")
    trace_path = str(tmp_path / "trace.jsonl")
    code, _, _ = run_cli(
        capsys, "simulate", arena_path, machine_path, "--trace", trace_path
    )
    assert code == 0
    lines = (tmp_path / "trace.jsonl").read_text().splitlines()
    record = json.loads(lines[0])
    assert record["step"] == 0 and "valuation" in record


# -- rsm-solve ----------------------------------------------------------------------


def test_rsm_solve_matches_attractor(tmp_path, capsys):
    model, partition = flat_game_arena_model()
    data = model_to_json(model, start="s0", partition=partition, finals=[node("goal")])
    path = write(tmp_path, "game.json", json.dumps(data))
    code, out, _ = run_cli(capsys, "rsm-solve", path, "--objective", "reach")
    assert code == 0
    assert json.loads(out)["winner"] == "Achilles"
    code, out, _ = run_cli(capsys, "rsm-solve", path, "--objective", "terminate")
    assert code == 0
    assert json.loads(out)["winner"] == "Tortoise"  # no exits to reach


def test_rsm_solve_missing_partition_exits_2(tmp_path, capsys):
    model, _ = flat_game_arena_model()
    data = model_to_json(model, start="s0", finals=[node("goal")])
    path = write(tmp_path, "game.json", json.dumps(data))
    code, _, err = run_cli(capsys, "rsm-solve", path)
    assert code == 2
    assert "partition" in err


# -- check -------------------------------------------------------------------------


def test_check_faithful_run_all_pass(tmp_path, capsys):
    arena_path, machine_path = _compiled(tmp_path, capsys)
    report_path = str(tmp_path / "report.json")
    code, out, _ = run_cli(capsys, "check", arena_path, machine_path, "--report", report_path)
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    assert data["encoding"]["ok"] is True and data["time_ledger"]["ok"] is True
    assert json.loads((tmp_path / "report.json").read_text()) == data


def test_check_deviated_run_names_first_mismatch(tmp_path, capsys):
    arena_path, machine_path = _compiled(tmp_path, capsys)
    code, out, _ = run_cli(
        capsys, "check", arena_path, machine_path, "--deviate", "1:1/64"
    )
    assert code == 1  # property violated
    data = json.loads(out)
    assert data["ok"] is False
    assert "mismatch" in data["encoding"]["failure"]
    mismatches = [e for e in data["encoding"]["entries"] if not e["ok"]]
    assert mismatches and mismatches[0]["step"] == 1


def test_check_empty_machine_vacuous_pass(tmp_path, capsys):
    arena_path, machine_path = _compiled(tmp_path, capsys, text="L0: HALT\n")
    code, out, _ = run_cli(capsys, "check", arena_path, machine_path)
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_check_missing_file_exits_2(tmp_path, capsys):
    code, _, err = run_cli(capsys, "check", "/nonexistent/a.json", "/nonexistent/m.tcm")
    assert code == 2

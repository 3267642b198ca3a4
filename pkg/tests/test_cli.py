"""Command-line behavior: exit codes, event streams, determinism."""

import io
import json
import subprocess
import sys

import pytest

from ctstl.cli import main

FIG4_CSV = "t,x\n0,2\n1,-1\n2,7\n3,10\n4,-5\n5,15\n6,8\n7,-2\n"
FIG4_FORMULA = "G[0,2] C[1,5]^3 (x > 0)"


@pytest.fixture
def fig4_file(tmp_path):
    p = tmp_path / "fig4.csv"
    p.write_text(FIG4_CSV)
    return str(p)


@pytest.fixture
def ex_pair_files(tmp_path):
    p1 = tmp_path / "x1.csv"
    p1.write_text("x\n" + "\n".join("0 0 2 3 4 7 10 0 5 5 15".split()) + "\n")
    p2 = tmp_path / "x2.csv"
    p2.write_text("x\n" + "\n".join("0 0 2 -3 -4 7 -5 -1 0 5 15".split())
                  + "\n")
    return str(p1), str(p2)


def run_cli(argv, stdin_text=None):
    """Invoke main() in-process, capturing stdout/stderr and exit code."""
    out, err = io.StringIO(), io.StringIO()
    old = sys.stdout, sys.stderr, sys.stdin
    try:
        sys.stdout, sys.stderr = out, err
        if stdin_text is not None:
            sys.stdin = io.StringIO(stdin_text)
        code = main(argv)
    finally:
        sys.stdout, sys.stderr, sys.stdin = old
    return code, out.getvalue(), err.getvalue()


class TestEval:
    def test_satisfied_exit_zero(self, ex_pair_files):
        p1, _ = ex_pair_files
        code, out, _ = run_cli(
            ["eval", "--formula", "C[2,8]^4 (x > 1)", p1])
        assert (code, out.strip()) == (0, "true")

    def test_violated_exit_one(self, ex_pair_files):
        _, p2 = ex_pair_files
        code, out, _ = run_cli(
            ["eval", "--formula", "C[2,8]^4 (x > 1)", p2])
        assert (code, out.strip()) == (1, "false")

    def test_truncated_trace_exit_two(self, tmp_path):
        p = tmp_path / "short.csv"
        p.write_text("x\n1\n2\n")
        code, _, err = run_cli(
            ["eval", "--formula", "C[2,8]^4 (x > 1)", str(p)])
        assert code == 2
        assert "error" in err

    def test_parse_error_exit_two(self, fig4_file):
        code, _, err = run_cli(["eval", "--formula", "x >", fig4_file])
        assert code == 2 and "error" in err

    def test_at_must_align_with_step(self, fig4_file):
        code, _, err = run_cli(
            ["eval", "--formula", "x > 0", "--at", "0.25", fig4_file])
        assert code == 2


class TestRob:
    def test_point_values(self, ex_pair_files):
        p1, p2 = ex_pair_files
        code, out, _ = run_cli(["rob", "--formula", "C[2,8]^4 (x > 1)", p1])
        assert code == 0 and out.strip() == "3"
        code, out, _ = run_cli(["rob", "--formula", "C[2,8]^4 (x > 1)", p2])
        assert code == 0 and out.strip() == "-2"

    def test_sweep_rows(self, fig4_file):
        code, out, _ = run_cli(
            ["rob", "--formula", "C[1,5]^3 (x > 0)", "--sweep", fig4_file])
        assert code == 0
        assert out.splitlines() == ["t,rho", "0,7", "1,8", "2,8"]

    def test_formula_file_flag(self, fig4_file, tmp_path):
        ff = tmp_path / "f.txt"
        ff.write_text("C[1,5]^3 (x > 0)\n")
        code, out, _ = run_cli(
            ["rob", "--formula-file", str(ff), fig4_file])
        assert code == 0 and out.strip() == "7"


class TestMonitor:
    def test_stops_at_decision(self, fig4_file):
        code, out, _ = run_cli(
            ["monitor", "--formula", FIG4_FORMULA, fig4_file])
        events = [json.loads(line) for line in out.splitlines()]
        assert code == 0
        assert len(events) == 7  # decided at sample 6, stream stops
        assert events[-1]["i"] == 6
        assert events[-1]["verdict"] is True
        assert events[-1]["decided"] is True
        assert events[-2]["decided"] is False

    def test_run_to_end_repeats_verdict(self, fig4_file):
        code, out, _ = run_cli(
            ["monitor", "--formula", FIG4_FORMULA, "--run-to-end",
             fig4_file])
        events = [json.loads(line) for line in out.splitlines()]
        assert code == 0
        assert len(events) == 8
        assert [e["verdict"] for e in events[-2:]] == [True, True]
        assert events[-1]["lb"] == events[-1]["ub"] == 7.0

    def test_file_and_stdin_streams_are_identical(self, fig4_file):
        code_f, out_f, _ = run_cli(
            ["monitor", "--formula", FIG4_FORMULA, fig4_file])
        code_s, out_s, _ = run_cli(
            ["monitor", "--formula", FIG4_FORMULA, "-"],
            stdin_text=FIG4_CSV)
        assert (code_f, out_f) == (code_s, out_s)

    def test_early_false_before_eof(self, tmp_path):
        p = tmp_path / "viol.csv"
        p.write_text("x\n" + "0\n" * 12)
        code, out, _ = run_cli(
            ["monitor", "--formula", "C[2,8]^4 (x > 1)", str(p)])
        events = [json.loads(line) for line in out.splitlines()]
        assert code == 1
        assert events[-1]["verdict"] is False
        assert len(events) < 12

    def test_malformed_row_names_line(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("x\n1\n2\noops\n")
        code, _, err = run_cli(
            ["monitor", "--formula", "G[0,10] (x > 0)", str(p)])
        assert code == 2
        assert "line 4" in err

    def test_empty_stream_is_unknown(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("x\n")
        code, out, _ = run_cli(
            ["monitor", "--formula", "G[0,2] (x > 0)", str(p)])
        assert code == 3
        assert out == ""

    def test_undecided_at_eof(self, tmp_path):
        p = tmp_path / "part.csv"
        p.write_text("x\n1\n1\n")
        code, out, _ = run_cli(
            ["monitor", "--formula", "G[0,5] (x > 0)", str(p)])
        assert code == 3
        events = [json.loads(line) for line in out.splitlines()]
        assert all(e["verdict"] is None for e in events)

    def test_trace_export(self, fig4_file, tmp_path):
        target = tmp_path / "nodes.csv"
        code, _, _ = run_cli(
            ["monitor", "--formula", FIG4_FORMULA, "--trace", str(target),
             fig4_file])
        assert code == 0
        rows = [line.split(",") for line in
                target.read_text().splitlines()]
        assert all(len(r) == 5 for r in rows)
        # final C-node snapshot carries the known worklist values
        last_i = rows[-1][2]
        cnode = [r for r in rows if r[0] == "1" and r[2] == last_i]
        assert [(r[1], r[3], r[4]) for r in cnode] == [
            ("0", "7", "7"), ("1", "8", "8"), ("2", "8", "10")]

    def test_fractional_step_inferred_before_first_event(self, tmp_path):
        # G[0,1] spans three samples at step 0.5; the monitor must not
        # lock in a unit step from the first timestamped row
        p = tmp_path / "half.csv"
        p.write_text("t,x\n0,1\n0.5,1\n1,1\n")
        code, out, _ = run_cli(
            ["monitor", "--formula", "G[0,1] (x > 0)", str(p)])
        events = [json.loads(line) for line in out.splitlines()]
        assert code == 0
        assert len(events) == 3
        assert events[-1]["decided"] is True

    def test_bounds_flag(self, tmp_path):
        p = tmp_path / "one.csv"
        p.write_text("x\n1\n")
        code, out, _ = run_cli(
            ["monitor", "--formula", "G[0,3] (x > 0)",
             "--bounds", "x=0.5:2", str(p)])
        events = [json.loads(line) for line in out.splitlines()]
        assert code == 0
        assert events[0]["verdict"] is True


class TestGen:
    def test_deterministic_output_and_honest_report(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["gen", "overvoltage", "--length", "500", "--seed", "11",
                "--over17", "4"]
        code1, rep1, _ = run_cli(args + ["--out", str(out1)])
        code2, rep2, _ = run_cli(args + ["--out", str(out2)])
        assert code1 == code2 == 0
        assert out1.read_text() == out2.read_text()
        r1 = json.loads(rep1)
        vals = [float(line) for line in
                out1.read_text().splitlines()[1:]]
        assert r1["v_ge_1.7"] == sum(1 for v in vals if v >= 1.7) == 4

    def test_gen_then_eval_round_trip(self, tmp_path):
        out = tmp_path / "ov.csv"
        code, rep, _ = run_cli(
            ["gen", "overvoltage", "--length", "60001", "--seed", "3",
             "--over17", "10", "--out", str(out)])
        assert code == 0
        assert json.loads(rep)["v_ge_1.7"] == 10
        # 10 excursions stay well under the 17-sample budget
        code, out_text, _ = run_cli(
            ["eval", "--formula", "C[0,60000]^59984 (v < 1.7)", str(out)])
        assert (code, out_text.strip()) == (0, "true")

    def test_infeasible_budget_exit_two(self, tmp_path):
        code, _, err = run_cli(
            ["gen", "overvoltage", "--length", "10", "--over17", "40",
             "--out", str(tmp_path / "x.csv")])
        assert code == 2 and "error" in err


class TestBench:
    def test_reports_ratio_and_agreement(self):
        code, out, _ = run_cli(
            ["bench", "--n", "4000", "--w", "64", "--cases", "3",
             "--backend", "python"])
        assert code == 0
        reports = [json.loads(line) for line in out.splitlines()]
        kth = next(r for r in reports if r["engine"] == "sliding_kth")
        assert kth["agree"] is True
        assert kth["speedup"] > 0
        mon = next(r for r in reports if r["engine"] == "monitor")
        assert mon["mismatches"] == 0

    def test_tiny_trace_no_assertion(self):
        code, out, _ = run_cli(
            ["bench", "--n", "32", "--w", "32", "--cases", "0",
             "--backend", "python"])
        assert code == 0
        assert json.loads(out.splitlines()[0])["agree"] is True


def test_console_script_is_installed():
    proc = subprocess.run(["ctstl", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0
    assert "monitor" in proc.stdout

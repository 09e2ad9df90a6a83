from __future__ import annotations

import io
import json

import pytest

from brocard.cli_reporting import (
    ReportIntegrityError,
    ReportLine,
    ReportWriter,
    dispatch,
    emit_report,
    render_line,
)

# ---------------------------------------------------------------------------
# report lines


def test_render_line_key_order_and_compactness():
    assert render_line(ReportLine(kind="solution", n=4, m=5)) == \
        '{"kind":"solution","n":4,"m":5}'
    assert render_line(ReportLine(kind="survivor", n=9)) == '{"kind":"survivor","n":9}'
    counters = {"scanned": 99, "rejected": 96, "survivors": 3, "solutions": 3,
                "unresolved": 0}
    assert render_line(ReportLine(kind="summary", counters=counters)) == \
        '{"kind":"summary","counters":{"scanned":99,"rejected":96,"survivors":3,' \
        '"solutions":3,"unresolved":0}}'
    assert render_line(ReportLine(kind="rejected", n=6, rejecting_prime=11)) == \
        '{"kind":"rejected","n":6,"rejecting_prime":11}'


def test_emit_report_verifies_solution_lines():
    good = io.StringIO()
    emit_report([ReportLine(kind="solution", n=7, m=71)], good)
    assert good.getvalue() == '{"kind":"solution","n":7,"m":71}\n'
    with pytest.raises(ReportIntegrityError):
        emit_report([ReportLine(kind="solution", n=7, m=70)], io.StringIO())
    with pytest.raises(ReportIntegrityError):
        emit_report([ReportLine(kind="solution", n=7)], io.StringIO())
    with pytest.raises(ReportIntegrityError):
        emit_report([ReportLine(kind="solution", n=10**9, m=3)], io.StringIO())


def test_emit_report_to_path(tmp_path):
    path = str(tmp_path / "out.jsonl")
    emit_report([ReportLine(kind="survivor", n=12)], path)
    assert (tmp_path / "out.jsonl").read_text() == '{"kind":"survivor","n":12}\n'


def test_writer_counts_and_summary(tmp_path):
    path = str(tmp_path / "out.jsonl")
    writer = ReportWriter.open(path)
    writer.emit_event("solution", 4, 5)
    writer.emit_event("survivor", 9)
    writer.emit_event("unresolved", 50)
    writer.write_summary(scanned=99)
    writer.close()
    lines = (tmp_path / "out.jsonl").read_text().splitlines()
    summary = json.loads(lines[-1])
    assert summary["counters"] == {
        "scanned": 99, "rejected": 96, "survivors": 3, "solutions": 1,
        "unresolved": 1,
    }


def test_writer_append_seeds_counters(tmp_path):
    path = str(tmp_path / "out.jsonl")
    writer = ReportWriter.open(path)
    writer.emit_event("solution", 4, 5)
    writer.close()
    writer = ReportWriter.open(path, append=True)
    writer.emit_event("solution", 5, 11)
    writer.write_summary(scanned=10)
    writer.close()
    lines = (tmp_path / "out.jsonl").read_text().splitlines()
    assert len(lines) == 3
    assert json.loads(lines[-1])["counters"]["solutions"] == 2


# ---------------------------------------------------------------------------
# CLI dispatch


def test_search_cli_end_to_end(tmp_path, capsys):
    report = tmp_path / "scan.jsonl"
    code = dispatch(["search", "--max-n", "100", "--report", str(report)])
    assert code == 0
    lines = [json.loads(raw) for raw in report.read_text().splitlines()]
    assert lines[:3] == [
        {"kind": "solution", "n": 4, "m": 5},
        {"kind": "solution", "n": 5, "m": 11},
        {"kind": "solution", "n": 7, "m": 71},
    ]
    assert lines[3]["counters"]["scanned"] == 99
    assert "scan 2..100 done" in capsys.readouterr().err


def test_search_cli_writes_report_to_stdout(capsys):
    assert dispatch(["search", "--max-n", "10"]) == 0
    out = capsys.readouterr().out
    kinds = [json.loads(raw)["kind"] for raw in out.splitlines()]
    assert kinds == ["solution", "solution", "solution", "summary"]


def test_verify_cli(capsys):
    assert dispatch(["verify", "7"]) == 0
    out = capsys.readouterr().out
    assert "k: 70" in out
    assert "is_solution: true" in out
    assert "m: 71" in out
    assert dispatch(["verify", "6", "--factor-structure"]) == 0
    out = capsys.readouterr().out
    assert "is_solution: false" in out
    assert "undefined" in out
    assert dispatch(["verify", "7", "--factor-structure"]) == 0
    out = capsys.readouterr().out
    assert "half_even: 70 = 2 * 35" in out
    assert "half_pow: 72 = 2^3 * 9" in out


def test_epsilon_cli(capsys):
    assert dispatch(["epsilon", "7", "--digits", "10"]) == 0
    assert "epsilon: 0.9929573971" in capsys.readouterr().out
    assert dispatch(["epsilon", "7", "--nine-run"]) == 0
    out = capsys.readouterr().out
    assert "nine_run: 2" in out
    assert "nine_run_exact: true" in out


def test_table_cli_flags_misquoted_rows(capsys):
    assert dispatch(["table", "--from", "1", "--to", "11", "--digits", "9"]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    row8 = next(l for l in lines if l.lstrip().startswith("8 "))
    row11 = next(l for l in lines if l.lstrip().startswith("11 "))
    assert "misquoted as 26" in row8 and " 200" in row8
    assert "misquoted as 6371" in row11 and " 6317" in row11
    for n in (4, 5, 7):
        row = next(l for l in lines if l.lstrip().startswith(f"{n} "))
        assert "yes" in row


def test_polysys_cli(capsys):
    assert dispatch(["polysys", "--ymin", "-4", "--ymax", "-3"]) == 0
    assert capsys.readouterr().out.splitlines() == ["x=8 y=-4", "x=3 y=-3"]
    assert dispatch(["polysys", "--ymin", "0", "--ymax", "100", "--factorials"]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "x=24 y=4 n=4 m=5", "x=120 y=10 n=5 m=11", "x=5040 y=70 n=7 m=71",
    ]


# ---------------------------------------------------------------------------
# exit codes


def test_usage_errors_exit_1(capsys):
    assert dispatch([]) == 1
    assert dispatch(["search"]) == 1  # --max-n required
    assert dispatch(["search", "--max-n", "nope"]) == 1
    assert dispatch(["verify", "-3"]) == 1
    assert dispatch(["epsilon", "7", "--digits", "0"]) == 1
    assert dispatch(["nonsense"]) == 1
    err = capsys.readouterr().err
    assert "usage:" in err


def test_usage_error_resume_without_checkpoint(capsys):
    assert dispatch(["search", "--max-n", "10", "--resume"]) == 1
    assert "--resume requires --checkpoint" in capsys.readouterr().err


def test_semantic_usage_errors(capsys):
    assert dispatch(["table", "--from", "5", "--to", "2"]) == 1
    assert dispatch(["polysys", "--ymin", "2", "--ymax", "1"]) == 1
    capsys.readouterr()


def test_help_exits_0(capsys):
    assert dispatch(["--help"]) == 0
    assert "search" in capsys.readouterr().out
    assert dispatch(["search", "--help"]) == 0
    capsys.readouterr()


def test_resource_errors_exit_2(tmp_path, capsys, monkeypatch):
    # unwritable report path
    assert dispatch(["search", "--max-n", "10",
                     "--report", str(tmp_path / "no" / "dir.jsonl")]) == 2
    # bit budget exhaustion surfaces as a limit error
    monkeypatch.setenv("BROCARD_BIT_BUDGET", "50")
    assert dispatch(["epsilon", "9", "--digits", "100"]) == 2
    capsys.readouterr()


def test_checkpoint_mismatch_exits_3(tmp_path, capsys):
    from brocard.factorial_engine import build_prime_pool, initial_state
    from brocard.search_engine import save_checkpoint

    ck = str(tmp_path / "scan.ck")
    pool = build_prime_pool(100, 4)
    save_checkpoint(initial_state(pool), pool, ck)
    # same checkpoint, different pool size: mismatch
    assert dispatch(["search", "--max-n", "100", "--primes", "5",
                     "--checkpoint", ck, "--resume",
                     "--report", str(tmp_path / "b.jsonl")]) == 3
    # different scan ceiling: also a mismatch
    assert dispatch(["search", "--max-n", "200", "--primes", "4",
                     "--checkpoint", ck, "--resume",
                     "--report", str(tmp_path / "c.jsonl")]) == 3
    assert "checkpoint" in capsys.readouterr().err


def test_missing_checkpoint_resume_exits_2(tmp_path, capsys):
    assert dispatch(["search", "--max-n", "10", "--checkpoint",
                     str(tmp_path / "none.ck"), "--resume",
                     "--report", str(tmp_path / "r.jsonl")]) == 2
    capsys.readouterr()

"""The thin-client command line: formatting, exit codes, service plumbing."""

import json

import pytest

from procnet.bench import reports_from_csv
from procnet.cli import main


def test_run_table_output(capsys):
    code = main(["run", "--designs", "d1,d5", "--dims", "2,2,2"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.splitlines()[0].startswith("design")
    assert "d1" in out and "d5" in out and "yes" in out


def test_run_json_is_byte_stable(capsys):
    argv = ["run", "--designs", "d3", "--dims", "2,2,3", "--format", "json"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    (report,) = json.loads(first)
    assert report["design"] == "d3" and report["dims"] == [2, 2, 3]
    assert report["verified"] is True


def test_run_csv_round_trips(capsys):
    assert main(["run", "--designs", "d2,d4", "--dims", "2,2,2",
                 "--format", "csv"]) == 0
    reports = reports_from_csv(capsys.readouterr().out)
    assert [r.design for r in reports] == ["d2", "d4"]
    assert all(r.verified for r in reports)


def test_run_uses_default_dims(capsys):
    assert main(["run", "--designs", "d5", "--format", "json"]) == 0
    (report,) = json.loads(capsys.readouterr().out)
    assert report["dims"] == [3, 3, 3]


def test_compare_orders_by_throughput(capsys):
    assert main(["compare", "--designs", "d2,d3,d5", "--dims", "3,3,8",
                 "--format", "json"]) == 0
    reports = json.loads(capsys.readouterr().out)
    thr = [r["throughput_items_per_cycle"] for r in reports]
    assert thr == sorted(thr, reverse=True)


def test_sweep_k_defaults_cover_the_pipelined_designs(capsys):
    assert main(["sweep-k", "--dims", "2,2,4", "--format", "json"]) == 0
    series = json.loads(capsys.readouterr().out)
    assert [s["design"] for s in series] == ["d3", "d4", "d5"]
    assert all(s["affine"] and s["ks"] == [1, 4] for s in series)


def test_sweep_k_table_shows_the_fit(capsys):
    assert main(["sweep-k", "--designs", "d3", "--dims", "2,2,4"]) == 0
    out = capsys.readouterr().out
    assert "cycles ~" in out and "affine" in out


def test_budget_blowup_exits_2(capsys):
    code = main(["run", "--designs", "d2", "--dims", "2,2,2",
                 "--max-cycles", "1"])
    out = capsys.readouterr().out
    assert code == 2
    assert "cycle-budget:" in out and "NO" in out


@pytest.mark.parametrize("argv,needle", [
    (["run", "--designs", "d9", "--dims", "2,2,2"], "unknown design"),
    (["run", "--dims", "1,2"], "expected n,m,k"),
    (["run", "--dims", "0,3,3"], ">= 1"),
    (["run", "--bogus"], "unrecognized"),
    (["compare", "--designs", "d1", "--dims", "2,2,2"], "at least two"),
    (["sweep-k", "--designs", "d1", "--dims", "3,3,4"], "not a pipelined"),
    ([], "command"),
])
def test_usage_problems_exit_3(capsys, argv, needle):
    assert main(argv) == 3
    assert needle in capsys.readouterr().err


def test_unreachable_service_exits_2(capsys):
    code = main(["run", "--designs", "d1", "--dims", "1,1,1",
                 "--url", "http://127.0.0.1:9"])
    assert code == 2
    assert "cannot reach" in capsys.readouterr().err

import csv
import copy
import subprocess
import sys

import pytest
import yaml

from scarcechain import reports
from scarcechain.cli import main
from scarcechain.config import load_scenario


def header(path):
    with open(path, newline="") as fh:
        return tuple(next(csv.reader(fh)))


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    out = tmp_path_factory.mktemp("solve")
    code = main(["solve", "example_1_1", "--out", str(out), "--trace-every", "200"])
    return code, out


def test_solve_writes_reports(solved):
    code, out = solved
    assert code == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "diagnostics.txt", "equilibrium.csv", "prices.csv", "trace.csv", "welfare.csv"]


def test_report_headers_are_pinned(solved):
    _, out = solved
    assert header(out / "equilibrium.csv") == reports.EQUILIBRIUM_HEADER
    assert header(out / "prices.csv") == reports.PRICES_HEADER
    assert header(out / "welfare.csv") == reports.WELFARE_HEADER
    assert header(out / "trace.csv") == reports.TRACE_HEADER
    assert reports.EQUILIBRIUM_HEADER == (
        "variable", "block", "from", "to", "mode", "bracket", "value", "value_2dp")


def test_csv_format(solved):
    _, out = solved
    raw = (out / "equilibrium.csv").read_bytes()
    assert b"\r" not in raw
    first = rows(out / "equilibrium.csv")[0]
    assert first["variable"] == "q0[1,1,1,1]" and first["from"] == "owner(1,1)"
    assert first["value_2dp"] == "8.88"
    assert len(first["value"].replace(".", "").lstrip("0")) >= 15
    demand = {r["variable"]: r for r in rows(out / "equilibrium.csv") if r["block"] == "d"}
    assert demand["d[1,1]"]["value_2dp"] == "15.99"


def test_diagnostics_text(solved):
    _, out = solved
    text = (out / "diagnostics.txt").read_text()
    assert "status: converged" in text and "monotonicity: monotone" in text
    assert "severed_links: none" in text


def test_not_converged_exit_code(tmp_path):
    assert main(["solve", "example_1_1", "--max-iters", "5", "--out", str(tmp_path)]) == 1


def test_invalid_config_exit_code(tmp_path, capsys):
    raw = copy.deepcopy(load_scenario("example_1_1").raw)
    raw["markets"]["j=1,k=1"] = {"intercept": 300, "slope": 2.0}
    p = tmp_path / "bad.yaml"
    p.write_text(yaml.safe_dump(raw))
    assert main(["validate", str(p)]) == 2
    assert "markets[1][1]" in capsys.readouterr().err
    assert main(["validate", "example_1_1"]) == 0


def test_sweep_rows_keep_grid_order(tmp_path):
    code = main(["sweep", "example_1_2", "--target", "capacity.i=1", "--grid", "70,10,40",
                 "--jobs", "2", "--out", str(tmp_path)])
    assert code == 0
    got = rows(tmp_path / "sweep.csv")
    assert header(tmp_path / "sweep.csv") == reports.SWEEP_HEADER
    assert [r["value"] for r in got] == ["70", "10", "40"]
    assert [r["point"] for r in got] == ["0", "1", "2"]


def test_sweep_zero_point_matches_baseline(tmp_path):
    main(["sweep", "example_1_1", "--target", "policies.owner.i=1.base_rate", "--grid", "0",
          "--baseline", "example_1_1", "--out", str(tmp_path / "s")])
    main(["solve", "example_1_1", "--out", str(tmp_path / "b")])
    row = rows(tmp_path / "s" / "sweep.csv")[0]
    sw = next(r for r in rows(tmp_path / "b" / "welfare.csv") if r["category"] == "sw")
    assert row["sw"] == sw["value"]
    assert float(row["delta_sw"]) == 0.0 and row["benefit_cost"] == ""


def test_sweep_failures_recorded_in_row(tmp_path):
    code = main(["sweep", "example_1_2", "--target", "capacity.i=1", "--grid=-5,60",
                 "--out", str(tmp_path)])
    got = rows(tmp_path / "sweep.csv")
    assert got[0]["status"] == "error" and "capacity" in got[0]["error"]
    assert got[1]["status"] == "converged"
    assert code == 1


def test_compare_identical_configs(tmp_path):
    assert main(["compare", "example_1_1", "example_1_1", "--out", str(tmp_path)]) == 0
    for r in rows(tmp_path / "compare.csv"):
        if r["delta"]:
            assert float(r["delta"]) == 0.0
    assert header(tmp_path / "compare.csv") == reports.COMPARE_HEADER


def test_compare_incentive_recipients(tmp_path):
    """Paying the glove makers rather than the rubber owners lowers latex prices more."""
    raw = copy.deepcopy(load_scenario("example_1_3").raw)
    raw["policies"]["owner"]["i=1"]["base_rate"] = 0.0
    raw["policies"]["producer"]["j=1"]["base_rate"] = 10.0
    p = tmp_path / "producer.yaml"
    p.write_text(yaml.safe_dump(raw))
    main(["solve", "example_1_3", "--out", str(tmp_path / "own")])
    main(["solve", str(p), "--out", str(tmp_path / "prod")])
    price = lambda d: {r["link"]: float(r["value"]) for r in rows(d / "prices.csv") if r["price"] == "p3"}  # noqa: E731
    own, prod = price(tmp_path / "own"), price(tmp_path / "prod")
    base = tmp_path / "base"
    main(["solve", "example_1_1", "--out", str(base)])
    ref = price(base)
    for link in ("d[1,1]", "d[1,2]"):
        assert prod[link] < own[link] < ref[link]
    # the substitute moves the other way
    assert prod["d[2,1]"] > ref["d[2,1]"]


def test_diagnose(capsys):
    assert main(["diagnose", "example_2_benchmark"]) == 0
    out = capsys.readouterr().out
    assert "variables: 99" in out and "suggested_phi" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "scarcechain", "list"], capture_output=True,
                         text=True, check=True)
    assert res.stdout.split() == list(__import__("scarcechain.config").config.BUNDLED)

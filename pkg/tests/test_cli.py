"""End-to-end CLI runs against the shipped scenario files."""

from __future__ import annotations

import csv
from dataclasses import replace

import pytest

from spectariff import evaluate, read_meter_csv, write_curve_csv
from spectariff.cli import main
import spectariff.settlement as settlement

from helpers import SCENARIO_DIR, trig


def _scn(name):
    return str(SCENARIO_DIR / f"{name}.scn")


def _read_total(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader(fh) if r["kind"] == "total"]
    assert len(rows) == 1
    return float(rows[0]["charge"])


class TestSettle:
    def test_table1_writes_expected_file_set(self, tmp_path):
        assert main(["settle", "--scenario", _scn("table1"), "--out", str(tmp_path)]) == 0
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == [
            "audit.txt",
            "bill_load1__retail1.csv",
            "bill_load1__retail2.csv",
            "bill_load2__retail1.csv",
            "bill_load2__retail2.csv",
            "income_retail1__load1.csv",
            "income_retail1__load2.csv",
            "income_retail2__load1.csv",
            "income_retail2__load2.csv",
        ]
        assert _read_total(tmp_path / "bill_load1__retail1.csv") == pytest.approx(
            1769.0308998699195, rel=1e-12
        )
        assert _read_total(tmp_path / "bill_load2__retail2.csv") == pytest.approx(
            2340.3089986991945, rel=1e-12
        )
        assert (tmp_path / "audit.txt").read_text().startswith("audit: PASS")

    def test_table3_includes_equivalent_prices(self, tmp_path):
        assert main(["settle", "--scenario", _scn("table3"), "--out", str(tmp_path)]) == 0
        eq = tmp_path / "equivalent_prices.csv"
        assert eq.exists()
        with eq.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        by_n = {r["n"]: r for r in rows}
        assert float(by_n["0"]["alpha"]) == pytest.approx(265.0 / 24.0, rel=1e-12)
        assert float(by_n["20"]["alpha"]) == 19.0
        assert float(by_n["20"]["beta"]) == -25.0

    def test_output_is_byte_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["settle", "--scenario", _scn("table3"), "--out", str(out)]) == 0
        for path in sorted(a.iterdir()):
            assert path.read_bytes() == (b / path.name).read_bytes(), path.name

    def test_table_format(self, tmp_path):
        rc = main(
            ["settle", "--scenario", _scn("table2"), "--out", str(tmp_path), "--format", "table"]
        )
        assert rc == 0
        bill = tmp_path / "bill_load3__gen.txt"
        assert bill.exists()
        text = bill.read_text()
        assert "load3" in text and "total" in text

    def test_order_override_full_run(self, tmp_path):
        rc = main(
            ["settle", "--scenario", _scn("table1"), "--out", str(tmp_path), "--order", "100"]
        )
        assert rc == 0
        # n=100 terms survive at order 100, so the totals are unchanged
        assert _read_total(tmp_path / "bill_load1__retail1.csv") == pytest.approx(
            1769.0308998699195, rel=1e-12
        )

    def test_figures_written(self, tmp_path):
        rc = main(
            ["settle", "--scenario", _scn("table2"), "--out", str(tmp_path), "--figures"]
        )
        assert rc == 0
        for name in ("curves.png", "spectra.png", "plans.png", "bills.png"):
            png = tmp_path / name
            assert png.exists() and png.stat().st_size > 0, name

    def test_audit_failure_exits_5_but_still_writes(self, tmp_path, monkeypatch):
        real = settlement.audit_conservation

        def always_fail(*args, **kwargs):
            return replace(real(*args, **kwargs), passed=False)

        monkeypatch.setattr(settlement, "audit_conservation", always_fail)
        rc = main(["settle", "--scenario", _scn("table3"), "--out", str(tmp_path)])
        assert rc == 5
        assert (tmp_path / "audit.txt").exists()

    def test_missing_scenario(self, tmp_path):
        rc = main(["settle", "--scenario", str(tmp_path / "no.scn"), "--out", str(tmp_path)])
        assert rc == 2

    def test_imbalanced_scenario(self, tmp_path):
        bad = tmp_path / "bad.scn"
        bad.write_text(
            "interval: {t1: 0.0, t2: 1.0}\n"
            "topology: one-multi\n"
            "plans:\n"
            "  - name: p\n"
            "    alpha: [{f_lo: 0, form: constant, c: 20}]\n"
            "sources:\n"
            "  - {id: g, plan: p, mean: 1.0}\n"
            "subscribers:\n"
            "  - {id: a, mean: 5.0}\n"
            "  - {id: b, mean: 7.0}\n"
        )
        rc = main(["settle", "--scenario", str(bad), "--out", str(tmp_path / "out")])
        assert rc == 4


class TestDecompose:
    def test_scenario_curve_rows(self, tmp_path):
        out = tmp_path / "spec.csv"
        rc = main(
            ["decompose", "--scenario", _scn("table1"), "--id", "load1", "--out", str(out)]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n,a_n,b_n"
        assert lines[1] == "0,100.0,0.0"
        assert lines[2] == "5,0.0,20.0"
        assert lines[3] == "20,10.0,0.0"
        assert lines[4] == "100,0.0,5.0"
        assert len(lines) == 5

    def test_meter_file(self, tmp_path):
        curve = trig(12.0, (3, 2.0, -1.0), (7, 0.0, 4.0))
        meter = tmp_path / "meter.csv"
        write_curve_csv(curve, 257, meter)
        out = tmp_path / "spec.csv"
        rc = main(["decompose", "--meter", str(meter), "--order", "16", "--out", str(out)])
        assert rc == 0
        rows = {r[0]: (float(r[1]), float(r[2])) for r in csv.reader(out.open())if r[0] != "n"}
        assert rows["0"][0] == pytest.approx(24.0, abs=1e-9)
        assert rows["3"] == (pytest.approx(2.0, abs=1e-9), pytest.approx(-1.0, abs=1e-9))
        assert rows["7"] == (pytest.approx(0.0, abs=1e-9), pytest.approx(4.0, abs=1e-9))

    def test_meter_and_scenario_conflict(self, tmp_path):
        rc = main(
            [
                "decompose",
                "--scenario",
                _scn("table1"),
                "--id",
                "load1",
                "--meter",
                "x.csv",
                "--out",
                str(tmp_path / "s.csv"),
            ]
        )
        assert rc == 2

    def test_scenario_without_id(self, tmp_path):
        rc = main(["decompose", "--scenario", _scn("table1"), "--out", str(tmp_path / "s.csv")])
        assert rc == 2

    def test_unknown_id(self, tmp_path):
        rc = main(
            ["decompose", "--scenario", _scn("table1"), "--id", "ghost", "--out", str(tmp_path / "s.csv")]
        )
        assert rc == 2

    def test_aliasing_bound_exit(self, tmp_path):
        meter = tmp_path / "short.csv"
        write_curve_csv(trig(1.0, (3, 1.0, 0.0)), 21, meter)
        rc = main(["decompose", "--meter", str(meter), "--order", "10", "--out", str(tmp_path / "s.csv")])
        assert rc == 3


class TestPlotData:
    def test_rows_and_round_trip(self, tmp_path):
        out = tmp_path / "trace.csv"
        rc = main(
            [
                "plot-data",
                "--scenario",
                _scn("table1"),
                "--id",
                "load1",
                "--samples",
                "129",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,p"
        assert len(lines) == 130
        back = read_meter_csv(out)
        assert back.count == 129
        assert evaluate(back, 0.5) == pytest.approx(
            evaluate(trig(50.0, (5, 0.0, 20.0), (20, 10.0, 0.0), (100, 0.0, 5.0)), 0.5),
            abs=1e-9,
        )

    def test_figure_rendered(self, tmp_path):
        out = tmp_path / "trace.csv"
        png = tmp_path / "trace.png"
        rc = main(
            [
                "plot-data",
                "--scenario",
                _scn("table2"),
                "--id",
                "gen",
                "--out",
                str(out),
                "--figure",
                str(png),
            ]
        )
        assert rc == 0
        assert png.exists() and png.stat().st_size > 0

    def test_too_few_samples(self, tmp_path):
        rc = main(
            [
                "plot-data",
                "--scenario",
                _scn("table1"),
                "--id",
                "load1",
                "--samples",
                "1",
                "--out",
                str(tmp_path / "t.csv"),
            ]
        )
        assert rc == 2


class TestParser:
    def test_no_command_is_a_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

"""Price ingestion, provenance-stamped output and the CLI pipelines."""

import datetime
import json
import math

import numpy as np
import pytest

import latticemarket as lm
from latticemarket import cli, io
from latticemarket.pipeline import PipelineConfig, analyze_price_table


def make_long_csv(path, markets=("ES", "TY", "CL"), days=900, seed=0):
    rng = np.random.default_rng(seed)
    start = datetime.date(2001, 1, 1).toordinal()
    lines = ["market,date,price"]
    for m_i, name in enumerate(markets):
        prices = 100.0 * np.exp(np.cumsum(
            rng.normal(0.0002, 0.01, days)))
        for i in range(days):
            date = datetime.date.fromordinal(start + i)
            lines.append(f"{name},{date.isoformat()},{float(prices[i])!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestLoadPriceCsv:
    def test_two_row_file_single_return(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("market,date,price\n"
                        "ES,2020-01-01,100\nES,2020-01-02,110\n")
        table = io.load_price_csv(path)
        prices = table["ES"].prices
        assert len(prices) == 2
        assert math.log(prices[1] / prices[0]) == pytest.approx(
            math.log(1.1))

    def test_duplicate_date_named(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("market,date,price\n"
                        "ES,2020-01-01,100\nES,2020-01-01,101\n")
        with pytest.raises(ValueError, match="2020-01-01"):
            io.load_price_csv(path)

    def test_non_positive_price_line_number(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("market,date,price\n"
                        "ES,2020-01-01,100\nES,2020-01-02,-3\n")
        with pytest.raises(ValueError, match="line 3"):
            io.load_price_csv(path)

    def test_malformed_row_line_number(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("market,date,price\nES,2020-01-01\n")
        with pytest.raises(ValueError, match="line 2"):
            io.load_price_csv(path)

    def test_dates_must_increase(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("market,date,price\n"
                        "ES,2020-01-05,100\nES,2020-01-02,101\n")
        with pytest.raises(ValueError, match="not increasing"):
            io.load_price_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            io.load_price_csv(path)

    def test_wide_ragged_starts(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text(
            "date,A,B,C\n"
            "2020-01-01,100,,50\n"
            "2020-01-02,101,,51\n"
            "2020-01-03,102,200,52\n"
            "2020-01-06,103,202,\n")
        table = io.load_price_csv(path, schema="wide")
        assert len(table["A"]) == 4
        assert len(table["B"]) == 2
        assert len(table["C"]) == 3
        # the weekend gap is recorded, not rejected
        assert table["A"].gap_days == 2

    def test_wide_market_without_prices(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("date,A,B\n2020-01-01,100,\n")
        with pytest.raises(ValueError, match="'B'"):
            io.load_price_csv(path, schema="wide")


class TestProvenanceOutput:
    def test_csv_header_carries_provenance(self, tmp_path):
        path = tmp_path / "out.csv"
        prov = io.make_provenance(7, inputs={"x": "abc"})
        io.write_csv(path, ["a", "b"], [(1, 2.5)], prov)
        first = path.read_text().splitlines()[0]
        assert first.startswith("# provenance: ")
        payload = json.loads(first.split(": ", 1)[1])
        assert payload["seed"] == 7
        assert payload["version"] == lm.__version__

    def test_float_rendering_roundtrips(self, tmp_path):
        path = tmp_path / "out.csv"
        value = 0.1 + 0.2
        io.write_csv(path, ["v"], [(value,)], io.make_provenance(0))
        _, rows = io.read_csv_rows(path)
        assert float(rows[0][0]) == value

    def test_trend_export(self, tmp_path):
        rets = lm.normalize_raw_returns(
            np.random.default_rng(0).standard_normal(50))
        trend = lm.trend_strength(rets, lm.weight_step(4))
        io.write_trend_csv(trend, tmp_path / "trend.csv",
                           io.make_provenance(0))
        header, rows = io.read_csv_rows(tmp_path / "trend.csv")
        assert header == ["t", "phi"]
        assert len(rows) == 50
        descriptor = json.loads(
            (tmp_path / "trend.csv.json").read_text())
        assert descriptor["kind"] == "step"


class TestSimulateCommand:
    def test_outputs_and_price_identity(self, tmp_path):
        out = tmp_path / "run"
        code = cli.main([
            "simulate", "--side", "8", "--sweeps", "300", "--burn-in", "50",
            "--temperature", "0.4", "--seed", "5", "--out", str(out)])
        assert code == 0
        header, rows = io.read_csv_rows(out / "magnetization.csv")
        assert header == ["sweep", "M", "price"]
        n_sites = 64
        for row in rows[:20]:
            m, price = float(row[1]), float(row[2])
            assert price == pytest.approx(1.0 + 2.0 * m / n_sites)
        params = json.loads((out / "params.json").read_text())
        assert params["params"]["seed"] == 5
        assert (out / "returns.csv").exists()

    def test_rerun_is_byte_identical(self, tmp_path):
        args = ["simulate", "--side", "8", "--sweeps", "200",
                "--burn-in", "20", "--temperature", "0.35", "--seed", "9"]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert cli.main(args + ["--out", str(out_a)]) == 0
        assert cli.main(args + ["--out", str(out_b)]) == 0
        for name in ("magnetization.csv", "returns.csv", "params.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_invalid_sweeps_exit_code(self, tmp_path):
        code = cli.main(["simulate", "--sweeps", "0",
                         "--out", str(tmp_path)])
        assert code == 2


class TestPredictCommand:
    def test_kappa_one_zeroes_autocorrelation(self, tmp_path):
        out = tmp_path / "pred"
        code = cli.main(["predict", "--kappa", "1.0", "--tau", "32768",
                         "--out", str(out)])
        assert code == 0
        header, rows = io.read_csv_rows(out / "predictions.csv")
        col_ac = header.index("return_autocorrelation")
        col_tr = header.index("trend_return_correlation")
        assert len(rows) == 13
        for row in rows:
            assert float(row[col_ac]) == 0.0
            assert abs(float(row[col_tr])) < 1e-12

    def test_dimension_three_header_records_kappa(self, tmp_path):
        out = tmp_path / "pred3"
        assert cli.main(["predict", "--dimension", "3", "--out",
                         str(out)]) == 0
        first = (out / "predictions.csv").read_text().splitlines()[0]
        payload = json.loads(first.split(": ", 1)[1])
        assert payload["kappa"] == pytest.approx(0.970, abs=5e-4)
        params = json.loads((out / "params.json").read_text())
        assert params["kappa"] == pytest.approx(0.9703557312, abs=1e-9)

    def test_variances_decrease_with_horizon(self, tmp_path):
        out = tmp_path / "pred_dec"
        assert cli.main(["predict", "--kappa", "0.9", "--tau", "32768",
                         "--out", str(out)]) == 0
        header, rows = io.read_csv_rows(out / "predictions.csv")
        for col in ("variance_phi", "variance_tilde"):
            vals = [float(r[header.index(col)]) for r in rows]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_out_of_domain_horizons_dropped(self, tmp_path):
        out = tmp_path / "pred_drop"
        assert cli.main(["predict", "--kappa", "0.9", "--tau", "1024",
                         "--out", str(out)]) == 0
        _, rows = io.read_csv_rows(out / "predictions.csv")
        # scaling regime keeps T <= tau/4 = 256, i.e. k <= 8
        assert max(int(r[0]) for r in rows) == 8


class TestAnalyzeCommand:
    def test_full_pipeline_outputs(self, tmp_path):
        csv_path = make_long_csv(tmp_path / "prices.csv", days=900)
        out = tmp_path / "analysis"
        code = cli.main([
            "analyze", str(csv_path), "--out", str(out),
            "--horizons", "1,2,3,4", "--bootstrap-samples", "150",
            "--cv-folds", "5", "--seed", "3"])
        assert code == 0
        report = json.loads((out / "report.json").read_text())["report"]
        assert report["horizons_used"] == [1, 2, 3, 4]
        assert set(report["regression"]) >= {"a", "b", "c", "se_b",
                                             "r_squared_cv"}
        for name in ("coefficients_by_scale.csv", "variance_by_scale.csv",
                     "moments.csv", "coefficient_table.csv",
                     "trend_autocorrelation.csv"):
            assert (out / name).exists()
        # i.i.d. input: no significant coefficients
        reg = report["regression"]
        assert abs(reg["t_b"]) < 4.0 and abs(reg["t_c"]) < 4.0
        assert "kappa" in report and "dimension" in report

    def test_default_horizons_echoed(self, tmp_path):
        csv_path = make_long_csv(tmp_path / "prices.csv", days=600)
        config = PipelineConfig(bootstrap_samples=150, cv_folds=5)
        table = io.load_price_csv(csv_path)
        report = analyze_price_table(table, config)
        assert report["horizons_requested"] == list(range(1, 11))

    def test_oversized_horizon_dropped_with_warning(self, tmp_path, caplog):
        csv_path = make_long_csv(tmp_path / "prices.csv", days=500)
        out = tmp_path / "analysis"
        with caplog.at_level("WARNING", logger="latticemarket"):
            code = cli.main([
                "analyze", str(csv_path), "--out", str(out),
                "--horizons", "1,2,3,9", "--bootstrap-samples", "150",
                "--cv-folds", "5"])
        assert code == 0
        report = json.loads((out / "report.json").read_text())["report"]
        assert 9 not in report["horizons_used"]
        assert any("k=9" in rec.message for rec in caplog.records)

    def test_planted_cubic_signal_recovered(self, tmp_path):
        # returns generated with a known cubic dependence on their own
        # psi-trend must come back out of the full CSV -> report loop
        a_true, b_true, c_true, horizon = 0.0, 0.15, -0.05, 8.0
        rng = np.random.default_rng(0)
        decay = math.exp(-2.0 / horizon)
        m_t = math.sqrt(1.0 - math.exp(-4.0 / horizon))
        start = datetime.date(1990, 1, 1).toordinal()
        lines = ["market,date,price"]
        for m in range(4):
            acc = 0.0
            r = np.empty(4000)
            r[0] = rng.standard_normal()
            for t in range(3999):
                acc = decay * acc + r[t]
                phi = m_t * acc
                r[t + 1] = (a_true + b_true * phi + c_true * phi ** 3
                            + rng.standard_normal())
            prices = 100.0 * np.exp(np.cumsum(0.01 * r))
            for i in range(4000):
                date = datetime.date.fromordinal(start + i)
                lines.append(f"M{m},{date.isoformat()},{float(prices[i])!r}")
        csv_path = tmp_path / "synthetic.csv"
        csv_path.write_text("\n".join(lines) + "\n")
        out = tmp_path / "out"
        code = cli.main([
            "analyze", str(csv_path), "--out", str(out), "--horizons", "3",
            "--estimator", "psi", "--bootstrap-samples", "300",
            "--cv-folds", "5", "--seed", "1"])
        assert code == 0
        reg = json.loads((out / "report.json").read_text())["report"]["regression"]
        assert abs(reg["b"] - b_true) <= 3 * reg["se_b"]
        assert abs(reg["c"] - c_true) <= 3 * reg["se_c"]
        assert reg["t_b"] > 5.0 and reg["t_c"] < -5.0
        assert reg["r_squared_cv"] > 0.0

    def test_missing_file_exit_code(self, tmp_path):
        assert cli.main(["analyze", str(tmp_path / "nope.csv"),
                         "--out", str(tmp_path)]) == 2

    def test_rerun_byte_identical(self, tmp_path):
        csv_path = make_long_csv(tmp_path / "prices.csv", days=700,
                                 markets=("ES", "TY"))
        args = ["analyze", str(csv_path), "--horizons", "1,2,3",
                "--bootstrap-samples", "120", "--cv-folds", "5",
                "--seed", "11"]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert cli.main(args + ["--out", str(out_a)]) == 0
        assert cli.main(args + ["--out", str(out_b)]) == 0
        assert (out_a / "report.json").read_bytes() == \
            (out_b / "report.json").read_bytes()


class TestFitKappaCommand:
    def test_exact_power_law_input(self, tmp_path):
        rows = [(k, (2.0 ** k) ** (0.96 - 1.0)) for k in range(1, 11)]
        var_csv = tmp_path / "var.csv"
        io.write_csv(var_csv, ["k", "variance"], rows, io.make_provenance(0))
        out = tmp_path / "fit"
        assert cli.main(["fit-kappa", str(var_csv), "--out", str(out)]) == 0
        result = json.loads((out / "kappa_fit.json").read_text())
        assert result["kappa"] == pytest.approx(0.96, abs=1e-10)
        assert abs(result["dimension"] - 2.9) <= 0.1

    def test_synthetic_path_recovers_dimension(self, tmp_path):
        from latticemarket.theory import PropagatorModel
        model = PropagatorModel(tau=2 ** 12, kappa=0.9, regime="scaling")
        path = lm.gaussian_process_from_propagator(model, 2 ** 15, seed=21)
        rows = []
        for k in range(1, 9):
            horizon = 2 ** k
            diffs = path[horizon:] - path[:-horizon]
            rows.append((k, float(np.mean(diffs ** 2) / horizon)))
        var_csv = tmp_path / "var.csv"
        io.write_csv(var_csv, ["k", "variance"], rows, io.make_provenance(0))
        out = tmp_path / "fit"
        assert cli.main(["fit-kappa", str(var_csv), "--out", str(out)]) == 0
        result = json.loads((out / "kappa_fit.json").read_text())
        assert result["kappa"] == pytest.approx(0.9, abs=0.05)
        true_dim = lm.dimension_for_kappa(0.9)
        assert abs(result["dimension"] - true_dim) <= 0.15

    def test_missing_column_falls_back_to_position(self, tmp_path):
        var_csv = tmp_path / "var.csv"
        var_csv.write_text("k,variance_tilde\n1,0.97\n2,0.95\n3,0.92\n")
        out = tmp_path / "fit"
        assert cli.main(["fit-kappa", str(var_csv), "--out", str(out)]) == 0


class TestConfigPrecedence:
    def test_cli_overrides_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"side": 6, "sweeps": 120, "burn_in": 10,
                                   "temperature": 0.5}))
        out = tmp_path / "run"
        assert cli.main(["simulate", "--config", str(cfg), "--side", "4",
                         "--out", str(out)]) == 0
        params = json.loads((out / "params.json").read_text())
        assert params["params"]["side"] == 4          # CLI wins
        assert params["params"]["sweeps"] == 120      # file beats default

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sides": 6}))
        assert cli.main(["simulate", "--config", str(cfg),
                         "--out", str(tmp_path)]) == 2

    def test_help_lists_protocol_defaults(self):
        parser = cli.build_parser()
        sub = parser._subparsers._group_actions[0].choices
        assert "5000" in sub["analyze"].format_help()
        assert "15" in sub["analyze"].format_help()

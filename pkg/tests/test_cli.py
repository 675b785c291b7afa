import datetime
import json
import math
import pathlib

import jsonschema
import numpy as np
import pytest
from numpy.testing import assert_allclose

from fpsum.cli import main
from fpsum.distributions import NmlLaw, RngStream

SCHEMA_PATH = (
    pathlib.Path(__file__).parents[1]
    / "src"
    / "fpsum"
    / "schemas"
    / "fpsum_output.schema.json"
)
SCHEMA = json.loads(SCHEMA_PATH.read_text())


def run_json(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    assert code == 0, f"command failed: {argv}"
    payload = json.loads(out.read_text())
    jsonschema.validate(payload, SCHEMA)
    return payload


def write_prices(tmp_path, prices, name="prices.csv"):
    path = tmp_path / name
    start = datetime.date(2020, 1, 1)
    rows = ["date,close"] + [
        f"{(start + datetime.timedelta(days=i)).isoformat()},{p}"
        for i, p in enumerate(prices)
    ]
    path.write_text("\n".join(rows) + "\n")
    return path


class TestReturns:
    def test_flat_prices_zero_return(self, tmp_path):
        path = write_prices(tmp_path, [100, 100])
        payload = run_json(["returns", str(path)], tmp_path)
        assert payload["values"] == [0.0]

    def test_log_return_definition(self, tmp_path):
        path = write_prices(tmp_path, [100, 110])
        payload = run_json(["returns", str(path)], tmp_path)
        assert_allclose(payload["values"][0], math.log(1.1), rtol=1e-12)

    def test_length_contract(self, tmp_path):
        rng = np.random.default_rng(0)
        prices = np.exp(np.cumsum(rng.normal(0, 0.01, 2227))) * 100
        path = write_prices(tmp_path, prices)
        payload = run_json(["returns", str(path)], tmp_path)
        assert len(payload["values"]) == 2226
        assert len(payload["dates"]) == 2226

    def test_nonpositive_price_reports_line(self, tmp_path, capsys):
        path = write_prices(tmp_path, [100, -3, 100])
        assert main(["returns", str(path)]) == 4
        assert "line 3" in capsys.readouterr().err

    def test_unparseable_row_reports_line(self, tmp_path, capsys):
        path = tmp_path / "prices.csv"
        path.write_text("date,close\n2020-01-01,100\n2020-01-02,oops\n")
        assert main(["returns", str(path)]) == 4
        assert "line 3" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert main(["returns", "/nonexistent.csv"]) == 4

    def test_csv_roundtrip(self, tmp_path):
        path = write_prices(tmp_path, [100, 105, 95])
        out = tmp_path / "returns.csv"
        assert main(["returns", str(path), "--format", "csv", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "date,log_return"
        assert len(lines) == 3


class TestGrids:
    def test_density_normal_grid(self, tmp_path):
        payload = run_json(
            ["density", "--dist", "nml", "--kappa", "1", "--grid", "-4:4:0.01"],
            tmp_path,
        )
        x = np.array(payload["x"])
        f = np.array(payload["density"])
        ref = np.exp(-x * x / 2.0) / np.sqrt(2 * np.pi)
        assert np.max(np.abs(f - ref)) <= 1e-8

    def test_pmf_poisson_case(self, tmp_path):
        payload = run_json(
            ["pmf", "--dist", "fp", "--nu", "2", "--kappa", "1", "--max", "10"],
            tmp_path,
        )
        from scipy.special import gammaln

        n = np.array(payload["n"], dtype=float)
        ref = np.exp(n * np.log(2.0) - 2.0 - gammaln(n + 1.0))
        assert_allclose(payload["pmf"], ref, rtol=1e-12)

    def test_ml_eval_grid(self, tmp_path):
        payload = run_json(
            ["ml-eval", "--kappa", "1", "--grid", "-2:0:0.5"], tmp_path
        )
        assert_allclose(payload["value"], np.exp(payload["z"]), rtol=1e-12)

    def test_comp_pmf(self, tmp_path):
        payload = run_json(
            ["pmf", "--dist", "comp", "--lam", "3", "--eta", "1", "--max", "8"],
            tmp_path,
        )
        from scipy.special import gammaln

        n = np.array(payload["n"], dtype=float)
        ref = np.exp(n * np.log(3.0) - 3.0 - gammaln(n + 1.0))
        assert_allclose(payload["pmf"], ref, rtol=1e-10)


class TestSample:
    def test_determinism_byte_identical(self, tmp_path):
        argv = ["sample", "--dist", "nml", "--kappa", "0.5", "--n", "200", "--seed", "7"]
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_sample_kurtosis(self, tmp_path):
        payload = run_json(
            [
                "sample", "--dist", "nml", "--kappa", "0.5",
                "--n", "1000000", "--seed", "7",
            ],
            tmp_path,
        )
        values = np.array(payload["values"])
        centered = values - values.mean()
        kurt = np.mean(centered**4) / centered.var() ** 2 - 3.0
        assert abs(kurt - 1.7124) <= 0.05

    def test_fp_and_comp_and_ml(self, tmp_path):
        for argv in (
            ["sample", "--dist", "fp", "--nu", "2", "--kappa", "0.7", "--n", "50", "--seed", "1"],
            ["sample", "--dist", "comp", "--lam", "2", "--eta", "1.5", "--n", "50", "--seed", "1"],
            ["sample", "--dist", "ml", "--kappa", "0.4", "--n", "50", "--seed", "1"],
        ):
            payload = run_json(argv, tmp_path)
            assert len(payload["values"]) == 50


class TestFit:
    def test_demo_fit_recovers_parameters(self, tmp_path):
        payload = run_json(["fit", "--demo"], tmp_path)
        nml = next(m for m in payload["models"] if m["model"] == "nml")
        # generating values, with bands at one table-RMSE for n ~ 2000
        sigma = math.sqrt(0.00018)
        assert abs(nml["estimates"]["kappa"] - 0.49123) <= 0.115
        assert abs(nml["estimates"]["mu"] - 0.00021) <= 0.024 * sigma
        assert abs(nml["estimates"]["sigma2"] - 0.00018) <= 0.045 * 0.00018 / 1.0
        assert payload["n"] == 2226

    def test_demo_contains_all_models(self, tmp_path):
        payload = run_json(["fit", "--demo"], tmp_path)
        models = {m["model"] for m in payload["models"]}
        assert models == {"nml", "normal", "laplace"}
        laplace = next(m for m in payload["models"] if m["model"] == "laplace")
        assert laplace["fitted_cumulants"]["excess_kurtosis"] == 3.0
        assert_allclose(
            laplace["fitted_cumulants"]["variance"],
            2.0 * laplace["estimates"]["sigma2"],
            rtol=1e-12,
        )
        normal = next(m for m in payload["models"] if m["model"] == "normal")
        assert normal["fitted_cumulants"]["excess_kurtosis"] == 0.0

    def test_synthetic_large_sample_recovery(self, tmp_path):
        values = NmlLaw(0.0002, 0.0002, 0.5).sample(RngStream(1234), 100_000)
        start = datetime.date(2000, 1, 1)
        rows = ["date,log_return"] + [
            f"{(start + datetime.timedelta(days=i)).isoformat()},{float(v)!r}"
            for i, v in enumerate(values)
        ]
        path = tmp_path / "returns.csv"
        path.write_text("\n".join(rows) + "\n")
        payload = run_json(["fit", str(path), "--models", "nml"], tmp_path)
        nml = payload["models"][0]
        assert abs(nml["estimates"]["kappa"] - 0.5) <= 0.05

    def test_constant_series_is_numeric_failure(self, tmp_path, capsys):
        path = write_prices(tmp_path, [100] * 30)
        out = tmp_path / "r.csv"
        assert main(["returns", str(path), "--format", "csv", "--out", str(out)]) == 0
        assert main(["fit", str(out)]) == 3

    def test_too_short_series(self, tmp_path):
        path = write_prices(tmp_path, [100, 101, 102])
        assert main(["fit", str(path)]) == 4

    def test_fit_accepts_prices_csv(self, tmp_path):
        rng = np.random.default_rng(3)
        prices = np.exp(np.cumsum(rng.normal(0, 0.01, 400))) * 50
        path = write_prices(tmp_path, prices)
        payload = run_json(["fit", str(path)], tmp_path)
        assert payload["n"] == 399

    def test_text_table_on_stdout(self, tmp_path, capsys):
        out = tmp_path / "fit.json"
        assert main(["fit", "--demo", "--out", str(out)]) == 0
        captured = capsys.readouterr().out
        assert "model" in captured and "empirical" in captured


class TestMcTablesAndConverge:
    def test_mc_tables_output(self, tmp_path):
        payload = run_json(
            [
                "mc-tables", "--kappa", "0.8", "--n", "200",
                "--reps", "40", "--seed", "1",
            ],
            tmp_path,
        )
        cell = payload["cells"][0]
        assert cell["n"] == 200
        assert 0 <= cell["clamped_low"] + cell["clamped_high"] < 40
        assert 0.4 < cell["mean_est"]["kappa"] <= 1.0

    def test_mc_tables_csv(self, tmp_path):
        out = tmp_path / "cells.csv"
        code = main(
            [
                "mc-tables", "--kappa", "0.8", "--n", "200", "--reps", "10",
                "--seed", "1", "--format", "csv", "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("kappa,n,replications")
        assert len(lines) == 2

    def test_mc_tables_matches_published_mean(self, tmp_path):
        payload = run_json(
            [
                "mc-tables", "--kappa", "0.8", "--n", "2000",
                "--reps", "500", "--seed", "1",
            ],
            tmp_path,
        )
        cell = payload["cells"][0]
        assert abs(cell["mean_est"]["kappa"] - 0.8032) <= 0.02

    def test_converge_determinism(self, tmp_path):
        argv = [
            "converge", "comp", "--eta", "1.5", "--grid", "10,100",
            "--draws", "5000", "--seed", "9",
        ]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_converge_poisson_case(self, tmp_path):
        payload = run_json(
            [
                "converge", "comp", "--eta", "1", "--grid", "100,10000",
                "--draws", "40000", "--seed", "2",
            ],
            tmp_path,
        )
        assert payload["ks"][-1] <= 0.01

    def test_converge_fp(self, tmp_path):
        payload = run_json(
            [
                "converge", "fp", "--kappa", "0.5", "--grid", "10,100,1000,10000",
                "--draws", "50000", "--seed", "3",
            ],
            tmp_path,
        )
        assert payload["ks"][-1] <= 0.02
        assert payload["ks"][0] > payload["ks"][-1]


class TestExitCodes:
    def test_usage_error_bad_kappa(self):
        assert main(["ml-eval", "--kappa", "2.0", "--z", "-1"]) == 2

    def test_usage_error_bad_grid(self):
        assert main(["density", "--dist", "nml", "--kappa", "0.5", "--grid", "oops"]) == 2

    def test_argparse_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["density", "--dist", "nope", "--kappa", "0.5", "--grid", "0:1:0.1"])
        assert excinfo.value.code == 2

    def test_data_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("wrong,header\n1,2\n")
        assert main(["returns", str(bad)]) == 4

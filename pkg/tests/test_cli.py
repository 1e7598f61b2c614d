"""CLI contract: subcommands, output schema, exit codes, env seed override."""

import csv
import io
import json

import pytest

from mdpcal.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err
    payload = json.loads(out)
    assert payload["schema"] == "mdpcal/1"
    return payload


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestCalibrate:
    def test_ks_json(self, capsys):
        payload = run_json(capsys, "calibrate", "ks", "--kappa", "2", "--n", "10000", "--json")
        assert payload["t_star"] == pytest.approx(2.146, abs=1e-3)
        assert payload["alpha_star"] == pytest.approx(1e-4, rel=1e-4)

    def test_sign_csv(self, capsys):
        code, out, _ = run_cli(capsys, "calibrate", "sign", "--lambda", "2",
                               "--n", "100", "--csv")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 1
        assert float(rows[0]["count_threshold"]) == pytest.approx(65.17, abs=0.01)

    def test_contingency(self, capsys):
        payload = run_json(capsys, "calibrate", "contingency", "--r", "3", "--c", "4",
                           "--n", "10000")
        assert payload["params"]["chi2_critical"] == pytest.approx(55.26, abs=0.01)

    def test_missing_flag_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "calibrate", "ks", "--n", "100")
        assert code == 1
        assert "--kappa" in err

    def test_domain_error_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "calibrate", "ks", "--kappa", "-1", "--n", "100")
        assert code == 2

    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "frobnicate")
        assert code == 1

    def test_precision_flag(self, capsys):
        payload = run_json(capsys, "calibrate", "ks", "--kappa", "2", "--n", "10000",
                           "--precision", "12")
        assert abs(payload["t_star"] - 2.145966026289) < 1e-11


class TestRiskCurve:
    def test_minimum_row_location(self, capsys):
        code, out, _ = run_cli(capsys, "risk-curve", "--rho", "1", "--kappa", "2",
                               "--n", "1000000")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 512
        best = min(rows, key=lambda r: float(r["total"]))
        assert float(best["a"]) == pytest.approx(0.53, abs=0.01)

    def test_json_mode_reports_argmin(self, capsys):
        payload = run_json(capsys, "risk-curve", "--rho", "1", "--kappa", "2",
                           "--n", "10000", "--json")
        assert payload["argmin_a"] == pytest.approx(0.5376, abs=5e-4)

    def test_boundary_bracket_is_domain_error(self, capsys):
        code, _, _ = run_cli(capsys, "risk-curve", "--rho", "1", "--kappa", "2",
                             "--n", "100", "--a-min", "1.2", "--a-max", "2.0")
        assert code == 2


class TestRegimes:
    def test_csv_series(self, capsys):
        code, out, _ = run_cli(capsys, "regimes", "--rho", "1", "--kappa", "2",
                               "--alpha", "0.05", "--n-list", "100,10000,1000000")
        assert code == 0
        rows = parse_csv(out)
        assert {r["regime"] for r in rows} == {"clt", "mdp", "ldp"}
        clt = [float(r["risk"]) for r in rows if r["regime"] == "clt"]
        assert all(risk >= 0.05 for risk in clt)


class TestTables:
    def test_writes_all_files(self, capsys, tmp_path):
        out_dir = tmp_path / "tables"
        code, out, _ = run_cli(capsys, "tables", "--out-dir", str(out_dir))
        assert code == 0
        assert (out_dir / "tables.json").exists()
        assert len(list(out_dir.glob("*.csv"))) == 5


class TestSanov:
    def test_rate_from_json_problem(self, capsys, tmp_path):
        path = tmp_path / "problem.json"
        path.write_text(json.dumps({"support": [0, 1], "probs": [0.5, 0.5],
                                    "phi": [-0.75, 0.25]}))
        payload = run_json(capsys, "sanov", "--input", str(path))
        assert payload["rate"] == pytest.approx(0.130812, abs=1e-6)
        assert payload["status"] == "interior"

    def test_unreachable_rate_serialises_as_inf(self, capsys, tmp_path):
        path = tmp_path / "problem.json"
        path.write_text(json.dumps({"support": [0, 1], "probs": [0.5, 0.5],
                                    "phi": [-2.0, -1.0]}))
        payload = run_json(capsys, "sanov", "--input", str(path))
        assert payload["rate"] == "inf"

    def test_missing_file_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "sanov", "--input", "/nonexistent.json")
        assert code == 1


class TestSmallCommands:
    def test_truncation(self, capsys):
        payload = run_json(capsys, "truncation", "--kappa", "2", "--n", "10000")
        assert payload["level"] == pytest.approx(9.2103e-4, abs=1e-7)

    def test_radius_poly(self, capsys):
        payload = run_json(capsys, "radius", "--rho", "1", "--poly", "1", "--n", "100")
        assert payload["radius"] == pytest.approx(0.15175, abs=1e-5)

    def test_radius_requires_decay_choice(self, capsys):
        code, _, _ = run_cli(capsys, "radius", "--rho", "1", "--n", "100")
        assert code == 1

    def test_slopes(self, capsys):
        payload = run_json(capsys, "slopes", "--theta-list", "1.0,2.0")
        assert payload["slopes"][0]["c_lrt"] == pytest.approx(0.735759, abs=1e-6)
        assert payload["slopes"][0]["c_med_local_approx"] is True

    def test_plugin(self, capsys):
        payload = run_json(capsys, "plugin", "--kappa-hat", "2", "--rho", "1",
                           "--n", "10000")
        assert payload["threshold"] == pytest.approx(2.146, abs=1e-3)


class TestTriangulate:
    def test_perfect_fit(self, capsys):
        payload = run_json(capsys, "triangulate", "--counts", "5,5",
                           "--theta0", "0.5,0.5")
        assert payload["d_kl"] == 0.0
        assert payload["pearson"] == 0.0

    def test_seven_three(self, capsys):
        payload = run_json(capsys, "triangulate", "--counts", "7,3",
                           "--theta0", "0.5,0.5", "--dirichlet", "1.0")
        assert payload["w_exact"] == pytest.approx(-0.253915, abs=1e-5)

    def test_bad_counts_is_domain_error(self, capsys):
        code, _, _ = run_cli(capsys, "triangulate", "--counts", "7,x",
                             "--theta0", "0.5,0.5")
        assert code == 2


class TestMcCommands:
    @pytest.fixture
    def mc_config(self, tmp_path):
        path = tmp_path / "mc.json"
        path.write_text(json.dumps({
            "prior": {"family": "laplace-location", "lambda": 2.0,
                      "gamma_rate": 0.5, "truncation": 8.0},
            "mc": {"m_alternatives": 100, "m_null": 100, "n": 50, "seed": 5,
                   "threshold_grid": [1.0, 2.0, 3.0, 4.0]},
            "statistic": "sign",
        }))
        return path

    def test_mc_csv_output(self, capsys, mc_config):
        code, out, _ = run_cli(capsys, "mc", "--config", str(mc_config))
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 4
        assert set(rows[0]) == {"threshold", "alpha_hat", "se_alpha", "beta_hat",
                                "se_beta", "risk_hat"}

    def test_mc_out_file(self, capsys, mc_config, tmp_path):
        target = tmp_path / "curve.csv"
        code, out, _ = run_cli(capsys, "mc", "--config", str(mc_config),
                               "--out", str(target))
        assert code == 0
        assert len(parse_csv(target.read_text())) == 4

    def test_env_seed_override(self, capsys, mc_config, monkeypatch):
        payload_default = run_json(capsys, "mc", "--config", str(mc_config), "--json")
        monkeypatch.setenv("MDPCAL_SEED", "5")
        payload_same = run_json(capsys, "mc", "--config", str(mc_config), "--json")
        monkeypatch.setenv("MDPCAL_SEED", "99")
        payload_other = run_json(capsys, "mc", "--config", str(mc_config), "--json")
        assert payload_default["beta_hat"] == payload_same["beta_hat"]
        assert payload_default["beta_hat"] != payload_other["beta_hat"]
        assert payload_other["seed"] == 99

    def test_prior_exponent_command(self, capsys, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({
            "prior": {"lambda": 1.0, "gamma_rate": 1.0, "truncation": 8.0},
            "radii": [0.3, 0.2, 0.1], "m": 50000, "seed": 1,
        }))
        payload = run_json(capsys, "prior-exponent", "--config", str(path))
        assert payload["kappa_hat"] == pytest.approx(1.0, abs=0.2)

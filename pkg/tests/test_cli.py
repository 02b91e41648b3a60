import csv
import io
import json
import math
from pathlib import Path


from sealoss import builtin_data_path, load_campaign
from sealoss.cli import main

C2_LOG = str(builtin_data_path("synthetic_campaign2_log.csv"))
C2_CAL = str(builtin_data_path("calibration_example.csv"))


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_dir(path: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


class TestCurves:
    def test_two_point_single_model(self, tmp_path, capsys):
        code, out, _ = run(
            ["curves", "--config", "campaign2", "--models", "free-space",
             "--dmin", "100", "--dmax", "200", "--points", "2", "--out", str(tmp_path)],
            capsys,
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO((tmp_path / "curve_free-space.csv").read_text())))
        assert rows[0] == ["distance_m", "loss_db", "model_id"]
        assert len(rows) == 3
        assert float(rows[1][0]) == 100.0 and float(rows[2][0]) == 200.0

    def test_rel_sits_above_bullington_on_average(self, tmp_path, capsys):
        code, _, _ = run(
            ["curves", "--config", "campaign2", "--models", "rel,bullington",
             "--dmin", "100", "--dmax", "10000", "--points", "200", "--out", str(tmp_path)],
            capsys,
        )
        assert code == 0
        doc = json.loads((tmp_path / "curves.json").read_text())
        rel = doc["curves"]["rel"]["losses_db"]
        bull = doc["curves"]["bullington"]["losses_db"]
        assert len(rel) == len(bull) == 200
        mean_gap = sum(r - b for r, b in zip(rel, bull)) / len(rel)
        assert mean_gap > 0.0

    def test_deterministic_bytes(self, tmp_path, capsys):
        args = ["curves", "--config", "campaign2", "--dmin", "100", "--dmax", "9000",
                "--points", "64", "--out"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(args + [str(a)], capsys)[0] == 0
        assert run(args + [str(b), "--threads", "3"], capsys)[0] == 0
        files = read_dir(a)
        assert files == read_dir(b)
        assert len([n for n in files if n.startswith("curve_")]) == 5  # default model family

    def test_missing_config_exit_2(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv("SEALOSS_CONFIG", raising=False)
        code, _, err = run(["curves", "--out", str(tmp_path)], capsys)
        assert code == 2
        assert "config error" in err

    def test_unknown_model_exit_2(self, tmp_path, capsys):
        code, _, _ = run(
            ["curves", "--config", "campaign2", "--models", "psychic",
             "--out", str(tmp_path)], capsys,
        )
        assert code == 2

    def test_all_points_in_domain_error_exit_3(self, tmp_path, capsys):
        # two-ray-round has no specular point anywhere beyond the horizon
        code, _, err = run(
            ["curves", "--config", "campaign2", "--models", "two-ray-round",
             "--dmin", "11000", "--dmax", "20000", "--points", "8", "--out", str(tmp_path)],
            capsys,
        )
        assert code == 3
        assert "no model produced any point" in err

    def test_config_env_var(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("SEALOSS_CONFIG", "campaign1")
        code, _, _ = run(
            ["curves", "--models", "free-space", "--dmin", "100", "--dmax", "200",
             "--points", "2", "--out", str(tmp_path)],
            capsys,
        )
        assert code == 0


class TestAnalyze:
    def analyze(self, tmp_path, capsys, extra=()):
        argv = ["analyze", "--config", "campaign2", "--log", C2_LOG, "--cal", C2_CAL,
                "--out", str(tmp_path)] + list(extra)
        return run(argv, capsys)

    def test_full_pipeline(self, tmp_path, capsys):
        code, out, _ = self.analyze(tmp_path, capsys)
        assert code == 0
        for name in ("fit.json", "comparison.csv", "samples.csv", "predictions.csv", "analysis.json"):
            assert (tmp_path / name).exists()
        doc = json.loads((tmp_path / "analysis.json").read_text())
        # synthetic log is drawn from the bullington curve: exponent near 4
        assert abs(doc["fit"]["n"] - 4.0) < 0.35
        assert doc["pipeline"]["parsed"] == 325
        assert doc["pipeline"]["excluded_records"] == 3
        assert doc["config"]["radio"]["tx_power_dbm"] == 18.3

    def test_comparison_sorted_by_rmse(self, tmp_path, capsys):
        code, _, _ = self.analyze(tmp_path, capsys)
        assert code == 0
        rows = list(csv.DictReader(io.StringIO((tmp_path / "comparison.csv").read_text())))
        rmses = [float(r["rmse_db"]) for r in rows]
        assert rmses == sorted(rmses)
        assert {r["model_id"] for r in rows} >= {"rel", "bullington", "itu", "log-distance"}

    def test_fitted_n_matches_clean_generator_fit(self, tmp_path, capsys):
        # compare the noisy fit against a fit of the noise-free generator curve
        from sealoss import SampleSet, fit_log_distance
        from sealoss.models import distance_grid, evaluate_model

        code, _, _ = self.analyze(tmp_path, capsys)
        assert code == 0
        doc = json.loads((tmp_path / "analysis.json").read_text())
        cfg = load_campaign("campaign2")
        ctx = cfg.model_context()
        grid = distance_grid(150.0, 9790.0, 300, "log")
        clean = SampleSet.from_arrays(grid, [evaluate_model("bullington", ctx, d) for d in grid])
        n_clean = fit_log_distance(clean, 100.0).n
        assert abs(doc["fit"]["n"] - n_clean) < 0.25

    def test_wholly_unevaluable_model_reported_in_band(self, tmp_path, capsys):
        # two-ray-round cannot evaluate a single beyond-horizon sample; the
        # analysis must say so rather than silently dropping the model
        cfg = load_campaign("campaign2")
        log = tmp_path / "far.csv"
        rows = ["timestamp,lat,lon,rssi_dbm"]
        for i, d in enumerate((10_400.0, 11_000.0, 12_000.0)):
            lat = cfg.bs_position.latitude - math.degrees(d / cfg.earth.true_radius)
            rows.append(f"2020-08-15T09:00:{i:02d}Z,{lat:.10f},{cfg.bs_position.longitude},-120.0")
        log.write_text("\n".join(rows) + "\n")
        code, out, _ = run(
            ["analyze", "--config", "campaign2", "--log", str(log),
             "--models", "two-ray-round,itu", "--out", str(tmp_path / "o")],
            capsys,
        )
        assert code == 0
        assert "no evaluable sample point: two-ray-round" in out
        doc = json.loads((tmp_path / "o" / "analysis.json").read_text())
        assert doc["pipeline"]["unevaluable_models"] == ["two-ray-round"]

    def test_binning_option(self, tmp_path, capsys):
        code, _, _ = self.analyze(tmp_path, capsys, extra=["--bins", "12"])
        assert code == 0
        rows = list(csv.reader(io.StringIO((tmp_path / "samples.csv").read_text())))
        assert len(rows) - 1 <= 12

    def test_deterministic_across_runs_and_threads(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert self.analyze(a, capsys)[0] == 0
        assert self.analyze(b, capsys, extra=["--threads", "4"])[0] == 0
        assert read_dir(a) == read_dir(b)

    def test_degenerate_single_distance_exit_4(self, tmp_path, capsys):
        cfg = load_campaign("campaign2")
        lat = cfg.bs_position.latitude - math.degrees(500.0 / cfg.earth.true_radius)
        log = tmp_path / "flat.csv"
        rows = ["timestamp,lat,lon,rssi_dbm"]
        rows += [f"2020-08-15T09:00:{i:02d}Z,{lat:.10f},{cfg.bs_position.longitude},-90.0" for i in range(5)]
        log.write_text("\n".join(rows) + "\n")
        code, _, err = run(
            ["analyze", "--config", "campaign2", "--log", str(log), "--out", str(tmp_path / "o")],
            capsys,
        )
        assert code == 4
        assert "no usable samples" in err

    def test_bad_header_exit_2(self, tmp_path, capsys):
        log = tmp_path / "bad.csv"
        log.write_text("t,a,b,c\n1,2,3,4\n")
        code, _, _ = run(
            ["analyze", "--config", "campaign2", "--log", str(log), "--out", str(tmp_path / "o")],
            capsys,
        )
        assert code == 2


class TestRange:
    def test_budget_breakdown(self, capsys):
        code, out, _ = run(["range", "--config", "campaign2"], capsys)
        assert code == 0
        assert "162.3 dB" in out
        assert "free-space" in out and "bullington" in out

    def test_sensitivity_override_extends_range(self, capsys):
        _, out_base, _ = run(["range", "--config", "campaign2", "--models", "itu"], capsys)
        _, out_more, _ = run(
            ["range", "--config", "campaign2", "--models", "itu", "--sensitivity", "-144"],
            capsys,
        )
        base = float(out_base.split("max range")[1].split("m")[0])
        more = float(out_more.split("max range")[1].split("m")[0])
        assert more > base

    def test_no_coverage_exit_5(self, capsys):
        code, _, _ = run(
            ["range", "--config", "campaign2", "--sensitivity", "50"], capsys,
        )
        assert code == 5

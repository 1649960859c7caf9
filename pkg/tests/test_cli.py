import csv
import io
import json
import math

import pytest

from swanson_qfi.cli import QFI_COLUMNS, main, parse_grid, ConfigError


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestParseGrid:
    @pytest.mark.parametrize("text,expected", [
        ("2", [2.0]),
        ("1,2.5,3", [1.0, 2.5, 3.0]),
        ("0.1:0.5:0.1", [0.1, 0.2, 0.3, 0.4, 0.5]),
        ("1:1:0.5", [1.0]),
    ])
    def test_forms(self, text, expected):
        assert parse_grid(text) == pytest.approx(expected)

    @pytest.mark.parametrize("text", ["", "a", "1:2", "1:2:0", "2:1:0.1", "1,,2"])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_grid(text)


class TestQfi:
    def test_columns_and_agreement(self, tmp_path):
        out = tmp_path / "q.csv"
        code = main(["qfi", "--omega", "2", "--temp", "0.1:0.5:0.2", "--eps", "0.0,0.2,0.6",
                     "--target", "temperature", "--out", str(out)])
        assert code == 0
        with open(out) as fh:
            assert next(csv.reader(fh)) == QFI_COLUMNS
        rows = read_csv(out)
        assert len(rows) == 6
        assert all(float(r["rel_discrepancy"]) < 1e-5 for r in rows)
        errors = read_csv(f"{out}.errors.csv")
        assert len(errors) == 3
        assert all(float(e["epsilon"]) == 0.6 for e in errors)
        assert all("exceptional point" in e["error"] for e in errors)

    def test_metadata_sidecar(self, tmp_path):
        out = tmp_path / "q.csv"
        main(["qfi", "--out", str(out)])
        meta = json.loads((tmp_path / "q.csv.meta.json").read_text())
        conv = meta["conventions"]
        assert conv["mean_fidelity_coeff_c"] == 1.0
        assert conv["mean_qfi_coeff_c_m"] == 2.0
        assert conv["purity_exponent"] == -0.5

    def test_floats_round_trip(self, capsys):
        assert main(["qfi", "--omega", "2.3", "--temp", "0.7", "--eps", "0.1"]) == 0
        row = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))[0]
        assert float(row["omega"]) == 2.3
        value = row["qfi_omega_closed"]
        assert format(float(value), ".17g") == value

    def test_epsilon_target_at_zero(self, capsys):
        assert main(["qfi", "--eps", "0", "--target", "epsilon"]) == 0
        row = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))[0]
        assert float(row["qfi_epsilon_closed"]) == 0.0
        assert abs(float(row["qfi_bures_fd_target"])) < 1e-6

    def test_json(self, capsys):
        assert main(["qfi", "--format", "json", "--eps", "0.2,0.7"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["rows"]) == 1
        assert len(payload["errors"]) == 1
        assert payload["conventions"]["purity_exponent"] == -0.5


class TestGainAndCost:
    def test_baseline_domain_to_sidecar(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["gain", "--omega", "2,3", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert [float(r["omega"]) for r in rows] == [3.0]
        errors = read_csv(f"{out}.errors.csv")
        assert "Hermitian baseline undefined" in errors[0]["error"]

    def test_zero_gain_at_baseline(self, capsys):
        assert main(["gain", "--omega", "5", "--eps", "0.2", "--temp", "0.1"]) == 0
        row = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))[0]
        assert abs(float(row["gain_db"])) < 1e-9

    def test_energy_cost(self, capsys):
        assert main(["energy-cost", "--target", "temperature"]) == 0
        row = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))[0]
        assert float(row["delta_u_paper"]) > 0
        assert math.isfinite(float(row["u_theta"]))
        assert row["delta_u_oracle"] != ""

    def test_energy_cost_zero_epsilon(self, capsys):
        assert main(["energy-cost", "--eps", "0"]) == 0
        captured = capsys.readouterr()
        assert "zero-cost baseline" in captured.err

    @pytest.mark.parametrize("trunc", ["8", "512"])
    def test_trunc_bounds(self, trunc, capsys):
        assert main(["energy-cost", "--trunc", trunc]) == 2


class TestConfig:
    def test_flags_override_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# probe\nomega = 3\ntemperature = 0.4\neps = 0.1\n")
        assert main(["qfi", "--config", str(cfg), "--omega", "2.5"]) == 0
        row = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))[0]
        assert float(row["omega"]) == 2.5
        assert float(row["temperature"]) == 0.4

    def test_config_before_subcommand(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("omega = 3\n")
        assert main(["--config", str(cfg), "qfi"]) == 0
        row = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))[0]
        assert float(row["omega"]) == 3.0

    def test_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("colour = blue\n")
        assert main(["qfi", "--config", str(cfg)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["qfi", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_bad_grid(self, capsys):
        assert main(["qfi", "--omega", "1:2"]) == 2


class TestFockVerify:
    def test_default_passes(self, capsys):
        assert main(["fock-verify"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is True
        assert payload["lambda_choice"] == "derived"

    def test_offset_fails(self, capsys):
        assert main(["fock-verify", "--lambda-offset", "0.5"]) == 3
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is False
        assert payload["thermal_check_refused"] is True

    def test_hermitian_point(self, capsys):
        assert main(["fock-verify", "--omega", "4", "--eps", "0.25"]) == 0

    def test_truncation_too_small(self, capsys):
        assert main(["fock-verify", "--trunc", "8"]) == 2

    def test_broken_phase(self, capsys):
        assert main(["fock-verify", "--eps", "0.6"]) == 2
        assert "exceptional point" in capsys.readouterr().err


class TestSimulate:
    ARGS = ["simulate", "--target", "temperature", "--samples", "2000", "--replicas", "50",
            "--seed", "7"]

    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(self.ARGS + ["--out", str(a)]) == 0
        assert main(self.ARGS + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        payload = json.loads(a.read_text())
        for key in ["estimates", "empirical_variance", "crb_quantum", "crb_classical",
                    "qfi", "seed"]:
            assert key in payload

    def test_epsilon_target_rejected(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--target", "epsilon"])
        assert exc.value.code == 2

    def test_too_few_samples(self, capsys):
        assert main(["simulate", "--samples", "10", "--replicas", "50"]) == 2


@pytest.fixture(scope="module")
def figures_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("figs")
    assert main(["figures", "--out", str(out)]) == 0
    return out


class TestFigures:
    NAMES = ["fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig3b_omega1"]

    def test_files(self, figures_dir):
        for name in self.NAMES:
            assert (figures_dir / f"{name}.csv").exists()
            assert (figures_dir / f"{name}.csv.errors.csv").exists()
        meta = json.loads((figures_dir / "meta.json").read_text())
        assert meta["conventions"]["mean_qfi_coeff_c_m"] == 2.0

    @staticmethod
    def curve(rows, label, x):
        return {float(r[x]): float(r["gain_db"]) for r in rows if r["curve"] == label}

    def test_fig1a_ordering(self, figures_dir):
        rows = read_csv(figures_dir / "fig1a.csv")
        low = self.curve(rows, "T=0.1,eps=0.2", "omega")
        high = self.curve(rows, "T=0.1,eps=0.3", "omega")
        assert all(w > 2 for w in low)
        common = [w for w in low if w in high and w > 4]
        assert common and all(high[w] > low[w] for w in common)

    def test_fig1a_zero_at_baseline(self, figures_dir):
        rows = read_csv(figures_dir / "fig1a.csv")
        curve = self.curve(rows, "T=0.1,eps=0.2", "omega")
        w = min(curve, key=lambda k: abs(k - 5.0))
        assert w == pytest.approx(5.0)
        assert abs(curve[w]) < 1e-9

    def test_fig1b_sidecar(self, figures_dir):
        rows = read_csv(figures_dir / "fig1b.csv")
        assert {r["curve"] for r in rows} == {"omega=4.0,eps=0.3"}
        errors = read_csv(figures_dir / "fig1b.csv.errors.csv")
        assert {float(e["omega"]) for e in errors} == {2.0}

    def test_fig3_monotone_in_epsilon(self, figures_dir):
        rows = read_csv(figures_dir / "fig3a.csv")
        at_two = sorted((float(r["epsilon"]), float(r["qfi_epsilon"]))
                        for r in rows if float(r["omega"]) == 2.0)
        values = [v for _, v in at_two]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_explicit_grid(self, tmp_path):
        assert main(["figures", "--out", str(tmp_path), "--omega", "3:4:0.5",
                     "--temp", "0.5"]) == 0
        rows = read_csv(tmp_path / "fig1a.csv")
        assert sorted({float(r["omega"]) for r in rows}) == [3.0, 3.5, 4.0]

"""End-to-end checks of the command-line workbench."""

import numpy as np
import pytest

from nvscc import io_csv
from nvscc.cli import main

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")


def run(*argv):
    return main(list(argv))


class TestProtocolCommand:
    def test_deep_summary_lines(self, tmp_path, capsys):
        assert run("protocol", "--preset", "deep", "--out", str(tmp_path)) == 0
        out = capsys.readouterr().out
        assert "F_meas 88.5%" in out
        assert "F 96.4%" in out
        assert "SNR 3.5" in out
        assert (tmp_path / "protocol_report.csv").exists()
        assert (tmp_path / "protocol_summary.txt").read_text() in out + "\n"

    def test_shallow_summary_lines(self, tmp_path, capsys):
        assert run("protocol", "--preset", "shallow", "--out", str(tmp_path)) == 0
        out = capsys.readouterr().out
        assert "F 78.6%" in out
        assert "SNR 0.99" in out


class TestExitCodes:
    def test_unknown_config_key_is_2(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("mystery_knob = 3\n")
        assert run("protocol", "--preset", "deep", "--config", str(cfg)) == 2

    def test_missing_required_keys_is_2(self, tmp_path):
        assert run("protocol", "--out", str(tmp_path)) == 2

    def test_nonexistent_input_file_is_2(self, tmp_path):
        missing = str(tmp_path / "nope.csv")
        assert run("hist-fit", "--csv", missing, "--out", str(tmp_path)) == 2

    def test_malformed_histogram_is_4(self, tmp_path):
        bad = tmp_path / "h.csv"
        bad.write_text("photon_count,occurrences\n1,-3\n")
        assert run("hist-fit", "--csv", str(bad), "--out", str(tmp_path)) == 4

    def test_wrong_header_is_4(self, tmp_path):
        bad = tmp_path / "h.csv"
        bad.write_text("counts,how_many\n1,3\n")
        assert run("hist-fit", "--csv", str(bad), "--out", str(tmp_path)) == 4

    def test_underdetermined_inversion_is_3(self, tmp_path):
        lines = tmp_path / "lines.csv"
        io_csv.write_rows_csv(
            lines, ("frequency_hz", "label", "amplitude"), [(2.87e9, "only", 1.0)]
        )
        assert run("odmr-infer", "--csv", str(lines), "--out", str(tmp_path)) == 3

    def test_bad_subcommand_is_systemexit_2(self):
        with pytest.raises(SystemExit) as err:
            run("not-a-command")
        assert err.value.code == 2


class TestDeterminism:
    def test_mc_same_seed_byte_identical(self, tmp_path):
        cfg = tmp_path / "small.cfg"
        cfg.write_text("mc_repetitions = 20000\n")
        dirs = [tmp_path / "r1", tmp_path / "r2"]
        for d in dirs:
            code = run(
                "mc", "--preset", "deep", "--seed", "1",
                "--config", str(cfg), "--out", str(d),
            )
            assert code == 0
        names = sorted(p.name for p in dirs[0].iterdir())
        assert names == sorted(p.name for p in dirs[1].iterdir())
        for name in names:
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes(), name

    def test_mc_seed_changes_histograms(self, tmp_path):
        cfg = tmp_path / "small.cfg"
        cfg.write_text("mc_repetitions = 20000\n")
        for seed, d in (("1", "a"), ("2", "b")):
            run("mc", "--preset", "deep", "--seed", seed,
                "--config", str(cfg), "--out", str(tmp_path / d))
        h1 = (tmp_path / "a" / "mc_hist_zero_seq.csv").read_bytes()
        h2 = (tmp_path / "b" / "mc_hist_zero_seq.csv").read_bytes()
        assert h1 != h2


class TestOutputRouting:
    def test_env_var_default_out_dir(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("NVSCC_OUT_DIR", str(tmp_path / "envdir"))
        assert run("threshold", "--preset", "deep") == 0
        assert (tmp_path / "envdir" / "threshold_report.csv").exists()

    def test_out_flag_beats_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("NVSCC_OUT_DIR", str(tmp_path / "envdir"))
        assert run("threshold", "--preset", "deep", "--out", str(tmp_path / "flag")) == 0
        assert (tmp_path / "flag" / "threshold_report.csv").exists()
        assert not (tmp_path / "envdir").exists()

    def test_report_on_stderr_not_stdout(self, tmp_path, capsys):
        run("threshold", "--preset", "deep", "--out", str(tmp_path))
        captured = capsys.readouterr()
        assert "wall clock" in captured.err
        assert "wall clock" not in captured.out
        summary = (tmp_path / "threshold_summary.txt").read_text()
        assert "wall clock" not in summary


class TestIngestion:
    def test_odmr_roundtrip_recovers_field(self, tmp_path, capsys):
        gen = tmp_path / "gen"
        assert run("odmr-infer", "--preset", "deep", "--out", str(gen)) == 0
        capsys.readouterr()
        assert run(
            "odmr-infer", "--csv", str(gen / "odmr_lines.csv"), "--out", str(tmp_path / "in")
        ) == 0
        out = capsys.readouterr().out
        assert "0.7000 mT" in out
        assert "39.00 deg" in out
        rows = (tmp_path / "in" / "odmr_inference.csv").read_text().splitlines()
        assert rows[0].startswith("b_mt,theta_deg")
        assert len(rows) == 2

    def test_pump_sim_then_fit_roundtrip(self, tmp_path, capsys):
        sim = tmp_path / "sim"
        assert run("pump-sim", "--preset", "deep", "--seed", "7", "--out", str(sim)) == 0
        assert run(
            "pump-fit", "--preset", "deep",
            "--csv", str(sim / "pump_traces.csv"), "--out", str(tmp_path / "fit"),
        ) == 0
        rows = (tmp_path / "fit" / "pump_fit.csv").read_text().splitlines()
        fitted = {line.split(",")[0]: float(line.split(",")[1]) for line in rows[1:]}
        assert fitted["t_st0_s"] == pytest.approx(4.1e-6, rel=0.10)
        assert fitted["t_ts_s"] == pytest.approx(1.33e-6, rel=0.10)
        assert fitted["r_squared"] > 0.98

    def test_hist_fit_ingests_histogram(self, tmp_path, capsys):
        gen = tmp_path / "gen"
        assert run("hist-fit", "--preset", "deep", "--out", str(gen)) == 0
        capsys.readouterr()
        cfg = tmp_path / "kind.cfg"
        cfg.write_text("hist_kind = poisson\n")
        assert run(
            "hist-fit", "--csv", str(gen / "hist_zero.csv"),
            "--config", str(cfg), "--out", str(tmp_path / "in"),
        ) == 0
        out = capsys.readouterr().out
        assert "Poisson mean 0.47" in out


class TestDataCommands:
    def test_speedup_csv_shape(self, tmp_path):
        assert run("speedup", "--preset", "deep", "--out", str(tmp_path)) == 0
        rows = (tmp_path / "speedup.csv").read_text().splitlines()
        assert rows[0] == "t_seq_s,speedup"
        assert len(rows) == 101
        first = float(rows[1].split(",")[1])
        assert 1.8 <= first <= 2.8

    def test_ple_outputs(self, tmp_path, capsys):
        assert run("ple", "--preset", "shallow", "--out", str(tmp_path)) == 0
        out = capsys.readouterr().out
        assert "19.0" in out
        x, y = io_csv.read_lineshape_csv(tmp_path / "ple_spectrum.csv")
        assert len(x) == 2001
        assert np.all(y >= 0)
        assert (tmp_path / "ple.png").stat().st_size > 0

    def test_threshold_charge_table(self, tmp_path):
        assert run("threshold", "--preset", "deep", "--out", str(tmp_path)) == 0
        rows = (tmp_path / "charge_table.csv").read_text().splitlines()
        assert rows[0] == "readout_s,error_minus,error_zero,f_charge"
        f_values = [100 * float(r.split(",")[3]) for r in rows[1:]]
        assert f_values == pytest.approx([98.2, 98.1, 85.3, 76.8], abs=0.05)

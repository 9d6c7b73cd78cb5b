"""Config parsing and CSV serialization."""

import numpy as np
import pytest

from nvscc.config import load_config, parse_config_text, require, resolve_config
from nvscc.counts import CountHistogram
from nvscc.errors import ConfigError, DataFormatError
from nvscc import io_csv, presets
from nvscc.ratefit import synth_bundle


class TestConfigParsing:
    def test_basic_types(self):
        cfg = parse_config_text(
            "\n".join(
                [
                    "# scenario overlay",
                    "field_mt = 0.7",
                    "ple_points = 501  # grid size",
                    "include_postselection = true",
                    "hist_kind = poisson",
                    "pop_a = 0.7, 0.1, 0.2",
                    "minus_components = 0.01, 0.0, 10.0; 1.0, 35.0, 9.0",
                    "",
                ]
            )
        )
        assert cfg["field_mt"] == 0.7
        assert cfg["ple_points"] == 501
        assert cfg["include_postselection"] is True
        assert cfg["hist_kind"] == "poisson"
        assert cfg["pop_a"] == (0.7, 0.1, 0.2)
        assert cfg["minus_components"] == ((0.01, 0.0, 10.0), (1.0, 35.0, 9.0))

    def test_unknown_key_rejected_with_line_number(self):
        with pytest.raises(ConfigError, match="line 2.*not_a_key"):
            parse_config_text("field_mt = 0.7\nnot_a_key = 1\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("field_mt = 0.7\nfield_mt = 0.8\n")

    def test_malformed_line_rejected(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config_text("field_mt 0.7\n")

    def test_bad_float_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("field_mt = abc\n")

    def test_nan_rejected_inf_allowed(self):
        with pytest.raises(ConfigError):
            parse_config_text("field_mt = nan\n")
        assert parse_config_text("t_ion_s = inf\n")["t_ion_s"] == float("inf")

    def test_triple_wrong_arity(self):
        with pytest.raises(ConfigError):
            parse_config_text("pop_a = 0.7, 0.3\n")

    def test_bool_values(self):
        assert parse_config_text("include_postselection = false\n") == {
            "include_postselection": False
        }
        assert parse_config_text("include_postselection = yes\n") == {
            "include_postselection": True
        }
        with pytest.raises(ConfigError):
            parse_config_text("include_postselection = maybe\n")

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.cfg")

    def test_resolve_overlay_wins(self, tmp_path):
        path = tmp_path / "o.cfg"
        path.write_text("e_mw = 0.2\n")
        cfg = resolve_config(presets.preset_named("deep"), path)
        assert cfg["e_mw"] == 0.2
        assert cfg["p_plus1"] == presets.DEEP["p_plus1"]

    def test_resolve_none_none_is_empty(self):
        assert resolve_config(None, None) == {}

    def test_require_lists_missing(self):
        with pytest.raises(ConfigError, match="e_mw"):
            require({"field_mt": 1.0}, "field_mt", "e_mw")


class TestPresets:
    def test_both_presets_parse_every_key(self):
        for name in ("deep", "shallow"):
            cfg = presets.preset_named(name)
            presets.field_from(cfg)
            presets.excited_from(cfg)
            presets.pump_from(cfg)
            presets.fluor_from(cfg)
            presets.populations_from(cfg)
            presets.count_models_from(cfg)
            presets.budget_from(cfg)
            presets.timing_from(cfg)
            assert presets.duration_rows_from(cfg)

    def test_populations_renormalized(self):
        pops = presets.populations_from(presets.preset_named("deep"))
        for triple in pops.values():
            assert sum(triple) == pytest.approx(1.0, abs=1e-12)

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            presets.preset_named("mid")


class TestHistogramCsv:
    def test_roundtrip_preserves_window(self, tmp_path):
        hist = CountHistogram(counts={0: 40, 3: 55, 9: 5}, total=100, window_s=5e-3)
        path = io_csv.write_histogram_csv(tmp_path / "h.csv", hist)
        back = io_csv.read_histogram_csv(path)
        assert back.counts == hist.counts
        assert back.total == 100
        assert back.window_s == 5e-3

    def test_missing_column(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("photon_count\n3\n")
        with pytest.raises(DataFormatError):
            io_csv.read_histogram_csv(path)

    def test_negative_occurrence_line_number(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("photon_count,occurrences\n0,10\n2,-1\n")
        with pytest.raises(DataFormatError, match="line 3"):
            io_csv.read_histogram_csv(path)

    def test_duplicate_count_rejected(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("photon_count,occurrences\n2,10\n2,5\n")
        with pytest.raises(DataFormatError):
            io_csv.read_histogram_csv(path)

    def test_non_integer_rejected(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("photon_count,occurrences\n2.5,10\n")
        with pytest.raises(DataFormatError):
            io_csv.read_histogram_csv(path)


class TestTraceBundleCsv:
    def test_roundtrip(self, tmp_path):
        pump = presets.pump_from(presets.preset_named("deep"))
        fluor = presets.fluor_from(presets.preset_named("deep"))
        pops = presets.populations_from(presets.preset_named("deep"))
        records = synth_bundle(pump, fluor, 0.056, pops, duration_s=2e-6, seed=3)
        path = io_csv.write_trace_bundle_csv(tmp_path / "b.csv", records)
        back = io_csv.read_trace_bundle_csv(path)
        assert len(back) == len(records)
        for orig, readback in zip(records, back):
            assert readback.family == orig.family
            assert readback.variant == orig.variant
            np.testing.assert_allclose(readback.time_s, orig.time_s, rtol=0, atol=0)
            np.testing.assert_allclose(readback.rate_cps, orig.rate_cps, rtol=0, atol=0)

    def test_non_monotone_time_rejected(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text(
            "# family=a variant=none\ntime_s,rate_cps\n0.0,1.0\n2e-8,2.0\n1e-8,3.0\n"
        )
        with pytest.raises(DataFormatError, match="non-monotone"):
            io_csv.read_trace_bundle_csv(path)

    def test_unknown_family_rejected(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("# family=q variant=none\ntime_s,rate_cps\n0.0,1.0\n")
        with pytest.raises(DataFormatError):
            io_csv.read_trace_bundle_csv(path)

    def test_data_before_section_rejected(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("time_s,rate_cps\n0.0,1.0\n")
        with pytest.raises(DataFormatError):
            io_csv.read_trace_bundle_csv(path)

    def test_non_numeric_cell_line_number(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("# family=a variant=none\ntime_s,rate_cps\n0.0,fast\n")
        with pytest.raises(DataFormatError, match="line 3"):
            io_csv.read_trace_bundle_csv(path)


class TestGenericCsv:
    def test_empty_rows_write_header_only(self, tmp_path):
        path = io_csv.write_rows_csv(tmp_path / "e.csv", ("a", "b"), [])
        assert path.read_text() == "a,b\n"

    def test_saturation_roundtrip_and_validation(self, tmp_path):
        path = io_csv.write_saturation_csv(
            tmp_path / "s.csv", [0.1, 0.5, 2.0], [5e3, 2e4, 5e4]
        )
        power, rate = io_csv.read_saturation_csv(path)
        np.testing.assert_allclose(power, [0.1, 0.5, 2.0])
        np.testing.assert_allclose(rate, [5e3, 2e4, 5e4])
        bad = tmp_path / "bad.csv"
        bad.write_text("power_mw,rate_cps\n-1.0,10\n")
        with pytest.raises(DataFormatError):
            io_csv.read_saturation_csv(bad)

    def test_lineshape_roundtrip(self, tmp_path):
        x = np.linspace(-1, 1, 11)
        y = np.exp(-(x**2))
        path = io_csv.write_lineshape_csv(tmp_path / "l.csv", x, y)
        xb, yb = io_csv.read_lineshape_csv(path)
        np.testing.assert_allclose(xb, x)
        np.testing.assert_allclose(yb, y)

    def test_float_repr_roundtrip_is_exact(self, tmp_path):
        values = [0.1, 1 / 3, 5e-324, 1e308, 0.7000000000000001]
        path = io_csv.write_rows_csv(
            tmp_path / "f.csv", ("detuning_ghz", "intensity"), [(v, v) for v in values]
        )
        x, y = io_csv.read_lineshape_csv(path)
        assert list(x) == values

"""Frozen parameter sets for the two reference emitters and builders that
turn a flat config dict into module-level objects.

"deep" is the low-strain emitter far from the surface: slow ionization of
the shelved state, bright charge readout in a 5 ms window.  "shallow" sits
near the surface: large strain splitting, faster shelving-state decay, and
a 10 ms readout window whose NV- counts spread into a broad pedestal.
"""

from __future__ import annotations

import math

from .config import require
from .counts import CountModel, GaussianMixtureModel, PoissonModel
from .errors import ConfigError
from .excited_state import ExcitedStateParams, StrainField
from .ground_spin import FieldVector, GroundSpinParams
from .protocol import DurationRow, ProtocolErrorBudget, SensingTimingModel
from .rates import FluorescenceParams, OpticalPumpParams, lifetime_to_probability

DEEP: dict = {
    "field_mt": 0.7,
    "field_theta_deg": 39.0,
    "field_azimuth_deg": 0.0,
    "zpl_offset_ghz": 7.715,
    "strain_perp_ghz": 1.7,
    "strain_azimuth_deg": 0.0,
    "ple_min_ghz": -2.0,
    "ple_max_ghz": 16.0,
    "ple_points": 2001,
    "t_st0_s": 4.1e-6,
    "t_st1_s": 0.4e-3,
    "t_ts_s": 1.33e-6,
    "t_ion_s": math.inf,
    "f0_cps": 31.7e3,
    "f1_cps": 0.2e3,
    "fluor_loss1": 0.205,
    "fluor_loss6": 0.219,
    "binwidth_s": 10e-9,
    "pop_a": (0.704, 0.134, 0.163),
    "pop_b": (0.148, 0.451, 0.401),
    "pop_c": (0.0, 0.879, 0.121),
    "trace_duration_s": 20e-6,
    "noise_fraction": 0.02,
    "zero_mean_counts": 0.4712,
    "minus_components": ((0.0103, 0.0, 10.0), (1.0, 35.0, 9.0)),
    "count_window_s": 5e-3,
    "charge_error_rows": (
        (10e-3, 0.003, 0.033),
        (1e-3, 0.004, 0.034),
        (100e-6, 0.149, 0.145),
        (50e-6, 0.350, 0.114),
    ),
    "e_mw": 0.056,
    "e_nv0": 0.0,
    "p_plus1": 0.879,
    "p_minus1": 0.121,
    "e0_lumped": 0.018,
    "e1_lumped": 0.054,
    "ss_overhead_s": 850e-6,
    "conv_overhead_s": 1.5e-6,
    "readout_window_s": 250e-9,
    "contrast": 0.3,
    "conv_fsat_cps": 50e3,
    "acceptance_probability": 0.37,
    "include_postselection": False,
    "t_seq_max_s": 10e-3,
    "t_seq_points": 100,
    "sat_fsat_cps": 63e3,
    "sat_isat_mw": 0.51,
    "res_fsat_cps": 58e3,
    "res_isat_mw": 0.74e-3,
    "line_fwhm_ghz": 0.43,
    "line_center_ghz": 7.0,
    "mc_repetitions": 100_000,
    "hist_kind": "gaussian-mixture",
}

SHALLOW: dict = {
    **DEEP,
    "zpl_offset_ghz": 5.436,
    "strain_perp_ghz": 12.6,
    "ple_min_ghz": 4.0,
    "ple_max_ghz": 34.0,
    "t_st0_s": 7.0e-6,
    "t_st1_s": 1.0e-3,
    "t_ts_s": 11.3e-6,
    "t_ion_s": 0.2e-3,
    "f0_cps": 17.5e3,
    "f1_cps": 3.6e3,
    "fluor_loss1": 0.151,
    "fluor_loss6": 0.300,
    "pop_a": (0.704, 0.097, 0.198),
    "pop_b": (0.189, 0.421, 0.389),
    "pop_c": (0.069, 0.700, 0.231),
    "zero_mean_counts": 0.766,
    "minus_components": ((0.017, -46.0, 80.0), (0.015, 8.2, 5.0)),
    "count_window_s": 10e-3,
    "charge_error_rows": ((10e-3, 0.071, 0.0079),),
    "e_mw": 0.051,
    "p_plus1": 0.700,
    "p_minus1": 0.231,
    "e0_lumped": 0.253,
    "e1_lumped": 0.174,
    "acceptance_probability": 0.22,
    "sat_fsat_cps": 44e3,
    "sat_isat_mw": 1.38,
    "res_fsat_cps": 20e3,
    "res_isat_mw": 1.0e-3,
}

PRESETS: dict[str, dict] = {"deep": DEEP, "shallow": SHALLOW}


def preset_named(name: str) -> dict:
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def field_from(cfg: dict) -> FieldVector:
    require(cfg, "field_mt", "field_theta_deg")
    return FieldVector(b_mt=cfg["field_mt"], theta_deg=cfg["field_theta_deg"])


def ground_params_from(cfg: dict) -> GroundSpinParams:
    return GroundSpinParams()


def excited_from(cfg: dict) -> tuple[ExcitedStateParams, StrainField]:
    require(cfg, "zpl_offset_ghz", "strain_perp_ghz")
    params = ExcitedStateParams().with_zpl_offset(cfg["zpl_offset_ghz"])
    strain = StrainField(
        xi_perp_ghz=cfg["strain_perp_ghz"],
        azimuth_deg=cfg.get("strain_azimuth_deg", 0.0),
    )
    return params, strain


def pump_from(cfg: dict) -> OpticalPumpParams:
    require(cfg, "t_st0_s", "t_st1_s", "t_ts_s", "t_ion_s")
    binwidth = cfg.get("binwidth_s", 10e-9)
    return OpticalPumpParams(
        p_st0=lifetime_to_probability(cfg["t_st0_s"], binwidth),
        p_st1=lifetime_to_probability(cfg["t_st1_s"], binwidth),
        p_ts=lifetime_to_probability(cfg["t_ts_s"], binwidth),
        p_ion=lifetime_to_probability(cfg["t_ion_s"], binwidth),
        binwidth_s=binwidth,
    )


def fluor_from(cfg: dict) -> FluorescenceParams:
    require(cfg, "f0_cps", "f1_cps")
    return FluorescenceParams(
        f0_cps=cfg["f0_cps"],
        f1_cps=cfg["f1_cps"],
        fluor_loss1=cfg.get("fluor_loss1", 0.0),
        fluor_loss6=cfg.get("fluor_loss6", 0.0),
    )


def populations_from(cfg: dict) -> dict[str, tuple[float, float, float]]:
    require(cfg, "pop_a", "pop_b", "pop_c")
    pops = {}
    for family in ("a", "b", "c"):
        raw = cfg[f"pop_{family}"]
        total = sum(raw)
        if total <= 0:
            raise ConfigError(f"pop_{family} must have positive total")
        pops[family] = tuple(v / total for v in raw)
    return pops


def count_models_from(cfg: dict) -> tuple[CountModel, CountModel, float]:
    """(NV- model, NV0 model, readout window)."""
    require(cfg, "zero_mean_counts", "minus_components", "count_window_s")
    zero = PoissonModel(cfg["zero_mean_counts"])
    minus = GaussianMixtureModel(components=tuple(cfg["minus_components"]))
    return minus, zero, cfg["count_window_s"]


def budget_from(cfg: dict) -> ProtocolErrorBudget:
    require(cfg, "e_nv0", "p_plus1", "p_minus1", "e_mw", "e0_lumped", "e1_lumped")
    return ProtocolErrorBudget(
        e_nv0=cfg["e_nv0"],
        p_plus1=cfg["p_plus1"],
        p_minus1=cfg["p_minus1"],
        e_mw=cfg["e_mw"],
        e0=cfg["e0_lumped"],
        e1=cfg["e1_lumped"],
    )


def timing_from(cfg: dict) -> SensingTimingModel:
    require(cfg, "conv_fsat_cps")
    return SensingTimingModel(
        f_sat_cps=cfg["conv_fsat_cps"],
        single_shot_overhead_s=cfg.get("ss_overhead_s", 850e-6),
        conventional_rep_overhead_s=cfg.get("conv_overhead_s", 1.5e-6),
        readout_window_s=cfg.get("readout_window_s", 250e-9),
        contrast=cfg.get("contrast", 0.3),
    )


def duration_rows_from(cfg: dict) -> tuple[DurationRow, ...]:
    rows = []
    for readout_s, error_minus, error_zero in cfg.get("charge_error_rows", ()):
        rows.append(
            DurationRow(
                readout_s=readout_s,
                error_minus=error_minus,
                error_zero=error_zero,
                f_charge=1.0 - (error_minus + error_zero) / 2.0,
            )
        )
    return tuple(rows)

"""Flat key=value configuration files.

Format: one `key = value` per line, `#` starts a comment, blank lines are
ignored.  Keys carry SI-unit suffixes (_s, _ghz, _mt, _cps, ...).  Every key
must appear in the registry below; unknown keys are rejected so typos fail
loudly.  Values are typed: floats (inf allowed where physical), ints, bools
(true/false), comma-separated float triples, and semicolon-separated lists
of triples.
"""

from __future__ import annotations

import math
from pathlib import Path

from .errors import ConfigError

# key -> type tag: float | int | bool | str | triple | triples
KNOWN_KEYS: dict[str, str] = {
    # static field (ground-state spectroscopy and excited-state Zeeman)
    "field_mt": "float",
    "field_theta_deg": "float",
    "field_azimuth_deg": "float",
    # excited-state optical model
    "zpl_offset_ghz": "float",
    "strain_perp_ghz": "float",
    "strain_azimuth_deg": "float",
    "ple_min_ghz": "float",
    "ple_max_ghz": "float",
    "ple_points": "int",
    # charge/spin pumping rate model
    "t_st0_s": "float",
    "t_st1_s": "float",
    "t_ts_s": "float",
    "t_ion_s": "float",
    "f0_cps": "float",
    "f1_cps": "float",
    "fluor_loss1": "float",
    "fluor_loss6": "float",
    "binwidth_s": "float",
    "pop_a": "triple",
    "pop_b": "triple",
    "pop_c": "triple",
    "trace_duration_s": "float",
    "noise_fraction": "float",
    # photon-count models (charge readout)
    "zero_mean_counts": "float",
    "minus_components": "triples",
    "count_window_s": "float",
    "charge_error_rows": "triples",
    # protocol error budget
    "e_mw": "float",
    "e_nv0": "float",
    "p_plus1": "float",
    "p_minus1": "float",
    "e0_lumped": "float",
    "e1_lumped": "float",
    # timing / speed-up
    "ss_overhead_s": "float",
    "conv_overhead_s": "float",
    "readout_window_s": "float",
    "contrast": "float",
    "conv_fsat_cps": "float",
    "acceptance_probability": "float",
    "include_postselection": "bool",
    "t_seq_max_s": "float",
    "t_seq_points": "int",
    # saturation and lineshape reference values
    "sat_fsat_cps": "float",
    "sat_isat_mw": "float",
    "res_fsat_cps": "float",
    "res_isat_mw": "float",
    "line_fwhm_ghz": "float",
    "line_center_ghz": "float",
    # Monte Carlo
    "mc_repetitions": "int",
    "hist_kind": "str",
}

_VALID_HIST_KINDS = ("poisson", "gaussian-mixture")


def _parse_float(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from exc
    if math.isnan(value):
        raise ConfigError(f"{key}: NaN is not a valid value")
    return value


def _parse_triple(key: str, raw: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected three comma-separated numbers, got {raw!r}")
    return tuple(_parse_float(key, p) for p in parts)  # type: ignore[return-value]


def _parse_value(key: str, raw: str):
    tag = KNOWN_KEYS[key]
    if tag == "float":
        return _parse_float(key, raw)
    if tag == "int":
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from exc
    if tag == "bool":
        lowered = raw.lower()
        if lowered in ("true", "yes", "1"):
            return True
        if lowered in ("false", "no", "0"):
            return False
        raise ConfigError(f"{key}: expected true/false, got {raw!r}")
    if tag == "triple":
        return _parse_triple(key, raw)
    if tag == "triples":
        groups = [g.strip() for g in raw.split(";") if g.strip()]
        if not groups:
            raise ConfigError(f"{key}: expected at least one triple")
        return tuple(_parse_triple(key, g) for g in groups)
    if key == "hist_kind":
        if raw not in _VALID_HIST_KINDS:
            raise ConfigError(f"hist_kind must be one of {_VALID_HIST_KINDS}, got {raw!r}")
    return raw


def parse_config_text(text: str) -> dict:
    """Parse config-file text into a typed dict; reject unknown keys."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not raw:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = _parse_value(key, raw)
    return values


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def resolve_config(preset: dict | None, config_path: str | Path | None) -> dict:
    """Overlay an optional config file on top of an optional preset."""
    merged: dict = dict(preset) if preset else {}
    if config_path is not None:
        merged.update(load_config(config_path))
    return merged


def require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")

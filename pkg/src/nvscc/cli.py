"""Command-line workbench.

Subcommands: ple | odmr-infer | pump-sim | pump-fit | hist-fit | threshold |
protocol | speedup | mc.  Shared flags: --preset {deep,shallow} selects a
frozen scenario, --config PATH overlays a flat key=value file, --seed N
fixes all randomness, --out DIR picks the output directory (default: the
NVSCC_OUT_DIR environment variable, else the working directory).  Ingestion
commands (odmr-infer, pump-fit, hist-fit) also accept --csv PATH to analyze
an existing data file instead of synthesizing one from the scenario.

Every command writes CSV data files plus a plain-text summary (printed to
stdout and saved next to the CSVs) and renders a PNG figure per figure-like
output.  Outputs are a pure function of (command, config, seed, inputs);
the run report on stderr additionally carries the wall-clock time.

Exit codes: 0 success; 2 configuration errors (bad flags, unknown keys,
invalid values); 3 fit non-convergence or underdetermined inversions;
4 malformed input data files.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io_csv, plots, presets
from .config import require, resolve_config
from .counts import (
    charge_fidelity,
    fit_count_model,
    optimize_threshold,
    sample_histogram,
    spawn_seeds,
)
from .curvefits import fit_saturation
from .errors import (
    ConfigError,
    DataFormatError,
    FitNonConvergenceError,
    UnderdeterminedError,
)
from .excited_state import (
    build_excited_hamiltonian,
    diagonalize,
    synth_ple_spectrum,
    transition_table,
)
from .ground_spin import GroundSpinParams, OdmrLine, OdmrLineSet, infer_field, odmr_transitions
from .protocol import (
    conventional_snr,
    end_to_end_mc,
    fidelity_and_snr,
    fidelity_report,
    forward_error_model,
    measured_fidelity,
    repetitions_for_unit_snr,
    speedup_curve,
)
from .ratefit import global_fit, synth_bundle

COMMANDS = (
    "ple",
    "odmr-infer",
    "pump-sim",
    "pump-fit",
    "hist-fit",
    "threshold",
    "protocol",
    "speedup",
    "mc",
)
_INGESTION_COMMANDS = ("odmr-infer", "pump-fit", "hist-fit")

ODMR_LINES_HEADER = ("frequency_hz", "label", "amplitude")


@dataclass
class RunReport:
    """Provenance of one CLI invocation; printed to stderr, never to the
    output files, so outputs stay byte-identical across reruns."""

    command: str
    input_digest: str
    output_files: list[str] = field(default_factory=list)
    seed: int = 0
    wall_clock_s: float = 0.0
    diagnostics: list[str] = field(default_factory=list)

    def print(self, stream) -> None:
        print(f"run: {self.command}", file=stream)
        print(f"input digest: {self.input_digest}", file=stream)
        print(f"seed: {self.seed}", file=stream)
        for note in self.diagnostics:
            print(f"note: {note}", file=stream)
        for path in self.output_files:
            print(f"wrote: {path}", file=stream)
        print(f"wall clock: {self.wall_clock_s:.3f} s", file=stream)


def _digest(command: str, cfg: dict, input_paths: list[Path]) -> str:
    h = hashlib.sha256()
    h.update(command.encode())
    for key in sorted(cfg):
        h.update(f"{key}={cfg[key]!r}\n".encode())
    for path in input_paths:
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


def _percent(value: float, digits: int = 1) -> str:
    return f"{100.0 * value:.{digits}f}%"


class _Workspace:
    """Collects output files and summary lines for one command."""

    def __init__(self, command: str, out_dir: Path, report: RunReport):
        self.command = command
        self.out_dir = out_dir
        self.report = report
        self.summary_lines: list[str] = []

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def add_output(self, path: Path) -> Path:
        self.report.output_files.append(str(path))
        return path

    def say(self, line: str) -> None:
        self.summary_lines.append(line)

    def finish(self) -> None:
        stem = self.command.replace("-", "_")
        summary_path = self.path(f"{stem}_summary.txt")
        summary_path.write_text("\n".join(self.summary_lines) + "\n")
        self.add_output(summary_path)
        print("\n".join(self.summary_lines))


def _cmd_ple(cfg: dict, args, ws: _Workspace) -> None:
    params, strain = presets.excited_from(cfg)
    fieldvec = presets.field_from(cfg)
    ham = build_excited_hamiltonian(
        params, strain, fieldvec, cfg.get("field_azimuth_deg", 0.0)
    )
    table = transition_table(diagonalize(ham), params)
    lo, hi = cfg.get("ple_min_ghz", -5.0), cfg.get("ple_max_ghz", 20.0)
    if not hi > lo:
        raise ConfigError("ple_max_ghz must exceed ple_min_ghz")
    grid = np.linspace(lo, hi, int(cfg.get("ple_points", 2001)))
    spectrum = synth_ple_spectrum(table, grid)
    ws.add_output(io_csv.write_rows_csv(ws.path("ple_spectrum.csv"), ("detuning_ghz", "intensity"), zip(grid, spectrum)))
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("ple_lines.csv"),
            ("ground_index", "excited_index", "energy_ghz", "strength", "spin_character"),
            [
                (r.ground_index, r.excited_index, r.energy_ghz, r.strength, r.spin_character)
                for r in table.rows
            ],
        )
    )
    ws.add_output(
        plots.plot_spectrum(
            ws.path("ple.png"), grid, spectrum,
            lines=[(r.energy_ghz, r.strength) for r in table.rows if r.strength > 1e-6],
        )
    )
    strongest = table.strongest_zero_transitions(2)
    ws.say(f"strain: perpendicular {cfg['strain_perp_ghz']} GHz")
    for row in strongest:
        ws.say(
            f"spin-0 line at {row.energy_ghz:.2f} GHz detuning (strength {row.strength:.3f})"
        )
    ws.say(f"spectrum grid: {len(grid)} points in [{lo}, {hi}] GHz")


def _read_odmr_lines_csv(path: Path) -> OdmrLineSet:
    rows = io_csv._read_rows(path, ODMR_LINES_HEADER)
    lines = []
    for lineno, cells in rows:
        if len(cells) != 3:
            raise DataFormatError(f"{path} line {lineno}: expected 3 columns")
        freq = io_csv._parse_float_cell(path, lineno, "frequency_hz", cells[0])
        amp = io_csv._parse_float_cell(path, lineno, "amplitude", cells[2])
        if freq <= 0:
            raise DataFormatError(f"{path} line {lineno}: frequency must be positive")
        lines.append(OdmrLine(frequency_hz=freq, label=cells[1], amplitude=amp))
    try:
        return OdmrLineSet(lines=tuple(sorted(lines, key=lambda l: l.frequency_hz)))
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def _cmd_odmr_infer(cfg: dict, args, ws: _Workspace) -> None:
    params = GroundSpinParams()
    if args.csv:
        lines = _read_odmr_lines_csv(Path(args.csv))
        ws.report.diagnostics.append(f"ingested {len(lines.lines)} lines from {args.csv}")
        truth = None
    else:
        truth = presets.field_from(cfg)
        lines = odmr_transitions(params, truth)
        ws.say(
            f"self-generated {len(lines.lines)} lines at B={truth.b_mt} mT, "
            f"theta={truth.theta_deg} deg"
        )
    inference = infer_field(lines, params)
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("odmr_lines.csv"),
            ODMR_LINES_HEADER,
            [(l.frequency_hz, l.label, l.amplitude) for l in lines.lines],
        )
    )
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("odmr_inference.csv"),
            (
                "b_mt",
                "theta_deg",
                "b_sigma_mt",
                "theta_sigma_deg",
                "theta_defined",
                "rms_residual_hz",
            ),
            [
                (
                    inference.field.b_mt,
                    inference.field.theta_deg,
                    inference.b_sigma_mt,
                    inference.theta_sigma_deg,
                    inference.theta_defined,
                    inference.rms_residual_hz,
                )
            ],
        )
    )
    ws.add_output(plots.plot_odmr_lines(ws.path("odmr.png"), lines.frequencies_hz))
    ws.say(
        f"inferred B = {inference.field.b_mt:.4f} mT +- {inference.b_sigma_mt:.4f}, "
        f"theta = {inference.field.theta_deg:.2f} deg +- {inference.theta_sigma_deg:.2f}"
    )
    if truth is not None:
        db = abs(inference.field.b_mt - truth.b_mt) / truth.b_mt if truth.b_mt else 0.0
        ws.say(f"deviation from configured field: {_percent(db, 2)} in B")
    if not inference.theta_defined:
        ws.say("field magnitude consistent with zero; angle undefined")


def _cmd_pump_sim(cfg: dict, args, ws: _Workspace) -> None:
    require(cfg, "e_mw")
    pump = presets.pump_from(cfg)
    fluor = presets.fluor_from(cfg)
    pops = presets.populations_from(cfg)
    records = synth_bundle(
        pump,
        fluor,
        cfg["e_mw"],
        pops,
        duration_s=cfg.get("trace_duration_s", 20e-6),
        noise_fraction=cfg.get("noise_fraction", 0.02),
        seed=args.seed,
    )
    ws.add_output(io_csv.write_trace_bundle_csv(ws.path("pump_traces.csv"), records))
    ws.add_output(plots.plot_trace_bundle(ws.path("pump_sim.png"), records))
    binwidth = pump.binwidth_s
    trace_a = next(r for r in records if r.family == "a" and r.variant == "none")
    photons = float(np.sum(np.clip(trace_a.rate_cps, 0.0, None)) * binwidth)
    ws.say(f"bundle: {len(records)} traces, {len(trace_a.time_s)} bins each")
    ws.say(
        f"photon integral, family a, no pulse: {photons:.3f} "
        f"over {trace_a.time_s[-1] + binwidth:.2e} s"
    )
    ws.say(f"noise fraction: {cfg.get('noise_fraction', 0.02)}")


def _fit_result_rows(result) -> list[tuple]:
    rows: list[tuple] = []
    pump, fluor = result.pump, result.fluor
    for name, value in (
        ("p_st0", pump.p_st0),
        ("p_st1", pump.p_st1),
        ("p_ts", pump.p_ts),
        ("p_ion", pump.p_ion),
        ("f0_cps", fluor.f0_cps),
        ("f1_cps", fluor.f1_cps),
        ("e_mw", result.e_mw),
        ("fluor_loss1", fluor.fluor_loss1),
        ("fluor_loss6", fluor.fluor_loss6),
    ):
        rows.append((name, value, result.sigmas.get(name, float("nan"))))
    for name, value in result.lifetimes_s.items():
        rows.append((name, value, result.lifetime_sigmas_s.get(name, float("nan"))))
    for family, pops in sorted(result.populations.items()):
        for label, key, v in zip(("n0", "n_plus", "n_minus"), (None, "n1", "n2"), pops):
            sigma = result.sigmas.get(f"{key}_{family}", float("nan")) if key else float("nan")
            rows.append((f"{label}_{family}", v, sigma))
        rows.append((f"f_spin_{family}", result.f_spin[family], float("nan")))
    rows.append(("r_squared", result.r_squared, float("nan")))
    return rows


def _cmd_pump_fit(cfg: dict, args, ws: _Workspace) -> None:
    if args.csv:
        records = io_csv.read_trace_bundle_csv(Path(args.csv))
        ws.report.diagnostics.append(
            f"ingested {len(records)} traces, {sum(len(r.time_s) for r in records)} rows"
        )
    else:
        require(cfg, "e_mw")
        pump = presets.pump_from(cfg)
        fluor = presets.fluor_from(cfg)
        pops = presets.populations_from(cfg)
        records = synth_bundle(
            pump,
            fluor,
            cfg["e_mw"],
            pops,
            duration_s=cfg.get("trace_duration_s", 20e-6),
            noise_fraction=cfg.get("noise_fraction", 0.02),
            seed=args.seed,
        )
        ws.say("fitting a self-generated bundle (pass --csv to ingest one)")
    result = global_fit(list(records))
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("pump_fit.csv"), ("parameter", "value", "sigma"), _fit_result_rows(result)
        )
    )
    fits = None
    lengths = {len(r.time_s) for r in records}
    if len(lengths) == 1:
        duration = float(records[0].time_s[-1] - records[0].time_s[0]) + result.pump.binwidth_s
        overlay_pops = {}
        for family, pops in result.populations.items():
            clipped = [max(0.0, v) for v in pops]  # fit may land a hair outside
            total = sum(clipped)
            overlay_pops[family] = tuple(v / total for v in clipped)
        clean = synth_bundle(
            result.pump,
            result.fluor,
            result.e_mw,
            overlay_pops,
            duration_s=duration,
            noise_fraction=0.0,
        )
        fits = {(r.family, r.variant): (r.time_s, r.rate_cps) for r in clean}
    ws.add_output(plots.plot_trace_bundle(ws.path("pump_fit.png"), records, fits))
    ws.say(f"global fit R^2 = {result.r_squared:.4f}")
    for name in ("t_st0_s", "t_st1_s", "t_ts_s", "t_ion_s"):
        ws.say(f"{name} = {result.lifetimes_s[name]:.3e} s")
    for family in sorted(result.f_spin):
        ws.say(f"family {family}: spin-init fidelity {_percent(result.f_spin[family])}")


def _describe_fit(label: str, fit) -> list[str]:
    lines = [f"{label}: R^2 = {fit.r_squared:.4f}"]
    model = fit.model
    if hasattr(model, "lam"):
        lines.append(f"{label}: Poisson mean {model.lam:.4f} counts")
    else:
        for i, (amp, mean, sd) in enumerate(model.components):
            flag = " (degenerate)" if i in fit.degenerate_components else ""
            lines.append(
                f"{label}: component {i}: amplitude {amp:.4f}, mean {mean:.2f}, sd {sd:.2f}{flag}"
            )
    return lines


def _cmd_hist_fit(cfg: dict, args, ws: _Workspace) -> None:
    if args.csv:
        hist = io_csv.read_histogram_csv(Path(args.csv))
        ws.report.diagnostics.append(
            f"ingested histogram: {hist.total} repetitions, max count {hist.max_count()}"
        )
        fit = fit_count_model(hist, cfg.get("hist_kind", "poisson"))
        ws.add_output(
            io_csv.write_rows_csv(
                ws.path("hist_fit.csv"),
                ("role", "kind", "r_squared", "parameters"),
                [("ingested", cfg.get("hist_kind", "poisson"), fit.r_squared, _model_params_str(fit.model))],
            )
        )
        ws.add_output(
            plots.plot_histograms(
                ws.path("hist_fit.png"), [("data", hist)], [("fit", fit.model)]
            )
        )
        for line in _describe_fit("fit", fit):
            ws.say(line)
        return
    minus, zero, window = presets.count_models_from(cfg)
    reps = int(cfg.get("mc_repetitions", 100_000))
    seed_minus, seed_zero = spawn_seeds(args.seed, 2)
    hist_minus = sample_histogram(minus, reps, seed_minus, window)
    hist_zero = sample_histogram(zero, reps, seed_zero, window)
    fit_minus = fit_count_model(hist_minus, "gaussian-mixture")
    fit_zero = fit_count_model(hist_zero, "poisson")
    ws.add_output(io_csv.write_histogram_csv(ws.path("hist_minus.csv"), hist_minus))
    ws.add_output(io_csv.write_histogram_csv(ws.path("hist_zero.csv"), hist_zero))
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("hist_fit.csv"),
            ("role", "kind", "r_squared", "parameters"),
            [
                ("nv_minus", "gaussian-mixture", fit_minus.r_squared, _model_params_str(fit_minus.model)),
                ("nv_zero", "poisson", fit_zero.r_squared, _model_params_str(fit_zero.model)),
            ],
        )
    )
    ws.add_output(
        plots.plot_histograms(
            ws.path("hist_fit.png"),
            [("NV-", hist_minus), ("NV0", hist_zero)],
            [("NV-", fit_minus.model), ("NV0", fit_zero.model)],
        )
    )
    ws.say(f"sampled {reps} repetitions per charge state, window {window} s")
    for line in _describe_fit("NV-", fit_minus) + _describe_fit("NV0", fit_zero):
        ws.say(line)


def _model_params_str(model) -> str:
    if hasattr(model, "lam"):
        return f"lam={model.lam!r}"
    return ";".join(f"{a!r},{m!r},{s!r}" for a, m, s in model.components)


def _cmd_threshold(cfg: dict, args, ws: _Workspace) -> None:
    minus, zero, window = presets.count_models_from(cfg)
    res = optimize_threshold(minus, zero)
    f_charge = charge_fidelity(res.error_minus, res.error_zero)
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("threshold_report.csv"),
            ("threshold", "error_minus", "error_zero", "f_charge"),
            [(res.threshold, res.error_minus, res.error_zero, f_charge)],
        )
    )
    rows = presets.duration_rows_from(cfg)
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("charge_table.csv"),
            ("readout_s", "error_minus", "error_zero", "f_charge"),
            [(r.readout_s, r.error_minus, r.error_zero, r.f_charge) for r in rows],
        )
    )
    ws.add_output(
        plots.plot_histograms(
            ws.path("threshold.png"),
            [],
            [("NV-", minus), ("NV0", zero)],
            threshold=res.threshold,
        )
    )
    ws.say(f"optimal threshold: {res.threshold} photons (counts >= threshold read NV-)")
    ws.say(f"NV- misassignment: {_percent(res.error_minus, 2)}")
    ws.say(f"NV0 misassignment: {_percent(res.error_zero, 2)}")
    ws.say(f"charge fidelity: {_percent(f_charge, 2)}")
    for r in rows:
        ws.say(
            f"readout {r.readout_s:.0e} s: F_charge {_percent(r.f_charge)} "
            f"(errors {_percent(r.error_minus)}, {_percent(r.error_zero)})"
        )


def _cmd_protocol(cfg: dict, args, ws: _Workspace) -> None:
    budget = presets.budget_from(cfg)
    report = fidelity_report(budget, presets.duration_rows_from(cfg))
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("protocol_report.csv"),
            ("quantity", "value"),
            [
                ("E0_meas (%)", 100 * report.e0_meas),
                ("E1_meas (%)", 100 * report.e1_meas),
                ("F_meas (%)", 100 * report.f_meas),
                ("E0 (%)", 100 * report.e0),
                ("E1 (%)", 100 * report.e1),
                ("F (%)", 100 * report.f_corrected),
                ("SNR", report.snr_single_shot),
            ],
        )
    )
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("protocol_charge_table.csv"),
            ("readout_s", "error_minus", "error_zero", "f_charge"),
            [
                (r.readout_s, r.error_minus, r.error_zero, r.f_charge)
                for r in report.duration_rows
            ],
        )
    )
    ws.say(f"E0_meas {_percent(report.e0_meas)}, E1_meas {_percent(report.e1_meas)}")
    ws.say(f"F_meas {_percent(report.f_meas)}")
    ws.say(f"F {_percent(report.f_corrected)}")
    ws.say(f"SNR {report.snr_single_shot:.2f}")


def _cmd_speedup(cfg: dict, args, ws: _Workspace) -> None:
    require(cfg, "e0_lumped", "e1_lumped")
    timing = presets.timing_from(cfg)
    _, snr = fidelity_and_snr(cfg["e0_lumped"], cfg["e1_lumped"])
    acceptance = (
        cfg.get("acceptance_probability", 1.0)
        if cfg.get("include_postselection", False)
        else 1.0
    )
    grid = np.linspace(0.0, cfg.get("t_seq_max_s", 10e-3), int(cfg.get("t_seq_points", 100)))
    curve = speedup_curve(grid, timing, snr, acceptance_probability=acceptance)
    ws.add_output(
        io_csv.write_rows_csv(ws.path("speedup.csv"), ("t_seq_s", "speedup"), zip(grid, curve))
    )
    ws.add_output(plots.plot_speedup(ws.path("speedup.png"), grid, curve))
    snr_conv = conventional_snr(timing)
    ws.say(f"single-shot SNR {snr:.2f} -> {repetitions_for_unit_snr(snr)} repetition(s)")
    ws.say(
        f"conventional SNR {snr_conv:.4f} at {timing.f_sat_cps:.0f} cps -> "
        f"{repetitions_for_unit_snr(snr_conv)} repetitions"
    )
    ws.say(f"speed-up at zero sensing length: {curve[0]:.2f}")
    ws.say(f"speed-up at t_seq = {grid[-1]:.1e} s: {curve[-1]:.0f}")
    if acceptance < 1.0:
        ws.say(f"postselection acceptance {acceptance} included in single-shot time")


def _cmd_mc(cfg: dict, args, ws: _Workspace) -> None:
    budget = presets.budget_from(cfg)
    minus, zero, window = presets.count_models_from(cfg)
    reps = int(cfg.get("mc_repetitions", 100_000))
    res = end_to_end_mc(budget, minus, zero, reps, args.seed, window_s=window)
    e0_analytic, e1_analytic = forward_error_model(budget)
    f_analytic = measured_fidelity(e0_analytic, e1_analytic)
    ws.add_output(
        io_csv.write_rows_csv(
            ws.path("mc_summary.csv"),
            ("quantity", "value"),
            [
                ("repetitions", res.repetitions),
                ("threshold", res.threshold),
                ("E0_meas (%)", 100 * res.e0_meas),
                ("E1_meas (%)", 100 * res.e1_meas),
                ("F_meas (%)", 100 * res.f_meas),
                ("F_meas sigma (pp)", 100 * res.f_sigma),
                ("analytic F_meas (%)", 100 * f_analytic),
            ],
        )
    )
    ws.add_output(io_csv.write_histogram_csv(ws.path("mc_hist_zero_seq.csv"), res.histogram_zero_seq))
    ws.add_output(io_csv.write_histogram_csv(ws.path("mc_hist_one_seq.csv"), res.histogram_one_seq))
    ws.add_output(
        plots.plot_histograms(
            ws.path("mc.png"),
            [("spin-0 sequence", res.histogram_zero_seq), ("spin-1 sequence", res.histogram_one_seq)],
            threshold=res.threshold,
        )
    )
    ws.say(f"{res.repetitions} repetitions per sequence, threshold {res.threshold}")
    ws.say(f"F_meas {_percent(res.f_meas)} +- {_percent(res.f_sigma, 2)}")
    ws.say(f"analytic F_meas {_percent(f_analytic)}")
    ws.say(
        f"deviation {abs(res.f_meas - f_analytic) / res.f_sigma:.2f} sigma from the path model"
    )


_DISPATCH = {
    "ple": _cmd_ple,
    "odmr-infer": _cmd_odmr_infer,
    "pump-sim": _cmd_pump_sim,
    "pump-fit": _cmd_pump_fit,
    "hist-fit": _cmd_hist_fit,
    "threshold": _cmd_threshold,
    "protocol": _cmd_protocol,
    "speedup": _cmd_speedup,
    "mc": _cmd_mc,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nvscc", description="NV spin-to-charge readout workbench"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", help="flat key=value config overlay")
        p.add_argument(
            "--preset", choices=sorted(presets.PRESETS), help="named scenario to start from"
        )
        p.add_argument("--seed", type=int, default=0, metavar="N")
        p.add_argument("--out", metavar="DIR", help="output directory")
        if name in _INGESTION_COMMANDS:
            p.add_argument("--csv", metavar="PATH", help="input data CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "csv"):
        args.csv = None
    started = time.perf_counter()
    try:
        preset = presets.preset_named(args.preset) if args.preset else None
        cfg = resolve_config(preset, args.config)
        out_dir = Path(args.out or os.environ.get("NVSCC_OUT_DIR", "."))
        out_dir.mkdir(parents=True, exist_ok=True)
        input_paths = [Path(p) for p in (args.config, args.csv) if p]
        for path in input_paths:
            if not path.exists():
                raise ConfigError(f"input file does not exist: {path}")
        report = RunReport(
            command=args.command,
            input_digest=_digest(args.command, cfg, input_paths),
            seed=args.seed,
        )
        ws = _Workspace(args.command, out_dir, report)
        _DISPATCH[args.command](cfg, args, ws)
        ws.finish()
        report.wall_clock_s = time.perf_counter() - started
        report.print(sys.stderr)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (FitNonConvergenceError, UnderdeterminedError) as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return 3
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

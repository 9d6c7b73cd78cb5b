"""Figure rendering for the CLI report path.

Every CSV the CLI emits stays the primary, plot-ready data file; these
helpers render a PNG next to it for quick visual inspection.  Rendering is
deterministic: fixed figure sizes, no timestamps in metadata.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .counts import CountHistogram, CountModel
from .ratefit import TraceRecord

_META = {"Software": "nvscc"}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=110, metadata=_META)
    plt.close(fig)
    return path


def plot_spectrum(path: str | Path, detuning_ghz, intensity, lines=None) -> Path:
    """Spectrum with optional stick positions underneath."""
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(detuning_ghz, intensity, lw=1.2)
    if lines:
        for energy, strength in lines:
            ax.axvline(energy, color="0.7", lw=0.6, zorder=0)
    ax.set_xlabel("detuning (GHz)")
    ax.set_ylabel("intensity (arb.)")
    fig.tight_layout()
    return _save(fig, path)


def plot_odmr_lines(path: str | Path, frequencies_hz) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 2.8))
    freqs = np.asarray(frequencies_hz, dtype=float) / 1e9
    ax.vlines(freqs, 0, 1, lw=1.5)
    ax.set_ylim(0, 1.2)
    ax.set_yticks([])
    ax.set_xlabel("transition frequency (GHz)")
    fig.tight_layout()
    return _save(fig, path)


def plot_trace_bundle(path: str | Path, records: Sequence[TraceRecord], fits=None) -> Path:
    """One panel per initialization family, variants overlaid; optional
    fitted curves as dashed lines (dict keyed like the records)."""
    families = sorted({r.family for r in records})
    fig, axes = plt.subplots(1, len(families), figsize=(3.4 * len(families), 3.2), sharey=True)
    if len(families) == 1:
        axes = [axes]
    for ax, family in zip(axes, families):
        for record in records:
            if record.family != family:
                continue
            ax.plot(record.time_s * 1e6, record.rate_cps / 1e3, lw=0.9, label=record.variant)
            if fits and (record.family, record.variant) in fits:
                t, y = fits[(record.family, record.variant)]
                ax.plot(t * 1e6, y / 1e3, "--", lw=0.9, color="black")
        ax.set_title(f"family {family}")
        ax.set_xlabel("time (us)")
    axes[0].set_ylabel("rate (kcps)")
    axes[-1].legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, path)


def plot_histograms(
    path: str | Path,
    hists: Sequence[tuple[str, CountHistogram]],
    models: Sequence[tuple[str, CountModel]] = (),
    threshold: int | None = None,
) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for label, hist in hists:
        ks = np.array(sorted(hist.counts))
        freq = np.array([hist.counts[k] / hist.total for k in ks])
        ax.bar(ks, 100 * freq, width=0.8, alpha=0.45, label=label)
    grid = None
    for label, model in models:
        grid = np.arange(model.support_max() + 1)
        ax.plot(grid, 100 * np.asarray(model.pmf(grid)), lw=1.2, label=f"{label} model")
    if threshold is not None:
        ax.axvline(threshold - 0.5, color="red", lw=1.0, ls=":", label=f"threshold {threshold}")
    if grid is not None:
        ax.set_xlim(-1, min(grid.max(), 80))
    ax.set_xlabel("photon count")
    ax.set_ylabel("events (%)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_speedup(path: str | Path, t_seq_s, speedup) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(np.asarray(t_seq_s) * 1e3, speedup, lw=1.2)
    ax.set_xlabel("sensing sequence length (ms)")
    ax.set_ylabel("speed-up")
    ax.set_yscale("log")
    fig.tight_layout()
    return _save(fig, path)


def plot_saturation(path: str | Path, power_mw, rate_cps, fit_curve=None) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(power_mw, np.asarray(rate_cps) / 1e3, "o", ms=4)
    if fit_curve is not None:
        px, py = fit_curve
        ax.plot(px, np.asarray(py) / 1e3, lw=1.1)
    ax.set_xlabel("power (mW)")
    ax.set_ylabel("rate (kcps)")
    fig.tight_layout()
    return _save(fig, path)

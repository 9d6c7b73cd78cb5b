"""End-to-end readout protocol: error propagation, fidelity, SNR, speed-up.

The protocol maps spin to charge: spin |0> is meant to ionize (ending as
NV0, below the count threshold) while spin |+-1> is meant to survive as
NV-.  A measurement of the |0> branch applies one pi pulse on the
|+1> <-> |0> transition after spin init; the |+-1> branch applies none.
forward_error_model sums the success/failure paths of charge init, spin
init, the pi pulse, and the conversion step into the two measured error
probabilities; invert_error_model solves the same linear system backwards.

Fidelity convention: F = 1 - (E0 + E1) / 2, adopted because it reproduces
the reported fidelities from the corresponding error pairs.

Monte Carlo uses numpy default_rng (PCG64); parallel work splits seeds via
SeedSequence.spawn (counts.spawn_seeds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counts import ChargeDiscriminator, CountHistogram, CountModel, optimize_threshold
from .errors import ConfigError, UnderdeterminedError

#: per-repetition wall time of the single-shot protocol; a tighter packing
#: of the same pulses gives the compact variant
SINGLE_SHOT_OVERHEAD_S = 850e-6
SINGLE_SHOT_OVERHEAD_COMPACT_S = 730e-6


def _check_prob(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0) or not math.isfinite(value):
        raise ConfigError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class ProtocolErrorBudget:
    """Probabilities entering the multi-step readout path model.

    e_nv0: residual NV0 fraction after charge init; p_plus1/p_minus1: spin
    populations after spin init; e_mw: pi-pulse error; e0: probability that
    spin |0> fails to ionize; e1: probability that spin |+-1> ionizes.
    """

    e_nv0: float
    p_plus1: float
    p_minus1: float
    e_mw: float
    e0: float
    e1: float

    def __post_init__(self) -> None:
        for name in ("e_nv0", "p_plus1", "p_minus1", "e_mw", "e0", "e1"):
            _check_prob(name, getattr(self, name))
        if self.p_plus1 + self.p_minus1 > 1.0 + 1e-9:
            raise ConfigError("p_plus1 + p_minus1 must not exceed 1")

    @property
    def p_zero(self) -> float:
        return max(1.0 - self.p_plus1 - self.p_minus1, 0.0)


def _pulse_weights(budget: ProtocolErrorBudget, q: float) -> tuple[float, float]:
    """Populations outside/inside |0> after the pi pulse with flip prob q."""
    alpha = budget.p_minus1 + budget.p_plus1 * (1.0 - q) + budget.p_zero * q
    beta = budget.p_plus1 * q + budget.p_zero * (1.0 - q)
    return alpha, beta


def forward_error_model(
    budget: ProtocolErrorBudget, mw_flip_prob: float | None = None
) -> tuple[float, float]:
    """Propagate the budget to the two measured error probabilities.

    mw_flip_prob generalizes the pi pulse of the |0> sequence to an
    arbitrary rotation: q = sin^2(theta/2), default 1 - e_mw.  Sweeping q
    traces the fraction of above-threshold outcomes over a Rabi cycle.
    """
    q = 1.0 - budget.e_mw if mw_flip_prob is None else mw_flip_prob
    _check_prob("mw_flip_prob", q)
    alpha, beta = _pulse_weights(budget, q)
    keep = 1.0 - budget.e_nv0
    e0_meas = keep * (alpha * (1.0 - budget.e1) + beta * budget.e0)
    e1_meas = (
        keep
        * ((budget.p_plus1 + budget.p_minus1) * budget.e1 + budget.p_zero * (1.0 - budget.e0))
        + budget.e_nv0
    )
    return e0_meas, e1_meas


def invert_error_model(
    e0_meas: float, e1_meas: float, budget: ProtocolErrorBudget
) -> tuple[float, float]:
    """Solve the path model for the conversion errors (e0, e1).

    Only the init and pulse fields of the budget are used; its e0/e1 are
    placeholders.  Raises when the 2x2 system is singular.
    """
    _check_prob("e0_meas", e0_meas)
    _check_prob("e1_meas", e1_meas)
    keep = 1.0 - budget.e_nv0
    if keep <= 1e-12:
        raise UnderdeterminedError("charge init never succeeds; conversion errors unobservable")
    q = 1.0 - budget.e_mw
    alpha, beta = _pulse_weights(budget, q)
    p0 = budget.p_zero
    # [beta, -alpha; -p0, 1-p0] @ [e0, e1] = rhs
    det = beta * (1.0 - p0) - alpha * p0
    if abs(det) < 1e-12:
        raise UnderdeterminedError("singular path model; conversion errors not identifiable")
    rhs0 = e0_meas / keep - alpha
    rhs1 = (e1_meas - budget.e_nv0) / keep - p0
    e0 = ((1.0 - p0) * rhs0 + alpha * rhs1) / det
    e1 = (p0 * rhs0 + beta * rhs1) / det
    return e0, e1


def measured_fidelity(e0_meas: float, e1_meas: float) -> float:
    return 1.0 - (e0_meas + e1_meas) / 2.0


def fidelity_and_snr(e0: float, e1: float) -> tuple[float, float]:
    """Fidelity and single-shot SNR of a binary readout with the given
    per-state error probabilities; zero errors give an infinite SNR."""
    _check_prob("e0", e0)
    _check_prob("e1", e1)
    fidelity = 1.0 - (e0 + e1) / 2.0
    variance = (1.0 - e1) * e1 + (1.0 - e0) * e0
    if variance == 0.0:
        return fidelity, math.inf
    snr = (1.0 - (e0 + e1)) / math.sqrt(variance)
    return fidelity, snr


@dataclass(frozen=True)
class DurationRow:
    """Charge-discrimination quality for one readout duration."""

    readout_s: float
    error_minus: float
    error_zero: float
    f_charge: float


@dataclass(frozen=True)
class FidelityReport:
    e0_meas: float
    e1_meas: float
    f_meas: float
    e0: float
    e1: float
    f_corrected: float
    snr_single_shot: float
    duration_rows: tuple[DurationRow, ...] = ()

    def __post_init__(self) -> None:
        for name in ("f_meas", "f_corrected"):
            _check_prob(name, getattr(self, name))
        if not (self.snr_single_shot >= 0.0):
            raise ConfigError("snr must be >= 0 (or infinity)")


def fidelity_report(
    budget: ProtocolErrorBudget, duration_rows: tuple[DurationRow, ...] = ()
) -> FidelityReport:
    """Forward-propagate a budget and summarize measured and corrected figures."""
    e0_meas, e1_meas = forward_error_model(budget)
    f_corr, snr = fidelity_and_snr(budget.e0, budget.e1)
    return FidelityReport(
        e0_meas=e0_meas,
        e1_meas=e1_meas,
        f_meas=measured_fidelity(e0_meas, e1_meas),
        e0=budget.e0,
        e1=budget.e1,
        f_corrected=f_corr,
        snr_single_shot=snr,
        duration_rows=duration_rows,
    )


@dataclass(frozen=True)
class SensingTimingModel:
    """Wall-clock bookkeeping for comparing readout strategies."""

    f_sat_cps: float
    single_shot_overhead_s: float = SINGLE_SHOT_OVERHEAD_S
    conventional_rep_overhead_s: float = 1.5e-6
    readout_window_s: float = 250e-9
    contrast: float = 0.3

    def __post_init__(self) -> None:
        for name in (
            "f_sat_cps",
            "single_shot_overhead_s",
            "conventional_rep_overhead_s",
            "readout_window_s",
            "contrast",
        ):
            if not (getattr(self, name) > 0) or not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be positive and finite")
        if self.contrast > 1.0:
            raise ConfigError("contrast must not exceed 1")


def conventional_snr(timing: SensingTimingModel) -> float:
    """Per-repetition SNR of counting within the readout window: the bright
    state collects n photons, the dark state (1 - contrast) * n."""
    n_bright = timing.f_sat_cps * timing.readout_window_s
    n_dark = (1.0 - timing.contrast) * n_bright
    if n_bright == 0.0:
        return 0.0
    return (n_bright - n_dark) / math.sqrt(n_bright + n_dark)


def repetitions_for_unit_snr(snr: float) -> int:
    """Averaging repetitions needed to push the per-shot SNR to 1."""
    if not (snr > 0) or not math.isfinite(snr):
        raise ConfigError("snr must be positive and finite")
    if snr >= 1.0:
        return 1
    return int(math.ceil(1.0 / (snr * snr)))


def speedup_curve(
    t_seq_s,
    timing: SensingTimingModel,
    single_shot_snr: float,
    acceptance_probability: float = 1.0,
) -> np.ndarray:
    """Wall-clock advantage of single-shot over conventional readout as a
    function of the sensing-sequence length embedded in each repetition.

    Conventional readout needs ceil(1/snr^2) repetitions of
    (rep overhead + t_seq); single-shot needs ceil(1/snr^2) of
    (single-shot overhead + t_seq), one if its SNR already exceeds 1.
    Post-selection is excluded by default; acceptance_probability < 1
    stretches the single-shot time by 1/acceptance.
    """
    t_seq = np.asarray(t_seq_s, dtype=float)
    if np.any(t_seq < 0) or np.any(~np.isfinite(t_seq)):
        raise ConfigError("sequence lengths must be finite and >= 0")
    if not (0.0 < acceptance_probability <= 1.0):
        raise ConfigError("acceptance_probability must lie in (0, 1]")
    n_conv = repetitions_for_unit_snr(conventional_snr(timing))
    n_ss = repetitions_for_unit_snr(single_shot_snr)
    time_conv = n_conv * (timing.conventional_rep_overhead_s + t_seq)
    time_ss = n_ss * (timing.single_shot_overhead_s + t_seq) / acceptance_probability
    return time_conv / time_ss


def deconvolve_charge_errors(
    e0_lumped: float, e1_lumped: float, error_minus: float, error_zero: float
) -> tuple[float, float]:
    """Split table-level conversion errors into pure-conversion parts.

    The lumped errors fold the charge-readout misassignment into the
    conversion step: e0_lumped = ez + e0_conv * (1 - em - ez) and
    e1_lumped = em + e1_conv * (1 - em - ez), with em/ez the
    below/above-threshold misassignment of NV-/NV0.
    """
    for name, v in (
        ("e0_lumped", e0_lumped),
        ("e1_lumped", e1_lumped),
        ("error_minus", error_minus),
        ("error_zero", error_zero),
    ):
        _check_prob(name, v)
    scale = 1.0 - error_minus - error_zero
    if scale <= 0.0:
        raise ConfigError("charge discrimination is uninformative; cannot deconvolve")
    e0_conv = (e0_lumped - error_zero) / scale
    e1_conv = (e1_lumped - error_minus) / scale
    if e0_conv < 0.0 or e1_conv < 0.0:
        raise ConfigError(
            "charge misassignment exceeds the lumped conversion error; "
            "the count models are inconsistent with this budget"
        )
    return e0_conv, e1_conv


@dataclass(frozen=True)
class McRunResult:
    f_meas: float
    f_sigma: float
    e0_meas: float
    e1_meas: float
    threshold: int
    repetitions: int
    seed: int
    histogram_zero_seq: CountHistogram
    histogram_one_seq: CountHistogram


def end_to_end_mc(
    budget: ProtocolErrorBudget,
    model_minus: CountModel,
    model_zero: CountModel,
    repetitions: int,
    seed: int,
    discriminator: ChargeDiscriminator | None = None,
    window_s: float = 1.0,
) -> McRunResult:
    """Simulate both measurement sequences shot by shot.

    Each repetition samples charge init, spin init, the pi pulse (for the
    |0> sequence), the conversion step, and one photon count from the final
    charge state's model, then thresholds.  The budget carries table-level
    (lumped) conversion errors; they are deconvolved against the count
    models so the simulated count draw re-applies the misassignment.
    """
    if repetitions < 1:
        raise ConfigError("repetitions must be >= 1")
    if discriminator is None:
        discriminator = optimize_threshold(model_minus, model_zero).discriminator
    t = discriminator.threshold

    top = max(model_minus.support_max(), model_zero.support_max())
    grid = np.arange(top + 1)
    pmf_minus = np.clip(np.asarray(model_minus.pmf(grid), dtype=float), 0.0, None)
    pmf_zero = np.clip(np.asarray(model_zero.pmf(grid), dtype=float), 0.0, None)
    error_minus = float(pmf_minus[:t].sum() / pmf_minus.sum())
    error_zero = float(pmf_zero[t:].sum() / pmf_zero.sum())
    e0_conv, e1_conv = deconvolve_charge_errors(
        budget.e0, budget.e1, error_minus, error_zero
    )

    rng = np.random.default_rng(seed)
    q = 1.0 - budget.e_mw
    _, beta = _pulse_weights(budget, q)

    def run_sequence(p_in_zero: float) -> tuple[np.ndarray, float]:
        charge_fail = rng.random(repetitions) < budget.e_nv0
        in_zero = rng.random(repetitions) < p_in_zero
        p_ionize = np.where(in_zero, 1.0 - e0_conv, e1_conv)
        ionized = rng.random(repetitions) < p_ionize
        ends_nv0 = charge_fail | (~charge_fail & ionized)
        counts_minus = rng.choice(grid, size=repetitions, p=pmf_minus / pmf_minus.sum())
        counts_zero = rng.choice(grid, size=repetitions, p=pmf_zero / pmf_zero.sum())
        counts = np.where(ends_nv0, counts_zero, counts_minus)
        above = counts >= t
        return counts, float(np.mean(above))

    counts_zero_seq, frac_above_zero_seq = run_sequence(beta)
    counts_one_seq, frac_above_one_seq = run_sequence(budget.p_zero)
    e0_meas = frac_above_zero_seq  # |0> sequence: above threshold is wrong
    e1_meas = 1.0 - frac_above_one_seq  # |+-1> sequence: below threshold is wrong

    f_meas = measured_fidelity(e0_meas, e1_meas)
    var = (e0_meas * (1 - e0_meas) + e1_meas * (1 - e1_meas)) / repetitions
    return McRunResult(
        f_meas=f_meas,
        f_sigma=math.sqrt(var) / 2.0,
        e0_meas=e0_meas,
        e1_meas=e1_meas,
        threshold=t,
        repetitions=repetitions,
        seed=seed,
        histogram_zero_seq=CountHistogram.from_samples(counts_zero_seq, window_s),
        histogram_one_seq=CountHistogram.from_samples(counts_one_seq, window_s),
    )

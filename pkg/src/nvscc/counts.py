"""Photon-count histograms, count models, and charge-state discrimination.

Count models expose a probability mass function on non-negative integers.
Gaussian mixture components are parameterized by their displayed peak height
(the amplitude of the fitted curve on a percent-of-events histogram), mean
and standard deviation; the mixture is evaluated on integer counts >= 0 and
renormalized there, so a component centered far below zero acts as a broad,
slowly decaying pedestal.

Randomness: all sampling uses numpy's default_rng (PCG64); parallel work
derives independent child streams via SeedSequence.spawn (see spawn_seeds).
Reproducibility on the same build is exact; across platforms best-effort.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats
from scipy.optimize import least_squares

from .errors import ConfigError, FitNonConvergenceError

_SUPPORT_SIGMAS = 12.0
_MIN_SUPPORT = 30


@dataclass(frozen=True, eq=False)
class CountHistogram:
    """Occurrences per integer photon count within a fixed acquisition window."""

    counts: Mapping[int, int]
    total: int
    window_s: float

    def __post_init__(self) -> None:
        clean: dict[int, int] = {}
        for k, occ in self.counts.items():
            if int(k) != k or k < 0:
                raise ConfigError(f"photon count must be a non-negative integer, got {k}")
            if int(occ) != occ or occ < 0:
                raise ConfigError(f"occurrence must be a non-negative integer, got {occ}")
            clean[int(k)] = int(occ)
        object.__setattr__(self, "counts", clean)
        if sum(clean.values()) != self.total:
            raise ConfigError("histogram occurrences must sum to the stated total")
        if not (self.window_s > 0):
            raise ConfigError("acquisition window must be positive")

    @classmethod
    def from_samples(cls, samples: Sequence[int], window_s: float) -> "CountHistogram":
        counter = Counter(int(s) for s in samples)
        return cls(counts=dict(counter), total=len(samples), window_s=window_s)

    def max_count(self) -> int:
        return max(self.counts) if self.counts else 0

    def frequencies(self) -> np.ndarray:
        """Relative frequency on the dense grid 0..max_count."""
        out = np.zeros(self.max_count() + 1, dtype=float)
        for k, occ in self.counts.items():
            out[k] = occ / self.total
        return out

    def mean(self) -> float:
        return sum(k * occ for k, occ in self.counts.items()) / self.total


@dataclass(frozen=True)
class PoissonModel:
    lam: float

    def __post_init__(self) -> None:
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ConfigError("Poisson mean must be finite and >= 0")

    def support_max(self) -> int:
        return max(
            _MIN_SUPPORT, int(math.ceil(self.lam + _SUPPORT_SIGMAS * math.sqrt(self.lam + 1.0)))
        )

    def pmf(self, k) -> np.ndarray:
        return stats.poisson.pmf(np.asarray(k), self.lam)

    def mean(self) -> float:
        return self.lam


@dataclass(frozen=True)
class GaussianMixtureModel:
    """Sum of Gaussian curves truncated to integer counts >= 0.

    Each component is (peak amplitude, mean, sd) in displayed-histogram
    units; the absolute amplitude scale cancels in the renormalization.
    """

    components: tuple[tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ConfigError("mixture needs at least one component")
        for amp, mean, sd in self.components:
            if amp < 0 or not math.isfinite(amp):
                raise ConfigError("component amplitudes must be finite and >= 0")
            if sd <= 0 or not math.isfinite(sd) or not math.isfinite(mean):
                raise ConfigError("component needs finite mean and sd > 0")
        if not any(amp > 0 for amp, _, _ in self.components):
            raise ConfigError("mixture needs at least one positive amplitude")
        if not self._norm() > 0.0:
            raise ConfigError("mixture has no mass on the non-negative count support")

    def support_max(self) -> int:
        top = max(mean + _SUPPORT_SIGMAS * sd for _, mean, sd in self.components)
        return max(_MIN_SUPPORT, int(math.ceil(top)))

    def curve(self, k) -> np.ndarray:
        """Unnormalized displayed curve: sum of Gaussian peaks."""
        k = np.asarray(k, dtype=float)
        out = np.zeros_like(k)
        for amp, mean, sd in self.components:
            out = out + amp * np.exp(-((k - mean) ** 2) / (2.0 * sd * sd))
        return out

    def _norm(self) -> float:
        grid = np.arange(self.support_max() + 1)
        return float(np.sum(self.curve(grid)))

    def pmf(self, k) -> np.ndarray:
        k_arr = np.asarray(k)
        values = self.curve(k_arr) / self._norm()
        return np.where((k_arr >= 0) & (k_arr <= self.support_max()), values, 0.0)

    def mean(self) -> float:
        grid = np.arange(self.support_max() + 1)
        return float(np.sum(grid * self.pmf(grid)))


CountModel = PoissonModel | GaussianMixtureModel


@dataclass(frozen=True)
class ChargeDiscriminator:
    """Counts >= threshold are assigned NV-; below, NV0."""

    threshold: int

    def __post_init__(self) -> None:
        if self.threshold < 0 or int(self.threshold) != self.threshold:
            raise ConfigError("threshold must be a non-negative integer")

    def assign_nv_minus(self, counts) -> np.ndarray:
        return np.asarray(counts) >= self.threshold


@dataclass(frozen=True)
class ThresholdResult:
    discriminator: ChargeDiscriminator
    error_minus: float  # P(counts < threshold | NV-)
    error_zero: float  # P(counts >= threshold | NV0)

    @property
    def threshold(self) -> int:
        return self.discriminator.threshold


def optimize_threshold(
    model_minus: CountModel, model_zero: CountModel
) -> ThresholdResult:
    """Exhaustive search of the integer threshold minimizing the summed
    misassignment probabilities; ties break toward the smaller threshold."""
    top = max(model_minus.support_max(), model_zero.support_max())
    grid = np.arange(top + 1)
    pmf_minus = np.asarray(model_minus.pmf(grid), dtype=float)
    pmf_zero = np.asarray(model_zero.pmf(grid), dtype=float)
    cdf_minus = np.cumsum(pmf_minus)
    cdf_zero = np.cumsum(pmf_zero)
    # threshold t in 0..top+1: below(t) = P(X <= t-1), at t=0 nothing is below
    below_minus = np.concatenate(([0.0], cdf_minus))
    above_zero = np.concatenate(([1.0], 1.0 - cdf_zero))
    errors = below_minus + above_zero
    t = int(np.argmin(errors))
    return ThresholdResult(
        discriminator=ChargeDiscriminator(t),
        error_minus=float(below_minus[t]),
        error_zero=float(max(above_zero[t], 0.0)),
    )


def charge_fidelity(error_minus: float, error_zero: float) -> float:
    """F_charge = 1 - mean of the two misassignment probabilities."""
    for name, v in (("error_minus", error_minus), ("error_zero", error_zero)):
        if not (0.0 <= v <= 1.0):
            raise ConfigError(f"{name} must lie in [0, 1], got {v}")
    return 1.0 - (error_minus + error_zero) / 2.0


@dataclass(frozen=True)
class CountModelFit:
    model: CountModel
    r_squared: float
    degenerate_components: tuple[int, ...] = ()


def _mixture_starts(hist: CountHistogram, n_components: int) -> list[np.ndarray]:
    """Three deterministic starts built from histogram moments: components
    split around the mean, a broad pedestal plus the main peak, and a stack
    of staggered copies of the main peak."""
    ks = np.array(sorted(hist.counts))
    occ = np.array([hist.counts[k] for k in ks], dtype=float)
    freq = occ / hist.total
    mean = hist.mean()
    var = float(np.sum(occ * (ks - mean) ** 2) / hist.total)
    sd = math.sqrt(max(var, 0.25))
    peak = float(freq.max())
    main = (peak, mean, max(sd, 0.5))

    def pad(components: list[tuple[float, float, float]]) -> np.ndarray:
        while len(components) < n_components:
            components.append(main)
        return np.array(components[:n_components], dtype=float).ravel()

    split = pad(
        [(peak, max(mean - sd, 0.0), max(sd / 2, 0.5)), (peak, mean + sd, max(sd / 2, 0.5))]
    )
    pedestal = pad([(peak / 5, 0.0, max(2 * sd, 1.0)), main])
    staggered = pad(
        [(peak, mean + i, max(sd, 0.5)) for i in range(n_components)]
    )
    return [split, pedestal, staggered]


def fit_count_model(
    hist: CountHistogram, kind: str = "poisson", n_components: int = 2
) -> CountModelFit:
    """Fit a count model to a histogram.

    Poisson uses the closed-form maximum-likelihood mean; the Gaussian
    mixture is fit by least squares on the displayed relative-frequency
    histogram with three deterministic starts.  Components whose fitted
    weight collapses are reported as degenerate, not fatal.
    """
    if hist.total < 100:
        raise ConfigError("need at least 100 repetitions to fit a count model")
    grid = np.arange(hist.max_count() + 1)
    freq = hist.frequencies()
    if kind == "poisson":
        model = PoissonModel(hist.mean())
        fitted = model.pmf(grid)
        return CountModelFit(model=model, r_squared=_r_squared(freq, fitted))
    if kind != "gaussian-mixture":
        raise ConfigError(f"unknown count model kind {kind!r}")
    if n_components < 1:
        raise ConfigError("mixture needs at least one component")

    def residuals(x: np.ndarray) -> np.ndarray:
        comps = x.reshape(-1, 3)
        model_curve = np.zeros_like(freq)
        for amp, mean, sd in comps:
            model_curve = model_curve + amp * np.exp(
                -((grid - mean) ** 2) / (2.0 * sd * sd)
            )
        return model_curve - freq

    lower = np.tile([0.0, -1000.0, 1e-3], n_components)
    upper = np.tile([1.0, 1000.0, 1000.0], n_components)
    best = None
    for x0 in _mixture_starts(hist, n_components):
        x0 = np.clip(x0, lower, upper)
        try:
            res = least_squares(residuals, x0, bounds=(lower, upper), x_scale="jac")
        except ValueError:
            continue
        if res.status > 0 and (best is None or res.cost < best.cost):
            best = res
    if best is None:
        raise FitNonConvergenceError("mixture fit did not converge from any start")
    comps = tuple(
        (float(a), float(m), float(s)) for a, m, s in best.x.reshape(-1, 3)
    )
    total_amp = sum(a for a, _, _ in comps)
    degenerate = tuple(
        i for i, (a, _, _) in enumerate(comps) if a < 1e-4 * max(total_amp, 1e-300)
    )
    model = GaussianMixtureModel(components=comps)
    fitted = model.curve(grid)
    return CountModelFit(
        model=model,
        r_squared=_r_squared(freq, fitted),
        degenerate_components=degenerate,
    )


def _r_squared(observed: np.ndarray, predicted: np.ndarray) -> float:
    ss_res = float(np.sum((observed - predicted) ** 2))
    ss_tot = float(np.sum((observed - observed.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else -math.inf
    return 1.0 - ss_res / ss_tot


def sample_histogram(
    model: CountModel, repetitions: int, seed: int, window_s: float = 1.0
) -> CountHistogram:
    """Draw integer counts from the model's truncated pmf, deterministically."""
    if repetitions < 1:
        raise ConfigError("repetitions must be >= 1")
    grid = np.arange(model.support_max() + 1)
    pmf = np.asarray(model.pmf(grid), dtype=float)
    pmf = np.clip(pmf, 0.0, None)
    pmf = pmf / pmf.sum()
    rng = np.random.default_rng(seed)
    samples = rng.choice(grid, size=repetitions, p=pmf)
    return CountHistogram.from_samples(samples, window_s)


def spawn_seeds(seed: int, n: int) -> list[int]:
    """Derive n independent child seeds via SeedSequence.spawn."""
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(n)]

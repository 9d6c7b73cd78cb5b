"""Five-state classical rate model of optical pumping and ionization.

States are ordered (|0>, |+1>, |-1>, singlet, NV0).  Optical illumination is
a discrete-time column-stochastic transfer matrix applied once per time bin
(default 10 ns); microwave pulses act instantaneously between bins.  There is
no NV0 recombination path, so the neutral-charge population is absorbing and
non-decreasing under pumping.

Timeline semantics: OpticalPump segments emit one fluorescence sample per bin
(sampled before the step, so the first sample reflects the initial state);
MwPi and GreenInit act instantaneously; Wait advances the clock without
dynamics or samples.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)

STATE_LABELS = ("ms0", "ms+1", "ms-1", "singlet", "nv0")
DEFAULT_BINWIDTH_S = 10e-9

_SUM_TOL = 2e-3  # tolerance for rounded literature population values


@dataclass(frozen=True)
class PopulationState:
    """Occupation probabilities over the five states, unit total mass.

    Inputs are renormalized to an exact unit sum; a deviation beyond the
    rounding tolerance of published table values is rejected.
    """

    n: tuple[float, float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.n) != 5:
            raise ConfigError("population vector needs 5 entries")
        arr = np.asarray(self.n, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ConfigError("populations must be finite")
        if np.any(arr < -1e-12) or np.any(arr > 1 + 1e-12):
            raise ConfigError("populations must lie in [0, 1]")
        total = float(np.sum(arr))
        if abs(total - 1.0) > _SUM_TOL:
            raise ConfigError(f"populations must sum to 1, got {total:.6f}")
        arr = np.clip(arr, 0.0, None) / total
        object.__setattr__(self, "n", tuple(float(v) for v in arr))

    @classmethod
    def spin_init(cls, n0: float, n_plus: float, n_minus: float) -> "PopulationState":
        return cls((n0, n_plus, n_minus, 0.0, 0.0))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "PopulationState":
        return cls(tuple(float(v) for v in arr))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.n, dtype=float)


@dataclass(frozen=True)
class OpticalPumpParams:
    """Per-bin transfer probabilities of the illuminated dynamics."""

    p_st0: float
    p_st1: float
    p_ts: float
    p_ion: float = 0.0
    binwidth_s: float = DEFAULT_BINWIDTH_S

    def __post_init__(self) -> None:
        for name in ("p_st0", "p_st1", "p_ts", "p_ion"):
            v = getattr(self, name)
            if not (0.0 <= v < 1.0) or not math.isfinite(v):
                raise ConfigError(f"{name} must lie in [0, 1), got {v}")
        if not (self.binwidth_s > 0 and math.isfinite(self.binwidth_s)):
            raise ConfigError("binwidth_s must be positive")


@dataclass(frozen=True)
class FluorescenceParams:
    """Count rates per spin manifold plus fractional losses of trace groups."""

    f0_cps: float
    f1_cps: float
    fluor_loss1: float = 0.0
    fluor_loss6: float = 0.0

    def __post_init__(self) -> None:
        if self.f0_cps < 0 or self.f1_cps < 0:
            raise ConfigError("count rates must be >= 0")
        for name in ("fluor_loss1", "fluor_loss6"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ConfigError(f"{name} must lie in [0, 1]")


def family_scale(fluor: FluorescenceParams, family: str) -> float:
    """Overall fluorescence scale of an initialization family (a, b or c)."""
    scales = {
        "a": 1.0,
        "b": 1.0 - fluor.fluor_loss1,
        "c": 1.0 - fluor.fluor_loss6,
    }
    try:
        return scales[family]
    except KeyError:
        raise ConfigError(f"unknown trace family {family!r}") from None


def build_transfer_optical(params: OpticalPumpParams) -> np.ndarray:
    """Column-stochastic 5x5 transfer matrix of one illuminated bin.

    The singlet feeds |0> with half of its decay events and each |+-1> with a
    quarter; spin states shelve into the singlet and ionize into NV0, which
    is absorbing.  Diagonals complete every column to an exact unit sum.
    """
    t = np.zeros((5, 5), dtype=float)
    t[3, 0] = params.p_st0
    t[4, 0] = params.p_ion
    t[3, 1] = params.p_st1
    t[4, 1] = params.p_ion
    t[3, 2] = params.p_st1
    t[4, 2] = params.p_ion
    t[0, 3] = params.p_ts / 2.0
    t[1, 3] = params.p_ts / 4.0
    t[2, 3] = params.p_ts / 4.0
    for c in range(5):
        off = float(np.sum(t[:, c]))
        if off > 1.0:
            raise ConfigError(
                f"column {c} off-diagonal probabilities sum to {off:.6f} > 1"
            )
        t[c, c] = 1.0 - off
        # nudge the diagonal until the float column sum is exactly one
        for _ in range(3):
            resid = float(np.sum(t[:, c])) - 1.0
            if resid == 0.0:
                break
            t[c, c] -= resid
    return t


def apply_spin_rotation(
    state: PopulationState, target: int, flip_probability: float
) -> PopulationState:
    """Mix |0> with |target> at flip probability q (q = sin^2(theta/2))."""
    if target not in (+1, -1):
        raise ConfigError("rotation target must be +1 or -1")
    if not (0.0 <= flip_probability <= 1.0):
        raise ConfigError("flip probability must lie in [0, 1]")
    idx = 1 if target == +1 else 2
    n = list(state.n)
    q = flip_probability
    n0, nt = n[0], n[idx]
    n[0] = (1.0 - q) * n0 + q * nt
    n[idx] = q * n0 + (1.0 - q) * nt
    return PopulationState(tuple(n))


def apply_mw_pi(state: PopulationState, target: int, e_mw: float) -> PopulationState:
    """Imperfect pi pulse: swap |0> and |target> with weight 1 - E_MW."""
    if not (0.0 <= e_mw <= 1.0):
        raise ConfigError("e_mw must lie in [0, 1]")
    return apply_spin_rotation(state, target, 1.0 - e_mw)


@dataclass(frozen=True)
class OpticalPump:
    duration_s: float


@dataclass(frozen=True)
class MwPi:
    target: int
    e_mw: float = 0.0


@dataclass(frozen=True)
class GreenInit:
    spin_mixture: tuple[float, float, float]


@dataclass(frozen=True)
class Wait:
    duration_s: float


Segment = Union[OpticalPump, MwPi, GreenInit, Wait]


@dataclass(frozen=True)
class PulseTimeline:
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ConfigError("timeline needs at least one segment")
        for seg in self.segments:
            if isinstance(seg, (OpticalPump, Wait)):
                if not (seg.duration_s > 0 and math.isfinite(seg.duration_s)):
                    raise ConfigError("segment durations must be positive")
            elif isinstance(seg, MwPi):
                if seg.target not in (+1, -1):
                    raise ConfigError("MwPi target must be +1 or -1")
                if not (0.0 <= seg.e_mw <= 1.0):
                    raise ConfigError("MwPi e_mw must lie in [0, 1]")
            elif isinstance(seg, GreenInit):
                mix = seg.spin_mixture
                if len(mix) != 3 or any(v < 0 for v in mix):
                    raise ConfigError("GreenInit mixture needs 3 entries >= 0")
                if abs(sum(mix) - 1.0) > _SUM_TOL:
                    raise ConfigError("GreenInit mixture must sum to 1")
            else:
                raise ConfigError(f"unknown segment type {type(seg).__name__}")


@dataclass(frozen=True, eq=False)
class FluorescenceTrace:
    """Sampled fluorescence: bin start times and rates plus the final state."""

    time_s: np.ndarray
    rate_cps: np.ndarray
    final_state: PopulationState


def simulate_timeline(
    timeline: PulseTimeline,
    pump: OpticalPumpParams,
    fluor: FluorescenceParams,
    init: PopulationState,
    fluor_scale: float = 1.0,
) -> FluorescenceTrace:
    """Exact stepwise propagation of the timeline, one matrix product per bin.

    Deliberately avoids eigendecomposition shortcuts so probability mass is
    conserved to float rounding over arbitrarily long pump segments.
    """
    transfer = build_transfer_optical(pump)
    n = init.as_array()
    f0 = fluor.f0_cps * fluor_scale
    f1 = fluor.f1_cps * fluor_scale
    clock = 0.0
    times: list[float] = []
    rates: list[float] = []
    for seg in timeline.segments:
        if isinstance(seg, OpticalPump):
            nbins = int(round(seg.duration_s / pump.binwidth_s))
            if nbins < 1:
                raise ConfigError(
                    f"pump segment of {seg.duration_s} s is shorter than one bin"
                )
            for _ in range(nbins):
                times.append(clock)
                rates.append(f0 * n[0] + f1 * (n[1] + n[2]))
                n = transfer @ n
                low = n.min()
                if low < 0.0:
                    if low < -1e-12:
                        logger.warning(
                            "clamping negative population %.3e during pump", low
                        )
                    n = np.clip(n, 0.0, None)
                # exact dynamics conserves mass; fold the matvec rounding
                # residual back into the dominant entry so the unit sum
                # cannot drift over long pump segments
                err = 1.0 - math.fsum(n)
                if err != 0.0:
                    n[int(np.argmax(n))] += err
                clock += pump.binwidth_s
        elif isinstance(seg, MwPi):
            state = apply_mw_pi(PopulationState.from_array(n), seg.target, seg.e_mw)
            n = state.as_array()
        elif isinstance(seg, GreenInit):
            n = np.array(list(seg.spin_mixture) + [0.0, 0.0], dtype=float)
            n /= n.sum()
        elif isinstance(seg, Wait):
            clock += seg.duration_s
    return FluorescenceTrace(
        time_s=np.asarray(times, dtype=float),
        rate_cps=np.asarray(rates, dtype=float),
        final_state=PopulationState.from_array(n),
    )


def probability_to_lifetime(p: float, binwidth_s: float = DEFAULT_BINWIDTH_S) -> float:
    """1/e lifetime of a per-bin probability; p=0 maps to +inf."""
    if not (0.0 <= p < 1.0):
        raise ConfigError(f"per-bin probability must lie in [0, 1), got {p}")
    if p == 0.0:
        return math.inf
    return -binwidth_s / math.log1p(-p)


def lifetime_to_probability(t_s: float, binwidth_s: float = DEFAULT_BINWIDTH_S) -> float:
    """Per-bin probability of a 1/e lifetime; T=inf maps to 0."""
    if math.isinf(t_s) and t_s > 0:
        return 0.0
    if not (t_s > 0):
        raise ConfigError(f"lifetime must be positive, got {t_s}")
    return -math.expm1(-binwidth_s / t_s)

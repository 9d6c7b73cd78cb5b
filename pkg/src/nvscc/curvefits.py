"""Saturation-curve and optical-lineshape fits.

Saturation follows f(I) = f_sat * I / (I + I_sat); the low-power slope is
A = f_sat / I_sat.  Data that never bends over still converges, but the
I_sat uncertainty diverges, which is reported as a flag instead of an error.

Lineshapes are fit twice, once with a Gaussian and once with a Lorentzian
profile (both with a flat baseline), and both R^2 values are reported so the
caller can judge which profile the data supports.  The quoted FWHM comes
from the Gaussian fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .errors import FitNonConvergenceError, UnderdeterminedError

_GAUSS_FWHM = 2.0 * math.sqrt(2.0 * math.log(2.0))  # sigma -> FWHM


@dataclass(frozen=True)
class SaturationFit:
    a_cps_per_mw: float  # low-power slope
    i_sat_mw: float
    f_sat_cps: float  # = a_cps_per_mw * i_sat_mw
    sigma_a_cps_per_mw: float
    sigma_i_sat_mw: float
    sigma_f_sat_cps: float
    r_squared: float

    @property
    def saturation_resolved(self) -> bool:
        """False when the data never bends over and I_sat is unconstrained."""
        return (
            math.isfinite(self.sigma_i_sat_mw)
            and self.sigma_i_sat_mw < abs(self.i_sat_mw)
            and math.isfinite(self.sigma_f_sat_cps)
            and self.sigma_f_sat_cps < abs(self.f_sat_cps)
        )


def fit_saturation(power_mw, rate_cps) -> SaturationFit:
    power = np.asarray(power_mw, dtype=float)
    rate = np.asarray(rate_cps, dtype=float)
    if power.ndim != 1 or power.shape != rate.shape:
        raise UnderdeterminedError("saturation fit needs matching 1-d power and rate arrays")
    if np.unique(power).size < 3:
        raise UnderdeterminedError("saturation fit needs at least 3 distinct powers")
    if np.any(power <= 0) or np.any(~np.isfinite(power)) or np.any(~np.isfinite(rate)):
        raise UnderdeterminedError("powers must be positive and all values finite")

    def model(i, f_sat, i_sat):
        return f_sat * i / (i + i_sat)

    top = float(rate.max())
    best = None
    for i_sat0 in (float(np.median(power)), float(power.max()), 10.0 * float(power.max())):
        try:
            popt, pcov = curve_fit(
                model,
                power,
                rate,
                p0=(max(top, 1.0) * 1.2, i_sat0),
                bounds=((0.0, 1e-12), (np.inf, np.inf)),
                maxfev=20000,
            )
        except (RuntimeError, ValueError):
            continue
        cost = float(np.sum((model(power, *popt) - rate) ** 2))
        if best is None or cost < best[0]:
            best = (cost, popt, pcov)
    if best is None:
        raise FitNonConvergenceError("saturation fit did not converge from any start")
    cost, (f_sat, i_sat), pcov = best
    var_f, var_i = float(pcov[0, 0]), float(pcov[1, 1])
    cov_fi = float(pcov[0, 1])
    slope = f_sat / i_sat
    # delta method for A = f_sat / I_sat
    var_a = (
        var_f / i_sat**2
        + (f_sat / i_sat**2) ** 2 * var_i
        - 2.0 * (f_sat / i_sat**3) * cov_fi
    )
    ss_tot = float(np.sum((rate - rate.mean()) ** 2))
    r2 = 1.0 - cost / ss_tot if ss_tot > 0 else (1.0 if cost == 0 else -math.inf)
    return SaturationFit(
        a_cps_per_mw=slope,
        i_sat_mw=float(i_sat),
        f_sat_cps=float(f_sat),
        sigma_a_cps_per_mw=math.sqrt(max(var_a, 0.0)) if math.isfinite(var_a) else math.inf,
        sigma_i_sat_mw=math.sqrt(var_i) if math.isfinite(var_i) else math.inf,
        sigma_f_sat_cps=math.sqrt(var_f) if math.isfinite(var_f) else math.inf,
        r_squared=r2,
    )


@dataclass(frozen=True)
class LineshapeFit:
    center_ghz: float
    fwhm_ghz: float
    sigma_fwhm_ghz: float
    amplitude: float
    baseline: float
    gaussian_r_squared: float
    lorentzian_r_squared: float
    gaussian_converged: bool
    lorentzian_converged: bool

    @property
    def preferred(self) -> str:
        if not (self.gaussian_converged or self.lorentzian_converged):
            return "none"
        if not self.lorentzian_converged:
            return "gaussian"
        if not self.gaussian_converged:
            return "lorentzian"
        return "gaussian" if self.gaussian_r_squared >= self.lorentzian_r_squared else "lorentzian"


def _profile_fit(x, y, kind: str):
    span = float(x.max() - x.min())
    base0 = float(y.min())
    amp0 = float(y.max() - y.min())
    x00 = float(x[np.argmax(y)])

    if kind == "gaussian":

        def model(t, amp, x0, width, base):
            return base + amp * np.exp(-((t - x0) ** 2) / (2.0 * width * width))

    else:

        def model(t, amp, x0, width, base):
            return base + amp * width * width / ((t - x0) ** 2 + width * width)

    best = None
    for width0 in (span / 20, span / 6, span / 2):
        try:
            popt, pcov = curve_fit(
                model,
                x,
                y,
                p0=(amp0, x00, width0, base0),
                bounds=((0.0, x.min() - span, 1e-9, -np.inf), (np.inf, x.max() + span, np.inf, np.inf)),
                maxfev=20000,
            )
        except (RuntimeError, ValueError):
            continue
        cost = float(np.sum((model(x, *popt) - y) ** 2))
        if best is None or cost < best[0]:
            best = (cost, popt, pcov)
    if best is None:
        return None
    cost, popt, pcov = best
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - cost / ss_tot if ss_tot > 0 else (1.0 if cost == 0 else -math.inf)
    sigmas = np.sqrt(np.abs(np.diag(pcov)))
    # a peak is only resolved if its amplitude clears its own uncertainty
    converged = bool(
        ss_tot > 0 and np.all(np.isfinite(sigmas)) and popt[0] > 2.0 * sigmas[0]
    )
    return popt, sigmas, r2, converged


def fit_lineshape(detuning_ghz, intensity) -> LineshapeFit:
    x = np.asarray(detuning_ghz, dtype=float)
    y = np.asarray(intensity, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise UnderdeterminedError("lineshape fit needs matching 1-d arrays")
    if x.size < 10:
        raise UnderdeterminedError("lineshape fit needs at least 10 samples")
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
        raise UnderdeterminedError("lineshape samples must be finite")

    gauss = _profile_fit(x, y, "gaussian")
    lorentz = _profile_fit(x, y, "lorentzian")
    if gauss is None and lorentz is None:
        raise FitNonConvergenceError("neither profile converged")

    if gauss is not None:
        (amp, x0, width, base), sigmas, g_r2, g_ok = gauss
        fwhm = _GAUSS_FWHM * width
        sigma_fwhm = _GAUSS_FWHM * sigmas[2]
    else:
        amp = x0 = base = fwhm = sigma_fwhm = math.nan
        g_r2, g_ok = -math.inf, False
    l_r2, l_ok = (lorentz[2], lorentz[3]) if lorentz is not None else (-math.inf, False)

    return LineshapeFit(
        center_ghz=float(x0),
        fwhm_ghz=float(fwhm),
        sigma_fwhm_ghz=float(sigma_fwhm),
        amplitude=float(amp),
        baseline=float(base),
        gaussian_r_squared=g_r2,
        lorentzian_r_squared=l_r2,
        gaussian_converged=g_ok,
        lorentzian_converged=l_ok,
    )

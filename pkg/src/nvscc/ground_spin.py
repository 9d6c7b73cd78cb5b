"""Ground-state electron-nuclear spin Hamiltonian and field inference.

The electronic spin S=1 of the negative charge state couples to the
intrinsic nitrogen-14 nuclear spin I=1. The 9-dimensional product basis
is |m_s> (x) |m_I> with m_s outer and both quantum numbers ordered
(+1, 0, -1), matching the standard spin-1 matrix representation.

The Hamiltonian (all terms in Hz) is

    H = D_g Sz^2 + gamma_e B.S + S.A.I + Q Iz^2 + gamma_n B.I

with an axially symmetric hyperfine tensor A = diag(A_perp, A_perp, A_par).
Because the Hamiltonian is invariant under rotations about the NV axis,
only the field magnitude B and the polar angle theta matter; the azimuth
is set to 0 by convention (an explicit azimuth argument exists so the
invariance is testable). Spectra at theta and 180 - theta coincide as
well, so field inference reports theta in [0, 90] degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize

from nvscc.errors import FitNonConvergenceError, UnderdeterminedError
from nvscc.linalg import ordered_eigh

# spin-1 operators in the (+1, 0, -1) basis
_SQ2 = 1.0 / math.sqrt(2.0)
SPIN1_Z = np.array([[1, 0, 0], [0, 0, 0], [0, 0, -1]], dtype=complex)
SPIN1_X = np.array([[0, _SQ2, 0], [_SQ2, 0, _SQ2], [0, _SQ2, 0]], dtype=complex)
SPIN1_Y = np.array(
    [[0, -1j * _SQ2, 0], [1j * _SQ2, 0, -1j * _SQ2], [0, 1j * _SQ2, 0]],
    dtype=complex,
)
_ID3 = np.eye(3, dtype=complex)


@dataclass(frozen=True)
class GroundSpinParams:
    """Coupling constants of the ground-state spin Hamiltonian, in Hz.

    gamma_e and gamma_n are gyromagnetic ratios in Hz per mT.
    """

    d_g_hz: float = 2.87e9
    gamma_e_hz_per_mt: float = 28e6
    gamma_n_hz_per_mt: float = -3.08e3
    q_hz: float = -4.945e6
    a_par_hz: float = -2.16e6
    a_perp_hz: float = -2.62e6

    def __post_init__(self) -> None:
        for name in (
            "d_g_hz",
            "gamma_e_hz_per_mt",
            "gamma_n_hz_per_mt",
            "q_hz",
            "a_par_hz",
            "a_perp_hz",
        ):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.d_g_hz <= 0:
            raise ValueError("d_g_hz must be positive")


@dataclass(frozen=True)
class FieldVector:
    """Static magnetic field: magnitude in mT, polar angle from the NV axis."""

    b_mt: float
    theta_deg: float

    def __post_init__(self) -> None:
        if self.b_mt < 0:
            raise ValueError("b_mt must be non-negative")
        if not 0.0 <= self.theta_deg <= 180.0:
            raise ValueError("theta_deg must lie in [0, 180]")


@dataclass(frozen=True)
class OdmrLine:
    """One hyperfine transition: frequency, electron branch label, MW weight."""

    frequency_hz: float
    label: str
    amplitude: float = 1.0


@dataclass(frozen=True)
class OdmrLineSet:
    """Hyperfine ODMR lines, sorted ascending in frequency."""

    lines: tuple[OdmrLine, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        freqs = [line.frequency_hz for line in self.lines]
        if any(f <= 0 for f in freqs):
            raise ValueError("line frequencies must be positive")
        if freqs != sorted(freqs):
            raise ValueError("lines must be sorted ascending in frequency")

    @property
    def frequencies_hz(self) -> np.ndarray:
        return np.array([line.frequency_hz for line in self.lines])


@lru_cache(maxsize=8)
def _hamiltonian_parts(
    params: GroundSpinParams,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Field-independent part and the three Zeeman generators (per mT)."""
    sz2 = SPIN1_Z @ SPIN1_Z
    base = (
        params.d_g_hz * np.kron(sz2, _ID3)
        + params.a_par_hz * np.kron(SPIN1_Z, SPIN1_Z)
        + params.a_perp_hz * (np.kron(SPIN1_X, SPIN1_X) + np.kron(SPIN1_Y, SPIN1_Y))
        + params.q_hz * np.kron(_ID3, sz2)
    )
    zeeman = tuple(
        params.gamma_e_hz_per_mt * np.kron(s, _ID3)
        + params.gamma_n_hz_per_mt * np.kron(_ID3, s)
        for s in (SPIN1_X, SPIN1_Y, SPIN1_Z)
    )
    return (base, *zeeman)


def build_ground_hamiltonian(
    params: GroundSpinParams, field: FieldVector, azimuth_deg: float = 0.0
) -> np.ndarray:
    """Assemble the 9x9 ground-state Hamiltonian in Hz.

    The azimuth argument exists only to make the axial symmetry testable;
    it defaults to 0 and leaves all eigenvalues unchanged.
    """
    theta = math.radians(field.theta_deg)
    phi = math.radians(azimuth_deg)
    bx = field.b_mt * math.sin(theta) * math.cos(phi)
    by = field.b_mt * math.sin(theta) * math.sin(phi)
    bz = field.b_mt * math.cos(theta)
    base, zee_x, zee_y, zee_z = _hamiltonian_parts(params)
    return base + bx * zee_x + by * zee_y + bz * zee_z


_MW_OPERATOR = np.kron(SPIN1_X, _ID3)
_ELECTRON_PROJECTORS = [
    np.kron(np.diag([1.0, 0.0, 0.0]), np.eye(3)),  # m_s = +1
    np.kron(np.diag([0.0, 1.0, 0.0]), np.eye(3)),  # m_s = 0
    np.kron(np.diag([0.0, 0.0, 1.0]), np.eye(3)),  # m_s = -1
]


def odmr_transitions(params: GroundSpinParams, field: FieldVector) -> OdmrLineSet:
    """Allowed Delta m_s = +-1 transitions out of the m_s = 0 manifold.

    The three eigenstates with the largest m_s = 0 weight form the lower
    manifold. For each electron branch the three transitions with the
    largest MW matrix element |<f|Sx|i>|^2 are reported, which at small
    transverse field are the nuclear-spin conserving hyperfine lines.
    Amplitudes are informational only.
    """
    h = build_ground_hamiltonian(params, field)
    values, vectors = ordered_eigh(h)

    weights = np.array(
        [np.real(np.sum(np.conj(vectors) * (p @ vectors), axis=0)) for p in _ELECTRON_PROJECTORS]
    )  # shape (3, 9): rows are m_s = +1, 0, -1
    zero_manifold = np.argsort(weights[1])[-3:]
    rest = [k for k in range(9) if k not in set(zero_manifold)]
    plus_branch = [k for k in rest if weights[0][k] >= weights[2][k]]
    minus_branch = [k for k in rest if weights[0][k] < weights[2][k]]

    mw = _MW_OPERATOR @ vectors
    lines: list[OdmrLine] = []
    for branch, label in ((plus_branch, "ms+1"), (minus_branch, "ms-1")):
        candidates = []
        for i in zero_manifold:
            for f in branch:
                amp = abs(np.vdot(vectors[:, f], mw[:, i])) ** 2
                candidates.append((amp, values[f] - values[i]))
        candidates.sort(key=lambda c: (-c[0], c[1]))
        for amp, freq in candidates[:3]:
            lines.append(OdmrLine(frequency_hz=float(freq), label=label, amplitude=float(amp)))

    lines.sort(key=lambda line: line.frequency_hz)
    return OdmrLineSet(lines=tuple(lines))


@dataclass(frozen=True)
class FieldInference:
    """Result of inverting measured ODMR lines to a field vector."""

    field: FieldVector
    b_sigma_mt: float
    theta_sigma_deg: float
    rms_residual_hz: float
    theta_defined: bool


def _line_residuals(
    measured_hz: np.ndarray, params: GroundSpinParams, b_mt: float, theta_deg: float
) -> np.ndarray:
    model = odmr_transitions(params, FieldVector(b_mt=b_mt, theta_deg=theta_deg))
    model_freqs = model.frequencies_hz
    # nearest-model matching keeps the cost well defined for partial line sets
    return np.array([measured_hz[k] - model_freqs[np.argmin(np.abs(model_freqs - measured_hz[k]))] for k in range(len(measured_hz))])


def infer_field(
    measured: OdmrLineSet,
    params: GroundSpinParams,
    b_max_mt: float = 5.0,
    grid_b_step_mt: float = 0.05,
    grid_theta_step_deg: float = 1.0,
    rms_tolerance_hz: float = 0.1e6,
) -> FieldInference:
    """Least-squares inversion of line positions to (B, theta).

    A coarse grid scan over B in [0, b_max] and theta in [0, 90] degrees
    seeds a Nelder-Mead refinement. 1-sigma uncertainties come from the
    curvature of the residual sum of squares at the optimum. When the
    fitted magnitude is consistent with zero the angle is undefined and
    flagged accordingly.
    """
    measured_hz = measured.frequencies_hz
    if len(measured_hz) < 2:
        raise UnderdeterminedError("need at least 2 measured lines to infer (B, theta)")

    def cost(x: np.ndarray) -> float:
        b = float(np.clip(x[0], 0.0, b_max_mt))
        theta = float(np.clip(x[1], 0.0, 90.0))
        res = _line_residuals(measured_hz, params, b, theta)
        return float(res @ res)

    b_grid = np.arange(0.0, b_max_mt + grid_b_step_mt / 2, grid_b_step_mt)
    theta_grid = np.arange(0.0, 90.0 + grid_theta_step_deg / 2, grid_theta_step_deg)
    best = (np.inf, 0.0, 0.0)
    for b in b_grid:
        for theta in theta_grid:
            c = cost(np.array([b, theta]))
            if c < best[0]:
                best = (c, float(b), float(theta))

    result = optimize.minimize(
        cost,
        x0=np.array([best[1], best[2]]),
        method="Nelder-Mead",
        bounds=[(0.0, b_max_mt), (0.0, 90.0)],
        options={"xatol": 1e-5, "fatol": 1e-6, "maxiter": 2000},
    )
    b_hat = float(np.clip(result.x[0], 0.0, b_max_mt))
    theta_hat = float(np.clip(result.x[1], 0.0, 90.0))
    n = len(measured_hz)
    ssr = cost(np.array([b_hat, theta_hat]))
    rms = math.sqrt(ssr / n)
    if rms > rms_tolerance_hz:
        raise FitNonConvergenceError(
            f"no field reproduces the lines: best RMS residual {rms:.3e} Hz exceeds {rms_tolerance_hz:.3e} Hz"
        )

    theta_defined = b_hat > 2 * grid_b_step_mt
    # curvature-based uncertainties via the residual Jacobian
    step_b = max(1e-4, 1e-4 * max(b_hat, 1.0))
    step_t = 1e-3
    jac = np.zeros((n, 2))
    for j, (step, lo, hi) in enumerate(((step_b, 0.0, b_max_mt), (step_t, 0.0, 90.0))):
        x_plus = [b_hat, theta_hat]
        x_minus = [b_hat, theta_hat]
        x_plus[j] = min(x_plus[j] + step, hi)
        x_minus[j] = max(x_minus[j] - step, lo)
        span = x_plus[j] - x_minus[j]
        res_plus = _line_residuals(measured_hz, params, x_plus[0], x_plus[1])
        res_minus = _line_residuals(measured_hz, params, x_minus[0], x_minus[1])
        jac[:, j] = (res_plus - res_minus) / span

    dof = max(1, n - 2)
    s2 = ssr / dof
    jtj = jac.T @ jac
    cov = s2 * np.linalg.pinv(jtj)
    b_sigma = float(math.sqrt(max(cov[0, 0], 0.0)))
    theta_sigma = float(math.sqrt(max(cov[1, 1], 0.0))) if theta_defined else math.inf

    return FieldInference(
        field=FieldVector(b_mt=b_hat, theta_deg=theta_hat),
        b_sigma_mt=b_sigma,
        theta_sigma_deg=theta_sigma,
        rms_residual_hz=rms,
        theta_defined=theta_defined,
    )

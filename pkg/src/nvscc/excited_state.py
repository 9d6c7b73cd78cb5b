"""Fourteen-level NV- optical model: fine structure, dipoles, PLE spectra.

The model couples the ground spin triplet to the excited orbital-doublet
fine structure (6 levels) and keeps the singlet shelf as uncoupled diagonal
placeholders.  All energies in this module are GHz; the transition energy
axis is the detuning from the zero-phonon-line reference, positioned by the
``v_opt_ghz`` diagonal offsets.

Field convention: the magnetic field vector is resolved along and
perpendicular to the NV axis (theta is the misalignment angle).  The axial
component also drives the orbital Zeeman term, scaled by the orbital g
factor and divided by the electron g factor because the field enters in
frequency units.  Strain enters as a transverse orbital field of magnitude
xi_perp at an in-plane azimuth (default along x).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .ground_spin import FieldVector
from .level_templates import (
    EXCITED,
    GROUND,
    N_LEVELS,
    P_EXCITED,
    T_DIP_X,
    T_DIP_Y,
    T_ORB_ZEEMAN,
    T_SO_PARA,
    T_SO_PERP,
    T_SPIN_X,
    T_SPIN_Y,
    T_SPIN_Z,
    T_SS_PARA,
    T_SS_PERP,
    T_STRAIN_X,
    T_STRAIN_Y,
    T_ZFS_GROUND,
)
from .linalg import assert_hermitian, ordered_eigh

_ELECTRON_G = 2.003  # baked into frequency-unit fields; divides the orbital term

DEFAULT_D_G_GHZ = 2.87
DEFAULT_DES_PARA_GHZ = 1.42
DEFAULT_DES_PERP_GHZ = 0.775
DEFAULT_LES_PARA_GHZ = 5.33
DEFAULT_LES_PERP_GHZ = 0.154
DEFAULT_ORBITAL_G = 0.1
DEFAULT_GAMMA_E_GHZ_PER_MT = 0.028
# calibrated so the spin-0 anchor lines land inside both strain windows:
# lower line at xi_perp=1.7 sits at offset-0.715, upper line at xi_perp=12.6
# at offset+13.564; 6.8 balances the margins of the 7+-1.5 and 19+-2 targets
DEFAULT_ZPL_OFFSET_GHZ = 6.8
# singlet shelf parked far above the optical window; uncoupled placeholders
_SINGLET_PLACEHOLDERS_GHZ = (250.0, 251.0, 252.0, 253.0, 254.0)


def default_v_opt(zpl_offset_ghz: float = DEFAULT_ZPL_OFFSET_GHZ) -> tuple[float, ...]:
    """Diagonal coarse energy offsets: ground at zero, excited block at the
    zero-phonon-line offset, singlets at inert placeholder energies."""
    return (0.0,) * 3 + (float(zpl_offset_ghz),) * 6 + _SINGLET_PLACEHOLDERS_GHZ


@dataclass(frozen=True, eq=False)
class ExcitedStateParams:
    """Coefficients (GHz) and operator templates of the 14-level Hamiltonian.

    Templates default to the transcribed constants but stay swappable so the
    physics content is auditable and testable in isolation.
    """

    d_g_ghz: float = DEFAULT_D_G_GHZ
    des_para_ghz: float = DEFAULT_DES_PARA_GHZ
    des_perp_ghz: float = DEFAULT_DES_PERP_GHZ
    les_para_ghz: float = DEFAULT_LES_PARA_GHZ
    les_perp_ghz: float = DEFAULT_LES_PERP_GHZ
    orbital_g: float = DEFAULT_ORBITAL_G
    gamma_e_ghz_per_mt: float = DEFAULT_GAMMA_E_GHZ_PER_MT
    v_opt_ghz: tuple[float, ...] = field(default_factory=default_v_opt)
    t_zfs_ground: np.ndarray = field(default_factory=lambda: T_ZFS_GROUND.copy())
    t_ss_para: np.ndarray = field(default_factory=lambda: T_SS_PARA.copy())
    t_ss_perp: np.ndarray = field(default_factory=lambda: T_SS_PERP.copy())
    t_so_para: np.ndarray = field(default_factory=lambda: T_SO_PARA.copy())
    t_so_perp: np.ndarray = field(default_factory=lambda: T_SO_PERP.copy())
    t_strain_x: np.ndarray = field(default_factory=lambda: T_STRAIN_X.copy())
    t_strain_y: np.ndarray = field(default_factory=lambda: T_STRAIN_Y.copy())
    t_orb_zeeman: np.ndarray = field(default_factory=lambda: T_ORB_ZEEMAN.copy())
    t_spin_x: np.ndarray = field(default_factory=lambda: T_SPIN_X.copy())
    t_spin_y: np.ndarray = field(default_factory=lambda: T_SPIN_Y.copy())
    t_spin_z: np.ndarray = field(default_factory=lambda: T_SPIN_Z.copy())
    t_dip_x: np.ndarray = field(default_factory=lambda: T_DIP_X.copy())
    t_dip_y: np.ndarray = field(default_factory=lambda: T_DIP_Y.copy())

    def __post_init__(self) -> None:
        scalars = (
            self.d_g_ghz,
            self.des_para_ghz,
            self.des_perp_ghz,
            self.les_para_ghz,
            self.les_perp_ghz,
            self.orbital_g,
            self.gamma_e_ghz_per_mt,
        )
        if not all(math.isfinite(v) for v in scalars):
            raise ConfigError("excited-state coefficients must be finite")
        if len(self.v_opt_ghz) != N_LEVELS:
            raise ConfigError(
                f"v_opt_ghz needs {N_LEVELS} entries, got {len(self.v_opt_ghz)}"
            )
        if not all(math.isfinite(v) for v in self.v_opt_ghz):
            raise ConfigError("v_opt_ghz entries must be finite")
        for name in (
            "t_zfs_ground",
            "t_ss_para",
            "t_ss_perp",
            "t_so_para",
            "t_so_perp",
            "t_strain_x",
            "t_strain_y",
            "t_orb_zeeman",
            "t_spin_x",
            "t_spin_y",
            "t_spin_z",
            "t_dip_x",
            "t_dip_y",
        ):
            mat = getattr(self, name)
            if mat.shape != (N_LEVELS, N_LEVELS):
                raise ConfigError(f"template {name} must be {N_LEVELS}x{N_LEVELS}")
            assert_hermitian(mat)

    def with_zpl_offset(self, zpl_offset_ghz: float) -> "ExcitedStateParams":
        return ExcitedStateParams(
            d_g_ghz=self.d_g_ghz,
            des_para_ghz=self.des_para_ghz,
            des_perp_ghz=self.des_perp_ghz,
            les_para_ghz=self.les_para_ghz,
            les_perp_ghz=self.les_perp_ghz,
            orbital_g=self.orbital_g,
            gamma_e_ghz_per_mt=self.gamma_e_ghz_per_mt,
            v_opt_ghz=default_v_opt(zpl_offset_ghz),
        )


@dataclass(frozen=True)
class StrainField:
    """Transverse orbital strain: magnitude xi_perp (GHz), in-plane azimuth."""

    xi_perp_ghz: float
    azimuth_deg: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.xi_perp_ghz) or self.xi_perp_ghz < 0:
            raise ConfigError("xi_perp_ghz must be finite and >= 0")

    @property
    def components_ghz(self) -> tuple[float, float]:
        phi = math.radians(self.azimuth_deg)
        return (
            self.xi_perp_ghz * math.cos(phi),
            self.xi_perp_ghz * math.sin(phi),
        )


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Eigen-decomposition with deterministic ordering and phase convention."""

    energies_ghz: np.ndarray
    states: np.ndarray


def build_excited_hamiltonian(
    params: ExcitedStateParams,
    strain: StrainField,
    fieldvec: FieldVector,
    field_azimuth_deg: float = 0.0,
) -> np.ndarray:
    """Assemble the 14x14 Hamiltonian (GHz) for the given strain and field."""
    theta = math.radians(fieldvec.theta_deg)
    azim = math.radians(field_azimuth_deg)
    gb = params.gamma_e_ghz_per_mt * fieldvec.b_mt  # field magnitude in GHz
    bx = gb * math.sin(theta) * math.cos(azim)
    by = gb * math.sin(theta) * math.sin(azim)
    bz = gb * math.cos(theta)
    ex, ey = strain.components_ghz
    h = (
        params.d_g_ghz * params.t_zfs_ground
        + params.des_para_ghz * params.t_ss_para
        + params.des_perp_ghz * params.t_ss_perp
        + params.les_para_ghz * params.t_so_para
        + params.les_perp_ghz * params.t_so_perp
        + ex * params.t_strain_x
        + ey * params.t_strain_y
        + params.orbital_g * bz / _ELECTRON_G * params.t_orb_zeeman
        + bx * params.t_spin_x
        + by * params.t_spin_y
        + bz * params.t_spin_z
        + np.diag(np.asarray(params.v_opt_ghz, dtype=complex))
    )
    assert_hermitian(h)
    return h


def diagonalize(hamiltonian: np.ndarray) -> Eigensystem:
    values, vectors = ordered_eigh(hamiltonian)
    return Eigensystem(energies_ghz=values, states=vectors)


@dataclass(frozen=True)
class TransitionRow:
    ground_index: int
    excited_index: int
    energy_ghz: float
    strength: float
    spin_character: int  # dominant m_s of the ground state: +1, 0 or -1


@dataclass(frozen=True)
class TransitionTable:
    rows: tuple[TransitionRow, ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            if row.strength < 0 or not math.isfinite(row.strength):
                raise ValueError("transition strengths must be finite and >= 0")
            if not math.isfinite(row.energy_ghz):
                raise ValueError("transition energies must be finite")

    def zero_character_rows(self) -> tuple[TransitionRow, ...]:
        return tuple(r for r in self.rows if r.spin_character == 0)

    def strongest_zero_transitions(self, n: int = 2) -> tuple[TransitionRow, ...]:
        rows = sorted(
            self.zero_character_rows(), key=lambda r: (-r.strength, r.energy_ghz)
        )
        return tuple(rows[:n])


_SPIN_CHARACTERS = (1, 0, -1)  # ground basis ordering


def transition_table(
    eigensystem: Eigensystem, params: ExcitedStateParams | None = None
) -> TransitionTable:
    """All 3x6 ground-to-excited rows with dipole strengths M >= 0.

    Strength is the squared modulus of the summed x- and y-polarized dipole
    matrix elements; the spin character is the dominant m_s component of the
    ground eigenstate.
    """
    if params is None:
        params = ExcitedStateParams()
    values = eigensystem.energies_ghz
    vectors = eigensystem.states
    ground_weight = np.sum(np.abs(vectors[GROUND, :]) ** 2, axis=0)
    excited_weight = np.sum(np.abs(vectors[EXCITED, :]) ** 2, axis=0)
    ground_idx = [int(k) for k in np.flatnonzero(ground_weight > 0.5)]
    excited_idx = [int(k) for k in np.flatnonzero(excited_weight > 0.5)]
    if len(ground_idx) != 3 or len(excited_idx) != 6:
        raise ValueError(
            "could not separate ground and excited manifolds; "
            f"found {len(ground_idx)} ground and {len(excited_idx)} excited states"
        )
    dipole = params.t_dip_x + params.t_dip_y
    rows = []
    for gi, i in enumerate(ground_idx):
        weights = np.abs(vectors[GROUND, i]) ** 2
        character = _SPIN_CHARACTERS[int(np.argmax(weights))]
        for fi, f in enumerate(excited_idx):
            amp = np.vdot(vectors[:, f], dipole @ vectors[:, i])
            rows.append(
                TransitionRow(
                    ground_index=gi,
                    excited_index=fi,
                    energy_ghz=float(values[f] - values[i]),
                    strength=float(abs(amp) ** 2),
                    spin_character=character,
                )
            )
    return TransitionTable(tuple(rows))


def synth_ple_spectrum(
    table: TransitionTable,
    grid_ghz: Sequence[float] | np.ndarray,
    strength_floor: float = 1e-12,
) -> np.ndarray:
    """Lorentzian-broadened excitation spectrum sampled on ``grid_ghz``.

    Each line of strength A contributes A/(sqrt(pi)*gamma) at its center with
    full width at half maximum gamma = A/10, so every peak tops out at
    10/sqrt(pi) regardless of strength.  Zero-strength lines have no width to
    broaden and are skipped with a warning.
    """
    if not table.rows:
        raise ValueError("transition table is empty")
    grid = np.asarray(grid_ghz, dtype=float)
    out = np.zeros_like(grid)
    for row in table.rows:
        if row.strength <= strength_floor:
            warnings.warn(
                "skipping zero-strength line at "
                f"{row.energy_ghz:.4f} GHz (degenerate width)",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        amplitude = row.strength
        fwhm = amplitude / 10.0
        half_width = fwhm / 2.0
        out += (amplitude / (math.sqrt(math.pi) * fwhm)) * (
            half_width**2 / (half_width**2 + (grid - row.energy_ghz) ** 2)
        )
    return out


@dataclass(frozen=True, eq=False)
class FieldMap:
    """Transition tables along a monotone magnetic-field sweep."""

    b_mt: tuple[float, ...]
    tables: tuple[TransitionTable, ...]

    def rows(self):
        for b, table in zip(self.b_mt, self.tables):
            for row in table.rows:
                yield b, row.energy_ghz, row.strength, row.spin_character

    def zero_line_positions(self, n: int = 2) -> list[tuple[float, ...]]:
        return [
            tuple(r.energy_ghz for r in t.strongest_zero_transitions(n))
            for t in self.tables
        ]


def field_strain_map(
    params: ExcitedStateParams,
    strain: StrainField,
    b_mt_values: Sequence[float],
    theta_deg: float,
    field_azimuth_deg: float = 0.0,
) -> FieldMap:
    """Sweep the field magnitude at fixed strain and misalignment angle."""
    b_values = [float(b) for b in b_mt_values]
    if len(b_values) == 0:
        raise ValueError("field sweep must contain at least one point")
    diffs = np.diff(b_values)
    if len(diffs) and not (np.all(diffs >= 0) or np.all(diffs <= 0)):
        raise ValueError("field sweep must be monotone")
    tables = []
    for b in b_values:
        h = build_excited_hamiltonian(
            params, strain, FieldVector(b, theta_deg), field_azimuth_deg
        )
        tables.append(transition_table(diagonalize(h), params))
    return FieldMap(b_mt=tuple(b_values), tables=tuple(tables))

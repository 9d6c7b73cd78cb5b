"""Constant operator templates for the 14-level NV- optical model.

Level ordering (index: meaning):
    0-2   ground-state spin triplet, m_s = +1, 0, -1
    3-8   excited-state fine structure, kron(orbital, spin) with orbital
          ordered (X, Y) and spin ordered (+1, 0, -1):
          3=(X,+1) 4=(X,0) 5=(X,-1) 6=(Y,+1) 7=(Y,0) 8=(Y,-1)
    9-13  singlet shelf levels, kept as uncoupled diagonal placeholders

Every template is a Hermitian 14x14 complex matrix that multiplies a scalar
coefficient when the Hamiltonian is assembled; signs that the physical
construction attaches to a coefficient are folded into the template so that
all coefficients stay positive literature values.  Templates are unit free;
the coefficients carry the energy unit.
"""

from __future__ import annotations

import numpy as np

from .ground_spin import SPIN1_X, SPIN1_Y, SPIN1_Z

N_LEVELS = 14
GROUND = slice(0, 3)
EXCITED = slice(3, 9)
SINGLET = slice(9, 14)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_ID2 = np.eye(2, dtype=complex)
_ID3 = np.eye(3, dtype=complex)

_SX, _SY, _SZ = SPIN1_X, SPIN1_Y, SPIN1_Z
# anticommutator-style quadratic spin forms used by the fine-structure terms
_SZ2_TRACELESS = _SZ @ _SZ - (2.0 / 3.0) * _ID3
_SY2_MINUS_SX2 = _SY @ _SY - _SX @ _SX
_SYSX_PLUS_SXSY = _SY @ _SX + _SX @ _SY
_SXSZ_PLUS_SZSX = _SX @ _SZ + _SZ @ _SX
_SYSZ_PLUS_SZSY = _SY @ _SZ + _SZ @ _SY


def _embed(block: np.ndarray, rows: slice, cols: slice) -> np.ndarray:
    out = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    out[rows, cols] = block
    return out


# ground-state zero-field splitting, traceless convention
T_ZFS_GROUND = _embed(_SZ2_TRACELESS, GROUND, GROUND)

# excited-state spin-spin interaction, axial and transverse parts
T_SS_PARA = _embed(np.kron(_ID2, _SZ2_TRACELESS), EXCITED, EXCITED)
T_SS_PERP = _embed(
    np.kron(PAULI_Z, _SY2_MINUS_SX2) - np.kron(PAULI_X, _SYSX_PLUS_SXSY),
    EXCITED,
    EXCITED,
)

# excited-state spin-orbit interaction; the axial part carries a minus sign
# in the construction, folded into the template here
T_SO_PARA = _embed(-np.kron(PAULI_Y, _SZ), EXCITED, EXCITED)
T_SO_PERP = _embed(
    np.kron(PAULI_Z, _SXSZ_PLUS_SZSX) - np.kron(PAULI_X, _SYSZ_PLUS_SZSY),
    EXCITED,
    EXCITED,
)

# transverse strain / electric field acting on the orbital doublet; the
# y component carries the minus sign of the construction
T_STRAIN_X = _embed(np.kron(PAULI_Z, _ID3), EXCITED, EXCITED)
T_STRAIN_Y = _embed(-np.kron(PAULI_X, _ID3), EXCITED, EXCITED)

# orbital Zeeman term of the excited doublet (axial field only)
T_ORB_ZEEMAN = _embed(np.kron(PAULI_Y, _ID3), EXCITED, EXCITED)

# electron spin operators acting on both triplet manifolds (singlets inert)
T_SPIN_X = _embed(_SX, GROUND, GROUND) + _embed(np.kron(_ID2, _SX), EXCITED, EXCITED)
T_SPIN_Y = _embed(_SY, GROUND, GROUND) + _embed(np.kron(_ID2, _SY), EXCITED, EXCITED)
T_SPIN_Z = _embed(_SZ, GROUND, GROUND) + _embed(np.kron(_ID2, _SZ), EXCITED, EXCITED)

# projector selecting the excited fine-structure block (coarse energy offset)
P_EXCITED = _embed(np.eye(6, dtype=complex), EXCITED, EXCITED)


def _dipole(orbital_offset: int) -> np.ndarray:
    # spin-conserving optical coupling |orbital, m><ground, m| + h.c.
    out = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    for m in range(3):
        out[orbital_offset + m, m] = 1.0
    return out + out.conj().T


# x / y polarized dipole operators: ground <-> X branch, ground <-> Y branch
T_DIP_X = _dipole(3)
T_DIP_Y = _dipole(6)

ALL_TEMPLATES = {
    "t_zfs_ground": T_ZFS_GROUND,
    "t_ss_para": T_SS_PARA,
    "t_ss_perp": T_SS_PERP,
    "t_so_para": T_SO_PARA,
    "t_so_perp": T_SO_PERP,
    "t_strain_x": T_STRAIN_X,
    "t_strain_y": T_STRAIN_Y,
    "t_orb_zeeman": T_ORB_ZEEMAN,
    "t_spin_x": T_SPIN_X,
    "t_spin_y": T_SPIN_Y,
    "t_spin_z": T_SPIN_Z,
    "t_dip_x": T_DIP_X,
    "t_dip_y": T_DIP_Y,
}

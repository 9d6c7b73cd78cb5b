import numpy as np

from nvscc.level_templates import (
    ALL_TEMPLATES,
    EXCITED,
    GROUND,
    N_LEVELS,
    P_EXCITED,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SINGLET,
    T_DIP_X,
    T_DIP_Y,
    T_ORB_ZEEMAN,
    T_SPIN_X,
    T_SPIN_Y,
    T_SPIN_Z,
    T_SS_PARA,
    T_ZFS_GROUND,
)
from nvscc.ground_spin import SPIN1_X, SPIN1_Y, SPIN1_Z


def test_spin1_commutation_relations():
    assert np.allclose(SPIN1_X @ SPIN1_Y - SPIN1_Y @ SPIN1_X, 1j * SPIN1_Z)
    assert np.allclose(SPIN1_Y @ SPIN1_Z - SPIN1_Z @ SPIN1_Y, 1j * SPIN1_X)
    assert np.allclose(SPIN1_Z @ SPIN1_X - SPIN1_X @ SPIN1_Z, 1j * SPIN1_Y)


def test_spin1_casimir():
    s2 = SPIN1_X @ SPIN1_X + SPIN1_Y @ SPIN1_Y + SPIN1_Z @ SPIN1_Z
    assert np.allclose(s2, 2.0 * np.eye(3))


def test_pauli_algebra():
    assert np.allclose(PAULI_X @ PAULI_Y, 1j * PAULI_Z)
    for p in (PAULI_X, PAULI_Y, PAULI_Z):
        assert np.allclose(p @ p, np.eye(2))


def test_all_templates_hermitian():
    for name, mat in ALL_TEMPLATES.items():
        assert mat.shape == (N_LEVELS, N_LEVELS), name
        assert np.allclose(mat, mat.conj().T, atol=0), name


def test_singlet_rows_inert_everywhere():
    for name, mat in ALL_TEMPLATES.items():
        assert np.allclose(mat[SINGLET, :], 0), name
        assert np.allclose(mat[:, SINGLET], 0), name


def test_fine_structure_confined_to_excited_block():
    for name in ("t_ss_para", "t_ss_perp", "t_so_para", "t_so_perp",
                 "t_strain_x", "t_strain_y", "t_orb_zeeman"):
        mat = ALL_TEMPLATES[name]
        assert np.allclose(mat[GROUND, :], 0), name
        assert np.allclose(mat[:, GROUND], 0), name


def test_dipoles_couple_ground_to_single_orbital_branch():
    for m in range(3):
        assert T_DIP_X[3 + m, m] == 1.0
        assert T_DIP_Y[6 + m, m] == 1.0
    # spin conserving: no cross-spin elements
    assert np.count_nonzero(T_DIP_X) == 6
    assert np.count_nonzero(T_DIP_Y) == 6
    assert np.allclose(T_DIP_X[EXCITED, EXCITED], 0)
    assert np.allclose(T_DIP_X[GROUND, GROUND], 0)


def test_zfs_templates_traceless():
    assert abs(np.trace(T_ZFS_GROUND)) < 1e-12
    assert abs(np.trace(T_SS_PARA)) < 1e-12


def test_orbital_zeeman_squares_to_excited_projector():
    assert np.allclose(T_ORB_ZEEMAN @ T_ORB_ZEEMAN, P_EXCITED)


def test_spin_templates_act_blockwise():
    assert np.allclose(np.diag(T_SPIN_Z)[0:3], [1, 0, -1])
    assert np.allclose(np.diag(T_SPIN_Z)[3:9], [1, 0, -1, 1, 0, -1])
    comm = T_SPIN_X @ T_SPIN_Y - T_SPIN_Y @ T_SPIN_X
    assert np.allclose(comm, 1j * T_SPIN_Z)

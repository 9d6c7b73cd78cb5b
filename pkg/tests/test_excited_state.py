import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvscc.errors import ConfigError
from nvscc.excited_state import (
    ExcitedStateParams,
    FieldMap,
    StrainField,
    TransitionRow,
    TransitionTable,
    build_excited_hamiltonian,
    default_v_opt,
    diagonalize,
    field_strain_map,
    synth_ple_spectrum,
    transition_table,
)
from nvscc.ground_spin import FieldVector

DEFAULTS = ExcitedStateParams()
# small misaligned probe field: 20 MHz Zeeman scale, 45 degrees off axis
PROBE_FIELD = FieldVector(0.02 / 0.028, 45.0)


def test_default_coefficients():
    assert DEFAULTS.d_g_ghz == 2.87
    assert DEFAULTS.des_para_ghz == 1.42
    assert DEFAULTS.des_perp_ghz == 0.775
    assert DEFAULTS.les_para_ghz == 5.33
    assert DEFAULTS.les_perp_ghz == 0.154
    assert DEFAULTS.orbital_g == 0.1
    assert len(DEFAULTS.v_opt_ghz) == 14


def test_invalid_inputs_rejected():
    with pytest.raises(ConfigError):
        ExcitedStateParams(v_opt_ghz=(0.0,) * 13)
    with pytest.raises(ConfigError):
        ExcitedStateParams(des_para_ghz=float("inf"))
    with pytest.raises(ConfigError):
        StrainField(xi_perp_ghz=-1.0)
    bad = np.zeros((14, 14), dtype=complex)
    bad[0, 1] = 1.0  # not Hermitian
    with pytest.raises(Exception):
        ExcitedStateParams(t_ss_para=bad)


@given(
    xi=st.floats(0.0, 30.0),
    b=st.floats(0.0, 5.0),
    theta=st.floats(0.0, 180.0),
    phi_e=st.floats(0.0, 360.0),
)
@settings(max_examples=40, deadline=None)
def test_hermitian_real_spectrum_everywhere(xi, b, theta, phi_e):
    h = build_excited_hamiltonian(
        DEFAULTS, StrainField(xi, azimuth_deg=phi_e), FieldVector(b, theta)
    )
    assert np.allclose(h, h.conj().T, atol=0)
    values = np.linalg.eigvalsh(h)
    assert np.all(np.isfinite(values))


def test_orbital_branches_degenerate_at_zero_strain_zero_field():
    h = build_excited_hamiltonian(DEFAULTS, StrainField(0.0), FieldVector(0.0, 0.0))
    es = diagonalize(h)
    excited = np.sort(es.energies_ghz[(es.energies_ghz > 1.0) & (es.energies_ghz < 100.0)])
    gaps = np.diff(excited)
    # pairwise Ex/Ey degeneracy: gap below 1 MHz
    assert gaps[0] < 1e-3
    assert gaps[2] < 1e-3


def test_branch_separation_monotone_in_strain():
    separations = []
    for xi in (0.0, 1.0, 3.0, 6.0, 12.0):
        t = transition_table(
            diagonalize(
                build_excited_hamiltonian(DEFAULTS, StrainField(xi), PROBE_FIELD)
            ),
            DEFAULTS,
        )
        lo, hi = sorted(r.energy_ghz for r in t.strongest_zero_transitions(2))
        separations.append(hi - lo)
    assert all(b > a for a, b in zip(separations, separations[1:]))


def test_transition_table_full_grid_with_zeros():
    t = transition_table(
        diagonalize(build_excited_hamiltonian(DEFAULTS, StrainField(0.0), FieldVector(0.0, 0.0))),
        DEFAULTS,
    )
    assert len(t.rows) == 18
    assert all(r.strength >= 0 for r in t.rows)
    assert all(math.isfinite(r.energy_ghz) for r in t.rows)
    assert any(r.strength < 1e-20 for r in t.rows)  # forbidden rows preserved
    assert {r.spin_character for r in t.rows} == {-1, 0, 1}


def test_strength_invariant_under_global_phase():
    h = build_excited_hamiltonian(DEFAULTS, StrainField(1.7), PROBE_FIELD)
    es = diagonalize(h)
    t0 = transition_table(es, DEFAULTS)
    rng = np.random.default_rng(7)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=es.states.shape[1]))
    from nvscc.excited_state import Eigensystem

    rephased = Eigensystem(es.energies_ghz, es.states * phases[None, :])
    t1 = transition_table(rephased, DEFAULTS)
    for a, b in zip(t0.rows, t1.rows):
        assert a.strength == pytest.approx(b.strength, abs=1e-12)


def test_zeroed_dipole_templates_kill_all_strengths():
    zero = np.zeros((14, 14), dtype=complex)
    params = ExcitedStateParams(t_dip_x=zero, t_dip_y=zero.copy())
    t = transition_table(
        diagonalize(build_excited_hamiltonian(params, StrainField(1.7), PROBE_FIELD)),
        params,
    )
    assert all(r.strength == 0 for r in t.rows)


def test_two_strong_spin_zero_rows_at_deep_strain():
    t = transition_table(
        diagonalize(build_excited_hamiltonian(DEFAULTS, StrainField(1.7), PROBE_FIELD)),
        DEFAULTS,
    )
    strengths = sorted((r.strength for r in t.zero_character_rows()), reverse=True)
    assert strengths[0] > 0.9 and strengths[1] > 0.9
    assert all(s < 0.05 for s in strengths[2:])


def test_strain_anchor_lines_default_constants():
    lo, _ = sorted(
        r.energy_ghz
        for r in transition_table(
            diagonalize(build_excited_hamiltonian(DEFAULTS, StrainField(1.7), PROBE_FIELD)),
            DEFAULTS,
        ).strongest_zero_transitions(2)
    )
    assert abs(lo - 7.0) <= 1.5
    _, hi = sorted(
        r.energy_ghz
        for r in transition_table(
            diagonalize(build_excited_hamiltonian(DEFAULTS, StrainField(12.6), PROBE_FIELD)),
            DEFAULTS,
        ).strongest_zero_transitions(2)
    )
    assert abs(hi - 19.0) <= 2.0


def test_zpl_offset_shifts_lines_rigidly():
    base = ExcitedStateParams().with_zpl_offset(6.0)
    shifted = ExcitedStateParams().with_zpl_offset(8.5)
    args = (StrainField(1.7), PROBE_FIELD)
    t0 = transition_table(diagonalize(build_excited_hamiltonian(base, *args)), base)
    t1 = transition_table(diagonalize(build_excited_hamiltonian(shifted, *args)), shifted)
    for a, b in zip(t0.rows, t1.rows):
        assert b.energy_ghz - a.energy_ghz == pytest.approx(2.5, abs=1e-9)


def test_ple_peak_height_universal():
    table = TransitionTable((TransitionRow(0, 0, 5.0, 0.8, 0),))
    grid = np.linspace(4.5, 5.5, 40001)
    f = synth_ple_spectrum(table, grid)
    assert f.max() == pytest.approx(10.0 / math.sqrt(math.pi), rel=1e-6)
    table2 = TransitionTable((TransitionRow(0, 0, 5.0, 1.9, 0),))
    f2 = synth_ple_spectrum(table2, grid)
    assert f2.max() == pytest.approx(10.0 / math.sqrt(math.pi), rel=1e-6)


def test_ple_fwhm_equals_line_gamma():
    strength = 0.8
    table = TransitionTable((TransitionRow(0, 0, 5.0, strength, 0),))
    grid = np.linspace(4.5, 5.5, 200001)
    f = synth_ple_spectrum(table, grid)
    above = grid[f >= f.max() / 2]
    assert above[-1] - above[0] == pytest.approx(strength / 10.0, abs=1e-4)


def test_ple_linearity_and_positivity():
    r1 = TransitionRow(0, 0, 2.0, 0.7, 0)
    r2 = TransitionRow(0, 1, 9.0, 1.2, 0)
    grid = np.linspace(-1.0, 12.0, 5001)
    both = synth_ple_spectrum(TransitionTable((r1, r2)), grid)
    solo = synth_ple_spectrum(TransitionTable((r1,)), grid) + synth_ple_spectrum(
        TransitionTable((r2,)), grid
    )
    assert np.allclose(both, solo)
    assert np.all(both >= 0)


def test_ple_zero_strength_line_skipped_with_warning():
    table = TransitionTable(
        (TransitionRow(0, 0, 5.0, 0.8, 0), TransitionRow(0, 1, 6.0, 0.0, 0))
    )
    grid = np.linspace(4.0, 7.0, 101)
    with pytest.warns(RuntimeWarning):
        f = synth_ple_spectrum(table, grid)
    assert np.all(np.isfinite(f))


def test_ple_empty_table_rejected():
    with pytest.raises(ValueError):
        synth_ple_spectrum(TransitionTable(()), np.linspace(0, 1, 5))


def test_field_map_single_point_matches_direct_table():
    fmap = field_strain_map(DEFAULTS, StrainField(1.7), [0.5], theta_deg=45.0)
    direct = transition_table(
        diagonalize(
            build_excited_hamiltonian(DEFAULTS, StrainField(1.7), FieldVector(0.5, 45.0))
        ),
        DEFAULTS,
    )
    assert isinstance(fmap, FieldMap)
    assert len(fmap.tables) == 1
    for a, b in zip(fmap.tables[0].rows, direct.rows):
        assert a.energy_ghz == pytest.approx(b.energy_ghz, abs=1e-12)
        assert a.strength == pytest.approx(b.strength, abs=1e-12)


def test_field_map_requires_monotone_sweep():
    with pytest.raises(ValueError):
        field_strain_map(DEFAULTS, StrainField(1.7), [0.0, 1.0, 0.5], theta_deg=20.0)
    fmap = field_strain_map(DEFAULTS, StrainField(20.0), np.linspace(0, 2, 5), 20.0)
    assert len(list(fmap.rows())) == 5 * 18
    assert all(len(pos) == 2 for pos in fmap.zero_line_positions())


def test_default_v_opt_layout():
    v = default_v_opt(6.8)
    assert v[:3] == (0.0, 0.0, 0.0)
    assert v[3:9] == (6.8,) * 6
    assert len(v) == 14

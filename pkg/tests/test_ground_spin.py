import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvscc.errors import FitNonConvergenceError, UnderdeterminedError
from nvscc.ground_spin import (
    FieldVector,
    GroundSpinParams,
    OdmrLine,
    OdmrLineSet,
    build_ground_hamiltonian,
    infer_field,
    odmr_transitions,
)

DEFAULTS = GroundSpinParams()


def test_defaults_match_documented_values():
    assert DEFAULTS.d_g_hz == 2.87e9
    assert DEFAULTS.gamma_e_hz_per_mt == 28e6
    assert DEFAULTS.gamma_n_hz_per_mt == -3.08e3
    assert DEFAULTS.q_hz == -4.945e6
    assert DEFAULTS.a_par_hz == -2.16e6
    assert DEFAULTS.a_perp_hz == -2.62e6


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        GroundSpinParams(d_g_hz=-1.0)
    with pytest.raises(ValueError):
        GroundSpinParams(a_par_hz=float("nan"))
    with pytest.raises(ValueError):
        FieldVector(b_mt=-0.1, theta_deg=0.0)
    with pytest.raises(ValueError):
        FieldVector(b_mt=0.1, theta_deg=181.0)


@given(
    b=st.floats(0.0, 10.0),
    theta=st.floats(0.0, 180.0),
    azimuth=st.floats(0.0, 360.0),
)
@settings(max_examples=60, deadline=None)
def test_hermiticity_exact(b, theta, azimuth):
    h = build_ground_hamiltonian(DEFAULTS, FieldVector(b, theta), azimuth_deg=azimuth)
    assert np.array_equal(h, h.conj().T)


@given(b=st.floats(0.0, 5.0), theta=st.floats(0.0, 180.0))
@settings(max_examples=40, deadline=None)
def test_trace_independent_of_theta(b, theta):
    h0 = build_ground_hamiltonian(DEFAULTS, FieldVector(b, 0.0))
    h1 = build_ground_hamiltonian(DEFAULTS, FieldVector(b, theta))
    assert np.trace(h0).real == pytest.approx(np.trace(h1).real, abs=1e-3)


def test_zero_field_splitting_only_spectrum():
    params = GroundSpinParams(
        d_g_hz=2.87e9,
        gamma_e_hz_per_mt=0.0,
        gamma_n_hz_per_mt=0.0,
        q_hz=0.0,
        a_par_hz=0.0,
        a_perp_hz=0.0,
    )
    h = build_ground_hamiltonian(params, FieldVector(0.0, 0.0))
    evals = np.linalg.eigvalsh(h)
    assert np.allclose(np.sort(evals), [0.0] * 3 + [2.87e9] * 6)


def test_zero_field_hyperfine_line_spacing():
    lines = odmr_transitions(DEFAULTS, FieldVector(0.0, 0.0))
    freqs = np.unique(np.round(lines.frequencies_hz, 0))
    # degenerate electron branches leave 3 distinct hyperfine lines
    assert len(freqs) <= 4
    centers = np.sort(lines.frequencies_hz)
    span = centers[-1] - centers[0]
    assert span == pytest.approx(abs(DEFAULTS.a_par_hz) * 2, abs=0.05e6)


def test_axial_zeeman_branch_splitting():
    lines = odmr_transitions(DEFAULTS, FieldVector(1.0, 0.0))
    plus = np.mean([l.frequency_hz for l in lines.lines if l.label == "ms+1"])
    minus = np.mean([l.frequency_hz for l in lines.lines if l.label == "ms-1"])
    assert plus - minus == pytest.approx(2 * DEFAULTS.gamma_e_hz_per_mt * 1.0, rel=1e-4)


def test_three_lines_per_branch_sorted():
    lines = odmr_transitions(DEFAULTS, FieldVector(0.7, 39.0))
    labels = [l.label for l in lines.lines]
    assert labels.count("ms+1") == 3
    assert labels.count("ms-1") == 3
    freqs = lines.frequencies_hz
    assert np.all(np.diff(freqs) >= 0)
    assert np.all(freqs > 0)


@given(azimuth=st.floats(0.0, 360.0))
@settings(max_examples=20, deadline=None)
def test_azimuthal_rotation_leaves_eigenvalues(azimuth):
    field = FieldVector(0.7, 39.0)
    h0 = build_ground_hamiltonian(DEFAULTS, field, azimuth_deg=0.0)
    h1 = build_ground_hamiltonian(DEFAULTS, field, azimuth_deg=azimuth)
    assert np.allclose(np.linalg.eigvalsh(h0), np.linalg.eigvalsh(h1), atol=1e-3)


def test_eigenvalues_real_and_sorted():
    h = build_ground_hamiltonian(DEFAULTS, FieldVector(2.3, 57.0))
    from nvscc.linalg import ordered_eigh

    values, vectors = ordered_eigh(h)
    assert np.all(np.diff(values) >= 0)
    assert np.allclose(h @ vectors, vectors * values, atol=1e-3)
    values2, vectors2 = ordered_eigh(h)
    assert np.array_equal(values, values2)
    assert np.array_equal(vectors, vectors2)


@pytest.mark.parametrize("b,theta", [(0.7, 39.0), (0.1, 10.0), (2.0, 80.0), (5.0, 0.0)])
def test_roundtrip_inversion(b, theta):
    lines = odmr_transitions(DEFAULTS, FieldVector(b, theta))
    result = infer_field(lines, DEFAULTS)
    assert result.field.b_mt == pytest.approx(b, rel=0.01)
    assert result.field.theta_deg == pytest.approx(theta, rel=0.01, abs=0.5)


def test_zero_field_inference_flags_theta():
    lines = odmr_transitions(DEFAULTS, FieldVector(0.0, 0.0))
    result = infer_field(lines, DEFAULTS)
    assert result.field.b_mt == pytest.approx(0.0, abs=0.05)
    assert not result.theta_defined
    assert math.isinf(result.theta_sigma_deg)


def test_underdetermined_rejected():
    lines = OdmrLineSet(lines=(OdmrLine(2.87e9, "ms+1"),))
    with pytest.raises(UnderdeterminedError):
        infer_field(lines, DEFAULTS)


def test_unreachable_lines_signal_non_convergence():
    # lines far from anything the Hamiltonian can produce at B <= 5 mT
    lines = OdmrLineSet(
        lines=(
            OdmrLine(1.0e9, "ms-1"),
            OdmrLine(5.0e9, "ms+1"),
        )
    )
    with pytest.raises(FitNonConvergenceError):
        infer_field(lines, DEFAULTS, grid_b_step_mt=0.5, grid_theta_step_deg=15.0)


def test_line_set_validation():
    with pytest.raises(ValueError):
        OdmrLineSet(lines=(OdmrLine(-1.0, "ms+1"),))
    with pytest.raises(ValueError):
        OdmrLineSet(lines=(OdmrLine(3e9, "ms+1"), OdmrLine(2e9, "ms-1")))

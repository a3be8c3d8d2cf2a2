import math

import pytest
from hypothesis import given, strategies as st

from mlti.errors import ValidationError
from mlti.qstate import (
    Angle,
    DensityMatrix2,
    apply_pauli_channel,
    apply_x_frame,
    fidelity_with,
    make_rotation_density,
    maximally_mixed,
    noisy_rotation_density,
    normalize_angle,
    rotate,
    trace_distance_to,
)

from conftest import random_density

angles = st.floats(min_value=-4.0, max_value=4.0)


def test_angle_normalization():
    assert normalize_angle(math.pi + 2 * math.pi) == pytest.approx(math.pi)
    assert normalize_angle(-math.pi) == pytest.approx(math.pi)
    assert Angle(3 * math.pi).value == pytest.approx(math.pi)
    with pytest.raises(ValidationError):
        Angle(math.inf)


def test_rotation_density_examples():
    r0 = make_rotation_density(0.0)
    assert (r0.rho_pp, r0.rho_mm, r0.rho_pm) == (1.0, 0.0, 0.0)
    r4 = make_rotation_density(math.pi / 4)
    assert r4.rho_pp == pytest.approx(0.5, abs=1e-15)
    assert r4.rho_pm == pytest.approx(-0.5j, abs=1e-15)
    r8 = make_rotation_density(math.pi / 8)
    assert r8.rho_pp == pytest.approx(0.8535533905932737, abs=1e-12)
    assert r8.rho_mm == pytest.approx(0.1464466094067262, abs=1e-12)
    assert r8.rho_pm == pytest.approx(-0.3535533905932738j, abs=1e-12)


@given(angles)
def test_rotation_density_is_pure(theta):
    assert abs(make_rotation_density(theta).determinant()) <= 1e-12


def test_fidelity_examples():
    theta = 0.37
    rho = make_rotation_density(theta)
    assert fidelity_with(rho, theta) == pytest.approx(1.0, abs=1e-14)
    assert fidelity_with(rho, theta + math.pi / 2) == pytest.approx(0.0, abs=1e-14)
    assert fidelity_with(maximally_mixed(), theta) == pytest.approx(0.5, abs=1e-15)


@given(angles, st.integers(0, 2**32 - 1))
def test_fidelity_complement(theta, seed):
    import numpy as np

    rho = random_density(np.random.default_rng(seed))
    total = fidelity_with(rho, theta) + fidelity_with(rho, theta + math.pi / 2)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_trace_distance_examples():
    theta = -0.6
    rho = make_rotation_density(theta)
    assert trace_distance_to(rho, theta) == pytest.approx(0.0, abs=1e-12)
    assert trace_distance_to(rho, theta + math.pi / 2) == pytest.approx(1.0, abs=1e-12)


@given(angles, st.floats(min_value=0.0, max_value=0.5))
def test_diagonal_mixture_distance_equals_infidelity(theta, eps):
    rho = noisy_rotation_density(theta, eps, 0.0)
    assert trace_distance_to(rho, theta) == pytest.approx(eps, abs=1e-12)
    assert 1.0 - fidelity_with(rho, theta) == pytest.approx(eps, abs=1e-12)


def test_pauli_channel_examples():
    rho = make_rotation_density(0.1)
    same = apply_pauli_channel(rho, 0.0, 0.0)
    assert same == rho
    mixed = apply_pauli_channel(maximally_mixed(), 0.2, 0.3)
    assert mixed == maximally_mixed()
    flipped = apply_pauli_channel(rho, 0.0, 1e-3)
    # A Z flip lands exactly on the orthogonal state.
    assert 1.0 - fidelity_with(flipped, 0.1) == pytest.approx(1e-3, abs=1e-15)


def test_pauli_channel_x_contribution():
    theta = 0.4
    rho = apply_pauli_channel(make_rotation_density(theta), 1e-3, 0.0)
    assert 1.0 - fidelity_with(rho, theta) == pytest.approx(
        1e-3 * math.sin(2 * theta) ** 2, rel=1e-9
    )


@given(
    angles,
    st.floats(min_value=0.0, max_value=0.5),
    st.floats(min_value=0.0, max_value=0.5),
)
def test_pauli_channel_preserves_state_invariants(theta, p_x, p_z):
    rho = make_rotation_density(theta)
    out = apply_pauli_channel(rho, p_x, p_z)
    assert out.rho_pp + out.rho_mm == pytest.approx(1.0, abs=1e-12)
    assert out.determinant() >= -1e-12


def test_pauli_channel_rejects_bad_probabilities():
    rho = maximally_mixed()
    with pytest.raises(ValidationError):
        apply_pauli_channel(rho, -0.1, 0.0)
    with pytest.raises(ValidationError):
        apply_pauli_channel(rho, 0.7, 0.7)


@given(angles, angles)
def test_rotate_moves_rotation_states(theta, phi):
    rho = rotate(make_rotation_density(theta), phi)
    assert fidelity_with(rho, theta + phi) == pytest.approx(1.0, abs=1e-12)


def test_x_frame_negates_angle():
    rho = apply_x_frame(make_rotation_density(0.23))
    assert fidelity_with(rho, -0.23) == pytest.approx(1.0, abs=1e-14)


def test_density_validation():
    with pytest.raises(ValidationError):
        DensityMatrix2(0.7, 0.7, 0.0j)  # trace 1.4
    with pytest.raises(ValidationError):
        DensityMatrix2(0.5, 0.5, 0.9j)  # not PSD
    # A sub-tolerance positivity violation is clipped, not rejected.
    eps = 2e-13
    rho = DensityMatrix2(0.5, 0.5, 0.5 * math.sqrt(1.0 + eps) * 1j)
    assert abs(rho.rho_pm) <= 0.5 + 1e-15


def test_noisy_rotation_density_budget():
    with pytest.raises(ValidationError):
        noisy_rotation_density(0.1, 1e-4, 0.5)
    rho = noisy_rotation_density(0.1, 1e-2, math.sqrt(1e-2 - 1e-4))
    assert rho.determinant() == pytest.approx(0.0, abs=1e-12)

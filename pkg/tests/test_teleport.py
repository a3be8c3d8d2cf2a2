import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlti.errors import ValidationError
from mlti.qstate import (
    apply_pauli_channel,
    apply_x_frame,
    fidelity_with,
    make_rotation_density,
    noisy_rotation_density,
    rotate,
    trace_distance_to,
)
from mlti.teleport import (
    TwoQubitDensity,
    data_marginal,
    dephase_reference,
    embed_pair,
    randomized_teleport,
    teleport_channel,
    teleport_channel_flipped,
)

from conftest import random_density

angles = st.floats(min_value=-1.4, max_value=1.4)


def _close(a, b, tol=1e-12):
    return (
        abs(a.rho_pp - b.rho_pp) <= tol
        and abs(a.rho_mm - b.rho_mm) <= tol
        and abs(a.rho_pm - b.rho_pm) <= tol
    )


@given(angles, st.integers(0, 2**32 - 1))
def test_plain_channel_teleports_the_rotation(theta, seed):
    rho_in = random_density(np.random.default_rng(seed))
    out = teleport_channel(embed_pair(rho_in, make_rotation_density(theta)), theta)
    assert _close(data_marginal(out), rotate(rho_in, theta))


@given(angles, st.integers(0, 2**32 - 1))
def test_orthogonal_ancilla_gives_z_conjugated_output(theta, seed):
    rho_in = random_density(np.random.default_rng(seed))
    orth = make_rotation_density(theta + math.pi / 2)
    out = teleport_channel(embed_pair(rho_in, orth), theta)
    want = apply_pauli_channel(rotate(rho_in, theta), 0.0, 1.0)
    assert _close(data_marginal(out), want)


@given(angles, st.integers(0, 2**32 - 1))
def test_flipped_channel_with_x_conjugated_ancilla(theta, seed):
    rho_in = random_density(np.random.default_rng(seed))
    anc = apply_x_frame(make_rotation_density(theta))
    out = teleport_channel_flipped(embed_pair(rho_in, anc), theta)
    assert _close(data_marginal(out), rotate(rho_in, theta))
    anc_orth = apply_x_frame(make_rotation_density(theta + math.pi / 2))
    out = teleport_channel_flipped(embed_pair(rho_in, anc_orth), theta)
    want = apply_pauli_channel(rotate(rho_in, theta), 0.0, 1.0)
    assert _close(data_marginal(out), want)


def test_zero_angle_is_identity():
    rho_in = make_rotation_density(0.7)
    out = teleport_channel(embed_pair(rho_in, make_rotation_density(0.0)), 0.0)
    assert _close(data_marginal(out), rho_in)


@settings(max_examples=80)
@given(
    angles,
    angles,
    st.floats(min_value=0.0, max_value=0.05),
    st.floats(min_value=-1.0, max_value=1.0),
)
def test_randomized_teleport_kills_coherence(theta, phi, eps, b_frac):
    b = b_frac * math.sqrt(max(eps - eps * eps, 0.0))
    rho_in = make_rotation_density(phi)
    got = randomized_teleport(rho_in, noisy_rotation_density(theta, eps, b), theta)
    want = apply_pauli_channel(rotate(rho_in, theta), 0.0, eps)
    assert _close(got, want)
    # Output is diagonal in the target frame: infidelity equals trace distance.
    inf = 1.0 - fidelity_with(got, phi + theta)
    assert abs(inf - trace_distance_to(got, phi + theta)) <= 1e-12
    assert inf == pytest.approx(eps, abs=1e-12)


@given(angles, st.floats(min_value=0.0, max_value=0.05))
def test_randomized_teleport_is_coherence_independent(theta, eps):
    rho_in = make_rotation_density(0.31)
    b = math.sqrt(max(eps - eps * eps, 0.0))
    with_b = randomized_teleport(rho_in, noisy_rotation_density(theta, eps, b), theta)
    without = randomized_teleport(rho_in, noisy_rotation_density(theta, eps, 0.0), theta)
    assert _close(with_b, without)


@settings(max_examples=50)
@given(angles, angles, st.floats(min_value=0.0, max_value=0.05),
       st.floats(min_value=-1.0, max_value=1.0))
def test_randomized_equals_predephased_ancilla(theta, phi, eps, b_frac):
    b = b_frac * math.sqrt(max(eps - eps * eps, 0.0))
    rho_in = make_rotation_density(phi)
    anc = noisy_rotation_density(theta, eps, b)
    via_random = randomized_teleport(rho_in, anc, theta)
    via_dephased = data_marginal(
        teleport_channel(embed_pair(rho_in, dephase_reference(anc, theta)), theta)
    )
    assert _close(via_random, via_dephased)


def test_dephase_reference_examples():
    theta = 0.52
    pure = make_rotation_density(theta)
    assert _close(dephase_reference(pure, theta), pure)
    diag = noisy_rotation_density(theta, 0.1, 0.0)
    assert _close(dephase_reference(diag, theta), diag)
    b = 0.9 * math.sqrt(0.1 - 0.01)
    tilted = noisy_rotation_density(theta, 0.1, b)
    cleaned = dephase_reference(tilted, theta)
    # Coherence in the rotated frame is gone: equal to the diagonal mixture.
    assert _close(cleaned, diag)


def test_two_qubit_density_validation():
    good = np.eye(4, dtype=complex) / 4.0
    TwoQubitDensity(good)
    with pytest.raises(ValidationError):
        TwoQubitDensity(np.eye(4, dtype=complex))  # trace 4
    bad = np.zeros((4, 4), dtype=complex)
    bad[0, 1] = 1.0
    bad[0, 0] = 1.0
    with pytest.raises(ValidationError):
        TwoQubitDensity(bad)

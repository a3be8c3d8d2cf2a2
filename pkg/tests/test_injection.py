import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlti.errors import ValidationError
from mlti.injection import (
    accept_rate_ideal,
    accept_rate_m,
    flipped_input_mixture,
    input_angle,
    level1_infidelity_analytic,
    output_angle,
    post_selected_state,
    suppression_bound,
    ti_channel,
)
from mlti.qstate import (
    DensityMatrix2,
    fidelity_with,
    make_rotation_density,
    maximally_mixed,
    noisy_rotation_density,
)

small_angles = st.floats(min_value=1e-4, max_value=math.pi / 4)
ks = st.integers(min_value=1, max_value=15)


def test_output_angle_examples():
    assert output_angle(0.31, 1) == pytest.approx(0.31, abs=1e-15)
    assert output_angle(0.0, 5) == 0.0
    # High-precision oracle: arctan(tan(pi/8)^3).
    assert output_angle(math.pi / 8, 3) == pytest.approx(0.0709485273021, abs=1e-11)
    with pytest.raises(ValidationError):
        output_angle(math.pi / 2, 2)


def test_input_angle_examples():
    assert input_angle(0.2, 1) == pytest.approx(0.2, abs=1e-15)
    # High-precision oracle: arctan(tan(pi/1024)^(1/7)).
    assert input_angle(math.pi / 1024, 7) == pytest.approx(0.412411030713, abs=1e-11)
    # Round trip of the worked example recovers pi/8 at rounded precision.
    assert input_angle(0.0709482, 3) == pytest.approx(math.pi / 8, abs=1e-5)


@given(small_angles, ks, st.booleans())
def test_angle_maps_are_inverse(alpha, k, negate):
    a = -alpha if negate else alpha
    beta = output_angle(a, k)
    assert input_angle(beta, k) == pytest.approx(a, abs=1e-12)
    assert output_angle(input_angle(a, k), k) == pytest.approx(a, abs=1e-12)


def test_output_angle_monotonicity():
    grid = np.linspace(1e-3, math.pi / 4 - 1e-3, 40)
    for k in (2, 5, 9):
        vals = [output_angle(a, k) for a in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))
    for alpha in (0.2, 0.5):
        by_k = [output_angle(alpha, k) for k in range(1, 12)]
        assert all(b < a for a, b in zip(by_k, by_k[1:]))


def test_accept_rate_examples():
    assert accept_rate_ideal(0.0, 7) == 1.0
    for k in (1, 2, 5):
        assert accept_rate_ideal(math.pi / 4, k) == pytest.approx(2.0 ** (1 - k), abs=1e-14)
    assert accept_rate_ideal(math.pi / 8, 3) == pytest.approx(0.625, abs=1e-12)


def test_accept_rate_m_examples():
    a = math.pi / 8
    assert accept_rate_m(a, 3, 0) == pytest.approx(accept_rate_ideal(a, 3), abs=1e-15)
    assert accept_rate_m(a, 3, 1) == pytest.approx(0.125, abs=1e-13)
    with pytest.raises(ValidationError):
        accept_rate_m(a, 3, 4)


@given(small_angles, ks, st.data())
def test_accept_rate_m_symmetry(alpha, k, data):
    m = data.draw(st.integers(0, k))
    assert accept_rate_m(alpha, k, m) == pytest.approx(
        accept_rate_m(alpha, k, k - m), abs=1e-14
    )


def test_post_selected_state_examples():
    a, k = math.pi / 8, 3
    top = post_selected_state(a, k, 0)
    assert float(top.state.angle) == pytest.approx(output_angle(a, k), abs=1e-12)
    assert top.phase_quarter_turns == 1
    bottom = post_selected_state(a, k, k)
    # Full flip swaps the coefficient roles.
    assert float(bottom.state.angle) == pytest.approx(
        math.pi / 2 - output_angle(a, k), abs=1e-12
    )
    mid = post_selected_state(a, k, 1)
    c, s = math.cos(a), math.sin(a)
    assert float(mid.state.angle) == pytest.approx(math.atan2(s**2 * c, c**2 * s), abs=1e-12)
    with pytest.raises(ValidationError):
        post_selected_state(0.0, 3, 1)


def test_ti_channel_examples():
    rho = make_rotation_density(0.4)
    out = ti_channel(rho, 1)
    assert out.accept_rate == pytest.approx(1.0, abs=1e-15)
    assert fidelity_with(out.state, 0.4) == pytest.approx(1.0, abs=1e-14)

    out = ti_channel(maximally_mixed(), 4)
    assert out.accept_rate == pytest.approx(2.0 ** (1 - 4), abs=1e-15)
    assert out.state == maximally_mixed()

    out = ti_channel(DensityMatrix2(0.9, 0.1, 0.0j), 2)
    assert out.accept_rate == pytest.approx(0.82, abs=1e-15)
    assert out.state.rho_pp == pytest.approx(0.81 / 0.82, abs=1e-14)
    assert out.state.rho_mm == pytest.approx(0.01 / 0.82, abs=1e-14)


@settings(max_examples=150)
@given(small_angles, ks)
def test_ti_channel_purity_and_accept(alpha, k):
    out = ti_channel(make_rotation_density(alpha), k)
    assert 1.0 - fidelity_with(out.state, output_angle(alpha, k)) <= 1e-12
    assert out.accept_rate == pytest.approx(accept_rate_ideal(alpha, k), abs=1e-12)


@settings(max_examples=60)
@given(
    small_angles,
    st.integers(2, 10),
    st.floats(min_value=0.0, max_value=0.2),
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=2 * math.pi),
)
def test_ti_channel_output_is_valid_state(alpha, k, eps, b_frac, phase):
    b_mag = abs(b_frac) * math.sqrt(max(eps - eps * eps, 0.0))
    b = b_mag * complex(math.cos(phase), math.sin(phase))
    out = ti_channel(noisy_rotation_density(alpha, eps, b), k)
    # Hermiticity and positivity are enforced by construction; re-check the
    # numbers rather than trusting the constructor.
    assert out.state.rho_pp + out.state.rho_mm == pytest.approx(1.0, abs=1e-12)
    assert out.state.determinant() >= -1e-12


def test_level1_infidelity_examples():
    assert level1_infidelity_analytic(0.3, 4, 0.0) == 0.0
    # Linear in the flip rate at small rates (within 1%).
    lo = level1_infidelity_analytic(0.3, 4, 1e-5)
    hi = level1_infidelity_analytic(0.3, 4, 1e-3)
    assert hi / lo == pytest.approx(100.0, rel=0.01)


@settings(max_examples=60)
@given(small_angles, st.integers(1, 12), st.floats(min_value=1e-6, max_value=5e-3))
def test_level1_infidelity_matches_channel(alpha, k, p):
    mixture = flipped_input_mixture(alpha, p)
    out = ti_channel(mixture, k)
    channel_route = 1.0 - fidelity_with(out.state, output_angle(alpha, k))
    assert level1_infidelity_analytic(alpha, k, p) == pytest.approx(
        channel_route, abs=1e-10
    )


def test_level1_infidelity_sign_invariant():
    assert level1_infidelity_analytic(-0.25, 3, 1e-4) == pytest.approx(
        level1_infidelity_analytic(0.25, 3, 1e-4), abs=1e-18
    )


def test_suppression_bound_examples():
    assert suppression_bound(4, 0.1, 0.0) == 0.0
    assert suppression_bound(1, 0.2, 1e-3) == pytest.approx(1e-3, abs=1e-18)
    # Frozen from the high-precision oracle: 9 * 0.0709482^(4/3) * 1e-4.
    assert suppression_bound(3, 0.0709482, 1e-4) == pytest.approx(2.6434089e-5, rel=1e-6)
    with pytest.raises(ValidationError):
        suppression_bound(3, 0.0, 1e-4)


def test_exact_prefactor_suppression_bound_holds_on_grid():
    """One-level suppression with the exact branch-overlap prefactor.

    This is the provable form of the per-level bound: the asymptotic
    |beta|^(2(1-1/k)) of ``suppression_bound`` is replaced by the exact
    overlap factor of the realized input angle.
    """
    for k in range(2, 9):
        for beta in (1e-3, 1e-2, 0.1, 0.3):
            alpha = input_angle(beta, k)
            c, s = math.cos(alpha), math.sin(alpha)
            factor = (c * s) ** (2 * k - 2) / accept_rate_ideal(alpha, k)
            for eps in (1e-6, 1e-5, 1e-4, 1e-3):
                for b in (0.0, math.sqrt(eps - eps * eps)):
                    out = ti_channel(noisy_rotation_density(alpha, eps, b), k)
                    err = 1.0 - fidelity_with(out.state, beta)
                    bound = k * k * eps * factor / out.accept_rate
                    assert err <= bound * (1.0 + 10.0 * math.sqrt(eps))

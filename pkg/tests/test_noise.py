import pytest
from hypothesis import given, strategies as st

from mlti.errors import ValidationError
from mlti.noise import (
    CircuitNoise,
    PhysicalNoise,
    depolarizing_channels,
    logical_rate_rect,
    logical_rate_square,
    undetected_group_z_rate,
)


def test_square_examples():
    r = logical_rate_square(5, PhysicalNoise(1e-3))
    assert r.p_x == pytest.approx(5e-5, rel=1e-12)
    assert r.p_z == pytest.approx(5e-5, rel=1e-12)
    r3 = logical_rate_square(3, PhysicalNoise(1e-3))
    assert r3.p_x == pytest.approx(5e-4, rel=1e-12)
    zero = logical_rate_square(7, PhysicalNoise(0.0))
    assert zero.p_x == 0.0 and zero.p_z == 0.0


def test_square_requires_odd_distance():
    with pytest.raises(ValidationError):
        logical_rate_square(4, PhysicalNoise(1e-3))
    with pytest.raises(ValidationError):
        logical_rate_square(1, PhysicalNoise(1e-3))


def test_rect_reduces_to_square():
    for d in (3, 5, 7):
        square = logical_rate_square(d, PhysicalNoise(1e-3))
        rect = logical_rate_rect(d, d, PhysicalNoise(1e-3))
        assert rect.p_x == pytest.approx(square.p_x, rel=1e-12)
        assert rect.p_z == pytest.approx(square.p_z, rel=1e-12)


def test_rect_even_distance_example():
    r = logical_rate_rect(4, 6, PhysicalNoise(1e-3))
    # x axis: area 24 over 2*(4-1)^2, times 0.05 * 0.1^2
    assert r.p_x == pytest.approx((24.0 / 18.0) * 0.05 * 0.01, rel=1e-12)
    assert r.p_z == pytest.approx((24.0 / 50.0) * 0.05 * 0.1**3, rel=1e-12)
    assert logical_rate_rect(4, 6, PhysicalNoise(0.0)).p_x == 0.0


def test_rect_distance_bounds():
    with pytest.raises(ValidationError):
        logical_rate_rect(2, 5, PhysicalNoise(1e-3))
    with pytest.raises(ValidationError):
        logical_rate_rect(1, 5, PhysicalNoise(1e-3))


@given(st.sampled_from([3, 4, 5, 6, 7, 9, 11]), st.sampled_from([1e-4, 5e-4, 1e-3, 5e-3]))
def test_rates_monotone(d, p):
    noise = PhysicalNoise(p)
    bigger = d + 2
    assert logical_rate_rect(bigger, 5, noise).p_x < logical_rate_rect(d, 5, noise).p_x
    assert logical_rate_rect(5, bigger, noise).p_z < logical_rate_rect(5, d, noise).p_z
    worse = PhysicalNoise(min(2 * p, 0.009))
    assert logical_rate_rect(d, 5, worse).p_x > logical_rate_rect(d, 5, noise).p_x


def test_undetected_group_z_values():
    assert undetected_group_z_rate(PhysicalNoise(1e-3)) == pytest.approx(
        2.0 / 15.0 * 1e-3, rel=1e-15
    )
    assert undetected_group_z_rate(PhysicalNoise(0.0)) == 0.0
    assert undetected_group_z_rate(PhysicalNoise(5e-4)) == pytest.approx(
        2.0 / 15.0 * 5e-4, rel=1e-15
    )


def test_noise_window():
    with pytest.raises(ValidationError):
        PhysicalNoise(0.02)
    with pytest.raises(ValidationError):
        PhysicalNoise(-1e-4)


def test_depolarizing_descriptors():
    ch = depolarizing_channels(PhysicalNoise(1e-3))
    assert ch == CircuitNoise(1e-3, 1e-3, 1e-3, 1e-3)
    zero = depolarizing_channels(PhysicalNoise(0.0))
    assert zero.one_qubit == 0.0 and zero.two_qubit == 0.0
    # Totals: three single-qubit Paulis at p/3, fifteen pairs at p/15.
    assert 3 * (ch.one_qubit / 3.0) == pytest.approx(1e-3)
    assert 15 * (ch.two_qubit / 15.0) == pytest.approx(1e-3)

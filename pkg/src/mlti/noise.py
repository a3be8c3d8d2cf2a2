"""Physical and logical noise parameterization for surface-code patches.

Logical memory error rates per QEC cycle follow the standard empirical
scaling 0.1 * (100 p)^((d+1)/2) for a square distance-d patch, split
evenly between logical X and Z.  Rectangular patches scale each axis by
the patch area over the squared distance of that axis; even distances
correct half of the shortest chains of the odd distance below them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

#: Upper edge of the validity window for the logical-rate formulas.
MAX_P_PHY = 0.01

#: First-order rate of an undetectable three-qubit Z on one rotation group,
#: per unit of physical error rate.
GROUP_Z_COEFF = 2.0 / 15.0


@dataclass(frozen=True)
class PhysicalNoise:
    """Circuit-level physical error rate, valid up to 1%."""

    p_phy: float

    def __post_init__(self):
        if not 0.0 <= self.p_phy <= MAX_P_PHY:
            raise ValidationError(
                f"p_phy must be in [0, {MAX_P_PHY}] for the rate model, got {self.p_phy}"
            )


@dataclass(frozen=True)
class LogicalRates:
    """Per-cycle logical X and Z error probabilities of one patch."""

    p_x: float
    p_z: float

    def __post_init__(self):
        if self.p_x < 0.0 or self.p_z < 0.0:
            raise ValidationError("logical rates must be nonnegative")

    def scaled(self, factor: float) -> "LogicalRates":
        return LogicalRates(self.p_x * factor, self.p_z * factor)

    def plus(self, other: "LogicalRates") -> "LogicalRates":
        return LogicalRates(self.p_x + other.p_x, self.p_z + other.p_z)


ZERO_RATES = LogicalRates(0.0, 0.0)


def _square_rate(d: int, p: float) -> float:
    if d % 2 == 0 or d < 3:
        raise ValidationError(f"square formula needs odd d >= 3, got {d}")
    if p == 0.0:
        return 0.0
    if 100.0 * p >= 1.0:
        raise ValidationError(f"p_phy={p} is at or above the model threshold")
    return 0.05 * (100.0 * p) ** ((d + 1) // 2)


def logical_rate_square(d: int, noise: PhysicalNoise) -> LogicalRates:
    """Rates of a square odd-distance patch; X and Z each get half."""
    v = _square_rate(d, noise.p_phy)
    return LogicalRates(v, v)


def _axis_rate(d_axis: int, area: int, p: float) -> float:
    if d_axis % 2 == 1:
        if d_axis < 3:
            raise ValidationError(f"odd distance must be >= 3, got {d_axis}")
        return (area / d_axis**2) * _square_rate(d_axis, p)
    if d_axis < 4:
        raise ValidationError(f"even distance must be >= 4, got {d_axis}")
    return (area / (2.0 * (d_axis - 1) ** 2)) * _square_rate(d_axis - 1, p)


def logical_rate_rect(d_x: int, d_z: int, noise: PhysicalNoise) -> LogicalRates:
    """Per-axis rates of a d_x-by-d_z rectangular patch.

    The shortest-chain count is proportional to the patch area; each
    axis uses its own parity rule.
    """
    area = d_x * d_z
    return LogicalRates(
        _axis_rate(d_x, area, noise.p_phy),
        _axis_rate(d_z, area, noise.p_phy),
    )


def undetected_group_z_rate(noise: PhysicalNoise) -> float:
    """First-order silent Z-flip rate per three-qubit rotation group."""
    return GROUP_Z_COEFF * noise.p_phy


@dataclass(frozen=True)
class CircuitNoise:
    """Sampling descriptors for the standard circuit-level noise model.

    One-qubit locations depolarize with total probability ``one_qubit``
    (X, Y, Z each one third); two-qubit locations apply each of the 15
    nontrivial Pauli pairs with probability ``two_qubit``/15; measurement
    outcomes and initializations flip with the stated probabilities.
    """

    one_qubit: float
    two_qubit: float
    measure_flip: float
    init_flip: float


def depolarizing_channels(noise: PhysicalNoise) -> CircuitNoise:
    p = noise.p_phy
    return CircuitNoise(one_qubit=p, two_qubit=p, measure_flip=p, init_flip=p)

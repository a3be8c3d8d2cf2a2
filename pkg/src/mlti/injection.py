"""The transversal-injection channel and its analytic companions.

Injecting k copies of a rotation state and post-selecting on trivial
syndromes maps the single-copy density matrix entrywise to its k-th
powers (up to normalization and a fixed phase correction).  This module
implements that channel exactly, together with the angle maps, the
post-selection rates, the first-level infidelity of the post-selected
mixture, and the per-level error-suppression bound.

Sign conventions: angles are tracked signed.  For even k the physical
channel output is sign-free; callers normalize the sign through a free
Pauli-frame X, so ``output_angle`` and ``input_angle`` both preserve the
sign of their argument and are exact inverses for every parity of k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleError, ValidationError
from .qstate import (
    TOL,
    Angle,
    DensityMatrix2,
    PureRotationState,
    _ang,
    apply_pauli_channel,
    make_rotation_density,
)

_HALF_PI = 0.5 * math.pi


def _check_k(k: int) -> int:
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    return k


@dataclass(frozen=True)
class InjectionOutcome:
    """Post-selected output state and the probability of keeping the run."""

    state: DensityMatrix2
    accept_rate: float

    def __post_init__(self):
        if not 0.0 < self.accept_rate <= 1.0 + TOL:
            raise ValidationError(f"accept rate out of (0, 1]: {self.accept_rate}")


@dataclass(frozen=True)
class PhasedRotationState:
    """A pure state c|+> + i^q s|-> with c, s >= 0: rotation state plus a phase flag.

    ``phase_quarter_turns`` is q modulo 4; q = 1 is the standard rotation-state
    phase convention.
    """

    state: PureRotationState
    phase_quarter_turns: int


def output_angle(alpha, k: int) -> float:
    """Angle of the ideal k-copy injection output: arctan(tan^k alpha).

    Sign is preserved for every k; for even k the negative-sign case is
    realized by the caller's free Pauli-frame X.
    """
    a = _ang(alpha)
    _check_k(k)
    if abs(a) >= _HALF_PI:
        raise ValidationError(f"|alpha| must be < pi/2, got {a}")
    t = math.tan(abs(a))
    return math.copysign(math.atan(t**k), a)


def input_angle(beta, k: int) -> float:
    """Inverse of ``output_angle``: arctan(tan(beta)^(1/k)), sign-preserving."""
    b = _ang(beta)
    _check_k(k)
    if abs(b) >= _HALF_PI:
        raise ValidationError(f"|beta| must be < pi/2, got {b}")
    t = math.tan(abs(b))
    return math.copysign(math.atan(t ** (1.0 / k)), b)


def accept_rate_ideal(alpha, k: int) -> float:
    """Noiseless post-selection success rate cos^(2k) + sin^(2k)."""
    a = _ang(alpha)
    _check_k(k)
    c2 = math.cos(a) ** 2
    return c2**k + (1.0 - c2) ** k


def accept_rate_m(alpha, k: int, m: int) -> float:
    """Post-selection rate of the m-flipped branch.

    cos^(2(k-m)) sin^(2m) + sin^(2(k-m)) cos^(2m); m = 0 recovers the
    ideal rate, and the rate is symmetric under m -> k - m.
    """
    a = _ang(alpha)
    _check_k(k)
    if not isinstance(m, int) or m < 0 or m > k:
        raise ValidationError(f"m must be an integer in [0, {k}], got {m!r}")
    c2 = math.cos(a) ** 2
    s2 = 1.0 - c2
    return c2 ** (k - m) * s2**m + s2 ** (k - m) * c2**m


def post_selected_state(alpha, k: int, m: int) -> PhasedRotationState:
    """Normalized branch state when m of the k copies carry a Z flip.

    Coefficients are proportional to (cos^(k-m) sin^m, sin^(k-m) cos^m)
    on (|+>, |->), with relative phase i^(1-2m) after the global phase
    correction.  Requires alpha in (0, pi/2) so the branch is
    non-degenerate.
    """
    a = _ang(alpha)
    _check_k(k)
    if not 0.0 < a < _HALF_PI:
        raise ValidationError("alpha must lie in (0, pi/2)")
    if not isinstance(m, int) or m < 0 or m > k:
        raise ValidationError(f"m must be an integer in [0, {k}], got {m!r}")
    c, s = math.cos(a), math.sin(a)
    cp = c ** (k - m) * s**m
    cm = s ** (k - m) * c**m
    if cp == 0.0 and cm == 0.0:
        raise ValidationError("degenerate branch: both coefficients underflowed")
    return PhasedRotationState(
        state=PureRotationState(Angle(math.atan2(cm, cp))),
        phase_quarter_turns=(1 - 2 * m) % 4,
    )


# i^q for q = 0..3, used by the channel phase correction.
_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def ti_channel(rho_in: DensityMatrix2, k: int) -> InjectionOutcome:
    """Exact k-copy transversal-injection channel on iid input copies.

    The post-selected output is the entrywise k-th power of the input,
    normalized by the accept rate rho_pp^k + rho_mm^k, followed by the
    free phase correction that restores the +i phase on the |->
    amplitude (so a pure |alpha> maps exactly to |output_angle(alpha, k)>).
    """
    _check_k(k)
    pp = rho_in.rho_pp**k
    mm = rho_in.rho_mm**k
    accept = pp + mm
    if accept <= 1e-300:
        raise InfeasibleError(f"accept rate underflowed at k={k}")
    pm = rho_in.rho_pm**k * _I_POW[(k - 1) % 4]
    state = DensityMatrix2(pp / accept, mm / accept, pm / accept)
    return InjectionOutcome(state=state, accept_rate=min(accept, 1.0))


def level1_infidelity_analytic(alpha, k: int, p_group_z: float) -> float:
    """Infidelity of the post-selected output with per-copy Z-flip rate p.

    Each of the k copies independently suffers a Z flip with probability
    ``p_group_z`` before injection.  Computed exactly from the branch
    mixture (binomial weights, branch accept rates, branch overlaps with
    the orthogonal target); agrees with pushing the flipped mixture
    through ``ti_channel``.
    """
    a = abs(_ang(alpha))  # infidelity is invariant under the sign of alpha
    _check_k(k)
    if not 0.0 <= p_group_z <= 1.0:
        raise ValidationError(f"p_group_z must be a probability, got {p_group_z}")
    if p_group_z == 0.0 or a == 0.0:
        return 0.0
    c, s = math.cos(a), math.sin(a)
    p = p_group_z
    numer = 0.0
    denom = 0.0
    for m in range(k + 1):
        w = math.comb(k, m) * p**m * (1.0 - p) ** (k - m)
        denom += w * (c ** (2 * (k - m)) * s ** (2 * m) + s ** (2 * (k - m)) * c ** (2 * m))
        # branch overlap with the orthogonal target, weighted by the
        # branch accept rate: [(-1)^m c^(k+m) s^(k-m) - s^(k+m) c^(k-m)]^2 / ps0
        amp = (-1.0) ** m * c ** (k + m) * s ** (k - m) - s ** (k + m) * c ** (k - m)
        numer += w * amp * amp
    ps0 = c ** (2 * k) + s ** (2 * k)
    return numer / (ps0 * denom)


def suppression_bound(k: int, beta, eps_in: float) -> float:
    """Per-level error-suppression bound k^2 |beta|^(2(1-1/k)) eps_in.

    Upper bound (asymptotic in small input angle) on the post-selected
    output infidelity of one injection level whose ideal output angle is
    beta, given input states with infidelity eps_in.
    """
    _check_k(k)
    b = _ang(beta)
    if b == 0.0:
        raise ValidationError("beta must be nonzero")
    if not 0.0 <= eps_in < 0.5:
        raise ValidationError(f"eps_in must be in [0, 0.5), got {eps_in}")
    return k * k * abs(b) ** (2.0 * (1.0 - 1.0 / k)) * eps_in


def flipped_input_mixture(alpha, p_group_z: float) -> DensityMatrix2:
    """Single-copy input |alpha> mixed with a Z flip of probability p."""
    return apply_pauli_channel(make_rotation_density(alpha), 0.0, p_group_z)

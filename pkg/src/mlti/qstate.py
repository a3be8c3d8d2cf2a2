"""Exact single-qubit state algebra in the {|+>, |->} basis.

A rotation state with angle theta is R_z(theta)|+> = cos(theta)|+> + i sin(theta)|->.
Every channel in the package acts on ``DensityMatrix2``, a 2x2 density matrix
expressed in this basis, stored as the two real diagonal entries plus the
upper off-diagonal entry (the lower one is its conjugate).

In this basis the Pauli X is the diagonal matrix diag(1, -1) (it fixes |+>
and negates |->), while Z swaps |+> and |->.  This makes the transversal
injection channel entrywise, which is why the basis is fixed globally.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ValidationError

#: Numerical tolerance for state invariants (trace, positivity, purity).
TOL = 1e-12


def normalize_angle(value: float) -> float:
    """Reduce an angle to the interval (-pi, pi]."""
    if not math.isfinite(value):
        raise ValidationError(f"angle must be finite, got {value!r}")
    v = math.remainder(value, 2.0 * math.pi)
    if v <= -math.pi:
        v += 2.0 * math.pi
    return v


@dataclass(frozen=True)
class Angle:
    """A finite angle in radians, normalized to (-pi, pi]."""

    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", normalize_angle(self.value))

    def __float__(self) -> float:
        return self.value


def _ang(theta) -> float:
    """Accept an Angle or a plain float; return radians as float."""
    v = float(theta)
    if not math.isfinite(v):
        raise ValidationError(f"angle must be finite, got {theta!r}")
    return v


@dataclass(frozen=True)
class DensityMatrix2:
    """Single-qubit density matrix in the {|+>, |->} basis.

    ``rho_pp`` and ``rho_mm`` are the populations of |+> and |->;
    ``rho_pm`` is the <+|rho|-> coherence.  Construction enforces unit
    trace and Hermiticity, and clips sub-tolerance positivity violations
    by shrinking the coherence (channel compositions can drift at the
    last digit).
    """

    rho_pp: float
    rho_mm: float
    rho_pm: complex

    def __post_init__(self):
        pp, mm, pm = self.rho_pp, self.rho_mm, complex(self.rho_pm)
        if not (math.isfinite(pp) and math.isfinite(mm) and cmath.isfinite(pm)):
            raise ValidationError("density matrix entries must be finite")
        if abs(pp + mm - 1.0) > 1e-9:
            raise ValidationError(f"trace must be 1, got {pp + mm}")
        if pp < -TOL or mm < -TOL:
            raise ValidationError(f"negative population: {pp}, {mm}")
        pp = min(max(pp, 0.0), 1.0)
        mm = min(max(mm, 0.0), 1.0)
        det = pp * mm - abs(pm) ** 2
        if det < -TOL:
            raise ValidationError(f"state is not positive semidefinite (det={det})")
        if det < 0.0 and abs(pm) > 0.0:
            pm *= math.sqrt(pp * mm) / abs(pm)
        object.__setattr__(self, "rho_pp", pp)
        object.__setattr__(self, "rho_mm", mm)
        object.__setattr__(self, "rho_pm", pm)

    def determinant(self) -> float:
        return self.rho_pp * self.rho_mm - abs(self.rho_pm) ** 2

    def is_pure(self, tol: float = TOL) -> bool:
        return abs(self.determinant()) <= tol

    def as_matrix(self):
        """Return the 2x2 complex matrix in the {|+>, |->} basis."""
        import numpy as np

        return np.array(
            [[self.rho_pp, self.rho_pm], [self.rho_pm.conjugate(), self.rho_mm]],
            dtype=complex,
        )


@dataclass(frozen=True)
class PureRotationState:
    """A pure rotation state |theta>, represented by its angle."""

    angle: Angle

    def density(self) -> DensityMatrix2:
        return make_rotation_density(self.angle)


def maximally_mixed() -> DensityMatrix2:
    return DensityMatrix2(0.5, 0.5, 0.0j)


def make_rotation_density(theta) -> DensityMatrix2:
    """Density matrix of the pure rotation state |theta>."""
    t = _ang(theta)
    c, s = math.cos(t), math.sin(t)
    return DensityMatrix2(c * c, s * s, complex(0.0, -c * s))


def noisy_rotation_density(theta, eps: float, coherence: complex = 0.0) -> DensityMatrix2:
    """State with infidelity ``eps`` to |theta> and coherence ``coherence``.

    The state is (1-eps)|t><t| + eps|t_perp><t_perp| + b|t><t_perp| + h.c.
    in the frame of |theta> and its orthogonal complement.  Positivity
    requires |b|^2 <= eps - eps^2.
    """
    if not 0.0 <= eps <= 0.5:
        raise ValidationError(f"eps must be in [0, 0.5], got {eps}")
    b = complex(coherence)
    if abs(b) ** 2 > eps - eps * eps + TOL:
        raise ValidationError("coherence exceeds the positivity budget")
    t = _ang(theta)
    c, s = math.cos(t), math.sin(t)
    # |theta> = (c, i s), |theta_perp> = (i s, c) in the {+,-} basis.
    pp = (1.0 - eps) * c * c + eps * s * s + 2.0 * c * s * b.imag
    mm = (1.0 - eps) * s * s + eps * c * c - 2.0 * c * s * b.imag
    pm = (
        complex(0.0, -(1.0 - 2.0 * eps) * c * s)
        + b * c * c
        + b.conjugate() * s * s
    )
    return DensityMatrix2(pp, mm, pm)


def fidelity_with(rho: DensityMatrix2, theta) -> float:
    """<theta| rho |theta>, clamped to [0, 1]."""
    t = _ang(theta)
    c, s = math.cos(t), math.sin(t)
    f = c * c * rho.rho_pp + s * s * rho.rho_mm - 2.0 * c * s * rho.rho_pm.imag
    return min(max(f, 0.0), 1.0)


def trace_distance_to(rho: DensityMatrix2, theta) -> float:
    """Half the trace norm of rho - |theta><theta|."""
    t = _ang(theta)
    c, s = math.cos(t), math.sin(t)
    a = rho.rho_pp - c * c
    d = rho.rho_mm - s * s
    off = rho.rho_pm - complex(0.0, -c * s)
    half_sum = 0.5 * (a + d)  # zero up to roundoff; kept for robustness
    radius = math.sqrt((0.5 * (a - d)) ** 2 + abs(off) ** 2)
    lam_hi, lam_lo = half_sum + radius, half_sum - radius
    return min(max(0.5 * (abs(lam_hi) + abs(lam_lo)), 0.0), 1.0)


def apply_pauli_channel(rho: DensityMatrix2, p_x: float, p_z: float) -> DensityMatrix2:
    """(1-px-pz) rho + px X rho X + pz Z rho Z.

    X is diagonal here (negates the coherence); Z swaps the populations
    and conjugates the coherence.
    """
    if p_x < 0.0 or p_z < 0.0 or p_x + p_z > 1.0 + TOL:
        raise ValidationError(f"invalid channel probabilities: p_x={p_x}, p_z={p_z}")
    pp = (1.0 - p_z) * rho.rho_pp + p_z * rho.rho_mm
    mm = (1.0 - p_z) * rho.rho_mm + p_z * rho.rho_pp
    pm = (1.0 - 2.0 * p_x - p_z) * rho.rho_pm + p_z * rho.rho_pm.conjugate()
    return DensityMatrix2(pp, mm, pm)


def rotate(rho: DensityMatrix2, phi) -> DensityMatrix2:
    """Conjugate by R_z(phi); maps |theta> to |theta + phi>."""
    p = _ang(phi)
    c, s = math.cos(p), math.sin(p)
    pp, mm, pm = rho.rho_pp, rho.rho_mm, rho.rho_pm
    new_pp = c * c * pp + s * s * mm + 2.0 * c * s * pm.imag
    new_mm = s * s * pp + c * c * mm - 2.0 * c * s * pm.imag
    new_pm = c * c * pm + s * s * pm.conjugate() - complex(0.0, c * s) * (pp - mm)
    return DensityMatrix2(new_pp, new_mm, new_pm)


def apply_x_frame(rho: DensityMatrix2) -> DensityMatrix2:
    """Free Pauli-frame X: maps |theta> to |-theta> (negates the coherence)."""
    return DensityMatrix2(rho.rho_pp, rho.rho_mm, -rho.rho_pm)

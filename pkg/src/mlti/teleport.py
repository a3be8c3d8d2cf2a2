"""Exact two-qubit density-matrix gate-teleportation channels.

Teleporting R_z(theta) consumes a rotation state |theta> on the ancilla:
CNOT from the data qubit onto the ancilla, measure the ancilla in Z, and
apply R_z(2 theta) on the data qubit in the -1 branch.  The flipped
channel swaps the feedback branches and is the correct circuit when the
consumed state was X-conjugated.  Running the two with probability 1/2
each cancels the effect of off-diagonal ancilla terms exactly, leaving
(1-eps) rho_out + eps Z rho_out Z.

All 4x4 matrices are in the computational basis with the data qubit
first (|data, ancilla>).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .qstate import DensityMatrix2, apply_x_frame, _ang

_TOL = 1e-10

# {|+>, |->} -> computational basis change (Hadamard).
_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)

_CNOT = np.array(
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ],
    dtype=complex,
)

_P0 = np.kron(np.eye(2), np.diag([1.0, 0.0])).astype(complex)
_P1 = np.kron(np.eye(2), np.diag([0.0, 1.0])).astype(complex)


@dataclass(frozen=True)
class TwoQubitDensity:
    """A validated 4x4 density matrix, data (x) ancilla ordering."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValidationError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, atol=_TOL):
            raise ValidationError("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > _TOL:
            raise ValidationError(f"trace must be 1, got {np.trace(m)}")
        if np.linalg.eigvalsh(m).min() < -1e-9:
            raise ValidationError("matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", m)


def _to_comp(rho: DensityMatrix2) -> np.ndarray:
    return _H @ rho.as_matrix() @ _H


def _from_comp(m: np.ndarray) -> DensityMatrix2:
    pm_basis = _H @ m @ _H
    return DensityMatrix2(
        pm_basis[0, 0].real, pm_basis[1, 1].real, complex(pm_basis[0, 1])
    )


def embed_pair(rho_in: DensityMatrix2, ancilla: DensityMatrix2) -> TwoQubitDensity:
    """Tensor a data state with an ancilla state, both given in the {+,-} basis."""
    return TwoQubitDensity(np.kron(_to_comp(rho_in), _to_comp(ancilla)))


def data_marginal(rho2: TwoQubitDensity) -> DensityMatrix2:
    """Trace out the ancilla and return the data state in the {+,-} basis."""
    m = rho2.matrix.reshape(2, 2, 2, 2)
    return _from_comp(np.trace(m, axis1=1, axis2=3))


def _rz(phi: float) -> np.ndarray:
    # R_z(phi) = exp(i phi Z)
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)]).astype(complex)


def _branches(rho2: TwoQubitDensity):
    v = _CNOT @ rho2.matrix @ _CNOT.conj().T
    return _P0 @ v @ _P0, _P1 @ v @ _P1


def teleport_channel(rho2: TwoQubitDensity, theta) -> TwoQubitDensity:
    """Gate teleportation of R_z(theta): correction on the -1 branch."""
    t = _ang(theta)
    plus, minus = _branches(rho2)
    corr = np.kron(_rz(2.0 * t), np.eye(2))
    return TwoQubitDensity(plus + corr @ minus @ corr.conj().T)


def teleport_channel_flipped(rho2: TwoQubitDensity, theta) -> TwoQubitDensity:
    """Same circuit with the feedback condition swapped (correction on +1)."""
    t = _ang(theta)
    plus, minus = _branches(rho2)
    corr = np.kron(_rz(2.0 * t), np.eye(2))
    return TwoQubitDensity(corr @ plus @ corr.conj().T + minus)


def randomized_teleport(
    rho_in: DensityMatrix2, ancilla: DensityMatrix2, theta
) -> DensityMatrix2:
    """Teleport with a coin flip between the two feedback conventions.

    With probability 1/2 the plain channel consumes the ancilla as given;
    otherwise the X-conjugated ancilla feeds the flipped channel.  The
    data marginal equals (1-eps) rho_out + eps Z rho_out Z exactly,
    independent of the ancilla coherence.
    """
    t = _ang(theta)
    out_plain = teleport_channel(embed_pair(rho_in, ancilla), t)
    out_flipped = teleport_channel_flipped(
        embed_pair(rho_in, apply_x_frame(ancilla)), t
    )
    mixed = TwoQubitDensity(0.5 * (out_plain.matrix + out_flipped.matrix))
    return data_marginal(mixed)


def dephase_reference(rho: DensityMatrix2, theta) -> DensityMatrix2:
    """Apply R_z(2 theta) X with probability 1/2.

    Kills coherences in the frame of |theta> and its orthogonal state
    while fixing |theta> itself.
    """
    from .qstate import rotate

    t = _ang(theta)
    flipped = rotate(apply_x_frame(rho), 2.0 * t)
    return DensityMatrix2(
        0.5 * (rho.rho_pp + flipped.rho_pp),
        0.5 * (rho.rho_mm + flipped.rho_mm),
        0.5 * (rho.rho_pm + flipped.rho_pm),
    )

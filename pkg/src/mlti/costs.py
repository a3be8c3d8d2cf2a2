"""Space-time-volume accounting: injection levels, pumping, state
distillation (analytic model plus an exact small-circuit oracle), and
gate synthesis.

Volumes are physical-qubit count times QEC cycles, averaged over
post-selection retries where a success rate is supplied.  A rectangular
rotated patch of distances d_x-by-d_z occupies 2*d_x*d_z physical qubits
(data plus syndrome).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import InfeasibleError, ValidationError
from .noise import PhysicalNoise, logical_rate_square

_SYNTH_N_CAP = 10_000


@dataclass(frozen=True)
class MagicEntry:
    """One available magic-state preparation point: infidelity and volume."""

    label: str
    infidelity: float
    volume_qubit_cycles: float

    def __post_init__(self):
        if not self.label:
            raise ValidationError("magic entry label must be non-empty")
        ok = self.infidelity == 0.0 or 0.0 < self.infidelity < 1.0
        if not ok:
            raise ValidationError(
                f"magic infidelity must be 0 or in (0,1), got {self.infidelity}"
            )
        if self.volume_qubit_cycles < 0.0:
            raise ValidationError("magic volume must be nonnegative")


@dataclass(frozen=True)
class MagicCatalog:
    """Table of magic-state (infidelity, volume) points, unique labels."""

    entries: tuple[MagicEntry, ...]

    def __post_init__(self):
        labels = [e.label for e in self.entries]
        if len(set(labels)) != len(labels):
            raise ValidationError("magic catalog labels must be unique")

    def get(self, label: str) -> MagicEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise ValidationError(f"magic catalog has no entry labeled {label!r}")

    def cleanest(self) -> MagicEntry:
        if not self.entries:
            raise ValidationError("magic catalog is empty")
        return min(self.entries, key=lambda e: (e.infidelity, e.label))

    @staticmethod
    def from_dict(payload: dict) -> "MagicCatalog":
        try:
            raw = payload["entries"]
        except (KeyError, TypeError):
            raise ValidationError('catalog JSON must contain an "entries" list')
        entries = []
        for i, item in enumerate(raw):
            try:
                entries.append(
                    MagicEntry(
                        label=str(item["label"]),
                        infidelity=float(item["infidelity"]),
                        volume_qubit_cycles=float(item["volume_qubit_cycles"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(f"catalog entry {i}: {exc}") from exc
        return MagicCatalog(entries=tuple(entries))

    @staticmethod
    def load(path: str | Path) -> "MagicCatalog":
        with open(path, encoding="utf-8") as fh:
            return MagicCatalog.from_dict(json.load(fh))


@dataclass(frozen=True)
class VolumeReport:
    """Volume breakdown of one multi-level preparation.

    Components are summed without acceptance retries (with copy
    multiplicities); ``acceptance_adjusted`` divides each stage by its
    post-selection success rate and is the figure of merit.
    """

    injection: float
    pumping: float
    magic: float
    surgery: float
    total: float
    acceptance_adjusted: float

    def __post_init__(self):
        parts = (self.injection, self.pumping, self.magic, self.surgery)
        if any(v < 0.0 for v in parts):
            raise ValidationError("volume components must be nonnegative")
        if abs(self.total - sum(parts)) > 1e-6 * max(1.0, self.total):
            raise ValidationError("total must equal the sum of components")
        if self.acceptance_adjusted < self.total - 1e-9 * max(1.0, self.total):
            raise ValidationError("acceptance-adjusted volume cannot shrink the total")


@dataclass(frozen=True)
class CliffordTarget:
    """Rotation R_z(pi/2^l); level 3 is the T gate.

    The Y-axis rotation family used by the distillation comparator maps
    onto this Z-axis family by a fixed Clifford, preserving the angle.
    """

    l: int

    def __post_init__(self):
        if not isinstance(self.l, int) or self.l < 3:
            raise ValidationError(f"Clifford level must be an integer >= 3, got {self.l}")

    @property
    def theta(self) -> float:
        return math.pi / 2**self.l


def v_level1(d_x: int, d_z: int, accept1: float) -> float:
    """First-level volume: 2*d_z*d_x qubits for 2 cycles, over the accept rate."""
    if not 0.0 < accept1 <= 1.0:
        raise ValidationError(f"accept rate must be in (0, 1], got {accept1}")
    return 2.0 * d_z * d_x * 2.0 / accept1


def v_pump(d_x: int, d_z: int, v_magic: float) -> float:
    """Pump stage: magic-state cost plus the merged-patch surgery block.

    The merge occupies 2*d_z*(d_x+d_z+1) qubits for the rotation merge
    (2*d_z cycles) plus the correction branch (floor(d_z/2)+2 cycles).
    """
    if d_z < 3 or d_x < 2 or v_magic < 0.0:
        raise ValidationError("v_pump needs d_z >= 3, d_x >= 2, v_magic >= 0")
    return v_magic + 2.0 * d_z * (d_x + d_z + 1) * (2 * d_z + d_z // 2 + 2)


def v_level_r(
    prev_total: float,
    k: int,
    d_x: int,
    d_z: int,
    accept_r: float,
    consume_k: bool = True,
) -> float:
    """Volume of one injection level at or above the second.

    The merged block of k deformed patches spans d_x by (k*d_z + k - 1)
    for d_z + 2 cycles.  ``consume_k`` charges k lower-level inputs per
    attempt (physical bookkeeping); switching it off adds a single
    input's volume (the literal single-input reading).
    """
    if not 0.0 < accept_r <= 1.0:
        raise ValidationError(f"accept rate must be in (0, 1], got {accept_r}")
    if k < 2:
        raise ValidationError(f"levels above the first need k >= 2, got {k}")
    surgery = 2.0 * d_x * (k * d_z + k - 1) * (d_z + 2)
    input_cost = (k if consume_k else 1) * prev_total
    return (surgery + input_cost) / accept_r


@dataclass(frozen=True)
class DistillResult:
    p_fail: float
    eps_out: float
    volume: float


def distill_cost(
    d: int, eps3: float, epsl: float, eta: float, noise: PhysicalNoise
) -> DistillResult:
    """Analytic cost of one distillation run on a distance-d layout.

    ``eps3`` is the error of the level-3 resource states, ``epsl`` the
    input rotation-state error, ``eta`` the error of the one
    level-(l-1) rotation gate.  The layout runs 20d cycles on 32d^2
    qubits and yields two states, so the per-state footprint is 16d^2.
    """
    if d < 3 or d % 2 == 0:
        raise ValidationError(f"distillation layout needs odd d >= 3, got {d}")
    if min(eps3, epsl, eta) < 0.0:
        raise ValidationError("error inputs must be nonnegative")
    rates = logical_rate_square(d, noise)
    p_fail = 92.0 * rates.p_z + 100.0 * rates.p_x + 8.0 * eps3 + 2.0 * epsl + 0.5 * eta
    if p_fail >= 1.0:
        raise InfeasibleError(f"distillation failure probability {p_fail} >= 1")
    eps_out = rates.p_z + 8.0 * eps3**2 + epsl**2 + 0.25 * eta
    volume = 16.0 * d * d * 20.0 * d / (1.0 - p_fail)
    return DistillResult(p_fail=p_fail, eps_out=eps_out, volume=volume)


# ---------------------------------------------------------------------------
# Exact oracle for the elementary two-to-two distillation circuit.


def _ry(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, s], [-s, c]], dtype=complex)


def distill_oracle(eps_in: float, coherence: float, theta: float = math.pi / 8) -> float:
    """Exact three-qubit simulation of the elementary distillation circuit.

    Two noisy copies of the Y-axis rotation state at angle ``theta``
    (infidelity ``eps_in``, real coherence ``coherence`` in the state's
    own frame) pass a controlled double reflection about the state,
    post-selected on the +1 ancilla outcome.  Returns the post-selected
    output infidelity of one output qubit.  For zero coherence this is
    eps^2 / ((1-eps)^2 + eps^2).
    """
    if not 0.0 <= eps_in < 0.5:
        raise ValidationError(f"eps_in must be in [0, 0.5), got {eps_in}")
    if coherence**2 > eps_in - eps_in**2 + 1e-15:
        raise ValidationError("coherence exceeds the positivity budget")
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    minus = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)
    good = _ry(theta) @ plus
    bad = _ry(theta) @ minus
    rho = (
        (1.0 - eps_in) * np.outer(good, good.conj())
        + eps_in * np.outer(bad, bad.conj())
        + coherence * np.outer(good, bad.conj())
        + coherence * np.outer(bad, good.conj())
    )
    anc = np.outer(plus, plus.conj())
    total = np.kron(anc, np.kron(rho, rho))
    # Reflection about the state: R_y(2 theta) X has |good> at +1, |bad> at -1.
    reflect = _ry(2.0 * theta) @ np.array([[0, 1], [1, 0]], dtype=complex)
    mm = np.kron(reflect, reflect)
    cu = np.zeros((8, 8), dtype=complex)
    cu[:4, :4] = np.eye(4)
    cu[4:, 4:] = mm
    evolved = cu @ total @ cu.conj().T
    proj = np.kron(np.outer(plus, plus.conj()), np.eye(4))
    kept = proj @ evolved @ proj.conj().T
    p_pass = np.trace(kept).real
    if p_pass <= 1e-300:
        raise InfeasibleError("post-selection probability underflowed")
    kept /= p_pass
    # Trace out the ancilla and the second copy; row index is (anc, q2, q3).
    t = kept.reshape(2, 2, 2, 2, 2, 2)
    out = np.einsum("aijakj->ik", t)
    out_fid = (good.conj() @ out @ good).real
    return float(min(max(1.0 - out_fid, 0.0), 1.0))


# ---------------------------------------------------------------------------
# Desk-scale chained distillation model used by the sweeps.


@dataclass(frozen=True)
class ChainResult:
    volume: float
    eps_out: float
    d: int
    rounds: int
    entry_label: str


def distill_chain(
    l: int,
    eps_target: float,
    noise: PhysicalNoise,
    catalog: MagicCatalog,
    d_values: Sequence[int] | None = None,
    rounds_options: Sequence[int] = (1, 2),
    raw_eps_coeff: float = 1.0,
) -> ChainResult:
    """Cheapest distilled rotation state at Clifford level ``l``.

    Model: level-3 states come straight from the catalog; every level
    from 4 up to ``l`` is distilled from raw injected inputs (error
    ``raw_eps_coeff * p_phy``, volume 4 d^2) with the same distance,
    round count, and catalog entry at every level of the chain.  The
    level-(l-1) rotation gate consumed by a run is itself a distilled
    state from the same chain, with the halving correction cascade.
    Per-output consumables are 4 catalog states, one input state, and
    half of the gate cascade.
    """
    if l < 3:
        raise ValidationError(f"Clifford level must be >= 3, got {l}")
    if l == 3:
        feasible = [e for e in catalog.entries if e.infidelity <= eps_target]
        if not feasible:
            raise InfeasibleError(
                "no catalog entry reaches the target at level 3",
                best_achieved=min(e.infidelity for e in catalog.entries),
            )
        best = min(feasible, key=lambda e: (e.volume_qubit_cycles, e.label))
        return ChainResult(best.volume_qubit_cycles, best.infidelity, 0, 0, best.label)

    if d_values is None:
        d_values = tuple(range(3, 32, 2))
    best: ChainResult | None = None
    best_eps = math.inf
    for entry in catalog.entries:
        for d in d_values:
            for rounds in rounds_options:
                res = _chain_fixed(l, d, rounds, entry, noise, raw_eps_coeff)
                if res is None:
                    continue
                eps_l, vol_l = res
                best_eps = min(best_eps, eps_l)
                if eps_l <= eps_target:
                    cand = ChainResult(vol_l, eps_l, d, rounds, entry.label)
                    key = (cand.volume, cand.d, cand.rounds, cand.entry_label)
                    if best is None or key < (
                        best.volume,
                        best.d,
                        best.rounds,
                        best.entry_label,
                    ):
                        best = cand
    if best is None:
        raise InfeasibleError(
            f"distillation chain cannot reach {eps_target} at level {l}",
            best_achieved=best_eps,
        )
    return best


def _chain_fixed(l, d, rounds, entry, noise, raw_eps_coeff):
    eps = {2: 0.0, 3: entry.infidelity}
    vol = {2: 0.0, 3: entry.volume_qubit_cycles}
    eta_gate = {2: 0.0}
    vol_gate = {2: 0.0}
    raw_eps = raw_eps_coeff * noise.p_phy
    raw_vol = 4.0 * d * d
    for i in range(3, l):
        eta_gate[i] = eps[i] + 0.5 * eta_gate[i - 1]
        vol_gate[i] = vol[i] + 0.5 * vol_gate[i - 1]
        eps_in, vol_in = raw_eps, raw_vol
        for _ in range(rounds):
            try:
                run = distill_cost(d, entry.infidelity, eps_in, eta_gate[i], noise)
            except InfeasibleError:
                return None
            vol_in = (
                16.0 * d * d * 20.0 * d
                + 4.0 * entry.volume_qubit_cycles
                + vol_in
                + 0.5 * vol_gate[i]
            ) / (1.0 - run.p_fail)
            eps_in = run.eps_out
        eps[i + 1] = eps_in
        vol[i + 1] = vol_in
    return eps[l], vol[l]


# ---------------------------------------------------------------------------
# Gate synthesis.


@dataclass(frozen=True)
class SynthesisResult:
    n_t: int
    delta: float
    entry_label: str
    volume: float


def synthesis_cost(eps_target: float, catalog: MagicCatalog) -> SynthesisResult:
    """Cheapest discrete-sequence approximation of the rotation gate.

    A sequence of n_T T-type gates reaches precision delta with
    n_T = ceil(3 log2(1/delta)); the consumed states contribute
    n_T * eps_T and the approximation contributes delta^2, jointly
    bounded by twice the target (one extra correction on average).
    Minimizes n_T * V_T over catalog entries.
    """
    if eps_target <= 0.0:
        raise ValidationError(f"eps_target must be positive, got {eps_target}")
    if not catalog.entries:
        raise ValidationError("magic catalog is empty")
    best: SynthesisResult | None = None
    for entry in catalog.entries:
        found = None
        for n in range(3, _SYNTH_N_CAP + 1):
            budget = 2.0 * eps_target - n * entry.infidelity
            if budget <= 0.0:
                break
            delta = min(math.sqrt(budget), 1.0 - 1e-12)
            if math.ceil(3.0 * math.log2(1.0 / delta)) <= n:
                found = SynthesisResult(
                    n_t=n,
                    delta=delta,
                    entry_label=entry.label,
                    volume=n * entry.volume_qubit_cycles,
                )
                break
        if found is not None:
            key = (found.volume, found.n_t, found.entry_label)
            if best is None or key < (best.volume, best.n_t, best.entry_label):
                best = found
    if best is None:
        raise InfeasibleError(
            f"no catalog entry supports synthesis at target {eps_target}"
        )
    return best


def gate_volume(
    l: int, per_level_state_volume: Mapping[int, float], literal_top_level: bool = False
) -> float:
    """Expected volume of the sequential rotation-gate correction cascade.

    The level-l rotation runs first; each subsequent correction halves in
    probability, so level i contributes its state volume over 2^(l-i).
    ``literal_top_level`` charges the level-l state volume for every term
    instead of each level's own.
    """
    if l < 3:
        raise ValidationError(f"Clifford level must be >= 3, got {l}")
    for i in range(3, l + 1):
        if i not in per_level_state_volume:
            raise ValidationError(f"missing state volume for level {i}")
    total = 0.0
    for i in range(3, l + 1):
        v = per_level_state_volume[l] if literal_top_level else per_level_state_volume[i]
        total += v / 2.0 ** (l - i)
    return total

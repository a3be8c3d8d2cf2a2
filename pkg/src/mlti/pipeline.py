"""The multi-level protocol: backward angle derivation, magic-state
pumping, and forward noisy evaluation of a full plan.

A plan lists one ``LevelSpec`` per level, first level first.  Angles are
derived backwards from the target: the top level's input angle comes from
inverting the injection angle map, each lower level must produce the
complement of that input relative to pi/8 (restored by pumping), and so
on down to the physical rotation angle of the first level.

Pump feasibility requires every pumped output angle to sit within pi/16
of zero, so that one pi/8 rotation plus a frame X lands the next level's
input near pi/8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import costs
from .errors import InfeasibleError, ValidationError
from .injection import (
    flipped_input_mixture,
    input_angle,
    ti_channel,
)
from .noise import (
    ZERO_RATES,
    LogicalRates,
    PhysicalNoise,
    logical_rate_rect,
    undetected_group_z_rate,
)
from .qstate import (
    DensityMatrix2,
    apply_pauli_channel,
    apply_x_frame,
    fidelity_with,
    make_rotation_density,
    rotate,
)

#: Magic-state pumping restores angles to pi/8; pumped levels must output
#: angles within this window of zero.
PUMP_WINDOW = math.pi / 16.0

_PI_8 = math.pi / 8.0

#: Cycle-count factors of the pump stage error budget: the merge runs for
#: d_z cycles, the readout is charged as another full merge, and the
#: correction branch averages the two idle durations (d_z/2 and 2.5 d_z/2).
_MERGE_CYCLE_FACTOR = 2.0
_IDLE_CYCLE_FACTOR = 0.5 * 0.5 + 0.5 * 1.25  # = 0.875, times d_z cycles


@dataclass(frozen=True)
class LevelSpec:
    """Per-level protocol parameters.

    The first level rotates groups of three physical qubits, so it needs
    d_z divisible by 3 and k = d_z / 3; higher levels need k >= 2 and a
    magic-state label for the pump that feeds them.
    """

    k: int
    d_x: int
    d_z: int
    magic_label: Optional[str] = None

    def validate(self, level_index: int) -> None:
        if level_index == 0:
            if self.d_z % 3 != 0:
                raise ValidationError(
                    f"level 1: d_z must be divisible by 3, got {self.d_z}"
                )
            if self.k != self.d_z // 3:
                raise ValidationError(
                    f"level 1: k must equal d_z/3 = {self.d_z // 3}, got {self.k}"
                )
        else:
            if self.k < 2:
                raise ValidationError(
                    f"level {level_index + 1}: k must be >= 2, got {self.k}"
                )
        if self.d_x < 2 or self.d_z < 2:
            raise ValidationError(
                f"level {level_index + 1}: distances must be >= 2"
            )


@dataclass(frozen=True)
class Plan:
    """An ordered multi-level plan (first level first) and its target angle."""

    levels: tuple[LevelSpec, ...]
    target: float

    def __post_init__(self):
        if not self.levels:
            raise ValidationError("plan needs at least one level")
        if len(self.levels) > 8:
            raise ValidationError("plans beyond 8 levels are not supported")
        for i, spec in enumerate(self.levels):
            spec.validate(i)
        if not math.isfinite(self.target):
            raise ValidationError("target angle must be finite")
        # Fails loudly here if the angle recursion is infeasible.
        derive_angles(self.target, [s.k for s in self.levels])

    @staticmethod
    def for_clifford_level(l: int, levels: Sequence[LevelSpec]) -> "Plan":
        return Plan(levels=tuple(levels), target=costs.CliffordTarget(l).theta)


@dataclass(frozen=True)
class LevelAngles:
    alpha: float  # input rotation angle of this level
    beta: float  # ideal output angle of this level


def derive_angles(target: float, ks: Sequence[int]) -> list[LevelAngles]:
    """Backward angle recursion; first level first in the returned list.

    The top level outputs the target; each lower level outputs the
    complement pi/8 - |alpha| of the level above, which must stay within
    the pump window.  Signs ride along in the Pauli frame: a negative
    input angle is prepared as its absolute value plus a free X, so only
    the magnitude enters the pump recursion (the complement itself may
    still be signed and drives the next level's sign).
    """
    if not ks:
        raise ValidationError("need at least one k")
    r = len(ks)
    alphas = [0.0] * r
    betas = [0.0] * r
    beta = float(target)
    for i in range(r - 1, -1, -1):
        if i < r - 1 and abs(beta) >= PUMP_WINDOW:
            raise InfeasibleError(
                f"pump infeasible at level {i + 1}: output angle {beta:.6f} "
                f"is outside (-pi/16, pi/16)"
            )
        betas[i] = beta
        alphas[i] = input_angle(beta, ks[i])
        beta = _PI_8 - abs(alphas[i])
    return [LevelAngles(alpha=a, beta=b) for a, b in zip(alphas, betas)]


def pump(
    rho: DensityMatrix2,
    beta: float,
    magic_infidelity: float,
    surgery: LogicalRates,
) -> DensityMatrix2:
    """One magic-state pump: rotate by -pi/8, frame X, then the noise channel.

    An erroneous magic state teleports as an extra Z on the target, so
    the magic infidelity enters the Z leg of the Pauli channel on top of
    the aggregated surgery rates.  ``beta`` is the nominal input angle
    (bookkeeping only; the operation itself is angle-independent).
    """
    if not math.isfinite(float(beta)):
        raise ValidationError("beta must be finite")
    if not 0.0 <= magic_infidelity < 1.0:
        raise ValidationError(f"magic infidelity out of range: {magic_infidelity}")
    out = apply_x_frame(rotate(rho, -_PI_8))
    return apply_pauli_channel(out, surgery.p_x, magic_infidelity + surgery.p_z)


def pump_surgery_rates(d_x: int, d_z: int, noise: PhysicalNoise) -> LogicalRates:
    """Aggregated Pauli rates of one pump on a d_x-by-d_z patch.

    Merge memory for d_z cycles on the merged (d_x+d_z+1)-by-d_z patch,
    an equal readout contribution, and the branch-averaged idle error on
    the patch itself.
    """
    merged = logical_rate_rect(d_x + d_z + 1, d_z, noise)
    own = logical_rate_rect(d_x, d_z, noise)
    return merged.scaled(_MERGE_CYCLE_FACTOR * d_z).plus(
        own.scaled(_IDLE_CYCLE_FACTOR * d_z)
    )


@dataclass(frozen=True)
class Level1Overrides:
    """Monte-Carlo replacements for the first-level analytic rates."""

    group_z_rate: Optional[float] = None
    discard: Optional[float] = None


@dataclass(frozen=True)
class LevelEval:
    alpha: float
    beta: float
    accept: float
    state: DensityMatrix2
    infidelity: float


@dataclass(frozen=True)
class EvalReport:
    levels: tuple[LevelEval, ...]
    final_infidelity: float
    overall_accept: float
    final_state: DensityMatrix2
    volume: Optional[costs.VolumeReport] = None


def _frame_fix(state: DensityMatrix2, k: int, alpha: float) -> DensityMatrix2:
    # Even k erases the sign; restore the signed convention by a free X.
    if k % 2 == 0 and alpha < 0.0:
        return apply_x_frame(state)
    return state


def evaluate_plan(
    plan: Plan,
    noise: PhysicalNoise,
    catalog: Optional[costs.MagicCatalog] = None,
    level1: Optional[Level1Overrides] = None,
    *,
    fill_volume: bool = True,
    consume_k: bool = True,
    first_level_noise_only: bool = False,
) -> EvalReport:
    """Forward noisy evaluation of a plan.

    First level: each rotation group's silent Z-flip rate mixes the
    input copies, the injection channel post-selects them, and two
    readout cycles of patch memory follow.  Higher levels: pump every
    copy, charge the merge memory of the concatenation surgery, then
    inject.  ``first_level_noise_only`` zeroes every logical rate and
    magic infidelity, keeping only the first-level flip rate (protocol
    floor studies).
    """
    angles = derive_angles(plan.target, [s.k for s in plan.levels])
    overrides = level1 or Level1Overrides()

    spec1 = plan.levels[0]
    a1, b1 = angles[0].alpha, angles[0].beta
    p_group = (
        overrides.group_z_rate
        if overrides.group_z_rate is not None
        else undetected_group_z_rate(noise)
    )
    out = ti_channel(flipped_input_mixture(a1, p_group), spec1.k)
    state = _frame_fix(out.state, spec1.k, a1)
    accept1 = out.accept_rate
    if not first_level_noise_only:
        mem = logical_rate_rect(spec1.d_x, spec1.d_z, noise).scaled(2.0)
        state = apply_pauli_channel(state, mem.p_x, mem.p_z)
    if overrides.discard is not None:
        if not 0.0 <= overrides.discard < 1.0:
            raise ValidationError("discard probability must be in [0, 1)")
        accept1 *= 1.0 - overrides.discard
    evals = [
        LevelEval(a1, b1, accept1, state, 1.0 - fidelity_with(state, b1))
    ]
    accepts = [accept1]

    for i in range(1, len(plan.levels)):
        spec = plan.levels[i]
        prev = plan.levels[i - 1]
        ai, bi = angles[i].alpha, angles[i].beta
        if first_level_noise_only:
            eps_magic = 0.0
            pump_rates = ZERO_RATES
        else:
            if spec.magic_label is None:
                raise ValidationError(
                    f"level {i + 1} needs a magic-state label for its pump"
                )
            if catalog is None:
                raise ValidationError("plan uses magic states but no catalog given")
            eps_magic = catalog.get(spec.magic_label).infidelity
            pump_rates = pump_surgery_rates(prev.d_x, prev.d_z, noise)
        state = pump(state, angles[i - 1].beta, eps_magic, pump_rates)
        if ai < 0.0:
            state = apply_x_frame(state)  # free frame X realizes the sign
        if not first_level_noise_only:
            merge = logical_rate_rect(spec.d_x + spec.d_z + 1, spec.d_z, noise)
            merge = merge.scaled(float(spec.d_z + 2))
            state = apply_pauli_channel(state, merge.p_x, merge.p_z)
        out = ti_channel(state, spec.k)
        state = _frame_fix(out.state, spec.k, ai)
        accepts.append(out.accept_rate)
        evals.append(
            LevelEval(ai, bi, out.accept_rate, state, 1.0 - fidelity_with(state, bi))
        )

    overall = math.prod(accepts)
    final_inf = 1.0 - fidelity_with(state, plan.target)
    volume = None
    if fill_volume:
        volume = plan_volume(plan, accepts, catalog, consume_k=consume_k)
    return EvalReport(
        levels=tuple(evals),
        final_infidelity=final_inf,
        overall_accept=overall,
        final_state=state,
        volume=volume,
    )


def plan_volume(
    plan: Plan,
    accepts: Sequence[float],
    catalog: Optional[costs.MagicCatalog],
    consume_k: bool = True,
) -> costs.VolumeReport:
    """Assemble the volume breakdown of a plan from the stage formulas."""
    r = len(plan.levels)
    if len(accepts) != r:
        raise ValidationError("need one accept rate per level")
    # Copies of each level's output needed per final state (no retries).
    mult = [1.0] * r
    if consume_k:
        for i in range(r - 2, -1, -1):
            mult[i] = mult[i + 1] * plan.levels[i + 1].k

    spec1 = plan.levels[0]
    injection = mult[0] * 4.0 * spec1.d_x * spec1.d_z
    pumping = 0.0
    magic = 0.0
    surgery = 0.0
    adjusted = costs.v_level1(spec1.d_x, spec1.d_z, accepts[0])
    for i in range(1, r):
        spec = plan.levels[i]
        prev = plan.levels[i - 1]
        if spec.magic_label is None or catalog is None:
            v_magic = 0.0
        else:
            v_magic = catalog.get(spec.magic_label).volume_qubit_cycles
        pump_block = costs.v_pump(prev.d_x, prev.d_z, 0.0)
        pumping += mult[i - 1] * pump_block
        magic += mult[i - 1] * v_magic
        surgery += mult[i] * 2.0 * spec.d_x * (spec.k * spec.d_z + spec.k - 1) * (
            spec.d_z + 2
        )
        adjusted = costs.v_level_r(
            adjusted + costs.v_pump(prev.d_x, prev.d_z, v_magic),
            spec.k,
            spec.d_x,
            spec.d_z,
            accepts[i],
            consume_k=consume_k,
        )
    total = injection + pumping + magic + surgery
    return costs.VolumeReport(
        injection=injection,
        pumping=pumping,
        magic=magic,
        surgery=surgery,
        total=total,
        acceptance_adjusted=adjusted,
    )


def pump_candidate_ks(
    beta: float, k_max: int, window: float = PUMP_WINDOW, k_min: int = 2
) -> list[int]:
    """All k in [k_min, k_max] whose input angle for ``beta`` is pumpable.

    A level outputting ``beta`` with k copies needs its input angle within
    ``window`` of pi/8 so the level below can be pumped into it.
    """
    b = float(beta)
    if b == 0.0:
        raise ValidationError("beta must be nonzero")
    out = []
    for k in range(k_min, k_max + 1):
        if abs(_PI_8 - abs(input_angle(b, k))) < window:
            out.append(k)
    return out


def infidelity_floor(
    level_count: int,
    noise: PhysicalNoise,
    target: float,
    k1_max: int = 60,
    k_max: int = 60,
) -> tuple[tuple[int, ...], float]:
    """Optimal infidelity over k choices with only first-level noise active.

    All logical rates and magic infidelities are zero; the only noise is
    the first-level silent group-flip rate.  Returns the best k tuple
    (first level first) and its exact evaluated infidelity.
    """
    if level_count < 1:
        raise ValidationError("level_count must be >= 1")
    if noise.p_phy == 0.0:
        ks = tuple([1] + [2] * (level_count - 1))
        return ks, 0.0

    best_ks: tuple[int, ...] | None = None
    best_inf = math.inf

    def spec_for(level_idx: int, k: int) -> LevelSpec:
        if level_idx == 0:
            return LevelSpec(k=k, d_x=3, d_z=3 * k)
        return LevelSpec(k=k, d_x=3, d_z=3)

    def descend(level_idx: int, beta: float, chosen: list[int]):
        nonlocal best_ks, best_inf
        if level_idx == 0:
            for k1 in range(1, k1_max + 1):
                ks = [k1] + chosen
                plan = Plan(
                    levels=tuple(spec_for(j, k) for j, k in enumerate(ks)),
                    target=float(target),
                )
                rep = evaluate_plan(
                    plan, noise, fill_volume=False, first_level_noise_only=True
                )
                if rep.final_infidelity < best_inf:
                    best_inf = rep.final_infidelity
                    best_ks = tuple(ks)
            return
        if beta == 0.0:
            return  # zero-angle chains cannot be continued downward
        for k in pump_candidate_ks(beta, k_max):
            descend(level_idx - 1, _PI_8 - abs(input_angle(beta, k)), chosen=[k] + chosen)

    descend(level_count - 1, float(target), [])
    if best_ks is None:
        raise InfeasibleError(
            f"no pumpable k chain reaches the target at {level_count} levels"
        )
    return best_ks, best_inf

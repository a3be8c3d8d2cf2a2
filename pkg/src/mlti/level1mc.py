"""Pauli-frame Monte Carlo of the first-level injection gadget.

The circuit: data qubits of a rotated d_x-by-d_z patch start in |+>, the
d_z qubits of the top row (the logical-Z support) receive three-qubit
rotations in groups of three via an ancilla-mediated parity gadget, and
two rounds of syndrome extraction follow.  Post-selection keeps runs in
which every X-type check touching the top row reads +1 in both rounds
(the first two rows of X-type syndrome qubits).

Geometry.  Data qubit (row, col) sits at index row*d_z + col.  Interior
plaquettes are checkerboard colored (X when row+col is even); weight-two
boundary plaquettes continue the coloring: X checks close the top and
bottom edges, Z checks the left and right edges.  The CNOT schedules are
the standard four-step orders, [NW, NE, SW, SE] for X checks and
[NW, SW, NE, SE] for Z checks, which couple each data qubit at most once
per step.

Error accounting.  Only Z components flip the monitored X checks, so the
frame tracks Z bits (X bits are kept during the gadget phase solely to
classify group flips).  A Z pattern deposited on the top row before
extraction is part of the rotated superposition: if it covers whole
rotation groups it passes post-selection silently as a group flip, and
anything else deterministically fires the monitored checks.  The
simulator therefore removes fully-covered groups from the frame before
extraction and counts them, then propagates the remaining pattern through
both rounds.

The rotation gadget is six CNOTs (parity in, rotate, parity out) with
two-qubit depolarizing noise after each.  The rotation's own internals
are not modeled gate by gate; instead the pure whole-group flip rate is
calibrated to ``group_flip_units`` * p/15 (default 2), and the CNOT
noise categories that would duplicate that pure flip are folded into the
calibrated rate.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ValidationError
from .noise import PhysicalNoise

_BATCH = 1 << 15

# The 15 nontrivial two-qubit Pauli pairs, as component bits per leg.
_PAULI_Z = (False, False, True, True)  # I, X, Y, Z
_PAULI_X = (False, True, True, False)
_CATS = [(p1, p2) for p1 in range(4) for p2 in range(4) if (p1, p2) != (0, 0)]
_CAT_Z1 = np.array([_PAULI_Z[p1] for p1, _ in _CATS])
_CAT_X1 = np.array([_PAULI_X[p1] for p1, _ in _CATS])
_CAT_Z2 = np.array([_PAULI_Z[p2] for _, p2 in _CATS])


@dataclass(frozen=True)
class McNoiseConfig:
    """Which fault families are active, plus the gadget calibration knobs.

    ``single_z`` injects independent single-qubit Z faults at the given
    rate on one group's data qubits before extraction; it is meant for
    validation against exhaustive enumeration with everything else off.
    """

    data_init: bool = True
    gadget_two_qubit: bool = True
    group_flip: bool = True
    idle: bool = True
    extraction_two_qubit: bool = True
    ancilla_init: bool = True
    measure_flip: bool = True
    group_flip_units: float = 2.0
    single_z: Optional[tuple[int, float]] = None

    @staticmethod
    def only_single_group_z(group: int, rate: float) -> "McNoiseConfig":
        return McNoiseConfig(
            data_init=False,
            gadget_two_qubit=False,
            group_flip=False,
            idle=False,
            extraction_two_qubit=False,
            ancilla_init=False,
            measure_flip=False,
            single_z=(group, rate),
        )


@dataclass(frozen=True)
class McEstimate:
    """A Bernoulli estimate: ``shots`` is the number of backing trials."""

    mean: float
    std_error: float
    shots: int
    seed: int


@dataclass(frozen=True)
class _Plaquette:
    kind: str  # "X" or "Z"
    anc: int
    # Data indices in schedule order (length 4, None where the boundary
    # plaquette skips a step).
    slots: tuple[Optional[int], ...]
    monitored: bool


@dataclass(frozen=True)
class GadgetCircuit:
    """Compiled first-level gadget: layout, schedules, fault locations."""

    d_x: int
    d_z: int
    n_data: int
    n_anc: int
    groups: tuple[tuple[int, int, int], ...]
    plaquettes: tuple[_Plaquette, ...]
    monitored: tuple[int, ...]  # ancilla indices of post-selected checks
    rounds: int = 2

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def detector_count(self) -> int:
        return self.rounds * len(self.monitored)

    def location_counts(self) -> dict[str, int]:
        """Fault locations per family, for the whole two-round circuit."""
        cnots_per_round = sum(
            sum(1 for s in p.slots if s is not None) for p in self.plaquettes
        )
        idle_per_round = self._idles_per_step_total() + 2 * self.n_data
        return {
            "data_init": self.n_data,
            "gadget_two_qubit": 6 * self.k,
            "group_flip": self.k,
            "extraction_two_qubit": self.rounds * cnots_per_round,
            "ancilla_init": self.rounds * self.n_anc,
            "measure_flip": self.rounds * self.n_anc,
            "idle": self.rounds * idle_per_round,
            "detectors": self.detector_count,
        }

    def _idles_per_step_total(self) -> int:
        total = 0
        for step in range(4):
            engaged = sum(1 for p in self.plaquettes if p.slots[step] is not None)
            total += (self.n_data + self.n_anc) - 2 * engaged
        return total


def build_gadget(d_x: int, d_z: int) -> GadgetCircuit:
    """Compile the first-level circuit for a d_x-by-d_z rotated patch."""
    if d_z % 3 != 0:
        raise ValidationError(f"d_z must be divisible by 3, got {d_z}")
    if d_x < 3 or d_z < 3:
        raise ValidationError("patch needs d_x >= 3 and d_z >= 3")

    def data_id(r: int, c: int) -> int:
        return r * d_z + c

    plaquettes: list[_Plaquette] = []
    anc = 0

    def add(kind, corners, monitored):
        nonlocal anc
        order = (0, 1, 2, 3) if kind == "X" else (0, 2, 1, 3)  # NW NE SW SE / NW SW NE SE
        slots = tuple(corners[i] for i in order)
        plaquettes.append(_Plaquette(kind, anc, slots, monitored))
        anc += 1

    # Interior plaquettes; corners ordered NW, NE, SW, SE.
    for r in range(d_x - 1):
        for c in range(d_z - 1):
            kind = "X" if (r + c) % 2 == 0 else "Z"
            corners = [data_id(r, c), data_id(r, c + 1), data_id(r + 1, c), data_id(r + 1, c + 1)]
            add(kind, corners, kind == "X" and r == 0)
    # Top boundary X checks (virtual row -1): present where the coloring is X.
    for c in range(d_z - 1):
        if (-1 + c) % 2 == 0:
            add("X", [None, None, data_id(0, c), data_id(0, c + 1)], True)
    # Bottom boundary X checks (virtual row d_x - 1).
    for c in range(d_z - 1):
        if (d_x - 1 + c) % 2 == 0:
            add("X", [data_id(d_x - 1, c), data_id(d_x - 1, c + 1), None, None], False)
    # Left boundary Z checks (virtual column -1).
    for r in range(d_x - 1):
        if (r - 1) % 2 == 1:
            add("Z", [None, data_id(r, 0), None, data_id(r + 1, 0)], False)
    # Right boundary Z checks (virtual column d_z - 1).
    for r in range(d_x - 1):
        if (r + d_z - 1) % 2 == 1:
            add("Z", [data_id(r, d_z - 1), None, data_id(r + 1, d_z - 1), None], False)

    if len(plaquettes) != d_x * d_z - 1:
        raise ValidationError(
            f"unsupported geometry: {len(plaquettes)} stabilizers on a "
            f"{d_x}x{d_z} patch (expected {d_x * d_z - 1})"
        )
    # The schedule must couple each data qubit at most once per step.
    for step in range(4):
        touched = [p.slots[step] for p in plaquettes if p.slots[step] is not None]
        if len(touched) != len(set(touched)):
            raise ValidationError("schedule conflict; geometry not supported")

    groups = tuple(
        (data_id(0, 3 * j), data_id(0, 3 * j + 1), data_id(0, 3 * j + 2))
        for j in range(d_z // 3)
    )
    monitored = tuple(p.anc for p in plaquettes if p.monitored)
    return GadgetCircuit(
        d_x=d_x,
        d_z=d_z,
        n_data=d_x * d_z,
        n_anc=len(plaquettes),
        groups=groups,
        plaquettes=tuple(plaquettes),
        monitored=monitored,
    )


# Gadget propagation: a Z on the parity ancilla after two-qubit gate j
# lands on these data legs of the group by the end of the gadget.
_GADGET_PROP = ((0,), (0, 1), (0, 1, 2), (0, 1), (0,), ())
# Data leg of each of the six gadget CNOTs.
_GADGET_LEG = (0, 1, 2, 2, 1, 0)
# Locations whose (z1, z2, x1) category yields a pure whole-group flip;
# their probability mass is folded into the calibrated group-flip rate.
_GADGET_SKIP = {2: (False, True), 3: (True, True)}  # loc -> (z1, z2) with x1 False


def _sample_e2(rng, p, n_locs, batch):
    """Two-qubit depolarizing draws: (z1, x1, z2) bit arrays per location."""
    u = rng.random((batch, n_locs))
    fault = u < p
    cat = np.minimum((u * (15.0 / p)).astype(np.int64), 14) if p > 0 else np.zeros(
        (batch, n_locs), dtype=np.int64
    )
    return (
        fault & _CAT_Z1[cat],
        fault & _CAT_X1[cat],
        fault & _CAT_Z2[cat],
    )


def _run_batch(circuit: GadgetCircuit, noise, config, seed, batch_index, batch):
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), int(batch_index)]))
    )
    p = noise.p_phy
    n_data, n_anc = circuit.n_data, circuit.n_anc
    z_data = np.zeros((batch, n_data), dtype=bool)
    x_data = np.zeros((batch, n_data), dtype=bool)

    # --- gadget phase -----------------------------------------------------
    if config.data_init:
        z_data ^= rng.random((batch, n_data)) < p
    if config.single_z is not None:
        g, rate = config.single_z
        for q in circuit.groups[g]:
            z_data[:, q] ^= rng.random(batch) < rate
    for qubits in circuit.groups:
        if config.gadget_two_qubit:
            z1, x1, z2 = _sample_e2(rng, p, 6, batch)
            for loc in range(6):
                zz1, xx1, zz2 = z1[:, loc], x1[:, loc], z2[:, loc]
                if loc in _GADGET_SKIP:
                    want_z1, want_z2 = _GADGET_SKIP[loc]
                    pure = (zz1 == want_z1) & (zz2 == want_z2) & ~xx1
                    zz1, xx1, zz2 = zz1 & ~pure, xx1 & ~pure, zz2 & ~pure
                leg = qubits[_GADGET_LEG[loc]]
                z_data[:, leg] ^= zz1
                x_data[:, leg] ^= xx1
                for tgt in _GADGET_PROP[loc]:
                    z_data[:, qubits[tgt]] ^= zz2
        if config.group_flip and config.group_flip_units > 0.0:
            flip = rng.random(batch) < config.group_flip_units * p / 15.0
            for q in qubits:
                z_data[:, q] ^= flip

    # --- classify whole-group flips and hide them in the rotation frame ---
    flips = np.zeros(batch, dtype=np.int64)
    for qubits in circuit.groups:
        all_z = z_data[:, qubits[0]] & z_data[:, qubits[1]] & z_data[:, qubits[2]]
        clean = ~(x_data[:, qubits[0]] | x_data[:, qubits[1]] | x_data[:, qubits[2]])
        flips += (all_z & clean).astype(np.int64)
        for q in qubits:
            z_data[:, q] ^= all_z

    # --- two rounds of syndrome extraction --------------------------------
    z_anc = np.zeros((batch, n_anc), dtype=bool)
    fired = np.zeros(batch, dtype=bool)
    mon = np.asarray(circuit.monitored)
    steps = _compiled_steps(circuit)
    x_anc_ids = np.asarray([p_.anc for p_ in circuit.plaquettes if p_.kind == "X"])
    for _ in range(circuit.rounds):
        z_anc[:] = False
        if config.ancilla_init:
            z_anc[:, x_anc_ids] ^= rng.random((batch, len(x_anc_ids))) < p
        if config.idle:
            z_data ^= rng.random((batch, n_data)) < 2.0 * p / 3.0
        for x_anc, x_dat, zz_anc, zz_dat, idle_data, idle_anc in steps:
            if len(x_anc):
                z_anc[:, x_anc] ^= z_data[:, x_dat]
            if len(zz_anc):
                z_data[:, zz_dat] ^= z_anc[:, zz_anc]
            if config.extraction_two_qubit:
                n = len(x_anc) + len(zz_anc)
                z1, _, z2 = _sample_e2(rng, p, n, batch)
                nx = len(x_anc)
                if nx:
                    z_anc[:, x_anc] ^= z1[:, :nx]  # control leg
                    z_data[:, x_dat] ^= z2[:, :nx]  # target leg
                if len(zz_anc):
                    z_data[:, zz_dat] ^= z1[:, nx:]
                    z_anc[:, zz_anc] ^= z2[:, nx:]
            if config.idle:
                if len(idle_data):
                    z_data[:, idle_data] ^= rng.random((batch, len(idle_data))) < 2.0 * p / 3.0
                if len(idle_anc):
                    z_anc[:, idle_anc] ^= rng.random((batch, len(idle_anc))) < 2.0 * p / 3.0
        meas = z_anc[:, mon]
        if config.measure_flip:
            flips_all = rng.random((batch, n_anc)) < p
            meas = meas ^ flips_all[:, mon]
        fired |= meas.any(axis=1)
        if config.idle:
            z_data ^= rng.random((batch, n_data)) < 2.0 * p / 3.0

    silent = ~fired
    return int(fired.sum()), int(silent.sum()), int(flips[silent].sum())


def _compiled_steps(circuit: GadgetCircuit):
    steps = []
    all_data = set(range(circuit.n_data))
    all_anc = set(range(circuit.n_anc))
    for step in range(4):
        x_anc, x_dat, z_anc, z_dat = [], [], [], []
        for p_ in circuit.plaquettes:
            d = p_.slots[step]
            if d is None:
                continue
            if p_.kind == "X":
                x_anc.append(p_.anc)
                x_dat.append(d)
            else:
                z_anc.append(p_.anc)
                z_dat.append(d)
        engaged_data = set(x_dat) | set(z_dat)
        engaged_anc = set(x_anc) | set(z_anc)
        steps.append(
            (
                np.asarray(x_anc, dtype=np.int64),
                np.asarray(x_dat, dtype=np.int64),
                np.asarray(z_anc, dtype=np.int64),
                np.asarray(z_dat, dtype=np.int64),
                np.asarray(sorted(all_data - engaged_data), dtype=np.int64),
                np.asarray(sorted(all_anc - engaged_anc), dtype=np.int64),
            )
        )
    return steps


def _thread_count(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("MLTI_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def simulate_counts(
    circuit: GadgetCircuit,
    noise: PhysicalNoise,
    shots: int,
    seed: int,
    config: Optional[McNoiseConfig] = None,
    threads: Optional[int] = None,
) -> tuple[int, int, int]:
    """(discarded, silent, group flips among silent) over ``shots`` runs.

    Deterministic given (circuit, noise, shots, seed, config): every batch
    of 2^15 shots draws from its own counter-derived stream, so results do
    not depend on execution order or thread count.
    """
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    if seed < 0:
        raise ValidationError("seed must be nonnegative")
    config = config or McNoiseConfig()
    sizes = []
    remaining = shots
    while remaining > 0:
        sizes.append(min(_BATCH, remaining))
        remaining -= sizes[-1]
    workers = _thread_count(threads)

    def run(i):
        return _run_batch(circuit, noise, config, seed, i, sizes[i])

    if workers == 1 or len(sizes) == 1:
        results = [run(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(len(sizes))))
    discarded = sum(r[0] for r in results)
    silent = sum(r[1] for r in results)
    flips = sum(r[2] for r in results)
    return discarded, silent, flips


def _bernoulli_estimate(successes: int, trials: int, seed: int) -> McEstimate:
    if trials <= 0:
        return McEstimate(mean=0.0, std_error=0.0, shots=0, seed=seed)
    mean = successes / trials
    return McEstimate(
        mean=mean,
        std_error=math.sqrt(mean * (1.0 - mean) / trials),
        shots=trials,
        seed=seed,
    )


def estimate_discard(
    circuit: GadgetCircuit,
    noise: PhysicalNoise,
    shots: int,
    seed: int,
    config: Optional[McNoiseConfig] = None,
    threads: Optional[int] = None,
) -> McEstimate:
    """Probability that any post-selected detector fires."""
    discarded, _, _ = simulate_counts(circuit, noise, shots, seed, config, threads)
    return _bernoulli_estimate(discarded, shots, seed)


def estimate_undetected_group_z(
    circuit: GadgetCircuit,
    noise: PhysicalNoise,
    shots: int,
    seed: int,
    config: Optional[McNoiseConfig] = None,
    threads: Optional[int] = None,
) -> McEstimate:
    """Per-group rate of silent whole-group Z flips among accepted runs.

    The trial count is (groups per shot) x (accepted shots); the estimate
    is conditioned on acceptance, matching how the rate feeds the
    first-level input mixture.
    """
    _, silent, flips = simulate_counts(circuit, noise, shots, seed, config, threads)
    return _bernoulli_estimate(flips, circuit.k * silent, seed)

"""Constrained discrete search: minimize space-time volume subject to a
target infidelity.

Pruning follows three rules.  Copy counts at pumped levels are limited
to those whose input angle sits within the pump window of pi/8 (any
other choice is infeasible outright).  Magic-state candidates are kept
near the point where their predicted contribution matches the target.
Distances are searched one coordinate at a time with the others anchored
at large values, then a product scan runs over a neighborhood of the
per-coordinate optima; coordinate ranges small enough to scan outright
are scanned outright, which keeps the pruned search exactly equal to the
exhaustive oracle on bounded spaces.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import costs
from .errors import InfeasibleError, ValidationError
from .noise import PhysicalNoise
from .pipeline import (
    PUMP_WINDOW,
    EvalReport,
    LevelSpec,
    Plan,
    derive_angles,
    evaluate_plan,
    pump_candidate_ks,
)
from .injection import input_angle

logger = logging.getLogger(__name__)

_PI_8 = math.pi / 8.0

#: Above this many catalog candidates per level, the targeting rule prunes.
_MAGIC_PRUNE_THRESHOLD = 6


def k_candidates(beta: float, window: float = PUMP_WINDOW, k_max: int = 60) -> list[int]:
    """All k >= 2 whose input angle for output ``beta`` is within ``window`` of pi/8."""
    return pump_candidate_ks(beta, k_max=k_max, window=window)


def magic_targets(
    eps_target: float,
    k: int,
    beta: float,
    catalog: costs.MagicCatalog,
) -> list[costs.MagicEntry]:
    """Catalog entries whose predicted infidelity contribution suits the target.

    The predicted contribution of a magic state with infidelity eps_T at a
    level with k copies and output angle beta is k * eps_T * |beta|^(2(1-1/k)).
    Entries contributing between 1% and 100% of the target are kept, plus
    the cleanest entry as a fallback.
    """
    if eps_target <= 0.0:
        raise ValidationError("eps_target must be positive")
    factor = k * abs(float(beta)) ** (2.0 * (1.0 - 1.0 / k))
    kept = [
        e
        for e in catalog.entries
        if 0.01 * eps_target <= factor * e.infidelity <= eps_target
    ]
    cleanest = catalog.cleanest()
    if cleanest not in kept:
        kept.append(cleanest)
    return sorted(kept, key=lambda e: (e.infidelity, e.label))


def _default_distances(d_max: int) -> tuple[int, ...]:
    odds = list(range(3, d_max + 1, 2))
    evens = list(range(4, d_max + 1, 2))
    return tuple(sorted(odds + evens))


@dataclass(frozen=True)
class SearchSpace:
    """Bounds of one search: level count, per-level parameter ranges."""

    levels: int
    k1_values: tuple[int, ...]
    k_values: tuple[int, ...]
    d_values: tuple[int, ...]
    d1x_values: Optional[tuple[int, ...]] = None
    magic_labels: Optional[tuple[str, ...]] = None
    window: float = PUMP_WINDOW
    full_scan_limit: int = 10
    neighborhood: int = 2

    def __post_init__(self):
        if not 1 <= self.levels <= 4:
            raise ValidationError(f"level count must be 1..4, got {self.levels}")
        if not self.k1_values or not self.d_values:
            raise ValidationError("search space bounds must be non-empty")
        if self.levels > 1 and not self.k_values:
            raise ValidationError("multi-level spaces need k bounds for upper levels")

    @property
    def dx1(self) -> tuple[int, ...]:
        return self.d1x_values if self.d1x_values is not None else self.d_values


def default_space(
    levels: int, k1_max: int = 12, k_max: int = 40, d_max: int = 31
) -> SearchSpace:
    # Sweep-sized spaces keep a one-step product-scan neighborhood; the
    # coordinate scans themselves cover every value.
    return SearchSpace(
        levels=levels,
        k1_values=tuple(range(1, k1_max + 1)),
        k_values=tuple(range(2, k_max + 1)),
        d_values=_default_distances(d_max),
        neighborhood=1,
    )


@dataclass(frozen=True)
class SearchResult:
    plan: Plan
    report: EvalReport
    volume: costs.VolumeReport
    explored: int

    def plan_key(self) -> tuple:
        return _plan_key(self.plan)


def _plan_key(plan: Plan) -> tuple:
    key: list = []
    for spec in plan.levels:
        key.extend((spec.k, spec.d_x, spec.d_z, spec.magic_label or ""))
    return tuple(key)


def _k_chains(target: float, space: SearchSpace) -> list[tuple[int, ...]]:
    """Enumerate k tuples (first level first) compatible with the pump window."""
    if space.levels == 1:
        return [(k1,) for k1 in sorted(space.k1_values)]
    chains: list[tuple[int, ...]] = []
    k_allowed = sorted(set(space.k_values))

    def walk(level_idx: int, beta: float, suffix: tuple[int, ...]):
        if level_idx == 0:
            for k1 in sorted(space.k1_values):
                chains.append((k1,) + suffix)
            return
        if beta == 0.0:
            return
        for k in pump_candidate_ks(beta, k_max=max(k_allowed), window=space.window):
            if k not in k_allowed:
                continue
            walk(level_idx - 1, _PI_8 - abs(input_angle(beta, k)), (k,) + suffix)

    walk(space.levels - 1, float(target), ())
    return chains


def _magic_options(
    target: float,
    ks: tuple[int, ...],
    catalog: costs.MagicCatalog,
    space: SearchSpace,
    prune: bool,
) -> list[tuple[str, ...]]:
    """Magic label tuples for levels 2..r (empty tuple for single level)."""
    if space.levels == 1:
        return [()]
    allowed = catalog.entries
    if space.magic_labels is not None:
        allowed = tuple(e for e in allowed if e.label in space.magic_labels)
    if not allowed:
        raise ValidationError("no catalog entries admitted by the search space")
    angles = derive_angles(target, list(ks))
    per_level: list[list[str]] = []
    sub = costs.MagicCatalog(entries=allowed)
    for i in range(1, space.levels):
        if prune and len(allowed) > _MAGIC_PRUNE_THRESHOLD:
            cands = magic_targets(target, ks[i], angles[i].beta, sub)
        else:
            cands = sorted(allowed, key=lambda e: (e.infidelity, e.label))
        per_level.append([e.label for e in cands])
    return [tuple(combo) for combo in itertools.product(*per_level)]


def _build_plan(target, ks, d1x, dxs, dzs, magic) -> Plan:
    levels = [LevelSpec(k=ks[0], d_x=d1x, d_z=3 * ks[0])]
    for i in range(1, len(ks)):
        levels.append(
            LevelSpec(k=ks[i], d_x=dxs[i - 1], d_z=dzs[i - 1], magic_label=magic[i - 1])
        )
    return Plan(levels=tuple(levels), target=float(target))


class _Evaluator:
    """Evaluate-and-memoize plan candidates for one (target, noise, catalog)."""

    def __init__(self, target_infidelity, target_angle, noise, catalog, consume_k):
        self.target_infidelity = target_infidelity
        self.target_angle = target_angle
        self.noise = noise
        self.catalog = catalog
        self.consume_k = consume_k
        self.explored = 0
        self.best = None  # (volume, plan_key, plan, report)
        self.best_infeasible = math.inf
        self._cache: dict[tuple, Optional[float]] = {}

    def consider(self, ks, d1x, dxs, dzs, magic) -> Optional[float]:
        """Evaluate one candidate; returns its volume, or None if infeasible."""
        key = (tuple(ks), d1x, tuple(dxs), tuple(dzs), tuple(magic))
        if key in self._cache:
            return self._cache[key]
        plan = _build_plan(self.target_angle, ks, d1x, dxs, dzs, magic)
        report = evaluate_plan(
            plan, self.noise, self.catalog, consume_k=self.consume_k
        )
        self.explored += 1
        if report.final_infidelity > self.target_infidelity:
            self.best_infeasible = min(self.best_infeasible, report.final_infidelity)
            self._cache[key] = None
            return None
        vol = report.volume.acceptance_adjusted
        cand = (vol, _plan_key(plan), plan, report)
        if self.best is None or cand[:2] < self.best[:2]:
            self.best = cand
        self._cache[key] = vol
        return vol


def _scan_coordinate(evaluator, ks, magic, coords, idx):
    """Scan one distance coordinate with the others at their anchors."""
    values, anchor_assignment = coords
    volumes = []
    feas_idx = []
    for j, v in enumerate(values[idx]):
        assignment = list(anchor_assignment)
        assignment[idx] = v
        vol = evaluator.consider(ks, assignment[0], assignment[1::2], assignment[2::2], magic)
        volumes.append(vol)
        if vol is not None:
            feas_idx.append(j)
    # Odd and even distances follow different rate laws; unimodality is
    # expected within each parity class, not across the interleaved list.
    for parity in (0, 1):
        _warn_if_not_unimodal(
            [v for v, d in zip(volumes, values[idx]) if d % 2 == parity]
        )
    return feas_idx


def _warn_if_not_unimodal(volumes):
    vals = [v for v in volumes if v is not None]
    if len(vals) < 3:
        return
    rises = 0
    for a, b in zip(vals, vals[1:]):
        if b > a * (1.0 + 1e-12):
            rises += 1
        elif b < a * (1.0 - 1e-12) and rises:
            logger.warning("distance scan is not unimodal: %s", vals)
            return


def _volume_lower_bound(gamma, ks, magic, space, catalog, consume_k) -> float:
    """True lower bound on any plan volume for this (k chain, magic combo).

    Every stage volume grows with both distances and shrinking acceptance,
    so the smallest admissible distances with perfect acceptance bound the
    whole family from below.
    """
    from .pipeline import plan_volume

    d1x = min(space.dx1)
    d = min(space.d_values)
    plan = _build_plan(gamma, ks, d1x, [d] * (len(ks) - 1), [d] * (len(ks) - 1), magic)
    return plan_volume(plan, [1.0] * len(ks), catalog, consume_k).acceptance_adjusted


def optimize(
    target_infidelity: float,
    clifford_l: int,
    r: int,
    noise: PhysicalNoise,
    catalog: costs.MagicCatalog,
    space: Optional[SearchSpace] = None,
    consume_k: bool = True,
    initial_bound: float = math.inf,
) -> SearchResult:
    """Volume-minimal r-level plan reaching the target infidelity.

    Raises ``InfeasibleError`` (carrying the best infidelity achieved)
    when no plan in the space reaches the target.  Ties break on the
    lexicographically smallest parameter tuple, first level first.
    ``initial_bound`` prunes candidates whose volume lower bound already
    exceeds a known-achievable volume (from another search).
    """
    space = space or default_space(r)
    if space.levels != r:
        raise ValidationError("search space level count must match r")
    gamma = costs.CliffordTarget(clifford_l).theta
    ev = _Evaluator(target_infidelity, gamma, noise, catalog, consume_k)

    candidates = []
    for ks in _k_chains(gamma, space):
        # A chain whose noise-free floor misses the target cannot recover.
        floor_plan = _build_plan(gamma, ks, 3, [3] * (r - 1), [3] * (r - 1), [None] * (r - 1))
        floor = evaluate_plan(
            floor_plan, noise, fill_volume=False, first_level_noise_only=True
        ).final_infidelity
        if floor > target_infidelity:
            ev.best_infeasible = min(ev.best_infeasible, floor)
            continue
        for magic in _magic_options(gamma, ks, catalog, space, prune=True):
            bound = _volume_lower_bound(gamma, ks, magic, space, catalog, consume_k)
            candidates.append((bound, ks, magic))
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))

    for bound, ks, magic in candidates:
        best_vol = ev.best[0] if ev.best is not None else initial_bound
        if bound > best_vol:
            break  # sorted by bound: nothing later can beat the best
        _search_distances(ev, ks, magic, space)

    if ev.best is None:
        raise InfeasibleError(
            f"no plan reaches {target_infidelity} at r={r}",
            best_achieved=(
                None if ev.best_infeasible is math.inf else ev.best_infeasible
            ),
        )
    _, _, plan, report = ev.best
    return SearchResult(plan=plan, report=report, volume=report.volume, explored=ev.explored)


def _search_distances(ev, ks, magic, space):
    r = len(ks)
    values = [sorted(space.dx1)]
    for _ in range(r - 1):
        values.append(sorted(space.d_values))  # d_x of this level
        values.append(sorted(space.d_values))  # d_z of this level
    anchors = [max(vs) for vs in values]
    windows = []
    for idx in range(len(values)):
        if len(values[idx]) <= space.full_scan_limit:
            windows.append(list(range(len(values[idx]))))
            continue
        feas = _scan_coordinate(ev, ks, magic, (values, anchors), idx)
        if not feas:
            return  # infeasible even at the anchors
        center = min(
            feas,
            key=lambda j: _coordinate_probe(ev, ks, magic, values, anchors, idx, j),
        )
        lo = max(0, center - space.neighborhood)
        hi = min(len(values[idx]) - 1, center + space.neighborhood)
        windows.append(list(range(lo, hi + 1)))
    for combo in itertools.product(*windows):
        assignment = [values[i][j] for i, j in enumerate(combo)]
        ev.consider(ks, assignment[0], assignment[1::2], assignment[2::2], magic)


def _coordinate_probe(ev, ks, magic, values, anchors, idx, j):
    assignment = list(anchors)
    assignment[idx] = values[idx][j]
    vol = ev.consider(ks, assignment[0], assignment[1::2], assignment[2::2], magic)
    return math.inf if vol is None else vol


def exhaustive_oracle(
    target_infidelity: float,
    clifford_l: int,
    r: int,
    noise: PhysicalNoise,
    catalog: costs.MagicCatalog,
    space: SearchSpace,
    consume_k: bool = True,
    max_plans: int = 1_000_000,
) -> SearchResult:
    """Full enumeration of the space, same evaluation and tie-break."""
    if space.levels != r:
        raise ValidationError("search space level count must match r")
    gamma = costs.CliffordTarget(clifford_l).theta
    chains = _k_chains(gamma, space)
    n_d = len(space.d_values)
    n_plans = 0
    for ks in chains:
        n_magic = len(_magic_options(gamma, ks, catalog, space, prune=False))
        n_plans += len(space.dx1) * n_d ** (2 * (r - 1)) * n_magic
    if n_plans > max_plans:
        raise ValidationError(f"space holds {n_plans} plans, above the oracle limit")

    ev = _Evaluator(target_infidelity, gamma, noise, catalog, consume_k)
    for ks in chains:
        for magic in _magic_options(gamma, ks, catalog, space, prune=False):
            axes = [sorted(space.dx1)]
            for _ in range(r - 1):
                axes.append(sorted(space.d_values))
                axes.append(sorted(space.d_values))
            for assignment in itertools.product(*axes):
                ev.consider(
                    ks, assignment[0], list(assignment[1::2]), list(assignment[2::2]), magic
                )
    if ev.best is None:
        raise InfeasibleError(
            f"no plan reaches {target_infidelity} at r={r}",
            best_achieved=(
                None if ev.best_infeasible is math.inf else ev.best_infeasible
            ),
        )
    _, _, plan, report = ev.best
    return SearchResult(plan=plan, report=report, volume=report.volume, explored=ev.explored)

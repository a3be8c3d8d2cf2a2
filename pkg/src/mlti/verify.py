"""Self-check suites runnable from the command line.

Each suite re-derives a core guarantee with an independent route and a
hard numerical tolerance.  ``tolerance_scale`` multiplies every
tolerance: the default 1.0 must pass, and 0.0 must fail loudly (it
leaves no room even for roundoff), which is the harness sanity check.

Suite names are part of the command-line contract:

* ``injection-purity``: random pure states map exactly onto the
  predicted output rotation states.
* ``suppression-bound``: the exact-prefactor form of the per-level
  error-suppression bound holds on the parameter grid.
* ``teleport-cancellation``: randomized gate teleportation removes the
  ancilla coherence exactly and unifies infidelity with trace distance.
* ``distillation-oracle``: the exact small-circuit simulation matches
  the closed-form output error.
* ``optimizer-consistency``: the pruned search equals exhaustive
  enumeration on seeded bounded spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import costs, optimizer, qstate, teleport
from .injection import (
    accept_rate_ideal,
    accept_rate_m,
    input_angle,
    output_angle,
    ti_channel,
)
from .noise import PhysicalNoise
from .qstate import (
    fidelity_with,
    make_rotation_density,
    noisy_rotation_density,
    trace_distance_to,
)

_GRID_KS = tuple(range(2, 9))
_GRID_BETAS = (1e-3, 1e-2, 0.1, 0.3)
_GRID_EPS = (1e-6, 1e-5, 1e-4, 1e-3)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    checks: int
    worst: float  # worst margin seen, in units of the allowed tolerance
    detail: str


def _result(name, checks, worst, tol, detail=""):
    return SuiteResult(
        name=name,
        passed=bool(worst <= tol),
        checks=checks,
        worst=float(worst),
        detail=detail or f"worst {worst:.3e} vs allowance {tol:.3e}",
    )


def injection_purity(tolerance_scale: float = 1.0, seed: int = 20240) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    n = 1000
    for _ in range(n):
        alpha = rng.uniform(1e-6, math.pi / 4)
        k = int(rng.integers(1, 16))
        out = ti_channel(make_rotation_density(alpha), k)
        worst = max(worst, 1.0 - fidelity_with(out.state, output_angle(alpha, k)))
        worst = max(worst, abs(out.accept_rate - accept_rate_ideal(alpha, k)))
    return _result("injection-purity", n, worst, 1e-12 * tolerance_scale)


def suppression_bound(tolerance_scale: float = 1.0, seed: int = 0) -> SuiteResult:
    """Exact-prefactor suppression bound on the (k, beta, eps, b) grid.

    The exact one-level bound replaces the small-angle factor
    |beta|^(2(1-1/k)) with the branch overlap (cos sin)^(2k-2)/ps0 of the
    actual input angle, which is what the channel realizes; the sqrt(eps)
    slack covers the higher-order mixture terms.
    """
    worst = 0.0
    checks = 0
    for k in _GRID_KS:
        for beta in _GRID_BETAS:
            alpha = input_angle(beta, k)
            c, s = math.cos(alpha), math.sin(alpha)
            ps0 = accept_rate_ideal(alpha, k)
            exact_factor = (c * s) ** (2 * k - 2) / ps0
            for eps in _GRID_EPS:
                for b in (0.0, math.sqrt(eps - eps * eps)):
                    rho = noisy_rotation_density(alpha, eps, b)
                    out = ti_channel(rho, k)
                    err = 1.0 - fidelity_with(out.state, beta)
                    bound = k * k * eps * exact_factor / out.accept_rate
                    allowed = bound * (1.0 + 10.0 * math.sqrt(eps))
                    if allowed > 0.0:
                        worst = max(worst, err / allowed)
                    checks += 1
    return _result("suppression-bound", checks, worst, tolerance_scale)


def teleport_cancellation(tolerance_scale: float = 1.0, seed: int = 77) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    n = 200
    for _ in range(n):
        theta = rng.uniform(-1.3, 1.3)
        phi = rng.uniform(-1.3, 1.3)
        eps = rng.uniform(0.0, 0.05)
        b_max = math.sqrt(max(eps - eps * eps, 0.0))
        b = rng.uniform(-b_max, b_max)
        rho_in = make_rotation_density(phi)
        got = teleport.randomized_teleport(
            rho_in, noisy_rotation_density(theta, eps, b), theta
        )
        want = qstate.apply_pauli_channel(qstate.rotate(rho_in, theta), 0.0, eps)
        worst = max(
            worst,
            abs(got.rho_pp - want.rho_pp),
            abs(got.rho_mm - want.rho_mm),
            abs(got.rho_pm - want.rho_pm),
            abs(
                (1.0 - fidelity_with(got, phi + theta))
                - trace_distance_to(got, phi + theta)
            ),
        )
    return _result("teleport-cancellation", n, worst, 1e-12 * tolerance_scale)


def distillation_oracle(tolerance_scale: float = 1.0, seed: int = 0) -> SuiteResult:
    worst = 0.0
    grid = [10.0 ** e for e in (-4.0, -3.5, -3.0, -2.5, -2.0)]
    for eps in grid:
        got = costs.distill_oracle(eps, 0.0)
        want = eps * eps / ((1.0 - eps) ** 2 + eps * eps)
        worst = max(worst, abs(got - want))
        b = 0.9 * math.sqrt(eps - eps * eps)
        worst = max(worst, abs(costs.distill_oracle(eps, b) - costs.distill_oracle(eps, -b)))
    return _result("distillation-oracle", 2 * len(grid), worst, 1e-12 * tolerance_scale)


def compare_search_routes(target, noise_p, cat, space):
    """Run both search routes; True when they agree (plan or infeasibility)."""
    def run(fn):
        try:
            res = fn(target, 4, 2, noise_p, cat, space)
            return ("ok", res.plan_key(), res.volume.acceptance_adjusted)
        except optimizer.InfeasibleError:
            return ("infeasible",)

    return run(optimizer.optimize) == run(optimizer.exhaustive_oracle)


def optimizer_consistency(tolerance_scale: float = 1.0, seed: int = 11, spaces: int = 5) -> SuiteResult:
    rng = np.random.default_rng(seed)
    mismatches = 0
    checks = 0
    for _ in range(spaces):
        space, cat, target, noise_p = random_bounded_space(rng)
        checks += 1
        if not compare_search_routes(target, noise_p, cat, space):
            mismatches += 1
    worst = float(mismatches)
    return _result(
        "optimizer-consistency",
        checks,
        worst,
        0.0 if tolerance_scale == 0.0 else 0.5,
        detail=f"{mismatches} mismatching spaces of {checks}",
    )


def random_bounded_space(rng):
    """A small two-level search space with a binding, feasible target.

    The target is set a random factor above the infidelity of an
    in-space reference plan (largest distances, median k chain), so the
    constraint binds but a feasible plan always exists.
    """
    from .pipeline import LevelSpec, Plan, evaluate_plan
    from .optimizer import _k_chains

    k1 = tuple(sorted(rng.choice(range(1, 4), size=2, replace=False).tolist()))
    d_hi = int(rng.integers(7, 10))
    d_values = tuple(v for v in range(3, d_hi + 1))
    entries = [
        costs.MagicEntry(
            "clean", float(10.0 ** rng.uniform(-12, -10)), float(10.0 ** rng.uniform(4, 6))
        ),
        costs.MagicEntry(
            "cheap", float(10.0 ** rng.uniform(-7, -5)), float(10.0 ** rng.uniform(2, 4))
        ),
    ][: 1 + int(rng.random() < 0.8)]
    cat = costs.MagicCatalog(entries=tuple(entries))
    space = optimizer.SearchSpace(
        levels=2,
        k1_values=k1,
        k_values=tuple(range(2, int(rng.integers(5, 9)))),
        d_values=d_values,
    )
    p = float(rng.choice([5e-4, 1e-3]))
    noise_p = PhysicalNoise(p)
    gamma = costs.CliffordTarget(4).theta
    chains = _k_chains(gamma, space)
    ks = chains[len(chains) // 2]
    d_top = max(d_values) if max(d_values) % 2 == 1 else max(d_values) - 1
    ref = Plan(
        levels=(
            LevelSpec(ks[0], d_top, 3 * ks[0]),
            LevelSpec(ks[1], d_top, d_top, magic_label=cat.cleanest().label),
        ),
        target=gamma,
    )
    ref_inf = evaluate_plan(ref, noise_p, cat, fill_volume=False).final_infidelity
    target = float(ref_inf * rng.uniform(1.2, 5.0))
    return space, cat, target, noise_p


SUITES = {
    "injection-purity": injection_purity,
    "suppression-bound": suppression_bound,
    "teleport-cancellation": teleport_cancellation,
    "distillation-oracle": distillation_oracle,
    "optimizer-consistency": optimizer_consistency,
}


def run_all(tolerance_scale: float = 1.0, seed: int = 0) -> list[SuiteResult]:
    results = []
    for name, fn in SUITES.items():
        kwargs = {"tolerance_scale": tolerance_scale}
        if seed:
            kwargs["seed"] = seed
        results.append(fn(**kwargs))
    return results

"""Command-line surface: plan evaluation, protocol search, comparison
sweeps, Monte Carlo rate estimation, and the self-check suites.

Exit codes: 0 success, 1 input error, 2 infeasible operating point,
3 internal invariant violation.  All commands are deterministic
functions of their flags, the catalog file, and the seed.  CSV numbers
carry 17 significant digits; the environment variable ``MLTI_THREADS``
caps internal parallelism (Monte Carlo batches).
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import click

from . import costs, level1mc, optimizer, pipeline, verify
from .errors import InfeasibleError, InternalError, MltiError, ValidationError
from .noise import PhysicalNoise

SWEEP_HEADER = "l,method,target_infidelity,p_phy,volume,achieved_infidelity,status,plan"
MC_HEADER = "d_x,d_z,p_phy,quantity,mean,std_error,shots,seed"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved knobs of one command invocation."""

    p_phy: float = 5e-4
    target: float = 1e-12
    levels: tuple[int, ...] = ()
    r_values: tuple[int, ...] = (1, 2, 3)
    catalog_path: Optional[str] = None
    seed: int = 2024
    shots: int = 1_000_000
    out: Optional[str] = None
    consume_k: bool = True
    literal_s61: bool = False
    allow_placeholder: bool = False
    gates: bool = False


def _parse_range(text: str, what: str) -> tuple[int, ...]:
    try:
        if "-" in text.strip().strip("-") or "-" in text[1:]:
            lo, hi = text.split("-", 1) if not text.startswith("-") else (None, None)
            if lo is not None:
                lo_i, hi_i = int(lo), int(hi)
                if hi_i < lo_i:
                    raise ValueError
                return tuple(range(lo_i, hi_i + 1))
        return (int(text),)
    except (ValueError, AttributeError):
        raise ValidationError(f"cannot parse {what} range {text!r} (use N or LO-HI)")


def _load_catalog(path: Optional[str], *, need_real: bool, allow_placeholder: bool):
    """Load the catalog; None falls back to the shipped placeholder."""
    if path is None:
        if need_real and not allow_placeholder:
            raise ValidationError(
                "this command needs a magic-state catalog; pass --catalog FILE "
                "or set --allow-placeholder for a shape-only run"
            )
        ref = resources.files("mlti").joinpath("data/placeholder_catalog.json")
        return costs.MagicCatalog.from_dict(json.loads(ref.read_text()))
    return costs.MagicCatalog.load(path)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _plan_from_file(path: str) -> pipeline.Plan:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"plan file {path}: {exc}") from exc
    if "target_angle" in payload:
        target = float(payload["target_angle"])
    elif "target_clifford_l" in payload:
        target = costs.CliffordTarget(int(payload["target_clifford_l"])).theta
    else:
        raise ValidationError("plan file: need target_angle or target_clifford_l")
    levels = []
    raw_levels = payload.get("levels")
    if not isinstance(raw_levels, list) or not raw_levels:
        raise ValidationError('plan file: "levels" must be a non-empty list')
    for i, item in enumerate(raw_levels):
        try:
            levels.append(
                pipeline.LevelSpec(
                    k=int(item["k"]),
                    d_x=int(item["d_x"]),
                    d_z=int(item["d_z"]),
                    magic_label=item.get("magic"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"plan file: level {i + 1}: {exc}") from exc
    return pipeline.Plan(levels=tuple(levels), target=target)


def _plan_summary(plan: pipeline.Plan) -> str:
    parts = []
    for spec in plan.levels:
        bit = f"k={spec.k};dx={spec.d_x};dz={spec.d_z}"
        if spec.magic_label:
            bit += f";magic={spec.magic_label}"
        parts.append(bit)
    return "|".join(parts)


def _report_dict(plan: pipeline.Plan, report: pipeline.EvalReport) -> dict:
    data = {
        "target_angle": plan.target,
        "final_infidelity": report.final_infidelity,
        "overall_accept": report.overall_accept,
        "levels": [
            {
                "alpha": lv.alpha,
                "beta": lv.beta,
                "accept": lv.accept,
                "infidelity": lv.infidelity,
            }
            for lv in report.levels
        ],
        "plan": _plan_summary(plan),
    }
    if report.volume is not None:
        data["volume"] = dataclasses.asdict(report.volume)
    return data


def _run(body):
    try:
        body()
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except InfeasibleError as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(2)
    except InternalError as exc:
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(3)
    except MltiError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)


@click.group()
def main():
    """Rotation-state preparation: channels, costs, and protocol search."""


@main.command()
@click.argument("plan_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--pphys", type=float, default=5e-4, show_default=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--consume-k/--no-consume-k", default=True, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def estimate(plan_file, pphys, catalog_path, consume_k, out):
    """Evaluate one plan file: per-level report plus volume breakdown (JSON)."""

    def body():
        plan = _plan_from_file(plan_file)
        needs_magic = any(s.magic_label for s in plan.levels[1:])
        catalog = None
        if needs_magic:
            if catalog_path is None:
                raise ValidationError("plan uses magic states; pass --catalog FILE")
            catalog = costs.MagicCatalog.load(catalog_path)
        elif len(plan.levels) > 1:
            raise ValidationError("levels above the first need a magic label")
        report = pipeline.evaluate_plan(
            plan, PhysicalNoise(pphys), catalog, consume_k=consume_k
        )
        _emit(json.dumps(_report_dict(plan, report), sort_keys=True, indent=2) + "\n", out)

    _run(body)


def _best_mlti(config: RunConfig, l: int, catalog) -> Optional[optimizer.SearchResult]:
    best = None
    for r in config.r_values:
        bound = best.volume.acceptance_adjusted if best is not None else math.inf
        try:
            res = optimizer.optimize(
                config.target,
                l,
                r,
                PhysicalNoise(config.p_phy),
                catalog,
                optimizer.default_space(r),
                consume_k=config.consume_k,
                initial_bound=bound,
            )
        except InfeasibleError:
            continue
        key = (res.volume.acceptance_adjusted, res.plan_key())
        if best is None or key < (best.volume.acceptance_adjusted, best.plan_key()):
            best = res
    return best


def _sweep_rows(config: RunConfig, catalog) -> list[str]:
    rows = []
    noise_p = PhysicalNoise(config.p_phy)
    mlti_best: dict[int, optimizer.SearchResult] = {}
    distill_best: dict[int, costs.ChainResult] = {}
    levels = config.levels
    gate_levels = tuple(range(3, max(levels) + 1)) if config.gates else levels
    for l in sorted(set(levels) | set(gate_levels)):
        res = _best_mlti(config, l, catalog)
        if res is not None:
            mlti_best[l] = res
        try:
            distill_best[l] = costs.distill_chain(l, config.target, noise_p, catalog)
        except InfeasibleError:
            pass

    def row(l, method, volume, achieved, status, plan):
        rows.append(
            ",".join(
                [
                    str(l),
                    method,
                    _fmt(config.target),
                    _fmt(config.p_phy),
                    _fmt(volume) if volume is not None else "",
                    _fmt(achieved) if achieved is not None else "",
                    status,
                    plan,
                ]
            )
        )

    for l in levels:
        res = mlti_best.get(l)
        if res is not None:
            row(
                l,
                "mlti",
                res.volume.acceptance_adjusted,
                res.report.final_infidelity,
                "ok",
                _plan_summary(res.plan),
            )
        else:
            row(l, "mlti", None, None, "infeasible", "-")
        chain = distill_best.get(l)
        if chain is not None:
            row(
                l,
                "distill",
                chain.volume,
                chain.eps_out,
                "ok",
                f"d={chain.d};rounds={chain.rounds};magic={chain.entry_label}",
            )
        else:
            row(l, "distill", None, None, "infeasible", "-")
        try:
            syn = costs.synthesis_cost(config.target, catalog)
            row(
                l,
                "synth",
                syn.volume,
                syn.n_t * catalog.get(syn.entry_label).infidelity + syn.delta**2,
                "ok",
                f"n_t={syn.n_t};magic={syn.entry_label}",
            )
        except InfeasibleError:
            row(l, "synth", None, None, "infeasible", "-")
        if config.gates:
            per_level = {}
            feasible = True
            for i in range(3, l + 1):
                cands = []
                if i in mlti_best:
                    cands.append(mlti_best[i].volume.acceptance_adjusted)
                if i in distill_best:
                    cands.append(distill_best[i].volume)
                if not cands:
                    feasible = False
                    break
                per_level[i] = min(cands)
            if feasible:
                vol = costs.gate_volume(l, per_level, literal_top_level=config.literal_s61)
                row(l, "teleport", vol, None, "ok", "best-of-methods-per-level")
            else:
                row(l, "teleport", None, None, "infeasible", "-")
    return rows


@main.command()
@click.option("--pphys", type=float, default=5e-4, show_default=True)
@click.option("--target", type=float, default=1e-12, show_default=True)
@click.option("--levels", default="4-25", show_default=True, help="Clifford level range LO-HI.")
@click.option("--r", "r_range", default="1-3", show_default=True, help="Protocol level counts LO-HI.")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=2024, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--consume-k/--no-consume-k", default=True, show_default=True)
@click.option("--literal-s61", is_flag=True, default=False,
              help="Charge the top level's state volume for every term of the gate cascade.")
@click.option("--gates", is_flag=True, default=False,
              help="Add gate-teleportation rows built from the best per-level states.")
@click.option("--allow-placeholder", is_flag=True, default=False)
def sweep(pphys, target, levels, r_range, catalog_path, seed, out, consume_k,
          literal_s61, gates, allow_placeholder):
    """Compare preparation methods over a Clifford-level range (CSV)."""

    def body():
        config = RunConfig(
            p_phy=pphys,
            target=target,
            levels=_parse_range(levels, "levels"),
            r_values=_parse_range(r_range, "r"),
            catalog_path=catalog_path,
            seed=seed,
            out=out,
            consume_k=consume_k,
            literal_s61=literal_s61,
            allow_placeholder=allow_placeholder,
            gates=gates,
        )
        catalog = _load_catalog(
            catalog_path, need_real=True, allow_placeholder=allow_placeholder
        )
        rows = _sweep_rows(config, catalog)
        _emit("\n".join([SWEEP_HEADER] + rows) + "\n", out)

    _run(body)


@main.command("optimize")
@click.option("--pphys", type=float, default=5e-4, show_default=True)
@click.option("--target", type=float, default=1e-12, show_default=True)
@click.option("--levels", default="10", show_default=True, help="Clifford level (single).")
@click.option("--r", "r_range", default="1-3", show_default=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--consume-k/--no-consume-k", default=True, show_default=True)
@click.option("--allow-placeholder", is_flag=True, default=False)
def optimize_cmd(pphys, target, levels, r_range, catalog_path, out, consume_k,
                 allow_placeholder):
    """Search for the volume-minimal plan at one Clifford level (JSON)."""

    def body():
        lvls = _parse_range(levels, "levels")
        if len(lvls) != 1:
            raise ValidationError("optimize takes a single Clifford level")
        config = RunConfig(
            p_phy=pphys,
            target=target,
            levels=lvls,
            r_values=_parse_range(r_range, "r"),
            catalog_path=catalog_path,
            consume_k=consume_k,
            allow_placeholder=allow_placeholder,
        )
        catalog = _load_catalog(
            catalog_path, need_real=True, allow_placeholder=allow_placeholder
        )
        res = _best_mlti(config, lvls[0], catalog)
        if res is None:
            raise InfeasibleError(
                f"no plan reaches {target} at Clifford level {lvls[0]} "
                f"for r in {config.r_values}"
            )
        payload = _report_dict(res.plan, res.report)
        payload["explored"] = res.explored
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", out)

    _run(body)


@main.command("verify")
@click.option("--tolerance-scale", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def verify_cmd(tolerance_scale, seed, out):
    """Run the self-check suites; nonzero exit if any suite fails."""

    def body():
        results = verify.run_all(tolerance_scale=tolerance_scale, seed=seed)
        payload = {
            "suites": [dataclasses.asdict(r) for r in results],
            "passed": all(r.passed for r in results),
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", out)
        if not payload["passed"]:
            sys.exit(3)

    _run(body)


@main.command()
@click.option("--pphys", "pphys_values", type=float, multiple=True, default=(1e-3,),
              show_default=True)
@click.option("--dims", "dims_values", multiple=True, default=("3x9",), show_default=True,
              help="Patch sizes DXxDZ; repeatable.")
@click.option("--shots", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=2024, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def mc(pphys_values, dims_values, shots, seed, out):
    """Monte Carlo discard and silent group-flip rates (CSV)."""

    def body():
        if shots < 1:
            raise ValidationError("shots must be >= 1")
        rows = []
        for dims in dims_values:
            try:
                dx_s, dz_s = dims.lower().split("x")
                d_x, d_z = int(dx_s), int(dz_s)
            except ValueError:
                raise ValidationError(f"cannot parse --dims {dims!r} (use DXxDZ)")
            circuit = level1mc.build_gadget(d_x, d_z)
            for p in pphys_values:
                noise_p = PhysicalNoise(p)
                discarded, silent, flips = level1mc.simulate_counts(
                    circuit, noise_p, shots, seed
                )
                est_d = level1mc._bernoulli_estimate(discarded, shots, seed)
                est_u = level1mc._bernoulli_estimate(flips, circuit.k * silent, seed)
                for name, est in (("discard", est_d), ("undetected_group_z", est_u)):
                    rows.append(
                        ",".join(
                            [
                                str(d_x),
                                str(d_z),
                                _fmt(p),
                                name,
                                _fmt(est.mean),
                                _fmt(est.std_error),
                                str(est.shots),
                                str(seed),
                            ]
                        )
                    )
        _emit("\n".join([MC_HEADER] + rows) + "\n", out)

    _run(body)


if __name__ == "__main__":
    main()

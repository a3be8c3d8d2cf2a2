import math
import numpy as np

from mlti import qstate, injection, noise, teleport, costs, pipeline

print("== qstate ==")
r = qstate.make_rotation_density(math.pi / 8)
print("pp,mm,pm:", r.rho_pp, r.rho_mm, r.rho_pm)
print("fid self:", qstate.fidelity_with(r, math.pi / 8))
print("TD orth:", qstate.trace_distance_to(r, math.pi / 8 + math.pi / 2))
rot = qstate.rotate(r, 0.3)
print("rotate fid:", qstate.fidelity_with(rot, math.pi / 8 + 0.3))
ch = qstate.apply_pauli_channel(qstate.make_rotation_density(0.1), 0.0, 1e-3)
print("z-chan infid:", 1 - qstate.fidelity_with(ch, 0.1))

print("== injection ==")
print("out(pi/8,3):", injection.output_angle(math.pi / 8, 3))
print("accept(pi/8,3):", injection.accept_rate_ideal(math.pi / 8, 3))
print("in(pi/1024,7):", injection.input_angle(math.pi / 1024, 7))
out = injection.ti_channel(qstate.make_rotation_density(0.3), 4)
b = injection.output_angle(0.3, 4)
print("purity:", 1 - qstate.fidelity_with(out.state, b), "accept vs ideal:",
      out.accept_rate - injection.accept_rate_ideal(0.3, 4))
# negative alpha odd k
out = injection.ti_channel(qstate.make_rotation_density(-0.3), 3)
print("neg odd purity:", 1 - qstate.fidelity_with(out.state, injection.output_angle(-0.3, 3)))
# mixture agreement
for k, a, p in [(3, math.pi / 8, 1.3333e-4), (5, 0.22, 3e-4), (1, 0.1, 1e-3)]:
    mix = injection.flipped_input_mixture(a, p)
    o = injection.ti_channel(mix, k)
    chan_inf = 1 - qstate.fidelity_with(o.state, injection.output_angle(a, k))
    ana = injection.level1_infidelity_analytic(a, k, p)
    print(f"k={k}: channel {chan_inf:.12e} analytic {ana:.12e} diff {abs(chan_inf-ana):.2e}")

print("== teleport ==")
rng = np.random.default_rng(7)
for trial in range(5):
    th = rng.uniform(-1.2, 1.2)
    phi0 = rng.uniform(-1.2, 1.2)
    eps = rng.uniform(0, 0.05)
    bmax = math.sqrt(eps - eps * eps)
    bb = rng.uniform(-bmax, bmax)
    rho_in = qstate.make_rotation_density(phi0)
    anc = qstate.noisy_rotation_density(th, eps, bb)
    got = teleport.randomized_teleport(rho_in, anc, th)
    ideal = qstate.rotate(rho_in, th)
    want = qstate.apply_pauli_channel(ideal, 0.0, eps)
    diff = max(abs(got.rho_pp - want.rho_pp), abs(got.rho_mm - want.rho_mm), abs(got.rho_pm - want.rho_pm))
    inf_out = 1 - qstate.fidelity_with(got, phi0 + th)
    td_out = qstate.trace_distance_to(got, phi0 + th)
    print(f"teleport diff {diff:.2e} infid-td {abs(inf_out - td_out):.2e} (eps={eps:.4f})")

print("== costs ==")
print("v_level1:", costs.v_level1(3, 9, 0.5))
print("v_pump:", costs.v_pump(3, 9, 1000.0))
print("v_level_r on:", costs.v_level_r(100, 3, 3, 5, 0.5, True), "off:", costs.v_level_r(100, 3, 3, 5, 0.5, False))
dc = costs.distill_cost(5, 0, 0, 0, noise.PhysicalNoise(1e-3))
print("distill:", dc)
for e in (1e-4, 1e-3, 1e-2):
    got = costs.distill_oracle(e, 0.0)
    want = e * e / ((1 - e) ** 2 + e * e)
    print(f"oracle({e}) diff {abs(got - want):.2e} ratio {got / (e * e):.6f}")
print("oracle b-dep:", abs(costs.distill_oracle(1e-2, 0.09) - costs.distill_oracle(1e-2, -0.09)))
cat = costs.MagicCatalog(entries=(costs.MagicEntry("ideal", 0.0, 0.0),))
print("synth:", costs.synthesis_cost(1e-12, cat))
print("gate_volume l=5 const:", costs.gate_volume(5, {3: 1.0, 4: 1.0, 5: 1.0}))

print("== pipeline ==")
angles = pipeline.derive_angles(math.pi / 1024, [3, 7])
print("angles:", [(round(a.alpha, 7), round(a.beta, 7)) for a in angles])
plan = pipeline.Plan(levels=(pipeline.LevelSpec(3, 3, 9), pipeline.LevelSpec(7, 5, 5, "ideal")), target=math.pi / 1024)
rep = pipeline.evaluate_plan(plan, noise.PhysicalNoise(0.0), cat)
print("zero-noise final infid:", rep.final_infidelity, "accept:", rep.overall_accept)
print("volume:", rep.volume)
rep2 = pipeline.evaluate_plan(plan, noise.PhysicalNoise(1e-3), cat, first_level_noise_only=True, fill_volume=False)
ana = injection.level1_infidelity_analytic(angles[0].alpha, 3, noise.undetected_group_z_rate(noise.PhysicalNoise(1e-3)))
print("noisy final:", rep2.final_infidelity, "level1 infid:", rep2.levels[0].infidelity, "analytic:", ana)
ks, floor = pipeline.infidelity_floor(1, noise.PhysicalNoise(5e-4), math.pi / 16)
print("floor r=1:", ks, floor)

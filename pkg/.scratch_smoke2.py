import math
import time

from mlti import costs, level1mc, noise, optimizer, pipeline

print("== level1mc build ==")
c = level1mc.build_gadget(3, 9)
print("n_anc:", c.n_anc, "k:", c.k, "monitored:", len(c.monitored), "detectors:", c.detector_count)
print("location counts:", c.location_counts())
c33 = level1mc.build_gadget(3, 3)
print("(3,3) monitored:", len(c33.monitored), "detectors:", c33.detector_count, "groups:", c33.k)

print("== zero noise ==")
t0 = time.perf_counter()
d0 = level1mc.estimate_discard(c, noise.PhysicalNoise(0.0), 10000, 1)
u0 = level1mc.estimate_undetected_group_z(c, noise.PhysicalNoise(0.0), 10000, 1)
print("discard:", d0.mean, "undetected:", u0.mean, f"({time.perf_counter()-t0:.2f}s)")

print("== p=1e-3 (3,9) 2e5 shots ==")
t0 = time.perf_counter()
u = level1mc.estimate_undetected_group_z(c, noise.PhysicalNoise(1e-3), 200000, 7)
d = level1mc.estimate_discard(c, noise.PhysicalNoise(1e-3), 200000, 7)
dt = time.perf_counter() - t0
print(f"undetected: {u.mean:.4e} +- {u.std_error:.1e} (want 1.3333e-4) z={(u.mean-2/15*1e-3)/u.std_error:.2f}")
print(f"discard: {d.mean:.4f} +- {d.std_error:.4f}  time {dt:.2f}s for 2x200k shots")

print("== single-z enumeration mode ==")
cfg = level1mc.McNoiseConfig.only_single_group_z(1, 0.3)
u1 = level1mc.estimate_undetected_group_z(c, noise.PhysicalNoise(1e-3), 200000, 3, cfg)
q = 0.3
want = q**3 / ((1 - q) ** 3 + q**3) / c.k
print(f"single-z: {u1.mean:.5e} want {want:.5e} z={(u1.mean-want)/max(u1.std_error,1e-12):.2f}")

print("== determinism ==")
u2 = level1mc.estimate_undetected_group_z(c, noise.PhysicalNoise(1e-3), 200000, 7)
print("bit-identical:", u2 == u)

print("== optimizer small space ==")
cat = costs.MagicCatalog(entries=(costs.MagicEntry("ideal", 0.0, 0.0),
                                  costs.MagicEntry("mid", 1e-7, 5e4)))
space = optimizer.SearchSpace(
    levels=2,
    k1_values=(1, 2, 3),
    k_values=tuple(range(2, 9)),
    d_values=(3, 4, 5, 6, 7, 8, 9),
)
t0 = time.perf_counter()
res = optimizer.optimize(1e-7, 4, 2, noise.PhysicalNoise(5e-4), cat, space)
t1 = time.perf_counter()
exh = optimizer.exhaustive_oracle(1e-7, 4, 2, noise.PhysicalNoise(5e-4), cat, space)
t2 = time.perf_counter()
print("optimize:", res.volume.acceptance_adjusted, res.plan_key(), f"{t1-t0:.2f}s explored {res.explored}")
print("exhaustive:", exh.volume.acceptance_adjusted, exh.plan_key(), f"{t2-t1:.2f}s explored {exh.explored}")
print("equal:", res.volume.acceptance_adjusted == exh.volume.acceptance_adjusted and res.plan_key() == exh.plan_key())

print("== infidelity_floor r=1..3, p=5e-4, gamma=pi/16 ==")
for r in (1, 2, 3):
    t0 = time.perf_counter()
    ks, fl = pipeline.infidelity_floor(r, noise.PhysicalNoise(5e-4), math.pi / 16, k1_max=30, k_max=30)
    print(f"r={r}: ks={ks} floor={fl:.4e} ({time.perf_counter()-t0:.1f}s)")

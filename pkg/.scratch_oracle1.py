"""Scratch: independent high-precision oracles for values to freeze in tests."""
import mpmath as mp

mp.mp.dps = 40

print("== angle maps ==")
a = mp.pi / 8
beta = mp.atan(mp.tan(a) ** 3)
print("output_angle(pi/8,3) =", mp.nstr(beta, 12))
print("accept_ideal(pi/8,3) =", mp.nstr(mp.cos(a) ** 6 + mp.sin(a) ** 6, 15))
print("input_angle(pi/1024,7) =", mp.nstr(mp.atan(mp.tan(mp.pi / 1024) ** (mp.mpf(1) / 7)), 12))

print("== suppression bound k=3 example ==")
b = mp.mpf("0.0709482")
print("9*b^(4/3)*1e-4 =", mp.nstr(9 * b ** (mp.mpf(4) / 3) * mp.mpf("1e-4"), 8))
bexact = mp.atan(mp.tan(mp.pi / 8) ** 3)
print("9*beta_exact^(4/3)*1e-4 =", mp.nstr(9 * bexact ** (mp.mpf(4) / 3) * mp.mpf("1e-4"), 8))

print("== derive_angles(pi/1024, ks=(3,7)) ==")
a2 = mp.atan(mp.tan(mp.pi / 1024) ** (mp.mpf(1) / 7))
b1 = mp.pi / 8 - a2
a1 = -mp.atan(mp.tan(-b1) ** (mp.mpf(1) / 3))
print("alpha2 =", mp.nstr(a2, 10), " beta1 =", mp.nstr(b1, 10), " alpha1 =", mp.nstr(a1, 10))

print("== magic_targets threshold: k=3, beta=0.01, t=1e-12 ==")
print("eps_T max =", mp.nstr(mp.mpf("1e-12") / (3 * mp.mpf("0.01") ** (mp.mpf(4) / 3)), 8))

print("== distill oracle closed form ==")
for e in ("1e-4", "1e-3", "1e-2"):
    ee = mp.mpf(e)
    print(e, "->", mp.nstr(ee**2 / ((1 - ee) ** 2 + ee**2), 10),
          " ratio/eps^2:", mp.nstr(1 / ((1 - ee) ** 2 + ee**2), 10))

print("== synthesis ideal example ==")
delta = mp.sqrt(2 * mp.mpf("1e-12"))
print("delta =", mp.nstr(delta, 8), " 3log2(1/delta) =", mp.nstr(3 * mp.log(1 / delta, 2), 10))

print("== rect rate example d_x=4,d_z=6,p=1e-3 ==")
print("p_x =", mp.nstr((24 / (2 * mp.mpf(9))) * mp.mpf("0.05") * mp.mpf("0.1") ** 2, 8))

print("== distill_cost(5, p=1e-3) volume ==")
pl = mp.mpf("0.05") * mp.mpf("0.1") ** 3
pf = 192 * pl
print("p_fail =", mp.nstr(pf, 8), " eps_out =", mp.nstr(pl, 8),
      " vol =", mp.nstr(16 * 25 * 20 * 5 / (1 - pf), 10))

print("== pump anchor: v_pump(3,9,1000) ==")
print(1000 + 2 * 9 * (3 + 9 + 1) * (2 * 9 + 9 // 2 + 2))

print("== k window for beta=pi/1024 ==")
ks = []
for k in range(2, 40):
    alpha = mp.atan(mp.tan(mp.pi / 1024) ** (mp.mpf(1) / k))
    if abs(mp.pi / 8 - alpha) < mp.pi / 16:
        ks.append(k)
print("window ks:", ks)

print("== theorem-style ratio probe (k=8, beta=1e-3, b max, small eps) ==")
for kk, bb in [(2, "0.3"), (3, "0.01"), (8, "1e-3"), (8, "0.3"), (5, "0.3"), (2, "1e-3")]:
    k = kk
    btar = mp.mpf(bb)
    alpha = mp.atan(mp.tan(btar) ** (mp.mpf(1) / k))
    c, s = mp.cos(alpha), mp.sin(alpha)
    ps0 = c ** (2 * k) + s ** (2 * k)
    r_factor = (c * s) ** (2 * k - 2) / (ps0**2 * btar ** (2 * (1 - mp.mpf(1) / k)))
    print(f"k={k} beta={bb}: alpha={mp.nstr(alpha,6)} R~{mp.nstr(r_factor, 6)}")

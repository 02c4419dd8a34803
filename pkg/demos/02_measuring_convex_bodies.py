"""The convex-geometry measurement kit on random bodies.

Bodies are random positive trigonometric polynomials in the support
function, valid by construction.  The script prints the standard
measurements and then sweeps the width/radius/diameter inequalities plus
the reverse-isoperimetric radius bound, reporting the worst margins.

Run:  python demos/02_measuring_convex_bodies.py
"""

import math

from mcfflow import bodies, geometry

print("one random plane body in detail (seed 7):")
body = bodies.random_convex_curve(128, seed=7, amplitude=0.8)
m = geometry.measure(body)
for k, v in m.as_dict().items():
    print(f"  {k:10s} = {v:.8f}")

print("\none random axisymmetric body, n = 2 (seed 3):")
prof = bodies.random_convex_profile(2, 96, seed=3, amplitude=0.6)
m = geometry.measure(prof)
for k, v in m.as_dict().items():
    print(f"  {k:10s} = {v:.8f}")

print("\ninequality sweep over 200 plane + 50 axisymmetric bodies:")
margins = {
    "w_plus = diam (rel)": 0.0,
    "rho+ <= w+/sqrt2 (slack)": math.inf,
    "rho- >= w-/(n+2) (slack)": math.inf,
    "sqrt2 rho+ <= diam (slack)": math.inf,
    "diam <= diam_I (slack)": math.inf,
    "diam_I <= pi rho+ (slack)": math.inf,
}
pool = [bodies.random_convex_curve(96, seed=s, amplitude=0.3 + 0.6 * (s % 9) / 9)
        for s in range(200)]
pool += [bodies.random_convex_profile(2, 64, seed=s) for s in range(50)]
for b in pool:
    m = geometry.measure(b)
    n = b.n
    margins["w_plus = diam (rel)"] = max(margins["w_plus = diam (rel)"],
                                         abs(m.w_plus - m.diam) / m.diam)
    margins["rho+ <= w+/sqrt2 (slack)"] = min(margins["rho+ <= w+/sqrt2 (slack)"],
                                              m.w_plus / math.sqrt(2) - m.rho_plus)
    margins["rho- >= w-/(n+2) (slack)"] = min(margins["rho- >= w-/(n+2) (slack)"],
                                              m.rho_minus - m.w_minus / (n + 2))
    margins["sqrt2 rho+ <= diam (slack)"] = min(margins["sqrt2 rho+ <= diam (slack)"],
                                                m.diam - math.sqrt(2) * m.rho_plus)
    margins["diam <= diam_I (slack)"] = min(margins["diam <= diam_I (slack)"],
                                            m.diam_I - m.diam)
    margins["diam_I <= pi rho+ (slack)"] = min(margins["diam_I <= pi rho+ (slack)"],
                                               math.pi * m.rho_plus - m.diam_I)
for k, v in margins.items():
    print(f"  {k:28s}: {v:.3e}")

print("\nreverse isoperimetric bound: iso_ratio <= c1 forces rho+/rho- <= c2(c1, n)")
print(f"  c2(4 pi, 1) = {geometry.reverse_iso_radius_bound(4 * math.pi, 1):.4f}"
      "   (disk: iso = 4 pi, ratio = 1)")
worst = 0.0
for b in pool:
    m = geometry.measure(b)
    c2 = geometry.reverse_iso_radius_bound(m.iso_ratio, b.n)
    worst = max(worst, (m.rho_plus / m.rho_minus) / c2)
print(f"  sweep: max (rho+/rho-) / c2(iso, n) = {worst:.4f}  (< 1, never sharp)")

print("\nprojection facts (shadow onto the min-width hyperplane):")
b = pool[0]
m = geometry.measure(b)
s = geometry.shadow_measurements(b)
print(f"  |Omega| = {m.volume:.6f} <  w_- |Sigma| = {s.w_minus * s.area:.6f}")
print(f"  |M|     = {m.area:.6f} >  |Sigma|     = {s.area:.6f}")
print(f"  diam(Sigma) = {s.diam:.6f} >= w_+ - w_- = {s.w_plus - s.w_minus:.6f}")

"""Tour of the closed-form ancient solutions and the residual oracle.

Every numerical experiment in this package is tested against one of these
families, so the first thing worth seeing is that the families themselves
satisfy the flow equation: the residual |V_normal + H| is pure
time-discretization error and vanishes at second order.

Run:  python demos/01_exact_families.py
"""

import math

import numpy as np

from mcfflow import exact
from mcfflow.exact import ExactFamily

print("shrinking spheres  R(t) = sqrt(-2 n t)")
for n, t in [(1, -0.5), (2, -1.0), (3, -2.0)]:
    print(f"  n={n} t={t:6.2f}: R = {exact.sphere_radius(n, t):.10f}")

print("\nshrinking cylinders  S^(n-k) x R^k,  R(t) = sqrt(-2 (n-k) t)")
for n, k in [(3, 1), (4, 2)]:
    lam = exact.cylinder_reference_curvatures(n, k, -2.0)
    ratio = np.sum(lam ** 2) / np.sum(lam) ** 2
    print(f"  n={n} k={k}: R = {exact.cylinder_radius(n, k, -2.0):.10f}, "
          f"|A|^2/H^2 = {ratio:.6f} (= 1/(n-k))")

print("\ngrim reaper  y = -log cos x + t  (unit-speed translator)")
for x in (0.0, math.pi / 4, math.pi / 3):
    h, kap = exact.grim_reaper_profile(x, 0.0)
    print(f"  x={x:.4f}: height {h:.6f}, curvature {kap:.6f} (= cos x)")

print("\nAngenent oval  cos x = e^t cosh y")
for t in (-0.5, -1.0, -5.0, -20.0):
    xe, ye = exact.oval_extent(t)
    print(f"  t={t:7.1f}: half extents x = {xe:.4f} (-> pi/2), "
          f"y = {ye:.4f} (~ |t| + log 2)")

print("\nshrinking spherical cap in S^(n+1)_R:  rho(t) = R arccos(e^(nt/R^2))")
for t in (-0.1, -1.0, -10.0):
    rho = exact.cap_radius(1.0, 2, t)
    H = exact.cap_slice(1.0, 2, t).mean_curvature()
    print(f"  t={t:6.1f}: rho = {rho:.6f} (-> pi/2 as t -> -inf), H = {H:.4f}")

print("\nflow residual |V_normal + H| at dt, dt/2, dt/4 "
      "(second-order certification)")
for fam, t in [(ExactFamily("sphere", 2), -1.0),
               (ExactFamily("oval", 1), -1.0),
               (ExactFamily("cap", 2, R=1.0), -1.0),
               (ExactFamily("grim-reaper"), 0.0)]:
    order, res = exact.residual_convergence_order(fam, t)
    res_txt = ", ".join(f"{r:.3e}" for r in res)
    tag = f"order {order:.3f}" if math.isfinite(order) else "roundoff floor"
    print(f"  {fam.kind:12s}: [{res_txt}]  {tag}")

print("\nwith analytic velocities the sphere/cap/reaper residuals vanish:")
for fam, t in [(ExactFamily("sphere", 2), -1.0),
               (ExactFamily("cap", 2, R=1.0), -1.0),
               (ExactFamily("grim-reaper"), 0.0)]:
    r = exact.flow_residual(fam, t, analytic_velocity=True)
    print(f"  {fam.kind:12s}: residual = {r}")

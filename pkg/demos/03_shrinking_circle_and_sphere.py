"""Evolving round and perturbed bodies, checked against closed forms.

The engine integrates dh/dt = -H explicitly in an internal clock, detects
extinction, and re-anchors time so extinction sits at t = 0.  For round
data the run must reproduce R(t) = sqrt(-2 n t); for perturbed data the
flow rounds out and the evolution identities hold along the way.

Run:  python demos/03_shrinking_circle_and_sphere.py
"""

import math

import numpy as np

from mcfflow import bodies, diagnostics, engine, geometry

print("circle R0 = sqrt(2), N = 256, evolved toward extinction:")
init = bodies.SupportProfile("curve", 1, np.full(256, math.sqrt(2.0)))
ctrl = engine.FlowControls(cfl=0.4, max_dt=1e-3, stop_rho_plus=0.12,
                           snapshot_stride=64)
run = engine.evolve(init, -1.0, ctrl)
print(f"  accepted steps {run.meta['accepted_steps']}, "
      f"extinction estimate s_ext = {run.meta['s_ext']:.12f} (exact: 1)")
errs = [abs(float(np.mean(sl.body.h)) / math.sqrt(-2.0 * sl.t) - 1.0)
        for sl in run.slices]
print(f"  max |R_num/R_exact - 1| over {len(run.slices)} snapshots: "
      f"{max(errs):.2e}")

print("\nperturbed 2-sphere (5% random modes), N = 128:")
base = bodies.random_convex_profile(2, 128, seed=9, modes=4, amplitude=0.05)
init = base.scaled(4.0)
ctrl = engine.FlowControls(cfl=0.2, max_dt=1e-2, stop_rho_plus=0.3,
                           snapshot_stride=64)
run = engine.evolve(init, -4.0, ctrl)
ts = run.times()
print(f"  window [{ts[0]:.3f}, {ts[-1]:.3f}], {len(run.slices)} snapshots")

print("\n  t        eps_min   f0_max     |M|        d|M|/dt+int H^2")
areas = [geometry.area_and_volume(sl.body)[0] for sl in run.slices]
for i in range(1, len(ts) - 1, max(1, len(ts) // 8)):
    sl = run.slices[i]
    field = diagnostics.curvature_field(sl)
    lhs = (areas[i + 1] - areas[i - 1]) / (ts[i + 1] - ts[i - 1])
    rhs = -field.integrate(field.H ** 2)
    f0 = max(0.0, field.ahh_max() - 0.5)
    print(f"  {sl.t:8.4f} {field.eps_min():9.5f} {f0:9.2e} {areas[i]:10.5f} "
          f"{abs(lhs - rhs) / abs(rhs):12.2e}")

print("\n  pinching rises toward 1/n = 1/2 and the umbilic deficit decays:")
eps0 = diagnostics.curvature_field(run.slices[0]).eps_min()
eps1 = diagnostics.curvature_field(run.slices[-1]).eps_min()
print(f"  eps_min: {eps0:.4f} -> {eps1:.4f}")

print("\n  Harnack quantity dH/dt - |grad H|^2/H (material gauge) stays >= 0:")
mins = []
for i in range(1, len(ts) - 1):
    _, m = diagnostics.harnack_quantity(run, ts[i])
    mins.append(m)
print(f"  min over the run: {min(mins):.3e}")

"""Mean curvature flow of convex bodies in support-function form.

The flow moves each boundary point with normal speed -H, which in the
support representation is simply dh/dt = -H at fixed normal direction.

Curve mode (plane curves):       h_t = -1/(h_tt + h)                (kappa)
Axisym mode (revolution in R^(n+1)):
    h_t = -[kappa1 + (n-1) kappa2],
    kappa1 = 1/(h_pp + h)   (meridian curvature),
    kappa2 = sin(phi)/r,  r = h sin(phi) + h' cos(phi),
    with the umbilic limit kappa2 -> kappa1 at the poles.

Stepping is explicit RK4 on 4th-order centered stencils.  The linearization
of -1/(h''+h) has diffusion coefficient kappa^2, so steps obey
dt <= cfl * dtheta^2 / max kappa1^2; implicit stepping is deliberately
avoided to keep the kernel dependency-free.

Time gauge.  The flow runs in an internal clock s >= 0 and cannot know the
extinction time in advance.  After the run the origin is re-anchored so the
extrapolated extinction lands at t = 0: curve runs use the exact area law
d|Omega|/ds = -2pi (total turning), so s_ext = s_last + |Omega|_last/(2pi);
axisymmetric runs fit rho_+^2 linearly over the last 20 snapshots (exact on
round profiles).  All reported slice times are t = s - s_ext < 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.integrate import solve_ivp

from . import _solvers, geometry
from .bodies import (CapState, MODE_AXISYM, MODE_CURVE, SupportProfile,
                     d1_periodic4, d1_reflect4, d2_periodic4, d2_reflect4)


class ConvexityLostError(RuntimeError):
    """A step produced (or would produce) a non-convex profile."""


class StabilityViolationError(ValueError):
    """Requested time step exceeds the explicit stability bound."""


class PoleSingularityError(RuntimeError):
    """Axisymmetric profile touched the rotation axis at an interior node."""


class StepFailedError(RuntimeError):
    """Step retries exhausted; carries the abort diagnostics."""


@dataclass(frozen=True)
class FlowControls:
    cfl: float = 0.2
    max_dt: float = 1e-2
    stop_rho_plus: float = 0.1
    snapshot_stride: int = 32
    refinement: int = 256

    def __post_init__(self):
        if not 0.0 < self.cfl <= 0.5:
            raise ValueError("cfl must lie in (0, 0.5]")
        if self.stop_rho_plus <= 0.0:
            raise ValueError("stop_rho_plus must be positive")
        if self.max_dt <= 0.0 or self.snapshot_stride < 1:
            raise ValueError("bad controls")


@dataclass(eq=False)
class TimeSlice:
    """One geometry at one time, with a cache for derived curvature fields.

    ``shift`` maps the stored (recentered) frame back to the run frame:
    h_run(nu) = h_stored(nu) + <shift, nu>.
    """
    t: float
    body: object  # SupportProfile | CapState
    shift: object = None
    _cache: dict = field(default_factory=dict, repr=False)


@dataclass(eq=False)
class Trajectory:
    slices: list
    engine: str
    n: int
    N: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ts = self.times()
        if len(ts) >= 2 and not np.all(np.diff(ts) > 0.0):
            raise ValueError("slice times must be strictly increasing")

    def times(self):
        return np.array([s.t for s in self.slices])

    def __len__(self):
        return len(self.slices)

    def slice_at(self, t, rtol=1e-9):
        ts = self.times()
        i = int(np.argmin(np.abs(ts - t)))
        if abs(ts[i] - t) > rtol * max(1.0, abs(t)):
            raise KeyError(f"no slice at t = {t}")
        return self.slices[i]

    def with_time_shift(self, delta):
        """Re-anchored copy: every slice time moved by -delta (gauge change)."""
        slices = [TimeSlice(s.t - delta, s.body, s.shift) for s in self.slices]
        meta = dict(self.meta)
        meta["time_shift_applied"] = meta.get("time_shift_applied", 0.0) + delta
        return Trajectory(slices, self.engine, self.n, self.N, meta)

    def parabolic_rescale(self, lam):
        """Space x lambda, time x lambda^2; maps flows to flows."""
        out = []
        for s in self.slices:
            if isinstance(s.body, CapState):
                raise ValueError("parabolic rescaling applies to Euclidean slices")
            body = s.body.scaled(lam)
            shift = None if s.shift is None else np.asarray(s.shift) * lam
            out.append(TimeSlice(lam * lam * s.t, body, shift))
        meta = dict(self.meta)
        meta["parabolic_rescale"] = meta.get("parabolic_rescale", 1.0) * lam
        return Trajectory(out, self.engine, self.n, self.N, meta)


# ---------------------------------------------------------------------------
# right-hand sides (4th-order stencils; raise on invalid intermediate states)
# ---------------------------------------------------------------------------

def _curve_rhs(h, dtheta):
    rho = d2_periodic4(h, dtheta) + h
    if np.min(rho) <= 0.0:
        raise ConvexityLostError("h'' + h <= 0 inside a stage")
    return -1.0 / rho, rho


def _axisym_rhs(h, dphi, n, phi, sin_phi, cos_phi):
    rho = d2_reflect4(h, dphi) + h
    if np.min(rho) <= 0.0:
        raise ConvexityLostError("h'' + h <= 0 inside a stage")
    hp = d1_reflect4(h, dphi)
    r = h * sin_phi + hp * cos_phi
    if np.min(r[1:-1]) <= 0.0:
        raise PoleSingularityError("profile touched the axis at an interior node")
    kappa1 = 1.0 / rho
    kappa2 = np.empty_like(h)
    kappa2[1:-1] = sin_phi[1:-1] / r[1:-1]
    kappa2[0] = kappa1[0]      # umbilic poles: sin(phi)/r -> 1/(h''+h)
    kappa2[-1] = kappa1[-1]
    return -(kappa1 + (n - 1) * kappa2), rho


def _rk4(h, dt, rhs):
    k1, _ = rhs(h)
    k2, _ = rhs(h + 0.5 * dt * k1)
    k3, _ = rhs(h + 0.5 * dt * k2)
    k4, _ = rhs(h + dt * k3)
    return h + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _stability_dt(h, mode, dtheta, cfl):
    if mode == MODE_CURVE:
        rho = d2_periodic4(h, dtheta) + h
    else:
        rho = d2_reflect4(h, dtheta) + h
    if np.min(rho) <= 0.0:
        raise ConvexityLostError("cannot bound dt for a non-convex profile")
    kmax = float(np.max(1.0 / rho))
    return cfl * dtheta * dtheta / (kmax * kmax)


def _step_array(h, dt, mode, n, dtheta, trig):
    if mode == MODE_CURVE:
        rhs = lambda x: _curve_rhs(x, dtheta)
    else:
        phi, sin_phi, cos_phi = trig
        rhs = lambda x: _axisym_rhs(x, dtheta, n, phi, sin_phi, cos_phi)
    out = _rk4(h, dt, rhs)
    rhs(out)  # re-verify convexity (and axis positivity) after the step
    return out


def _public_step(profile, dt, cfl_for_check=0.5):
    bound = _stability_dt(profile.h, profile.mode, profile.step, cfl_for_check)
    if dt > bound:
        raise StabilityViolationError(
            f"dt = {dt:.3e} exceeds the stability bound {bound:.3e}")
    trig = None
    if profile.mode == MODE_AXISYM:
        phi = profile.angles()
        trig = (phi, np.sin(phi), np.cos(phi))
    h = _step_array(profile.h, dt, profile.mode, profile.n, profile.step, trig)
    if np.min(h) <= 0.0:
        raise ConvexityLostError("support lost positivity; body left the origin")
    return SupportProfile(profile.mode, profile.n, h)


def step_curve(profile, dt):
    """One explicit RK4 step of curve shortening flow in support form."""
    if profile.mode != MODE_CURVE:
        raise ValueError("step_curve needs a curve profile")
    return _public_step(profile, dt)


def step_axisym(profile, dt):
    """One explicit RK4 step of the axisymmetric flow in support form."""
    if profile.mode != MODE_AXISYM:
        raise ValueError("step_axisym needs an axisym profile")
    return _public_step(profile, dt)


# ---------------------------------------------------------------------------
# trajectory evolution
# ---------------------------------------------------------------------------

_MAX_RETRIES = 20
_CONVEXITY_PROJECTION_TOL = 1e-12


def _recenter_array(h, mode, angles):
    if mode == MODE_CURVE:
        nu = np.column_stack([np.cos(angles), np.sin(angles)])
        c, _ = _solvers.chebyshev_center_curve(nu, h)
        return h - nu @ c, c
    a, _ = _solvers.chebyshev_center_axis(np.cos(angles), h)
    return h - a * np.cos(angles), a


def _zero_shift(mode):
    return np.zeros(2) if mode == MODE_CURVE else 0.0


def _add_shift(total, extra, mode):
    if mode == MODE_CURVE:
        return np.asarray(total) + np.asarray(extra)
    return float(total) + float(extra)


def evolve(initial, t0, controls):
    """Evolve a convex body to near extinction; returns a Trajectory.

    ``t0`` is the caller's intended initial time label; the returned slices
    carry re-anchored times (extrapolated extinction at t = 0) and the meta
    dict records both the extinction estimate and the gap to -t0.
    """
    if not isinstance(initial, SupportProfile):
        raise TypeError("evolve expects a SupportProfile")
    if t0 >= 0.0:
        raise ValueError("initial time must be negative")
    mode, n = initial.mode, initial.n
    h = np.array(initial.h, dtype=float)
    angles = initial.angles()
    dtheta = initial.step
    # degenerate inputs failing convexity by < 1e-12 are projected upward
    rho_min = float(np.min(d2_periodic4(h, dtheta) + h)) if mode == MODE_CURVE \
        else float(np.min(d2_reflect4(h, dtheta) + h))
    if -_CONVEXITY_PROJECTION_TOL * max(1.0, np.max(h)) < rho_min <= 0.0:
        h = h + (abs(rho_min) + 1e-15 * np.max(h))
    trig = None
    if mode == MODE_AXISYM:
        trig = (angles, np.sin(angles), np.cos(angles))

    shift = _zero_shift(mode)
    s = 0.0
    records = []  # (s, h_stored, shift_at_emission)

    def emit():
        hc, extra = _recenter_array(h, mode, angles)
        records.append((s, hc, _add_shift(shift, extra, mode)))

    emit()
    accepted = 0
    max_steps = 10 ** 7
    while accepted < max_steps:
        dt = min(controls.max_dt, _stability_dt(h, mode, dtheta, controls.cfl))
        attempt = dt
        last_err = None
        for _ in range(_MAX_RETRIES + 1):
            try:
                h_new = _step_array(h, attempt, mode, n, dtheta, trig)
                break
            except (ConvexityLostError, PoleSingularityError) as err:
                last_err = err
                attempt *= 0.5
        else:
            raise StepFailedError(
                f"step rejected {_MAX_RETRIES} times at s = {s:.6g} "
                f"(dt down to {attempt:.3e}): {last_err}")
        h = h_new
        s += attempt
        accepted += 1
        # keep the origin well inside the shrinking body
        if np.min(h) < 0.25 * np.max(h):
            h, extra = _recenter_array(h, mode, angles)
            shift = _add_shift(shift, extra, mode)
        if accepted % controls.snapshot_stride == 0:
            emit()
            if np.max(records[-1][1]) < controls.stop_rho_plus:
                break
    else:
        raise StepFailedError("step budget exhausted before extinction threshold")
    if records[-1][0] != s:
        emit()

    s_ext = _extinction_estimate(records, mode, n, angles, dtheta)
    slices = []
    for s_i, h_i, shift_i in records:
        body = SupportProfile(mode, n, h_i)
        slices.append(TimeSlice(s_i - s_ext, body, shift_i))
    meta = {
        "engine": mode,
        "controls": controls,
        "user_t0": t0,
        "s_ext": s_ext,
        "t0_gap": abs(t0 + s_ext),
        "final_time": slices[-1].t,
        "accepted_steps": accepted,
    }
    return Trajectory(slices, mode, n, initial.N, meta)


def _extinction_estimate(records, mode, n, angles, dtheta):
    if mode == MODE_CURVE:
        # exact for curve shortening: the enclosed area decays at rate 2*pi
        s_last, h_last, _ = records[-1]
        from .bodies import d2_periodic
        rho = d2_periodic(h_last, dtheta) + h_last
        area = 0.5 * float(np.sum(h_last * rho) * dtheta)
        return s_last + area / (2.0 * math.pi)
    # axisym: square-root fit of the outer radius over the last <= 20 snapshots
    tail = records[-20:]
    ss = np.array([r[0] for r in tail])
    rplus = []
    for _, h_i, _ in tail:
        body = SupportProfile(mode, n, h_i)
        rplus.append(geometry.outer_radius(body))
    rplus = np.asarray(rplus)
    if len(tail) < 2:
        return ss[-1] + rplus[-1] ** 2 / (2.0 * n)
    coef = np.polyfit(ss, rplus ** 2, 1)
    if coef[0] >= 0.0:
        return ss[-1] + rplus[-1] ** 2 / (2.0 * n)
    root = -coef[1] / coef[0]
    return max(root, ss[-1] + 1e-12 * max(1.0, abs(ss[-1])))


# ---------------------------------------------------------------------------
# geodesic caps in the ambient sphere
# ---------------------------------------------------------------------------

def evolve_cap(R, rho0, t0, controls, n=2, t_stop=None):
    """Evolve a geodesic cap: d rho/dt = -(n/R) cot(rho/R).

    Integrates from t0 toward t_stop (default: forward until the geodesic
    radius falls below stop_rho_plus).  rho0 = pi*R/2 is the equator, a
    stationary solution, and returns a constant trajectory with H = 0.
    Backward integration (t_stop < t0) approaches the equator monotonically.
    """
    if R <= 0.0:
        raise ValueError("ambient radius must be positive")
    upper = math.pi * R / 2.0
    if not 0.0 < rho0 <= upper * (1.0 + 1e-12):
        raise ValueError("rho0 must lie in (0, pi*R/2]")
    if t0 >= 0.0:
        raise ValueError("t0 must be negative")
    rho0 = min(rho0, upper)
    snap_step = controls.max_dt * controls.snapshot_stride

    equator = abs(rho0 - upper) <= 1e-12 * R
    if t_stop is None:
        t_stop = -1e-6 if not equator else t0 + 100.0 * snap_step
    if t_stop >= 0.0:
        t_stop = -1e-9
    if t_stop == t0:
        raise ValueError("empty integration window")

    count = max(2, int(abs(t_stop - t0) / snap_step) + 1)
    times = np.linspace(t0, t_stop, count)

    if equator:
        slices = [TimeSlice(float(t), CapState(R, n, upper)) for t in np.sort(times)]
        return Trajectory(slices, "cap", n, None,
                          {"engine": "cap", "R": R, "equator": True,
                           "controls": controls, "user_t0": t0})

    def rhs(_, y):
        return [-(n / R) / math.tan(y[0] / R)]

    hit_floor = lambda _, y: y[0] - controls.stop_rho_plus
    hit_floor.terminal = True
    hit_floor.direction = -1.0

    sol = solve_ivp(rhs, (t0, t_stop), [rho0], method="DOP853",
                    rtol=1e-13, atol=1e-16, dense_output=True,
                    events=hit_floor if t_stop > t0 else None,
                    max_step=abs(t_stop - t0) / 8.0)
    if not sol.success:
        raise StepFailedError(f"cap integration failed: {sol.message}")
    t_reached = sol.t[-1]
    times = times[(times - t_reached) * np.sign(t_stop - t0) <= 0.0]
    if times[-1] != t_reached:
        times = np.append(times, t_reached)
    rhos = sol.sol(times)[0]
    order = np.argsort(times)
    slices = [TimeSlice(float(times[i]), CapState(R, n, float(np.clip(rhos[i], 1e-300, upper))))
              for i in order]
    return Trajectory(slices, "cap", n, None,
                      {"engine": "cap", "R": R, "equator": False,
                       "controls": controls, "user_t0": t0,
                       "t_reached": float(t_reached)})

"""Measurement kit for the two convex-body representations.

Widths, inner/outer radii, extrinsic and intrinsic diameters, boundary area,
enclosed volume, the isoperimetric ratio, and the explicit constant chain
turning a reverse isoperimetric bound into an outer/inner radius bound.

Conventions.  For a body measured here, ``area`` is the n-dimensional
boundary measure |M| and ``volume`` the (n+1)-dimensional enclosed measure
|Omega|.  Quadrature is trapezoidal with metric weights, O(N^-2); the outer
radius of a plane body is the exact minimum enclosing circle of the sampled
boundary, a lower-biased estimate of the continuum value with error O(N^-2).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize, sparse
from scipy.sparse import csgraph

from . import _solvers
from .bodies import (CapState, MODE_AXISYM, MODE_CURVE, SupportProfile,
                     sphere_surface_area, unit_ball_volume)


@dataclass(frozen=True)
class BodyMeasurements:
    w_minus: float
    w_plus: float
    diam: float
    diam_I: float
    rho_minus: float
    rho_plus: float
    area: float
    volume: float
    iso_ratio: float

    def as_dict(self):
        return {
            "w_minus": self.w_minus, "w_plus": self.w_plus,
            "diam": self.diam, "diam_I": self.diam_I,
            "rho_minus": self.rho_minus, "rho_plus": self.rho_plus,
            "area": self.area, "volume": self.volume,
            "iso_ratio": self.iso_ratio,
        }


def _direction_angle(body, direction):
    """Reduce a direction to its normal angle; accepts angles or unit vectors."""
    if np.isscalar(direction):
        return float(direction)
    v = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    if body.mode == MODE_CURVE:
        if v.shape != (2,):
            raise ValueError("plane bodies take 2-vector directions")
        return math.atan2(v[1], v[0])
    # axisym: only the angle against the rotation axis matters
    if v.shape[0] < 2:
        raise ValueError("ambient directions need at least 2 components")
    return math.atan2(float(np.linalg.norm(v[1:])), float(v[0]))


def width(body, direction):
    """Width h(nu) + h(-nu) in one direction (interpolated)."""
    ang = _direction_angle(body, direction)
    interp = body.interpolator()
    if body.mode == MODE_CURVE:
        return float(interp(ang) + interp(ang + math.pi))
    return float(interp(ang) + interp(math.pi - ang))


def _refine_extremum(fn, center, halfwidth, minimize=True):
    sign = 1.0 if minimize else -1.0
    res = optimize.minimize_scalar(lambda t: sign * fn(t),
                                   bounds=(center - halfwidth, center + halfwidth),
                                   method="bounded",
                                   options={"xatol": 1e-13})
    return sign * float(res.fun)


def min_max_width(body):
    """(w_minus, w_plus): width extrema over all directions.

    Axisymmetric bodies reduce to a search over the meridian angle in
    [0, pi/2] (phi = pi/2 is the equatorial direction).
    """
    interp = body.interpolator()
    if body.mode == MODE_CURVE:
        grid = body.angles()
        w = lambda t: interp(t) + interp(t + math.pi)
    else:
        grid = np.linspace(0.0, math.pi / 2.0, 2 * body.N + 1)
        w = lambda t: interp(t) + interp(math.pi - t)
    vals = np.array([w(t) for t in grid])
    step = grid[1] - grid[0]
    lo = _refine_extremum(w, grid[int(np.argmin(vals))], step, minimize=True)
    hi = _refine_extremum(w, grid[int(np.argmax(vals))], step, minimize=False)
    return min(lo, float(np.min(vals))), max(hi, float(np.max(vals)))


def _antipodal_chord(body):
    """Length of the chord between the contact points of nu and -nu."""
    interp = body.interpolator()
    if body.mode == MODE_CURVE:
        def chord(t):
            h1, h2 = interp(t), interp(t + math.pi)
            d1, d2 = interp.derivative(t), interp.derivative(t + math.pi)
            # chord = w * nu + w' * nu_perp in the frame of nu
            return math.hypot(h1 + h2, d1 + d2)
        return chord

    def chord(t):
        s = math.pi - t
        h1, h2 = interp(t), interp(s)
        d1, d2 = interp.derivative(t), interp.derivative(s)
        x1 = h1 * math.cos(t) - d1 * math.sin(t)
        r1 = h1 * math.sin(t) + d1 * math.cos(t)
        x2 = h2 * math.cos(s) - d2 * math.sin(s)
        r2 = h2 * math.sin(s) + d2 * math.cos(s)
        return math.hypot(x1 - x2, r1 + r2)
    return chord


def diameter(body):
    """Extrinsic diameter via the maximal antipodal chord.

    Independent of :func:`min_max_width`; for a convex body the two agree
    (the maximal chord joins contact points with antiparallel normals).
    """
    chord = _antipodal_chord(body)
    if body.mode == MODE_CURVE:
        grid = body.angles()
    else:
        grid = np.linspace(0.0, math.pi / 2.0, 2 * body.N + 1)
    vals = np.array([chord(t) for t in grid])
    step = grid[1] - grid[0] if len(grid) > 1 else 1e-2
    best = _refine_extremum(chord, grid[int(np.argmax(vals))], step, minimize=False)
    return max(best, float(np.max(vals)))


def outer_radius(body):
    """Radius of the smallest enclosing ball of the sampled boundary."""
    pts = body.boundary_points()
    if body.mode == MODE_CURVE:
        _, r = _solvers.min_enclosing_circle(pts)
        return r
    # orbits of the meridian samples; center constrained to the axis
    _, r = _solvers.axis_enclosing_ball(pts[:, 0], pts[:, 1] ** 2)
    return r


def inner_radius(body):
    """Chebyshev radius: the largest ball inside all sampled support planes."""
    if body.mode == MODE_CURVE:
        _, r = _solvers.chebyshev_center_curve(body.normals(), body.h)
        return r
    _, r = _solvers.chebyshev_center_axis(np.cos(body.angles()), body.h)
    return r


def chebyshev_center(body):
    """Center of the largest inscribed ball (2-vector / axial scalar)."""
    if body.mode == MODE_CURVE:
        c, _ = _solvers.chebyshev_center_curve(body.normals(), body.h)
        return c
    a, _ = _solvers.chebyshev_center_axis(np.cos(body.angles()), body.h)
    return a


def area_and_volume(body):
    """(|M|, |Omega|) by support-function quadrature.

    Plane curves use |M| = int h dtheta and |Omega| = 1/2 int h rho dtheta;
    surfaces of revolution use the meridian integrals with the (n-1)-sphere
    cross-section measure and |Omega| = 1/(n+1) int h dmu.
    """
    rho = body.curvature_radius()
    if body.mode == MODE_CURVE:
        dtheta = body.step
        perim = float(np.sum(body.h) * dtheta)
        vol = 0.5 * float(np.sum(body.h * rho) * dtheta)
        return perim, vol
    n = body.n
    phi = body.angles()
    r = body.axis_distance()
    r = np.maximum(r, 0.0)  # poles are exactly 0 up to roundoff
    w = np.full(len(phi), body.step)
    w[0] *= 0.5
    w[-1] *= 0.5
    sigma = sphere_surface_area(n - 1)
    area = sigma * float(np.sum(r ** (n - 1) * rho * w))
    vol = sigma / (n + 1.0) * float(np.sum(body.h * r ** (n - 1) * rho * w))
    return area, vol


def meridian_length(body):
    """Pole-to-pole arc length of the generating curve (axisym only)."""
    if body.mode != MODE_AXISYM:
        raise ValueError("meridian_length needs an axisym profile")
    rho = body.curvature_radius()
    w = np.full(len(rho), body.step)
    w[0] *= 0.5
    w[-1] *= 0.5
    return float(np.sum(rho * w))


def _mesh_geodesic_diameter(body, mesh_shape=(64, 128), window=3):
    """Intrinsic diameter by shortest paths on a revolution mesh.

    Edge weights are chord lengths between mesh points; each node connects to
    neighbours within `window` grid offsets, which keeps the direction
    quantization error well under 1%.  Sources run down a single meridian
    (rotational symmetry covers all pairs).  Slow; used as an oracle.
    """
    n_phi, n_beta = mesh_shape
    interp = body.interpolator()
    phi = np.linspace(0.0, math.pi, n_phi + 1)
    h = interp(phi)
    hp = interp.derivative(phi)
    x = h * np.cos(phi) - hp * np.sin(phi)
    r = np.maximum(h * np.sin(phi) + hp * np.cos(phi), 0.0)
    beta = np.arange(n_beta) * (2.0 * math.pi / n_beta)
    # 3-d points for n = 2 (general n uses the same 2-sphere-of-revolution slice)
    X = np.repeat(x, n_beta)
    Y = np.outer(r, np.cos(beta)).ravel()
    Z = np.outer(r, np.sin(beta)).ravel()
    P = np.column_stack([X, Y, Z])
    m = len(P)

    def node(i, j):
        return i * n_beta + (j % n_beta)

    rows, cols = [], []
    offs = [(di, dj) for di in range(-window, window + 1)
            for dj in range(-window, window + 1)
            if (di, dj) != (0, 0) and math.gcd(abs(di), abs(dj)) == 1]
    ii, jj = np.meshgrid(np.arange(n_phi + 1), np.arange(n_beta), indexing="ij")
    for di, dj in offs:
        ii2 = ii + di
        ok = (ii2 >= 0) & (ii2 <= n_phi)
        rows.append(node(ii, jj)[ok])
        cols.append(node(ii2, jj + dj)[ok])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    w = np.linalg.norm(P[rows] - P[cols], axis=1)
    G = sparse.csr_matrix((w, (rows, cols)), shape=(m, m))
    sources = [node(i, 0) for i in range(n_phi + 1)]
    D = csgraph.dijkstra(G, directed=False, indices=sources)
    return float(np.max(D[np.isfinite(D)]))


def intrinsic_diameter(body, method="auto", mesh_shape=(64, 128)):
    """Intrinsic diameter of the boundary hypersurface.

    Plane curves: half the perimeter.  Surfaces of revolution: the meridian
    pole-to-pole length (the meridian-plane section is a closed geodesic and
    azimuthally opposite points realize the maximum distance through it);
    method="mesh" runs the shortest-path oracle instead.
    """
    if body.mode == MODE_CURVE:
        perim, _ = area_and_volume(body)
        return 0.5 * perim
    if method == "mesh":
        return _mesh_geodesic_diameter(body, mesh_shape)
    return meridian_length(body)


def iso_ratio(body):
    """Scale-invariant isoperimetric ratio |M|^(n+1) / |Omega|^n."""
    area, vol = area_and_volume(body)
    return area ** (body.n + 1) / vol ** body.n


def reverse_iso_radius_bound(c1, n):
    """Outer/inner radius ratio implied by an isoperimetric bound.

    A closed convex body with |M|^(n+1) <= c1 |Omega|^n has projection area
    at most c1 w_-^n, which forces w_+ <= (c1 + 1) w_- for n = 1 and
    w_+ <= (1 + c1/kappa_n) w_- for n > 1 with
    kappa_n = omega_{n-1} / (2 n (n+2)^(n-1)); combined with the standard
    width/radius inequalities this bounds rho_+/rho_- explicitly.  The chain
    is not sharp and no sharpness is claimed.
    """
    if c1 <= 0.0:
        raise ValueError("c1 must be positive")
    if n == 1:
        widths = c1 + 1.0
    else:
        kappa_n = unit_ball_volume(n - 1) / (2.0 * n * (n + 2.0) ** (n - 1))
        widths = 1.0 + c1 / kappa_n
    return (n + 2.0) / math.sqrt(2.0) * widths


@dataclass(frozen=True)
class ShadowFacts:
    """Projection of the boundary onto the hyperplane orthogonal to the
    minimal-width direction: its n-measure, its diameter, and the widths."""
    area: float
    diam: float
    w_minus: float
    w_plus: float


def shadow_measurements(body):
    """Shadow facts used by projection inequalities (n=1 and axisym n=2)."""
    w_minus, w_plus = min_max_width(body)
    interp = body.interpolator()
    if body.mode == MODE_CURVE:
        # locate the minimal-width direction, then project onto its normal line
        grid = body.angles()
        w = lambda t: interp(t) + interp(t + math.pi)
        vals = np.array([w(t) for t in grid])
        res = optimize.minimize_scalar(w, bounds=(grid[int(np.argmin(vals))] - body.step,
                                                  grid[int(np.argmin(vals))] + body.step),
                                       method="bounded", options={"xatol": 1e-13})
        t0 = float(res.x)
        length = interp(t0 + math.pi / 2.0) + interp(t0 - math.pi / 2.0)
        return ShadowFacts(area=float(length), diam=float(length),
                           w_minus=w_minus, w_plus=w_plus)
    if body.n != 2:
        raise ValueError("shadow facts implemented for n = 1 and axisym n = 2")
    grid = np.linspace(0.0, math.pi / 2.0, 2 * body.N + 1)
    w = lambda t: interp(t) + interp(math.pi - t)
    vals = np.array([w(t) for t in grid])
    i0 = int(np.argmin(vals))
    lo = max(0.0, grid[i0] - (grid[1] - grid[0]))
    hi = min(math.pi / 2.0, grid[i0] + (grid[1] - grid[0]))
    res = optimize.minimize_scalar(w, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-13})
    t0 = float(res.x)
    phi = body.angles()
    hp = interp.derivative(phi)
    x = body.h * np.cos(phi) - hp * np.sin(phi)
    r = np.maximum(body.h * np.sin(phi) + hp * np.cos(phi), 0.0)
    if t0 < math.pi / 4.0:
        # min width along the axis: shadow is the disk swept by the largest orbit
        rmax = float(np.max(r))
        return ShadowFacts(area=math.pi * rmax * rmax, diam=2.0 * rmax,
                           w_minus=w_minus, w_plus=w_plus)
    # min width equatorial: shadow is the planar profile region
    dtheta = body.step
    rho = body.curvature_radius()
    profile_area = float(np.sum(body.h * rho) * dtheta)  # full period of the even profile * 1/2
    chord = _antipodal_chord(body)
    grid2 = np.linspace(0.0, math.pi / 2.0, 2 * body.N + 1)
    dvals = np.array([chord(t) for t in grid2])
    diam_profile = float(np.max(dvals))
    return ShadowFacts(area=profile_area, diam=diam_profile,
                       w_minus=w_minus, w_plus=w_plus)


def measure(body):
    """All standard measurements of one body as a BodyMeasurements record."""
    if isinstance(body, CapState):
        raise TypeError("cap slices are measured in the ambient sphere; "
                        "Euclidean body measurements do not apply")
    w_minus, w_plus = min_max_width(body)
    diam = diameter(body)
    diam_i = intrinsic_diameter(body)
    area, vol = area_and_volume(body)
    return BodyMeasurements(
        w_minus=w_minus, w_plus=w_plus, diam=diam, diam_I=diam_i,
        rho_minus=inner_radius(body), rho_plus=outer_radius(body),
        area=area, volume=vol,
        iso_ratio=area ** (body.n + 1) / vol ** body.n,
    )


def hausdorff_distance(body_a, body_b, recenter=True):
    """Hausdorff distance between two convex bodies of the same mode.

    For convex bodies this equals the sup-norm distance of the support
    functions, evaluated on the common grid.  By default both bodies are
    recentered at their Chebyshev centers first (shape comparison).
    """
    if body_a.mode != body_b.mode or body_a.N != body_b.N:
        raise ValueError("bodies must share mode and grid")
    ha, hb = body_a.h, body_b.h
    if recenter:
        if body_a.mode == MODE_CURVE:
            ca, _ = _solvers.chebyshev_center_curve(body_a.normals(), ha)
            cb, _ = _solvers.chebyshev_center_curve(body_b.normals(), hb)
            ha = ha - body_a.normals() @ ca
            hb = hb - body_b.normals() @ cb
        else:
            aa, _ = _solvers.chebyshev_center_axis(np.cos(body_a.angles()), ha)
            ab, _ = _solvers.chebyshev_center_axis(np.cos(body_b.angles()), hb)
            ha = ha - aa * np.cos(body_a.angles())
            hb = hb - ab * np.cos(body_b.angles())
    return float(np.max(np.abs(ha - hb)))

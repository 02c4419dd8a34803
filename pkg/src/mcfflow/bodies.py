"""Discrete convex-body representations.

Two geometry carriers cover everything in this package:

* ``SupportProfile`` -- a sampled support function.  In ``curve`` mode it
  describes a closed convex plane curve on the periodic normal-angle grid
  theta_j = 2*pi*j/N.  In ``axisym`` mode it describes a convex hypersurface
  of revolution in R^(n+1) through the support function of its generating
  profile, sampled on phi_j = pi*j/N over [0, pi] (phi is the angle between
  the outer normal and the rotation axis; reflective symmetry gives the
  Neumann conditions h'(0) = h'(pi) = 0).

* ``CapState`` -- a geodesic sphere inside the round ambient sphere of
  radius R, described by its geodesic radius.

The discrete convexity test uses the 3-point second difference.  That choice
is deliberate: for exact samples of any support function with h > 0 the
quantity D2 h + h is provably positive (h(t+d) + h(t-d) - 2h(t) >=
h(t)(2cos d - 2) by the support inequality against the contact point of t),
so valid bodies are never rejected, even when the grid underresolves a
nearly flat side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from . import _solvers


class NonConvexBodyError(ValueError):
    """Support samples violate the discrete convexity requirement."""


MODE_CURVE = "curve"
MODE_AXISYM = "axisym"


def sphere_surface_area(dim):
    """Surface measure of the unit sphere S^dim in R^(dim+1)."""
    return 2.0 * math.pi ** ((dim + 1) / 2.0) / math.gamma((dim + 1) / 2.0)


def unit_ball_volume(dim):
    """Volume of the unit ball in R^dim (dim >= 0)."""
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


# ---------------------------------------------------------------------------
# periodic / reflected finite-difference stencils
# ---------------------------------------------------------------------------

def d2_periodic(h, dx):
    return (np.roll(h, 1) - 2.0 * h + np.roll(h, -1)) / (dx * dx)


def d1_periodic(h, dx):
    return (np.roll(h, -1) - np.roll(h, 1)) / (2.0 * dx)


def d2_periodic4(h, dx):
    return (-np.roll(h, 2) + 16.0 * np.roll(h, 1) - 30.0 * h
            + 16.0 * np.roll(h, -1) - np.roll(h, -2)) / (12.0 * dx * dx)


def d1_periodic4(h, dx):
    return (np.roll(h, 2) - 8.0 * np.roll(h, 1)
            + 8.0 * np.roll(h, -1) - np.roll(h, -2)) / (12.0 * dx)


def _reflect_pad(h, width):
    # even reflection about both endpoints: h[-j] = h[j], h[N+j] = h[N-j]
    return np.concatenate([h[width:0:-1], h, h[-2:-2 - width:-1]])


def d2_reflect(h, dx):
    e = _reflect_pad(h, 1)
    return (e[:-2] - 2.0 * e[1:-1] + e[2:]) / (dx * dx)


def d1_reflect(h, dx):
    e = _reflect_pad(h, 1)
    return (e[2:] - e[:-2]) / (2.0 * dx)


def d2_reflect4(h, dx):
    e = _reflect_pad(h, 2)
    return (-e[:-4] + 16.0 * e[1:-3] - 30.0 * e[2:-2]
            + 16.0 * e[3:-1] - e[4:]) / (12.0 * dx * dx)


def d1_reflect4(h, dx):
    e = _reflect_pad(h, 2)
    return (e[:-4] - 8.0 * e[1:-3] + 8.0 * e[3:-1] - e[4:]) / (12.0 * dx)


# ---------------------------------------------------------------------------
# trigonometric interpolation of support samples
# ---------------------------------------------------------------------------

class _TrigInterp:
    """Band-limited interpolant of periodic samples; exact on trig polynomials."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        self.N = len(values)
        self.F = np.fft.rfft(values)
        self.k = np.arange(len(self.F))
        w = np.full(len(self.F), 2.0)
        w[0] = 1.0
        if self.N % 2 == 0:
            w[-1] = 1.0
        self._wr = w * self.F.real / self.N
        self._wi = w * self.F.imag / self.N
        # derivative coefficients (Nyquist mode dropped, standard convention)
        dF = 1j * self.k * self.F
        if self.N % 2 == 0:
            dF[-1] = 0.0
        self._dwr = w * dF.real / self.N
        self._dwi = w * dF.imag / self.N

    def __call__(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        ang = np.outer(theta, self.k)
        out = np.cos(ang) @ self._wr - np.sin(ang) @ self._wi
        return out if out.size > 1 else float(out[0])

    def derivative(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        ang = np.outer(theta, self.k)
        out = np.cos(ang) @ self._dwr - np.sin(ang) @ self._dwi
        return out if out.size > 1 else float(out[0])


# ---------------------------------------------------------------------------
# SupportProfile
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SupportProfile:
    """Sampled support function of a convex body; see module docstring."""

    mode: str
    n: int
    h: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        if self.mode not in (MODE_CURVE, MODE_AXISYM):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_CURVE:
            if self.n != 1:
                raise ValueError("curve mode requires n == 1")
            if self.h.ndim != 1 or len(self.h) < 16 or len(self.h) % 2:
                raise ValueError("curve mode needs an even sample count >= 16")
        else:
            if self.n < 2:
                raise ValueError("axisym mode requires n >= 2")
            if self.h.ndim != 1 or len(self.h) < 17:
                raise ValueError("axisym mode needs N+1 samples with N >= 16")
        self.validate()

    # -- grids ------------------------------------------------------------

    @property
    def N(self):
        """Grid size: number of cells (curve: samples, axisym: samples - 1)."""
        return len(self.h) if self.mode == MODE_CURVE else len(self.h) - 1

    @property
    def step(self):
        return 2.0 * math.pi / self.N if self.mode == MODE_CURVE else math.pi / self.N

    def angles(self):
        if self.mode == MODE_CURVE:
            return np.arange(self.N) * self.step
        return np.arange(self.N + 1) * self.step

    def normals(self):
        """Profile-plane outer normals at the sample angles, shape (m, 2)."""
        a = self.angles()
        return np.column_stack([np.cos(a), np.sin(a)])

    # -- discrete differential structure ----------------------------------

    def curvature_radius(self):
        """3-point h'' + h; strictly positive on every valid body."""
        if self.mode == MODE_CURVE:
            return d2_periodic(self.h, self.step) + self.h
        return d2_reflect(self.h, self.step) + self.h

    def support_derivative(self):
        """Centered first derivative of h on the grid (zero at axisym poles)."""
        if self.mode == MODE_CURVE:
            return d1_periodic(self.h, self.step)
        return d1_reflect(self.h, self.step)

    def validate(self):
        h = self.h
        if not np.all(np.isfinite(h)):
            raise NonConvexBodyError("support values must be finite")
        if np.min(h) <= 0.0:
            raise NonConvexBodyError("support values must be positive; "
                                     "recenter at the Chebyshev center first")
        rho = self.curvature_radius()
        if np.min(rho) <= 0.0:
            raise NonConvexBodyError("discrete convexity h'' + h > 0 violated")
        if self.mode == MODE_AXISYM:
            r = self.axis_distance()
            if np.min(r[1:-1]) <= 0.0:
                raise NonConvexBodyError("profile crosses the rotation axis")

    def axis_distance(self):
        """Distance of the contact point from the rotation axis (axisym)."""
        if self.mode != MODE_AXISYM:
            raise ValueError("axis_distance is defined for axisym profiles")
        phi = self.angles()
        return self.h * np.sin(phi) + self.support_derivative() * np.cos(phi)

    # -- interpolation and boundary ---------------------------------------

    def interpolator(self):
        """Trig interpolant of h over the full period (even-extended for axisym)."""
        interp = self._cache.get("interp")
        if interp is None:
            if self.mode == MODE_CURVE:
                interp = _TrigInterp(self.h)
            else:
                even = np.concatenate([self.h, self.h[-2:0:-1]])
                interp = _TrigInterp(even)
            self._cache["interp"] = interp
        return interp

    def support(self, angle):
        """Interpolated support value at arbitrary normal angle(s)."""
        return self.interpolator()(angle)

    def boundary_points(self):
        """Contact points in the profile plane, one per sample angle.

        Uses the spectral derivative of the interpolant; accuracy degrades
        benignly near underresolved flat sides (the points stay within the
        interpolation error of the true boundary).
        """
        pts = self._cache.get("boundary")
        if pts is None:
            a = self.angles()
            hp = self.interpolator().derivative(a)
            ca, sa = np.cos(a), np.sin(a)
            pts = np.column_stack([self.h * ca - hp * sa, self.h * sa + hp * ca])
            self._cache["boundary"] = pts
        return pts

    # -- constructors and transforms --------------------------------------

    @classmethod
    def from_support_values(cls, mode, n, h):
        """Public construction path: recenters at the Chebyshev center.

        Returns the recentered profile; the applied shift is available as
        ``profile.center_shift`` (a 2-vector for curves, an axial scalar for
        axisym profiles).
        """
        h = np.asarray(h, dtype=float)
        if mode == MODE_CURVE:
            ang = np.arange(len(h)) * (2.0 * math.pi / len(h))
            nu = np.column_stack([np.cos(ang), np.sin(ang)])
            center, _ = _solvers.chebyshev_center_curve(nu, h)
            shifted = h - nu @ center
            prof = cls(mode, n, shifted)
            prof.center_shift = center
        else:
            ang = np.arange(len(h)) * (math.pi / (len(h) - 1))
            a, _ = _solvers.chebyshev_center_axis(np.cos(ang), h)
            prof = cls(mode, n, h - a * np.cos(ang))
            prof.center_shift = a
        return prof

    def translated(self, shift):
        """Translate the body; curve: 2-vector, axisym: axial scalar."""
        if self.mode == MODE_CURVE:
            shift = np.asarray(shift, dtype=float)
            return SupportProfile(self.mode, self.n, self.h + self.normals() @ shift)
        return SupportProfile(self.mode, self.n, self.h + float(shift) * np.cos(self.angles()))

    def scaled(self, factor):
        if factor <= 0.0:
            raise ValueError("scale factor must be positive")
        return SupportProfile(self.mode, self.n, factor * self.h)

    def with_values(self, h):
        return SupportProfile(self.mode, self.n, np.asarray(h, dtype=float))


# ---------------------------------------------------------------------------
# CapState: geodesic sphere in the round ambient sphere
# ---------------------------------------------------------------------------

_EQUATOR_RTOL = 1e-12


@dataclass(eq=False)
class CapState:
    """Geodesic sphere of radius rho inside the ambient sphere S^(n+1)_R."""

    R: float
    n: int
    rho: float

    def __post_init__(self):
        if self.R <= 0.0:
            raise ValueError("ambient radius must be positive")
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        upper = math.pi * self.R / 2.0
        if not (0.0 < self.rho <= upper * (1.0 + 1e-12)):
            raise ValueError("geodesic radius must lie in (0, pi*R/2]")
        self.rho = min(self.rho, upper)

    @property
    def is_equator(self):
        return abs(self.rho - math.pi * self.R / 2.0) <= _EQUATOR_RTOL * self.R

    @property
    def ambient_curvature(self):
        return 1.0 / (self.R * self.R)

    def principal_curvature(self):
        """Common principal curvature (umbilic); exactly 0 on the equator."""
        if self.is_equator:
            return 0.0
        return math.cos(self.rho / self.R) / (self.R * math.sin(self.rho / self.R))

    def mean_curvature(self):
        return self.n * self.principal_curvature()

    def area(self):
        return sphere_surface_area(self.n) * (self.R * math.sin(self.rho / self.R)) ** self.n


# ---------------------------------------------------------------------------
# seeded random convex bodies (property-test generators)
# ---------------------------------------------------------------------------

def random_convex_curve(N, seed, modes=6, amplitude=0.7, radius=1.0):
    """Random positive trig polynomial support function on the curve grid.

    h = radius + sum_{m=2..modes} (a_m cos m theta + b_m sin m theta), with
    the coefficient vector scaled so sum (m^2-1)|amp_m| = amplitude*radius.
    That keeps h'' + h >= radius*(1 - amplitude) > 0 by construction; m = 1
    terms are excluded because they are pure translations.
    """
    if not 0.0 < amplitude < 1.0:
        raise ValueError("amplitude must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    m = np.arange(2, modes + 1)
    a = rng.normal(size=len(m)) / m ** 2
    b = rng.normal(size=len(m)) / m ** 2
    weight = float(np.sum((m ** 2 - 1) * np.hypot(a, b)))
    if weight > 0.0:
        scale = amplitude * radius / weight
        a *= scale
        b *= scale
    theta = np.arange(N) * (2.0 * math.pi / N)
    h = radius + np.cos(np.outer(theta, m)) @ a + np.sin(np.outer(theta, m)) @ b
    return SupportProfile.from_support_values(MODE_CURVE, 1, h)


def random_convex_profile(n, N, seed, modes=5, amplitude=0.7, radius=1.0):
    """Random axisymmetric convex body (cosine modes keep the Neumann ends)."""
    if not 0.0 < amplitude < 1.0:
        raise ValueError("amplitude must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    m = np.arange(2, modes + 1)
    a = rng.normal(size=len(m)) / m ** 2
    weight = float(np.sum((m ** 2 - 1) * np.abs(a)))
    if weight > 0.0:
        a *= amplitude * radius / weight
    phi = np.arange(N + 1) * (math.pi / N)
    h = radius + np.cos(np.outer(phi, m)) @ a
    return SupportProfile.from_support_values(MODE_AXISYM, n, h)

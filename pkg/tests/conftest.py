"""Shared reference runs and exact trajectories.

The heavier flows are session-scoped so the unit suites and the acceptance
suite reuse the same computations.
"""

import math

import numpy as np
import pytest

from mcfflow import bodies, engine, exact


@pytest.fixture(scope="session")
def circle_run_256():
    """Circle R0 = sqrt(2) on 256 nodes, evolved over roughly t in [-1, -0.007]."""
    init = bodies.SupportProfile("curve", 1, np.full(256, math.sqrt(2.0)))
    ctrl = engine.FlowControls(cfl=0.4, max_dt=1e-3, stop_rho_plus=0.12,
                               snapshot_stride=32)
    return engine.evolve(init, -1.0, ctrl)


@pytest.fixture(scope="session")
def sphere_run_256():
    """Round 2-sphere R0 = 2 on 256 cells, evolved to rho_+ ~ 0.18."""
    init = bodies.SupportProfile("axisym", 2, np.full(257, 2.0))
    ctrl = engine.FlowControls(cfl=0.2, max_dt=1e-3, stop_rho_plus=0.18,
                               snapshot_stride=64)
    return engine.evolve(init, -1.0, ctrl)


@pytest.fixture(scope="session")
def oval_run_256():
    """Certified oval initial data at t = -2 evolved past t = -0.5."""
    init = exact.angenent_oval_slice(-2.0, 256)
    ctrl = engine.FlowControls(cfl=0.4, max_dt=1e-3, stop_rho_plus=0.9,
                               snapshot_stride=32)
    return engine.evolve(init, -2.0, ctrl)


@pytest.fixture(scope="session")
def oval_run_128():
    init = exact.angenent_oval_slice(-2.0, 128)
    ctrl = engine.FlowControls(cfl=0.4, max_dt=1e-3, stop_rho_plus=1.2,
                               snapshot_stride=8)
    return engine.evolve(init, -2.0, ctrl)


@pytest.fixture(scope="session")
def perturbed_sphere_run():
    """5%-perturbed 2-sphere sized for extinction near t = -100 (N = 128)."""
    base = bodies.random_convex_profile(2, 128, seed=42, modes=4, amplitude=0.05)
    ctrl = engine.FlowControls(cfl=0.2, max_dt=1.0, stop_rho_plus=1.0,
                               snapshot_stride=64)
    return engine.evolve(base.scaled(20.0), -100.0, ctrl)


@pytest.fixture(scope="session")
def perturbed_3sphere_run():
    """Perturbed axisymmetric n = 3 hypersurface (k-convex gap reference)."""
    base = bodies.random_convex_profile(3, 96, seed=11, modes=3, amplitude=0.05)
    ctrl = engine.FlowControls(cfl=0.2, max_dt=1.0, stop_rho_plus=0.4,
                               snapshot_stride=32)
    return engine.evolve(base.scaled(math.sqrt(12.0)), -2.0, ctrl)


@pytest.fixture(scope="session")
def oval_exact_traj():
    """Exact oval trajectory covering [-50, -0.5] (two decades plus slack)."""
    times = np.unique(np.concatenate([-np.geomspace(50.0, 0.45, 40),
                                      [-50.0, -1.0, -0.5]]))
    return exact.sample_trajectory(exact.ExactFamily("oval", 1), times, 256)


@pytest.fixture(scope="session")
def circle_exact_traj():
    times = -np.geomspace(100.0, 0.5, 40)
    return exact.sample_trajectory(exact.ExactFamily("sphere", 1), times, 256)


@pytest.fixture(scope="session")
def sphere_exact_traj():
    times = -np.geomspace(100.0, 0.5, 40)
    return exact.sample_trajectory(exact.ExactFamily("sphere", 2), times, 256)


@pytest.fixture(scope="session")
def cap_run():
    """Cap in the ambient sphere of radius 3 integrated over [-20, -0.1].

    The equator is an exponentially unstable equilibrium at rate n/R^2, so
    the backward-start error amplifies by e^(n |t0| / R^2).  R = 3 keeps
    that factor ~80 (at R = 1 the t = -20 cap is within e^(-40) of the
    equator, below double resolution entirely).
    """
    ctrl = engine.FlowControls(max_dt=0.05, stop_rho_plus=1e-6, snapshot_stride=4)
    rho0 = exact.cap_radius(3.0, 2, -20.0)
    return engine.evolve_cap(3.0, rho0, -20.0, ctrl, n=2, t_stop=-0.1)

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from homolab.central import known_seeds, solve_central_config
from homolab.integrate import IntegrationStats, Trajectory
from homolab.system import BodySystem

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_state_arrays(n, dim, seed, min_dist=0.1):
    """Collision-free positions in [-1,1]^dim and velocities in [-0.5,0.5]^dim."""
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    while True:
        pos = rng.uniform(-1.0, 1.0, size=(n, dim))
        d2min = min(
            float(((pos[k] - pos[i]) ** 2).sum())
            for i in range(n - 1)
            for k in range(i + 1, n)
        )
        if d2min >= min_dist * min_dist:
            return pos, rng.uniform(-0.5, 0.5, size=(n, dim))


def synthetic_trajectory(system, deltas, collision_distance=1e-8, measure=None,
                         termination="completed"):
    """Trajectory stub carrying only what the shape and measure readers use."""
    deltas = np.asarray(deltas, dtype=np.float64)
    s = deltas.shape[0]
    zeros = np.zeros(s)
    measure = zeros if measure is None else np.asarray(measure, dtype=np.float64)
    return Trajectory(
        system=system,
        times=np.arange(s, dtype=np.float64),
        positions=np.zeros((s, system.n, system.dim)),
        velocities=np.zeros((s, system.n, system.dim)),
        inertia=zeros,
        potential=zeros,
        measure=measure,
        energy=zeros,
        momentum_norm=zeros,
        angular_momentum=zeros,
        termination=termination,
        collision_distance=collision_distance,
        stats=IntegrationStats(steps=0, accepted=0, rejected=0, nfev=0, backend="none"),
        _deltas=deltas,
    )


@pytest.fixture(scope="session")
def equilateral_cc():
    system = BodySystem(masses=(1.0, 1.0, 1.0), alpha=0.5)
    return solve_central_config(system, known_seeds("equilateral", 3))


@pytest.fixture(scope="session")
def square_cc():
    system = BodySystem(masses=(1.0, 1.0, 1.0, 1.0), alpha=0.5)
    return solve_central_config(system, known_seeds("ngon", 4))


@pytest.fixture(scope="session")
def collinear_cc():
    system = BodySystem(masses=(1.0, 1.0, 1.0), alpha=0.5)
    return solve_central_config(system, known_seeds("collinear", 3))

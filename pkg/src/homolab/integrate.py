"""Adaptive integration of the equations of motion with grid sampling.

The stepper is an explicit embedded Runge-Kutta pair of order 8(5,3) with
the classic I-controller. Output is produced by clamping steps so sample
times are hit exactly; no interpolation is involved, so every recorded
state satisfies the local error bound directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isfinite, sqrt

import numpy as np

from . import dynamics
from ._backend import core
from .system import BodySystem, PhaseState, pair_indices

MAX_STEPS = 20_000_000

_TERMINATION = {
    core.STATUS_COMPLETED: "completed",
    core.STATUS_COLLISION: "collision",
    core.STATUS_STEP_FAILURE: "step-failure",
}


@dataclass(frozen=True)
class IntegratorSpec:
    """Tolerances and output grid for :func:`integrate`.

    Parameters
    ----------
    rel_tol, abs_tol : float
        Local-error tolerances; each step satisfies
        ``|local error| <= rel_tol * |state| + abs_tol`` componentwise in
        the embedded-error norm.
    max_step : float
        Upper bound on the step size. Defaults to no bound.
    sample_dt : float
        Spacing of the recorded samples. The integrator lands on each
        sample time exactly; the final interval may be shorter when
        ``t_end`` is not a multiple of ``sample_dt``.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_step: float = float("inf")
    sample_dt: float = 0.01

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and isfinite(self.rel_tol)):
            raise ValueError(f"rel_tol must be positive and finite, got {self.rel_tol}")
        if not (self.abs_tol > 0.0 and isfinite(self.abs_tol)):
            raise ValueError(f"abs_tol must be positive and finite, got {self.abs_tol}")
        if not self.max_step > 0.0:
            raise ValueError(f"max_step must be positive, got {self.max_step}")
        if not (self.sample_dt > 0.0 and isfinite(self.sample_dt)):
            raise ValueError(f"sample_dt must be positive and finite, got {self.sample_dt}")


@dataclass(frozen=True)
class IntegrationStats:
    """Step counts reported by the core."""

    steps: int
    accepted: int
    rejected: int
    nfev: int
    backend: str


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution with per-sample diagnostics.

    ``positions`` and ``velocities`` have shape (S, n, dim). The scalar
    series (``inertia``, ``potential``, ``measure``, ``energy``,
    ``momentum_norm``, ``angular_momentum``) have shape (S,). For dim
    other than 2 the angular momentum column is the norm of the vector
    invariant (dim = 3) or NaN.

    ``termination`` is "completed", "collision", or "step-failure"; in the
    latter two cases the series stop at the last collision-free sample.
    """

    system: BodySystem
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    inertia: np.ndarray
    potential: np.ndarray
    measure: np.ndarray
    energy: np.ndarray
    momentum_norm: np.ndarray
    angular_momentum: np.ndarray
    termination: str
    collision_distance: float
    stats: IntegrationStats
    _deltas: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.times.shape[0]

    def state(self, i: int) -> PhaseState:
        """The i-th sample as a PhaseState."""
        return PhaseState(
            positions=self.positions[i],
            velocities=self.velocities[i],
            t=float(self.times[i]),
        )

    @property
    def states(self) -> tuple[PhaseState, ...]:
        return tuple(self.state(i) for i in range(len(self)))

    def deltas(self) -> np.ndarray:
        """Squared pair distances per sample, shape (S, n(n-1)/2)."""
        return self._deltas


def sample_times(t0: float, t_end: float, sample_dt: float) -> np.ndarray:
    """Output grid t0 + k*sample_dt for k >= 1, ending exactly at t_end.

    The final point is t_end itself; a residual interval shorter than
    half a grid cell is merged into the last full step so times stay
    strictly increasing.
    """
    span = t_end - t0
    n_full = int(np.floor(span / sample_dt + 1e-9))
    targets = t0 + sample_dt * np.arange(1, n_full + 1)
    if n_full == 0:
        return np.array([t_end])
    if t_end - targets[-1] > 0.5 * sample_dt * 1e-8:
        targets = np.append(targets, t_end)
    else:
        targets[-1] = t_end
    return targets


def _initial_step(
    system: BodySystem,
    y0: np.ndarray,
    t0: float,
    rtol: float,
    atol: float,
    max_step: float,
) -> float:
    """Starting step size via the standard two-trial-evaluation estimate.

    Hairer, Norsett & Wanner, Solving Ordinary Differential Equations I,
    sec. II.4.
    """
    n, dim = system.n, system.dim
    masses = system.masses_array
    f0 = core.rhs(masses, system.alpha, y0, n, dim)
    scale = atol + rtol * np.abs(y0)
    m = y0.shape[0]
    d0 = sqrt(float(((y0 / scale) ** 2).sum()) / m)
    d1 = sqrt(float(((f0 / scale) ** 2).sum()) / m)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1

    y1 = y0 + h0 * f0
    f1 = core.rhs(masses, system.alpha, y1, n, dim)
    if not np.isfinite(f1).all():
        return min(h0 * 1e-3, max_step)
    d2 = sqrt(float((((f1 - f0) / scale) ** 2).sum()) / m) / h0

    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.125
    return min(100 * h0, h1, max_step)


def integrate(
    system: BodySystem,
    initial: PhaseState,
    t_end: float,
    spec: IntegratorSpec | None = None,
) -> Trajectory:
    """Advance ``initial`` to ``t_end``, sampling every ``spec.sample_dt``.

    Terminates early, with the trajectory flagged accordingly, when two
    bodies come closer than the collision threshold (1e-8 of the system
    scale, frozen at the initial state) or the step size underflows.
    """
    if spec is None:
        spec = IntegratorSpec()
    if not t_end > initial.t:
        raise ValueError(f"t_end ({t_end}) must exceed the initial time ({initial.t})")

    coll = dynamics.collision_distance(system, initial)
    # raises CollisionError if the initial state is already inside the threshold
    dynamics.pairwise_deltas(system, initial, min_distance=coll)

    y0 = initial.flat()
    targets = sample_times(initial.t, float(t_end), spec.sample_dt)
    h0 = _initial_step(system, y0, initial.t, spec.rel_tol, spec.abs_tol, spec.max_step)

    ts, ys, status, steps, accepted, rejected, nfev = core.integrate_raw(
        system.masses_array,
        system.alpha,
        system.dim,
        y0,
        initial.t,
        targets,
        spec.rel_tol,
        spec.abs_tol,
        spec.max_step,
        coll,
        h0,
        MAX_STEPS,
    )

    n, dim = system.n, system.dim
    nd = n * dim
    S = ts.shape[0]
    positions = ys[:, :nd].reshape(S, n, dim)
    velocities = ys[:, nd:].reshape(S, n, dim)

    ii, kk = pair_indices(n)
    diff = positions[:, kk, :] - positions[:, ii, :]
    deltas = np.einsum("spc,spc->sp", diff, diff)
    weights = system.pair_weights

    inertia = (weights * deltas).sum(axis=1)
    potential = (weights * deltas ** (-system.alpha)).sum(axis=1)
    measure = inertia**system.alpha * potential

    masses = system.masses_array
    kinetic = 0.5 * np.einsum("k,skc->s", masses, velocities**2)
    energy = kinetic - potential / (4.0 * system.alpha)

    mom = np.einsum("k,skc->sc", masses, velocities)
    momentum_norm = np.sqrt((mom * mom).sum(axis=1))

    com = np.einsum("k,skc->sc", masses, positions) / system.total_mass
    rel = positions - com[:, None, :]
    if dim == 2:
        angular = np.einsum(
            "k,sk->s",
            masses,
            rel[:, :, 0] * velocities[:, :, 1] - rel[:, :, 1] * velocities[:, :, 0],
        )
    elif dim == 3:
        vec = np.einsum("k,skc->sc", masses, np.cross(rel, velocities))
        angular = np.sqrt((vec * vec).sum(axis=1))
    else:
        angular = np.full(S, np.nan)

    for arr in (ts, positions, velocities, inertia, potential, measure, energy,
                momentum_norm, angular, deltas):
        arr.setflags(write=False)

    return Trajectory(
        system=system,
        times=ts,
        positions=positions,
        velocities=velocities,
        inertia=inertia,
        potential=potential,
        measure=measure,
        energy=energy,
        momentum_norm=momentum_norm,
        angular_momentum=angular,
        termination=_TERMINATION[status],
        collision_distance=coll,
        stats=IntegrationStats(
            steps=steps, accepted=accepted, rejected=rejected, nfev=nfev, backend=core.NAME
        ),
        _deltas=deltas,
    )

"""Construct and detect relative equilibria and homographic orbits.

A relative equilibrium keeps every pairwise distance constant (rigid
rotation of a central configuration); a homographic orbit keeps every
distance ratio constant (the configuration scales and rotates but never
changes shape). Constructions start from a certified central
configuration; detection works on any sampled trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .central import CentralConfiguration
from .errors import UnsupportedDimensionError
from .integrate import Trajectory
from .system import PhaseState

RE_TOL = 1e-9


def _quarter_turn(positions: np.ndarray) -> np.ndarray:
    """Rotate each row by +90 degrees: (x, y) -> (-y, x)."""
    return np.column_stack([-positions[:, 1], positions[:, 0]])


@dataclass(frozen=True)
class HomographicSpec:
    """Initial scale and rates for a homographic orbit on top of ``cc``.

    r0 is the initial size relative to the gauge-fixed configuration,
    rdot0 the initial radial rate, theta_dot0 the initial angular rate.
    With both rates zero the state is static, which is not a solution of
    the equations of motion; ``make_homographic`` rejects that case.
    """

    cc: CentralConfiguration
    r0: float = 1.0
    rdot0: float = 0.0
    theta_dot0: float = 0.0

    def __post_init__(self) -> None:
        if not self.r0 > 0.0:
            raise ValueError(f"r0 must be positive, got {self.r0}")

    @property
    def is_static(self) -> bool:
        return self.rdot0 == 0.0 and self.theta_dot0 == 0.0


def make_relative_equilibrium(cc: CentralConfiguration) -> PhaseState:
    """Initial state whose exact solution rotates rigidly.

    Velocities are omega * J * q_k with omega = sqrt(lambda): the
    multiplier lambda in the balance condition equals the squared angular
    rate that makes gravity supply exactly the centripetal acceleration.
    """
    if cc.system.dim != 2:
        raise UnsupportedDimensionError(
            f"relative equilibria are planar, got dim={cc.system.dim}"
        )
    omega = math.sqrt(cc.lam)
    return PhaseState(
        positions=cc.positions.copy(),
        velocities=omega * _quarter_turn(cc.positions),
    )


def make_homographic(spec: HomographicSpec) -> PhaseState:
    """Initial state whose exact solution is q_k(t) = r(t) R(theta(t)) q_k0.

    Positions are r0 * q_k0 and velocities rdot0 * q_k0 +
    r0 * theta_dot0 * J * q_k0, the time derivative of the ansatz at t=0.
    The scalar pair (r, theta) then obeys the planar central-force system
    r'' = r theta'^2 - lambda r^(-2 alpha - 1), (r^2 theta')' = 0 with
    lambda from the certificate.
    """
    if spec.cc.system.dim != 2:
        raise UnsupportedDimensionError(
            f"homographic orbits are planar, got dim={spec.cc.system.dim}"
        )
    if spec.is_static:
        raise ValueError("rdot0 and theta_dot0 are both zero: static, not a solution")
    q0 = spec.cc.positions
    return PhaseState(
        positions=spec.r0 * q0,
        velocities=spec.rdot0 * q0 + spec.r0 * spec.theta_dot0 * _quarter_turn(q0),
    )


def is_relative_equilibrium(
    traj: Trajectory, tol: float = RE_TOL
) -> tuple[bool, float]:
    """Test whether every pairwise distance stayed constant.

    Returns (verdict, max_dev) with max_dev the largest relative drift
    |dist_j(t) / dist_j(t0) - 1| over all pairs and samples.
    """
    dist = np.sqrt(traj.deltas())
    dev = np.abs(dist / dist[0] - 1.0)
    max_dev = float(dev.max())
    return max_dev <= tol, max_dev


def homographic_deviation(traj: Trajectory) -> float:
    """Largest relative drift of any pairwise distance ratio.

    Ratios are taken against the pair with the largest initial separation
    (the least noisy denominator) and compared with their initial values:

        max over pairs j, samples t of
            |(dist_j(t) / dist_ref(t)) / (dist_j(t0) / dist_ref(t0)) - 1|

    Exactly homographic motion gives 0. Samples whose smallest distance is
    within 10x the collision threshold are excluded (ratio noise diverges
    there); the initial sample always counts.
    """
    dist = np.sqrt(traj.deltas())
    ref = int(np.argmax(dist[0]))
    keep = dist.min(axis=1) >= 10.0 * traj.collision_distance
    keep[0] = True
    ratios = dist[keep] / dist[keep, ref : ref + 1]
    dev = np.abs(ratios / ratios[0] - 1.0)
    return float(dev.max())

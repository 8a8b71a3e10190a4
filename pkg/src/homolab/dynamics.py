"""Defining scalars and derivatives of the power-law n-body problem.

Everything here is a pure function of (system, state). The mass-weighted
sum of squared separations I, the pair potential U and the scale-invariant
product I**alpha * U are the quantities the verification harness monitors;
energy and momenta exist to certify the integrator.
"""

from __future__ import annotations

import numpy as np

from .errors import CollisionError, UnsupportedDimensionError
from .system import BodySystem, PairTable, PhaseState, pair_indices

# A state is "in collision" when its smallest separation drops below this
# fraction of the mass-weighted RMS separation sqrt(I / sum(2 m_i m_k)).
COLLISION_FACTOR = 1e-8


def _check(system: BodySystem, state: PhaseState) -> None:
    if state.n != system.n or state.dim != system.dim:
        raise ValueError(
            f"state shape ({state.n}, {state.dim}) does not match "
            f"system ({system.n}, {system.dim})"
        )


def _flat_deltas(state: PhaseState) -> np.ndarray:
    i_idx, k_idx = pair_indices(state.n)
    d = state.positions[k_idx] - state.positions[i_idx]
    return (d * d).sum(axis=1)


def system_scale(system: BodySystem, state: PhaseState) -> float:
    """Mass-weighted RMS separation, the natural length unit of a state."""
    _check(system, state)
    inertia = float(np.sum(system.pair_weights * _flat_deltas(state)))
    return np.sqrt(inertia / system.sum_pair_weights)


def collision_distance(system: BodySystem, state: PhaseState) -> float:
    return COLLISION_FACTOR * system_scale(system, state)


def pairwise_deltas(
    system: BodySystem,
    state: PhaseState,
    min_distance: float | None = None,
) -> PairTable:
    """Squared separations of all unordered pairs, in the fixed flat order.

    min_distance overrides the collision threshold; integrations freeze it
    at the initial state so the cutoff does not drift as the system shrinks.
    """
    _check(system, state)
    deltas = _flat_deltas(state)
    if min_distance is None:
        min_distance = COLLISION_FACTOR * np.sqrt(
            float(np.sum(system.pair_weights * deltas)) / system.sum_pair_weights
        )
    if np.sqrt(deltas.min()) < min_distance:
        raise CollisionError(
            f"minimum separation {np.sqrt(deltas.min()):.3e} below "
            f"collision threshold {min_distance:.3e}"
        )
    i_idx, k_idx = pair_indices(state.n)
    pairs = tuple((int(i), int(k)) for i, k in zip(i_idx, k_idx))
    return PairTable(deltas=deltas, weights=system.pair_weights, pairs=pairs)


def moment_of_inertia(system: BodySystem, state: PhaseState) -> float:
    """Ordered double sum of m_i*m_j*|q_j - q_i|^2 over i != j."""
    _check(system, state)
    return float(np.sum(system.pair_weights * _flat_deltas(state)))


def potential(
    system: BodySystem,
    state: PhaseState,
    min_distance: float | None = None,
) -> float:
    """Ordered double sum of m_i*m_j*(|q_i - q_j|^2)**(-alpha) over i != j."""
    table = pairwise_deltas(system, state, min_distance)
    return float(np.sum(table.weights * table.deltas ** (-system.alpha)))


def configurational_measure(
    system: BodySystem,
    state: PhaseState,
    min_distance: float | None = None,
) -> float:
    """The scale-invariant product I**alpha * U."""
    table = pairwise_deltas(system, state, min_distance)
    inertia = float(np.sum(table.weights * table.deltas))
    pot = float(np.sum(table.weights * table.deltas ** (-system.alpha)))
    return inertia**system.alpha * pot


def accelerations(
    system: BodySystem,
    state: PhaseState,
    min_distance: float | None = None,
) -> np.ndarray:
    """Body accelerations sum_j m_j (q_j - q_k) (|q_j - q_k|^2)**(-alpha-1).

    Equals -grad_k(V)/m_k for V = -U/(4*alpha); the test suite certifies
    this against central finite differences.
    """
    pairwise_deltas(system, state, min_distance)  # collision guard
    return accelerations_array(system.masses_array, system.alpha, state.positions)


def accelerations_array(masses: np.ndarray, alpha: float, positions: np.ndarray) -> np.ndarray:
    """Acceleration kernel on raw arrays; no collision guard."""
    diff = positions[None, :, :] - positions[:, None, :]  # diff[k, j] = q_j - q_k
    d2 = np.einsum("kjc,kjc->kj", diff, diff)
    np.fill_diagonal(d2, 1.0)
    f = d2 ** (-alpha - 1.0)
    np.fill_diagonal(f, 0.0)
    return np.einsum("j,kj,kjc->kc", masses, f, diff)


def kinetic_energy(system: BodySystem, state: PhaseState) -> float:
    _check(system, state)
    v = state.velocities
    return float(0.5 * np.sum(system.masses_array * (v * v).sum(axis=1)))


def energy(
    system: BodySystem,
    state: PhaseState,
    min_distance: float | None = None,
) -> float:
    """Conserved energy T - U/(4*alpha) of the equations of motion."""
    return kinetic_energy(system, state) - potential(system, state, min_distance) / (
        4.0 * system.alpha
    )


def linear_momentum(system: BodySystem, state: PhaseState) -> np.ndarray:
    _check(system, state)
    return (system.masses_array[:, None] * state.velocities).sum(axis=0)


def center_of_mass(system: BodySystem, state: PhaseState) -> np.ndarray:
    _check(system, state)
    m = system.masses_array
    return (m[:, None] * state.positions).sum(axis=0) / system.total_mass


def angular_momentum(system: BodySystem, state: PhaseState):
    """Angular momentum about the center of mass.

    Scalar for dim 2, 3-vector for dim 3; other dimensions are rejected.
    """
    _check(system, state)
    if system.dim not in (2, 3):
        raise UnsupportedDimensionError(
            f"angular momentum is defined for dim 2 or 3, not dim {system.dim}"
        )
    m = system.masses_array
    rel = state.positions - center_of_mass(system, state)
    v = state.velocities
    if system.dim == 2:
        return float(np.sum(m * (rel[:, 0] * v[:, 1] - rel[:, 1] * v[:, 0])))
    return (m[:, None] * np.cross(rel, v)).sum(axis=0)

"""Problem definition and phase-space containers.

Pairwise data uses one fixed flat ordering everywhere: unordered pairs
(i, k) with i < k, lexicographic in (i, k). Invariant checks that compare
two code paths rely on this order being stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import CollisionError


@lru_cache(maxsize=128)
def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Body indices (i_idx, k_idx) of the N = n(n-1)/2 flat pairs."""
    i_idx, k_idx = np.triu_indices(n, k=1)
    i_idx.setflags(write=False)
    k_idx.setflags(write=False)
    return i_idx, k_idx


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BodySystem:
    """Masses, force exponent and spatial dimension of one n-body problem.

    The pair force kernel is x -> x**(-alpha - 1) applied to squared
    separations; the gravitational constant is absorbed into the
    (dimensionless) masses.
    """

    masses: tuple[float, ...]
    alpha: float
    dim: int = 2

    def __post_init__(self):
        object.__setattr__(self, "masses", tuple(float(m) for m in self.masses))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "dim", int(self.dim))
        if len(self.masses) < 2:
            raise ValueError("a system needs at least two bodies")
        if not all(math.isfinite(m) and m > 0 for m in self.masses):
            raise ValueError("all masses must be positive and finite")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError("alpha must be positive")
        if self.dim < 1:
            raise ValueError("spatial dimension must be >= 1")

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def pair_count(self) -> int:
        return pair_count(self.n)

    @cached_property
    def masses_array(self) -> np.ndarray:
        return _readonly(self.masses)

    @cached_property
    def total_mass(self) -> float:
        return float(self.masses_array.sum())

    @cached_property
    def pair_weights(self) -> np.ndarray:
        """Flat pair coefficients 2*m_i*m_k, matching pair_indices order."""
        m = self.masses_array
        i_idx, k_idx = pair_indices(self.n)
        return _readonly(2.0 * m[i_idx] * m[k_idx])

    @cached_property
    def sum_pair_weights(self) -> float:
        """Sum over ordered pairs of m_i*m_j, i.e. sum of the flat weights."""
        return float(np.sum(self.pair_weights))


@dataclass(frozen=True)
class PhaseState:
    """Positions and velocities of all bodies at one instant.

    Coincident bodies are rejected at construction; the finer collision
    threshold is enforced by the operations that actually diverge there.
    """

    positions: np.ndarray
    velocities: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = _readonly(self.positions)
        v = _readonly(self.velocities)
        object.__setattr__(self, "positions", q)
        object.__setattr__(self, "velocities", v)
        object.__setattr__(self, "t", float(self.t))
        if q.ndim != 2 or q.shape[0] < 2:
            raise ValueError("positions must have shape (n, dim) with n >= 2")
        if v.shape != q.shape:
            raise ValueError("velocities must match the shape of positions")
        if not (np.isfinite(q).all() and np.isfinite(v).all()):
            raise ValueError("positions and velocities must be finite")
        i_idx, k_idx = pair_indices(q.shape[0])
        d = q[k_idx] - q[i_idx]
        if not (d * d).sum(axis=1).min() > 0.0:
            raise CollisionError("two bodies coincide")

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def flat(self) -> np.ndarray:
        """Phase vector [q_1, ..., q_n, v_1, ..., v_n] flattened to 1-D."""
        return np.concatenate([self.positions.ravel(), self.velocities.ravel()])

    @classmethod
    def from_flat(cls, y: np.ndarray, n: int, dim: int, t: float = 0.0) -> "PhaseState":
        y = np.asarray(y, dtype=np.float64)
        nd = n * dim
        return cls(y[:nd].reshape(n, dim), y[nd:].reshape(n, dim), t=t)


@dataclass(frozen=True)
class PairTable:
    """Flat table of squared pair separations with matching mass weights.

    deltas[j] is the squared separation of pair (i, k) = pairs[j]; the
    weight 2*m_i*m_k makes sum(weights * deltas) reproduce the ordered
    double sum over i != j exactly.
    """

    deltas: np.ndarray
    weights: np.ndarray
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "deltas", _readonly(self.deltas))
        object.__setattr__(self, "weights", _readonly(self.weights))

    @property
    def size(self) -> int:
        return self.deltas.shape[0]

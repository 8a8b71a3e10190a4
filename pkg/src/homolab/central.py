"""Planar central configurations.

A central configuration satisfies q̈_k = -λ(q_k - c) with one multiplier
λ > 0 for all bodies. They seed the relative-equilibrium and homographic
constructions. Solving is restricted to dim = 2.

The continuous symmetries (translation, rotation, scale) make the raw
balance equations singular, so solutions are pinned to a gauge: center of
mass at the origin, moment of inertia I equal to I_ref = Σ_{i≠j} m_i m_j
(unit mean-square separation), body 1 on the positive x-axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics
from .errors import CollisionError, ConvergenceError, UnsupportedDimensionError
from .system import BodySystem, PhaseState

RESIDUAL_TOL = 1e-12
MAX_ITER = 200


@dataclass(frozen=True)
class CentralConfiguration:
    """Certified central configuration.

    ``positions`` are gauge-fixed, ``lam`` is the positive multiplier in
    q̈_k = -λ q_k, and ``residual_norm`` is the Euclidean norm of the
    stacked residual q̈_k + λ q_k, at most 1e-12 for a certified solution.
    """

    system: BodySystem
    positions: np.ndarray
    lam: float
    residual_norm: float

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=np.float64)
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        if pos.shape != (self.system.n, self.system.dim):
            raise ValueError(
                f"positions shape {pos.shape} does not match system "
                f"({self.system.n}, {self.system.dim})"
            )
        if not self.lam > 0.0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.residual_norm <= RESIDUAL_TOL:
            raise ValueError(
                f"residual_norm {self.residual_norm} exceeds the certification "
                f"tolerance {RESIDUAL_TOL}"
            )

    def to_dict(self) -> dict:
        return {
            "masses": list(self.system.masses),
            "alpha": self.system.alpha,
            "dim": self.system.dim,
            "positions": self.positions.tolist(),
            "lambda": self.lam,
            "residual_norm": self.residual_norm,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CentralConfiguration":
        system = BodySystem(
            masses=tuple(float(m) for m in data["masses"]),
            alpha=float(data["alpha"]),
            dim=int(data.get("dim", 2)),
        )
        return cls(
            system=system,
            positions=np.asarray(data["positions"], dtype=np.float64),
            lam=float(data["lambda"]),
            residual_norm=float(data["residual_norm"]),
        )


def reference_inertia(system: BodySystem) -> float:
    """Gauge constant I_ref = Σ_{i≠j} m_i m_j."""
    return system.sum_pair_weights


def gauge_fix(system: BodySystem, positions: np.ndarray) -> np.ndarray:
    """Map positions onto the gauge slice.

    Subtracts the center of mass, rescales so the moment of inertia equals
    I_ref, and (dim = 2) rotates body 1 onto the positive x-axis. When
    body 1 sits at the origin the first body away from it fixes the
    rotation instead.
    """
    pos = np.array(positions, dtype=np.float64)
    masses = system.masses_array
    com = (masses[:, None] * pos).sum(axis=0) / system.total_mass
    pos -= com

    state = PhaseState(positions=pos, velocities=np.zeros_like(pos))
    inertia = dynamics.moment_of_inertia(system, state)
    pos *= math.sqrt(reference_inertia(system) / inertia)

    if system.dim == 2:
        norms = np.sqrt((pos * pos).sum(axis=1))
        anchor = 0
        while anchor < system.n and norms[anchor] <= 1e-12 * norms.max():
            anchor += 1
        if anchor < system.n:
            theta = math.atan2(pos[anchor, 1], pos[anchor, 0])
            c, s = math.cos(theta), math.sin(theta)
            rot = np.array([[c, s], [-s, c]])
            pos = pos @ rot.T
    return pos


def cc_residual(
    system: BodySystem, positions: np.ndarray
) -> tuple[np.ndarray, float]:
    """Balance residual and least-squares multiplier.

    With accelerations q̈_k from the force law and positions centered on
    the center of mass, the best-fit multiplier is

        λ_est = -(Σ_k m_k q̈_k·q_k) / (Σ_k m_k ||q_k||²)

    and the residual vector stacks r_k = q̈_k + λ_est q_k. Both vanish
    exactly on a central configuration.
    """
    pos = np.asarray(positions, dtype=np.float64)
    state = PhaseState(positions=pos, velocities=np.zeros_like(pos))
    acc = dynamics.accelerations(system, state)
    masses = system.masses_array
    num = (masses[:, None] * acc * pos).sum()
    den = (masses[:, None] * pos * pos).sum()
    lam_est = -num / den
    residual = (acc + lam_est * pos).ravel()
    return residual, float(lam_est)


def _augmented(system: BodySystem, flat: np.ndarray) -> np.ndarray:
    """Residual plus gauge constraints, for the damped Newton iteration."""
    n, dim = system.n, system.dim
    pos = flat.reshape(n, dim)
    residual, _ = cc_residual(system, pos)
    masses = system.masses_array
    com = (masses[:, None] * pos).sum(axis=0)
    state = PhaseState(positions=pos, velocities=np.zeros_like(pos))
    inertia = dynamics.moment_of_inertia(system, state)
    i_ref = reference_inertia(system)
    return np.concatenate(
        [residual, com, [(inertia - i_ref) / i_ref, pos[0, 1]]]
    )


def _jacobian(system: BodySystem, flat: np.ndarray) -> np.ndarray:
    eps = 1e-6
    f0 = _augmented(system, flat)
    jac = np.empty((f0.shape[0], flat.shape[0]))
    for j in range(flat.shape[0]):
        h = eps * max(1.0, abs(flat[j]))
        plus = flat.copy()
        minus = flat.copy()
        plus[j] += h
        minus[j] -= h
        jac[:, j] = (_augmented(system, plus) - _augmented(system, minus)) / (2 * h)
    return jac


def solve_central_config(
    system: BodySystem, seed_positions: np.ndarray
) -> CentralConfiguration:
    """Refine a seed into a certified central configuration.

    Gauss-Newton on the gauge-augmented residual with a backtracking line
    search (a step is taken at the longest length in 1, 1/2, 1/4, ... that
    reduces ||residual||²). The iterate is re-gauged and certified at the
    end; ConvergenceError is raised when the certified residual norm is
    above 1e-12 or the multiplier is not positive.
    """
    if system.dim != 2:
        raise UnsupportedDimensionError(
            f"central configurations are solved in dim=2, got dim={system.dim}"
        )
    pos = gauge_fix(system, np.asarray(seed_positions, dtype=np.float64))
    flat = pos.ravel().copy()

    f = _augmented(system, flat)
    cost = float((f * f).sum())
    for _ in range(MAX_ITER):
        # leave headroom below the certification tolerance: the final
        # re-gauge moves coordinates by about the gauge-constraint residual
        if math.sqrt(cost) <= 0.05 * RESIDUAL_TOL:
            break
        jac = _jacobian(system, flat)
        step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        scale = 1.0
        improved = False
        for _try in range(40):
            cand = flat + scale * step
            try:
                fc = _augmented(system, cand)
            except CollisionError:
                scale *= 0.5
                continue
            cost_c = float((fc * fc).sum())
            if np.isfinite(cost_c) and cost_c < cost:
                flat, f, cost = cand, fc, cost_c
                improved = True
                break
            scale *= 0.5
        if not improved:
            # stalled at the floating-point floor; certification below decides
            break

    final = gauge_fix(system, flat.reshape(system.n, system.dim))
    residual, lam = cc_residual(system, final)
    norm = float(np.sqrt((residual * residual).sum()))
    if norm > RESIDUAL_TOL:
        raise ConvergenceError(
            f"residual norm {norm:.3e} above certification tolerance {RESIDUAL_TOL}"
        )
    if not lam > 0.0:
        raise ConvergenceError(f"multiplier is not positive at the solution: {lam}")
    return CentralConfiguration(
        system=system, positions=final, lam=lam, residual_norm=norm
    )


def known_seeds(kind: str, n: int, scale: float = 1.0) -> np.ndarray:
    """Textbook seed positions, centroid at the origin.

    kind "equilateral" (n = 3): triangle with side = scale.
    kind "collinear" (n >= 2): equally spaced along x, spacing = scale.
    kind "ngon" (n >= 3): regular n-gon with circumradius = scale.
    """
    if not scale > 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    if kind == "equilateral":
        if n != 3:
            raise ValueError(f"equilateral requires n=3, got n={n}")
        height = scale * math.sqrt(3.0) / 2.0
        pos = np.array(
            [
                [-scale / 2.0, -height / 3.0],
                [scale / 2.0, -height / 3.0],
                [0.0, 2.0 * height / 3.0],
            ]
        )
    elif kind == "collinear":
        if n < 2:
            raise ValueError(f"collinear requires n>=2, got n={n}")
        xs = scale * (np.arange(n) - (n - 1) / 2.0)
        pos = np.column_stack([xs, np.zeros(n)])
    elif kind == "ngon":
        if n < 3:
            raise ValueError(f"ngon requires n>=3, got n={n}")
        angles = 2.0 * math.pi * np.arange(n) / n
        pos = scale * np.column_stack([np.cos(angles), np.sin(angles)])
    else:
        raise ValueError(f"unknown seed kind: {kind!r}")
    return pos

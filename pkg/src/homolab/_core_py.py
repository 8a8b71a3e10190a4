"""NumPy implementation of the stepper core.

Mirrors the compiled extension in homolab._core_cy: same tableau, same
step-size controller, same sampling rules. Selected by homolab._backend
when the extension is unavailable (or forced via HOMOLAB_BACKEND=python).

The two cores agree to rounding, not bitwise: NumPy reductions group
additions differently from the extension's sequential loops.
"""

from __future__ import annotations

import numpy as np

from ._tableau import A, B, E3, E5, ERROR_EXPONENT, N_STAGES

NAME = "python"

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0

STATUS_COMPLETED = 0
STATUS_COLLISION = 1
STATUS_STEP_FAILURE = 2

_EPS = float(np.finfo(np.float64).eps)


def rhs(masses: np.ndarray, alpha: float, y: np.ndarray, n: int, dim: int) -> np.ndarray:
    """Time derivative of the flat phase vector [q, v]."""
    nd = n * dim
    out = np.empty_like(y)
    out[:nd] = y[nd:]
    pos = y[:nd].reshape(n, dim)
    diff = pos[None, :, :] - pos[:, None, :]
    d2 = np.einsum("kjc,kjc->kj", diff, diff)
    np.fill_diagonal(d2, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        f = d2 ** (-alpha - 1.0)
    np.fill_diagonal(f, 0.0)
    out[nd:] = np.einsum("j,kj,kjc->kc", masses, f, diff).ravel()
    return out


def _min_delta(y: np.ndarray, n: int, dim: int) -> float:
    pos = y[: n * dim].reshape(n, dim)
    best = np.inf
    for i in range(n - 1):
        d = pos[i + 1 :] - pos[i]
        best = min(best, float((d * d).sum(axis=1).min()))
    return best


def _error_norm(K: np.ndarray, h: float, scale: np.ndarray) -> float:
    err5 = (E5[:, None] * K).sum(axis=0) / scale
    err3 = (E3[:, None] * K).sum(axis=0) / scale
    e5 = float((err5 * err5).sum())
    e3 = float((err3 * err3).sum())
    if e5 == 0.0 and e3 == 0.0:
        return 0.0
    denom = e5 + 0.01 * e3
    return abs(h) * e5 / np.sqrt(denom * scale.shape[0])


def integrate_raw(
    masses: np.ndarray,
    alpha: float,
    dim: int,
    y0: np.ndarray,
    t0: float,
    targets: np.ndarray,
    rtol: float,
    atol: float,
    max_step: float,
    collision_dist: float,
    h0: float,
    max_steps: int,
):
    """Advance the phase vector, recording it exactly at the target times.

    Returns (ts, ys, status, steps, accepted, rejected, nfev). ts[0] is t0;
    further samples appear in target order until completion, a collision,
    or a step-size failure cuts the run short.
    """
    masses = np.asarray(masses, dtype=np.float64)
    n = masses.shape[0]
    m = 2 * n * dim
    coll2 = collision_dist * collision_dist

    n_targets = targets.shape[0]
    ts = np.empty(n_targets + 1)
    ys = np.empty((n_targets + 1, m))
    ts[0] = t0
    ys[0] = y0

    t = t0
    y = np.array(y0, dtype=np.float64)
    f0 = rhs(masses, alpha, y, n, dim)
    nfev = 1
    steps = accepted = rejected = 0
    status = STATUS_COMPLETED

    K = np.empty((N_STAGES + 1, m))
    h = min(h0, max_step)
    i_target = 0
    just_rejected = False

    while i_target < n_targets:
        target = float(targets[i_target])
        if steps >= max_steps:
            status = STATUS_STEP_FAILURE
            break
        h = min(h, max_step)
        hmin = 16.0 * _EPS * max(abs(t), 1.0)
        if h < hmin:
            status = STATUS_STEP_FAILURE
            break
        hit = t + h >= target
        h_step = target - t if hit else h
        steps += 1

        K[0] = f0
        for s in range(1, N_STAGES):
            dy = (A[s, :s, None] * K[:s]).sum(axis=0)
            K[s] = rhs(masses, alpha, y + h_step * dy, n, dim)
        y_new = y + h_step * (B[:, None] * K[:N_STAGES]).sum(axis=0)
        f_new = rhs(masses, alpha, y_new, n, dim)
        K[N_STAGES] = f_new
        nfev += N_STAGES

        if np.isfinite(y_new).all() and np.isfinite(f_new).all():
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = _error_norm(K, h_step, scale)
        else:
            err = np.inf

        if not np.isfinite(err):
            rejected += 1
            just_rejected = True
            h = h_step * MIN_FACTOR
            continue
        if err >= 1.0:
            rejected += 1
            just_rejected = True
            h = h_step * max(MIN_FACTOR, SAFETY * err**ERROR_EXPONENT)
            continue

        accepted += 1
        factor = MAX_FACTOR if err == 0.0 else min(MAX_FACTOR, SAFETY * err**ERROR_EXPONENT)
        if just_rejected:
            factor = min(1.0, factor)
            just_rejected = False
        h = h_step * factor
        t = target if hit else t + h_step
        y = y_new
        f0 = f_new
        if _min_delta(y, n, dim) < coll2:
            status = STATUS_COLLISION
            break
        if hit:
            i_target += 1
            ts[i_target] = t
            ys[i_target] = y

    count = i_target + 1
    return ts[:count], ys[:count], status, steps, accepted, rejected, nfev

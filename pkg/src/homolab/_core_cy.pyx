# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stepper core.

Same tableau, controller and sampling rules as homolab._core_py, with the
stage loops and the pairwise force kernel in C. This is the hot path: a
converse-probe run spends nearly all its time inside integrate_raw.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, isfinite, pow, sqrt

cnp.import_array()

from . import _tableau

NAME = "cython"

cdef int NS = int(_tableau.N_STAGES)
cdef double ERROR_EXPONENT = float(_tableau.ERROR_EXPONENT)
cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double EPS = float(np.finfo(np.float64).eps)
cdef double INF = float("inf")

cdef double[:, ::1] TA = np.ascontiguousarray(_tableau.A)
cdef double[::1] TB = np.ascontiguousarray(_tableau.B)
cdef double[::1] TE3 = np.ascontiguousarray(_tableau.E3)
cdef double[::1] TE5 = np.ascontiguousarray(_tableau.E5)

STATUS_COMPLETED = 0
STATUS_COLLISION = 1
STATUS_STEP_FAILURE = 2


cdef void _accel(const double* masses, double alpha, const double* q,
                 double* acc, int n, int dim) noexcept:
    cdef int i, k, c
    cdef double d2, f, w, diff
    for i in range(n * dim):
        acc[i] = 0.0
    for i in range(n - 1):
        for k in range(i + 1, n):
            d2 = 0.0
            for c in range(dim):
                diff = q[k * dim + c] - q[i * dim + c]
                d2 += diff * diff
            f = pow(d2, -alpha - 1.0)
            for c in range(dim):
                diff = q[k * dim + c] - q[i * dim + c]
                w = f * diff
                acc[i * dim + c] += masses[k] * w
                acc[k * dim + c] -= masses[i] * w


cdef void _rhs(const double* masses, double alpha, const double* y,
               double* out, int n, int dim) noexcept:
    cdef int j, nd = n * dim
    for j in range(nd):
        out[j] = y[nd + j]
    _accel(masses, alpha, y, out + nd, n, dim)


cdef double _min_delta(const double* y, int n, int dim) noexcept:
    cdef int i, k, c
    cdef double d2, diff, best = INF
    for i in range(n - 1):
        for k in range(i + 1, n):
            d2 = 0.0
            for c in range(dim):
                diff = y[k * dim + c] - y[i * dim + c]
                d2 += diff * diff
            if d2 < best:
                best = d2
    return best


def rhs(masses, double alpha, y, int n, int dim):
    """Time derivative of the flat phase vector [q, v]."""
    cdef cnp.ndarray[double, ndim=1] m_arr = np.ascontiguousarray(masses, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] y_arr = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(y_arr)
    _rhs(&m_arr[0], alpha, &y_arr[0], &out[0], n, dim)
    return out


def integrate_raw(
    masses,
    double alpha,
    int dim,
    y0,
    double t0,
    targets,
    double rtol,
    double atol,
    double max_step,
    double collision_dist,
    double h0,
    long max_steps,
):
    """Advance the phase vector, recording it exactly at the target times.

    Returns (ts, ys, status, steps, accepted, rejected, nfev); same contract
    as the NumPy core.
    """
    cdef cnp.ndarray[double, ndim=1] m_arr = np.ascontiguousarray(masses, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] y_arr = np.array(y0, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] tg_arr = np.ascontiguousarray(targets, dtype=np.float64)
    cdef int n = m_arr.shape[0]
    cdef int m = 2 * n * dim
    cdef int n_targets = tg_arr.shape[0]

    cdef cnp.ndarray[double, ndim=1] ts = np.empty(n_targets + 1)
    cdef cnp.ndarray[double, ndim=2] ys = np.empty((n_targets + 1, m))
    cdef cnp.ndarray[double, ndim=1] ynew_arr = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] ytmp_arr = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] kbuf_arr = np.empty((NS + 1) * m)

    cdef double* mm = &m_arr[0]
    cdef double* y = &y_arr[0]
    cdef double* ynew = &ynew_arr[0]
    cdef double* ytmp = &ytmp_arr[0]
    cdef double* kbuf = &kbuf_arr[0]

    cdef double coll2 = collision_dist * collision_dist
    cdef double t = t0, target, h, h_step, hmin, acc, err
    cdef double e5, e3, s5, s3, sc, denom, factor
    cdef long steps = 0, accepted = 0, rejected = 0, nfev = 0
    cdef int status = 0, i_target = 0, hit, ok, j, s, r
    cdef bint just_rejected = False

    ts[0] = t0
    for j in range(m):
        ys[0, j] = y[j]

    _rhs(mm, alpha, y, kbuf, n, dim)  # K[0] holds f(t, y) between steps
    nfev = 1
    h = h0 if h0 < max_step else max_step

    while i_target < n_targets:
        target = tg_arr[i_target]
        if steps >= max_steps:
            status = 2
            break
        if h > max_step:
            h = max_step
        hmin = 16.0 * EPS * (fabs(t) if fabs(t) > 1.0 else 1.0)
        if h < hmin:
            status = 2
            break
        hit = t + h >= target
        h_step = target - t if hit else h
        steps += 1

        for s in range(1, NS):
            for j in range(m):
                acc = 0.0
                for r in range(s):
                    acc += TA[s, r] * kbuf[r * m + j]
                ytmp[j] = y[j] + h_step * acc
            _rhs(mm, alpha, ytmp, kbuf + s * m, n, dim)
        for j in range(m):
            acc = 0.0
            for r in range(NS):
                acc += TB[r] * kbuf[r * m + j]
            ynew[j] = y[j] + h_step * acc
        _rhs(mm, alpha, ynew, kbuf + NS * m, n, dim)
        nfev += NS

        ok = 1
        for j in range(m):
            if not (isfinite(ynew[j]) and isfinite(kbuf[NS * m + j])):
                ok = 0
                break
        if ok:
            e5 = 0.0
            e3 = 0.0
            for j in range(m):
                sc = fabs(y[j])
                if fabs(ynew[j]) > sc:
                    sc = fabs(ynew[j])
                sc = atol + rtol * sc
                s5 = 0.0
                s3 = 0.0
                for r in range(NS + 1):
                    s5 += TE5[r] * kbuf[r * m + j]
                    s3 += TE3[r] * kbuf[r * m + j]
                s5 /= sc
                s3 /= sc
                e5 += s5 * s5
                e3 += s3 * s3
            if e5 == 0.0 and e3 == 0.0:
                err = 0.0
            else:
                denom = e5 + 0.01 * e3
                err = fabs(h_step) * e5 / sqrt(denom * m)
            if not isfinite(err):
                err = INF
        else:
            err = INF

        if err == INF:
            rejected += 1
            just_rejected = True
            h = h_step * MIN_FACTOR
            continue
        if err >= 1.0:
            rejected += 1
            just_rejected = True
            factor = SAFETY * pow(err, ERROR_EXPONENT)
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            h = h_step * factor
            continue

        accepted += 1
        if err == 0.0:
            factor = MAX_FACTOR
        else:
            factor = SAFETY * pow(err, ERROR_EXPONENT)
            if factor > MAX_FACTOR:
                factor = MAX_FACTOR
        if just_rejected:
            if factor > 1.0:
                factor = 1.0
            just_rejected = False
        h = h_step * factor
        t = target if hit else t + h_step
        for j in range(m):
            y[j] = ynew[j]
            kbuf[j] = kbuf[NS * m + j]
        if _min_delta(y, n, dim) < coll2:
            status = 1
            break
        if hit:
            i_target += 1
            ts[i_target] = t
            for j in range(m):
                ys[i_target, j] = y[j]

    cdef int count = i_target + 1
    return ts[:count], ys[:count], int(status), int(steps), int(accepted), int(rejected), int(nfev)

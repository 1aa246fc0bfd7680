"""Hot loops: replicator right-hand side, fixed-step RK4, Blotto outcome counts,
trajectory recurrence search.

Every kernel exists twice: a numba-compiled scalar loop (``*_nb``) and a
vectorised numpy version (``*_np``). The public wrappers dispatch on
``_accel.USE_NUMBA``; both paths must agree to floating-point roundoff and the
integer kernels must agree exactly.

Replicator fields are encoded as monomial sums. The state ``z`` concatenates
all populations. Fitness of coordinate ``i`` is::

    f_i(z) = sum_{t : targets[t] == i} coefs[t] * prod_j z_j ** expos[t, j]

optionally divided by ``1 - (1 - z_i) ** presence`` when ``presence > 0``.
The tangent is ``z_i * (f_i - sum_{j in pop(i)} z_j f_j)``.
"""

import numpy as np

from . import _accel
from ._accel import njit

# status codes returned by the integrators
OK = 0
NON_FINITE = 1


# ---------------------------------------------------------------- numba path


@njit
def _rhs_nb(z, targets, coefs, expos, presence, pop, npop, out):
    K = z.shape[0]
    f = np.zeros(K)
    for t in range(targets.shape[0]):
        v = coefs[t]
        for j in range(K):
            e = expos[t, j]
            if e > 0:
                v *= z[j] ** e
        f[targets[t]] += v
    if presence > 0:
        for i in range(K):
            if z[i] > 0.0:
                d = -np.expm1(presence * np.log1p(-z[i])) if z[i] < 1.0 else 1.0
                f[i] = f[i] / d
            else:
                f[i] = 0.0
    avg = np.zeros(npop)
    for i in range(K):
        avg[pop[i]] += z[i] * f[i]
    for i in range(K):
        out[i] = z[i] * (f[i] - avg[pop[i]])


@njit
def _project_nb(z, pop, npop):
    sums = np.zeros(npop)
    for i in range(z.shape[0]):
        if z[i] < 0.0:
            z[i] = 0.0
        sums[pop[i]] += z[i]
    for i in range(z.shape[0]):
        z[i] /= sums[pop[i]]


@njit
def _rk4_nb(z0, targets, coefs, expos, presence, pop, npop, step, n_steps, path):
    K = z0.shape[0]
    k1 = np.empty(K)
    k2 = np.empty(K)
    k3 = np.empty(K)
    k4 = np.empty(K)
    tmp = np.empty(K)
    z = z0.copy()
    path[0, :] = z
    for s in range(n_steps):
        _rhs_nb(z, targets, coefs, expos, presence, pop, npop, k1)
        for i in range(K):
            tmp[i] = z[i] + 0.5 * step * k1[i]
        _rhs_nb(tmp, targets, coefs, expos, presence, pop, npop, k2)
        for i in range(K):
            tmp[i] = z[i] + 0.5 * step * k2[i]
        _rhs_nb(tmp, targets, coefs, expos, presence, pop, npop, k3)
        for i in range(K):
            tmp[i] = z[i] + step * k3[i]
        _rhs_nb(tmp, targets, coefs, expos, presence, pop, npop, k4)
        for i in range(K):
            z[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not np.isfinite(z[i]):
                return NON_FINITE
        _project_nb(z, pop, npop)
        path[s + 1, :] = z
    return OK


@njit
def _rk4_many_nb(Z0, targets, coefs, expos, presence, pop, npop, step, n_steps, paths):
    for b in range(Z0.shape[0]):
        status = _rk4_nb(Z0[b], targets, coefs, expos, presence, pop, npop,
                         step, n_steps, paths[b])
        if status != OK:
            return status
    return OK


@njit
def _blotto_nb(P, Q):
    wins = 0
    ties = 0
    losses = 0
    n = P.shape[1]
    for a in range(P.shape[0]):
        for b in range(Q.shape[0]):
            x = 0
            y = 0
            for j in range(n):
                if P[a, j] > Q[b, j]:
                    x += 1
                elif P[a, j] < Q[b, j]:
                    y += 1
            if x > y:
                wins += 1
            elif x < y:
                losses += 1
            else:
                ties += 1
    return wins, ties, losses


@njit
def _recurrence_nb(points, times, radius, t_min, depart):
    N, K = points.shape
    for j in range(N):
        left = False
        for i in range(j + 1, N):
            d2 = 0.0
            for c in range(K):
                diff = points[i, c] - points[j, c]
                d2 += diff * diff
            d = np.sqrt(d2)
            if not left:
                if d > depart:
                    left = True
            elif d < radius and times[i] >= t_min:
                return j, i
    return -1, -1


# ---------------------------------------------------------------- numpy path


def _fitness_np(Z, targets, coefs, expos, presence):
    K = Z.shape[1]
    mono = np.prod(Z[:, None, :] ** expos[None, :, :], axis=2)
    onehot = np.zeros((targets.shape[0], K))
    onehot[np.arange(targets.shape[0]), targets] = 1.0
    f = (mono * coefs) @ onehot
    if presence > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            d = -np.expm1(presence * np.log1p(-np.clip(Z, 0.0, 1.0)))
            f = np.where(Z > 0.0, f / d, 0.0)
    return f


def _rhs_np(Z, targets, coefs, expos, presence, pop, npop):
    f = _fitness_np(Z, targets, coefs, expos, presence)
    popmat = np.zeros((Z.shape[1], npop))
    popmat[np.arange(Z.shape[1]), pop] = 1.0
    avg = (Z * f) @ popmat
    return Z * (f - avg[:, pop])


def _rk4_many_np(Z0, targets, coefs, expos, presence, pop, npop, step, n_steps, paths):
    popmat = np.zeros((Z0.shape[1], npop))
    popmat[np.arange(Z0.shape[1]), pop] = 1.0
    args = (targets, coefs, expos, presence, pop, npop)
    Z = Z0.copy()
    paths[:, 0, :] = Z
    for s in range(n_steps):
        k1 = _rhs_np(Z, *args)
        k2 = _rhs_np(Z + 0.5 * step * k1, *args)
        k3 = _rhs_np(Z + 0.5 * step * k2, *args)
        k4 = _rhs_np(Z + step * k3, *args)
        Z = Z + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(Z)):
            return NON_FINITE
        np.maximum(Z, 0.0, out=Z)
        Z /= (Z @ popmat)[:, pop]
        paths[:, s + 1, :] = Z
    return OK


def _blotto_np(P, Q):
    x = (P[:, None, :] > Q[None, :, :]).sum(axis=2)
    y = (P[:, None, :] < Q[None, :, :]).sum(axis=2)
    return int((x > y).sum()), int((x == y).sum()), int((x < y).sum())


def _recurrence_np(points, times, radius, t_min, depart):
    N = points.shape[0]
    sq = (points * points).sum(axis=1)
    D = np.sqrt(np.maximum(sq[:, None] + sq[None, :] - 2.0 * points @ points.T, 0.0))
    idx = np.arange(N)
    later = idx[None, :] > idx[:, None]
    away = (D > depart) & later
    has_left = away.any(axis=1)
    first_leave = np.where(has_left, away.argmax(axis=1), N)
    hit = (later & (idx[None, :] > first_leave[:, None]) & (D < radius)
           & (times[None, :] >= t_min))
    if not hit.any():
        return -1, -1
    j = int(np.argmax(hit.any(axis=1)))
    i = int(np.argmax(hit[j]))
    return j, i


# ---------------------------------------------------------------- dispatch


def replicator_rhs(Z, targets, coefs, expos, presence, pop, npop):
    """Tangent vectors for a batch of states ``Z`` (shape ``(n, K)``)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    if _accel.USE_NUMBA:
        out = np.empty_like(Z)
        for b in range(Z.shape[0]):
            _rhs_nb(np.ascontiguousarray(Z[b]), targets, coefs, expos, presence,
                    pop, npop, out[b])
        return out
    return _rhs_np(Z, targets, coefs, expos, presence, pop, npop)


def rk4_paths(Z0, targets, coefs, expos, presence, pop, npop, step, n_steps):
    """Integrate every row of ``Z0``; returns ``(status, paths)``."""
    Z0 = np.ascontiguousarray(np.atleast_2d(Z0), dtype=np.float64)
    paths = np.empty((Z0.shape[0], n_steps + 1, Z0.shape[1]))
    fn = _rk4_many_nb if _accel.USE_NUMBA else _rk4_many_np
    # overflow is reported through the status code, not as warnings
    with np.errstate(over="ignore", invalid="ignore"):
        status = fn(Z0, targets, coefs, expos, presence, pop, npop, float(step),
                    int(n_steps), paths)
    return int(status), paths


def blotto_outcomes(P, Q):
    """(wins, ties, losses) of every row of ``P`` against every row of ``Q``."""
    P = np.ascontiguousarray(P, dtype=np.int64)
    Q = np.ascontiguousarray(Q, dtype=np.int64)
    if _accel.USE_NUMBA:
        w, t, l = _blotto_nb(P, Q)
        return int(w), int(t), int(l)
    return _blotto_np(P, Q)


def first_recurrence(points, times, radius, t_min, depart):
    """First pair ``(j, i)``, ``j < i``, where the path leaves the ``depart``-ball
    around ``points[j]`` and later re-enters its ``radius``-ball at time >= t_min.
    Returns ``(-1, -1)`` when there is none."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    fn = _recurrence_nb if _accel.USE_NUMBA else _recurrence_np
    j, i = fn(points, times, float(radius), float(t_min), float(depart))
    return int(j), int(i)

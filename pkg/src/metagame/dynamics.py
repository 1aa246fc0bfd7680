"""Replicator dynamics on one simplex or on a product of two simplices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .game import BimatrixGame, GameFormatError, mixed_strategy
from .hpt import MetaPayoffTable, enumerate_profiles, fitness_terms

DEFAULT_STEP = 0.01
DEFAULT_HORIZON = 200.0

# trajectory classification
VERTEX_TOL = 1e-3
CYCLE_RADIUS = 0.02
CYCLE_T_MIN = 10.0
CYCLE_DEPART = 2 * CYCLE_RADIUS
MAX_RECURRENCE_POINTS = 2000


class NonFiniteFieldError(FloatingPointError):
    """The field produced inf/nan, which points at malformed payoffs."""


@dataclass(frozen=True, eq=False)
class VectorField:
    """Replicator field encoded as monomials over the concatenated state.

    ``dims`` is ``(k,)`` for one population and ``(k, k')`` for two.
    """

    dims: tuple
    targets: np.ndarray
    coefs: np.ndarray
    expos: np.ndarray
    presence: int = 0
    labels: tuple = ()

    @property
    def size(self) -> int:
        return sum(self.dims)

    @property
    def pop(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.dims)), self.dims)

    def _args(self):
        return (self.targets, self.coefs, self.expos, self.presence, self.pop, len(self.dims))

    def evaluate(self, z) -> np.ndarray:
        """Tangent(s) at concatenated state(s) ``z`` (shape ``(K,)`` or ``(n, K)``)."""
        z = np.asarray(z, dtype=np.float64)
        out = kernels.replicator_rhs(z, *self._args())
        if not np.all(np.isfinite(out)):
            raise NonFiniteFieldError("replicator field is not finite; check the payoffs")
        return out[0] if z.ndim == 1 else out

    def __call__(self, *points) -> np.ndarray | tuple:
        z = np.concatenate([np.asarray(p, dtype=np.float64) for p in points])
        if z.shape != (self.size,):
            raise ValueError(f"state has {z.shape[0]} coordinates, field expects {self.dims}")
        v = self.evaluate(z)
        if len(self.dims) == 1:
            return v
        return tuple(np.split(v, np.cumsum(self.dims)[:-1]))

    def split(self, z) -> tuple:
        return tuple(np.split(np.asarray(z), np.cumsum(self.dims)[:-1], axis=-1))


def single_population_field(payoff, weighting: str = "count") -> VectorField:
    """``ẋ_l = x_l (f_l(x) - xᵀ f(x))`` with ``f = A x`` or the meta-table payoff."""
    if isinstance(payoff, MetaPayoffTable):
        targets, coefs, expos, presence = fitness_terms(payoff, weighting)
        return VectorField((payoff.k,), targets, coefs, expos, presence, (payoff.labels,))
    A = np.asarray(payoff, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise GameFormatError(f"single-population field needs a square matrix, got {A.shape}")
    k = A.shape[0]
    ii, jj = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    expos = np.eye(k, dtype=np.int64)[jj.ravel()]
    labels = (tuple(str(i) for i in range(k)),)
    return VectorField((k,), ii.ravel().astype(np.int64), A.ravel().copy(), expos, 0, labels)


def two_population_field(game: BimatrixGame) -> VectorField:
    """Coupled field: ``ẋ_l = x_l((Ay)_l - xᵀAy)``, ``ẏ_l' = y_l'((xᵀB)_l' - xᵀBy)``."""
    A, B = np.asarray(game.A), np.asarray(game.B)
    k, kk = A.shape
    K = k + kk
    eye = np.eye(K, dtype=np.int64)
    targets, coefs, expos = [], [], []
    for l in range(k):
        for m in range(kk):
            targets.append(l)
            coefs.append(A[l, m])
            expos.append(eye[k + m])
            targets.append(k + m)
            coefs.append(B[l, m])
            expos.append(eye[l])
    return VectorField((k, kk), np.array(targets, dtype=np.int64), np.array(coefs),
                       np.array(expos, dtype=np.int64), 0, (game.row_labels, game.col_labels))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    points: np.ndarray
    dims: tuple

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]

    def populations(self) -> tuple:
        return tuple(np.split(self.points, np.cumsum(self.dims)[:-1], axis=1))

    def __len__(self) -> int:
        return self.times.shape[0]


def _as_state(field: VectorField, start) -> np.ndarray:
    if len(field.dims) == 1:
        parts = [start]
    elif isinstance(start, (tuple, list)) and len(start) == len(field.dims) and np.ndim(start[0]) == 1:
        parts = list(start)
    else:
        parts = np.split(np.asarray(start, dtype=np.float64), np.cumsum(field.dims)[:-1])
    z = []
    for part, k in zip(parts, field.dims):
        x = mixed_strategy(part, tol=1e-6)
        if x.shape != (k,):
            raise ValueError(f"start has {x.shape[0]} coordinates for a population of {k}")
        z.append(x)
    return np.concatenate(z)


def integrate_many(field: VectorField, starts: Sequence, t_end: float = DEFAULT_HORIZON,
                   step: float = DEFAULT_STEP) -> list[Trajectory]:
    """Fixed-step RK4 from each start; every step is clipped to >= 0 and
    renormalised per population. All steps are recorded."""
    if not t_end > 0 or not step > 0:
        raise ValueError("t_end and step must be positive")
    Z0 = np.array([_as_state(field, s) for s in starts])
    n_steps = int(math.ceil(t_end / step - 1e-9))
    status, paths = kernels.rk4_paths(Z0, *field._args(), step, n_steps)
    if status != kernels.OK:
        raise NonFiniteFieldError("integration produced a non-finite state; check the payoffs")
    times = step * np.arange(n_steps + 1)
    return [Trajectory(times, paths[b], field.dims) for b in range(len(Z0))]


def integrate(field: VectorField, start, t_end: float = DEFAULT_HORIZON,
              step: float = DEFAULT_STEP) -> Trajectory:
    return integrate_many(field, [start], t_end, step)[0]


def simplex_lattice(k: int, m: int, interior: bool = False) -> np.ndarray:
    """Barycentric lattice ``{n / m : n in N^k, Σn = m}`` in canonical row order."""
    pts = np.array(enumerate_profiles(m, k), dtype=np.float64) / m
    if interior:
        pts = pts[(pts > 0).all(axis=1)]
    return pts


def default_starts(k: int, resolution: int = 5) -> np.ndarray:
    """Interior lattice points plus the centroid (when not already on the lattice)."""
    pts = simplex_lattice(k, resolution, interior=True)
    centroid = np.full(k, 1.0 / k)
    if not any(np.allclose(p, centroid) for p in pts):
        pts = np.vstack([pts, centroid]) if len(pts) else centroid[None, :]
    return pts


@dataclass(frozen=True, eq=False)
class DirectionalField:
    grid: np.ndarray
    arrows: np.ndarray
    resolution: int


def directional_field(field: VectorField, resolution: int) -> DirectionalField:
    if len(field.dims) != 1 or field.dims[0] != 3:
        raise ValueError(f"directional fields are rendered on the 2-simplex; field has dims {field.dims}")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    grid = simplex_lattice(3, resolution)
    return DirectionalField(grid, field.evaluate(grid), resolution)


def classify(traj: Trajectory) -> str:
    """Label a trajectory ``converged-to-vertex``, ``converged-to-face``,
    ``converged-to-interior``, ``cycling`` or ``unresolved``.

    Converged means the last 10% of the path stays within ``VERTEX_TOL`` of the
    final point. Cycling means no convergence and a return within
    ``CYCLE_RADIUS`` of an earlier point, after having moved ``CYCLE_DEPART``
    away from it, at some time ``t >= CYCLE_T_MIN``.
    """
    t, P = traj.times, traj.points
    tail = P[t >= 0.9 * t[-1]]
    if np.abs(tail - P[-1]).max() <= VERTEX_TOL:
        final = np.split(P[-1], np.cumsum(traj.dims)[:-1])
        if all(x.max() >= 1.0 - VERTEX_TOL for x in final):
            return "converged-to-vertex"
        if all(x.min() > VERTEX_TOL for x in final):
            return "converged-to-interior"
        return "converged-to-face"
    stride = max(1, int(math.ceil(len(t) / MAX_RECURRENCE_POINTS)))
    j, _ = kernels.first_recurrence(P[::stride], t[::stride], CYCLE_RADIUS, CYCLE_T_MIN, CYCLE_DEPART)
    return "cycling" if j >= 0 else "unresolved"

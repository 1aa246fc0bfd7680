"""Nash and ε-Nash analysis for small normal-form games."""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .game import (BimatrixGame, as_normal_form, counterpart_games, deviation_payoffs,
                   support)

log = logging.getLogger(__name__)

SUPPORT_THRESHOLD = 1e-7
DEDUP_TOL = 1e-7
VERIFY_TOL = 1e-9
_COND_LIMIT = 1e12

# sentinels returned by _indifferent_mix
INCONSISTENT = "inconsistent"
DEGENERATE = "degenerate"


class DegenerateGameWarning(RuntimeWarning):
    """An indifference system had infinitely many solutions; the support was skipped."""


@dataclass(frozen=True, eq=False)
class EquilibriumCandidate:
    profile: tuple
    exploitability: float
    support: tuple
    method: str = "support_enum"

    def to_dict(self) -> dict:
        return {"profile": [[float(v) for v in x] for x in self.profile],
                "exploitability": float(self.exploitability),
                "support": [list(s) for s in self.support],
                "method": self.method}


def exploitability(game, profile) -> float:
    """Largest gain any player gets from a unilateral pure deviation (>= 0)."""
    g = as_normal_form(game)
    gains = []
    for i in range(g.num_players):
        dev = deviation_payoffs(g, profile, i)
        gains.append(dev.max() - float(np.dot(profile[i], dev)))
    return max(0.0, float(max(gains)))


def _candidate(game, profile, method) -> EquilibriumCandidate:
    profile = tuple(np.asarray(x, dtype=np.float64) for x in profile)
    return EquilibriumCandidate(profile, exploitability(game, profile),
                                tuple(support(x, SUPPORT_THRESHOLD) for x in profile), method)


def pure_equilibria(game, tol: float = 1e-12) -> list[tuple[int, ...]]:
    g = as_normal_form(game)
    R = g.payoffs
    ok = np.ones(g.shape, dtype=bool)
    for i in range(g.num_players):
        best = R[..., i].max(axis=i, keepdims=True)
        ok &= R[..., i] >= best - tol
    return [tuple(int(v) for v in j) for j in np.argwhere(ok)]


def _indifferent_mix(M):
    """Solve ``M q = v·1``, ``Σq = 1`` for the opponent mix ``q``.

    Returns ``(q, v)``; ``INCONSISTENT`` when no solution exists and
    ``DEGENERATE`` when solutions form a continuum.
    """
    s = M.shape[0]
    K = np.zeros((s + 1, s + 1))
    K[:s, :s] = M
    K[:s, s] = -1.0
    K[s, :s] = 1.0
    rhs = np.zeros(s + 1)
    rhs[s] = 1.0
    if np.linalg.cond(K) <= _COND_LIMIT:
        sol = np.linalg.solve(K, rhs)
        return sol[:s], sol[s]
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    if np.abs(K @ sol - rhs).max() > 1e-9 * max(1.0, np.abs(K).max()):
        return INCONSISTENT
    return DEGENERATE


def _solved(sol, what, supports) -> bool:
    if sol is DEGENERATE:
        _warn_degenerate(what, supports)
    return not isinstance(sol, str)


def _warn_degenerate(what, supports):
    msg = f"indifference system for {what} support {supports} has a continuum of solutions; skipped"
    log.warning(msg)
    warnings.warn(msg, DegenerateGameWarning, stacklevel=4)


def _dedup(points, tol=DEDUP_TOL):
    out = []
    for pt in points:
        flat = np.concatenate(pt)
        if not any(np.abs(flat - np.concatenate(q)).max() < tol for q in out):
            out.append(pt)
    return out


def _clean(x, tol):
    if x.min() < -tol:
        return None
    x = np.clip(x, 0.0, None)
    return x / x.sum()


def support_enumeration_2p(game: BimatrixGame, max_support: int | None = None,
                           tol: float = VERIFY_TOL) -> list[EquilibriumCandidate]:
    """All equilibria reachable through equal-size support pairs."""
    A, B = np.asarray(game.A), np.asarray(game.B)
    k, kk = A.shape
    top = min(k, kk) if max_support is None else min(max_support, k, kk)
    found = []
    for s in range(1, top + 1):
        for I in itertools.combinations(range(k), s):
            for J in itertools.combinations(range(kk), s):
                sy = _indifferent_mix(A[np.ix_(I, J)])
                sx = _indifferent_mix(B[np.ix_(I, J)].T)
                if not (_solved(sy, "bimatrix", (I, J)) and _solved(sx, "bimatrix", (I, J))):
                    continue
                yJ, u = sy
                xI, v = sx
                yJ, xI = _clean(yJ, tol), _clean(xI, tol)
                if yJ is None or xI is None:
                    continue
                x = np.zeros(k)
                y = np.zeros(kk)
                x[list(I)] = xI
                y[list(J)] = yJ
                if (A @ y).max() > x @ A @ y + tol or (x @ B).max() > x @ B @ y + tol:
                    continue
                found.append((x, y))
    return [_candidate(game, pt, "support_enum") for pt in _dedup(found)]


def single_population_equilibria(A, tol: float = VERIFY_TOL) -> list[np.ndarray]:
    """Symmetric equilibria ``x`` of the game where ``x`` plays against itself:
    ``xᵀAx = max(Ax)``."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"need a square matrix, got {A.shape}")
    k = A.shape[0]
    found = []
    for s in range(1, k + 1):
        for S in itertools.combinations(range(k), s):
            sol = _indifferent_mix(A[np.ix_(S, S)])
            if not _solved(sol, "single-population", S):
                continue
            xS = _clean(sol[0], tol)
            if xS is None:
                continue
            x = np.zeros(k)
            x[list(S)] = xS
            Ax = A @ x
            if Ax.max() - x @ Ax > tol:
                continue
            found.append((x,))
    return [pt[0] for pt in _dedup(found)]


def symmetric_equilibria(A) -> list[EquilibriumCandidate]:
    """:func:`single_population_equilibria` wrapped as profiles of the game ``(A, Aᵀ)``."""
    A = np.asarray(A, dtype=np.float64)
    game = BimatrixGame(A, A.T)
    return [_candidate(game, (x, x), "symmetric") for x in single_population_equilibria(A)]


def counterpart_nash_filter(game: BimatrixGame) -> list[EquilibriumCandidate]:
    """Pair same-support equilibria of the counterpart games ``A`` (giving ``y``)
    and ``Bᵀ`` (giving ``x``); keep pairs that verify on ``(A, B)``.

    Equilibria of ``(A, B)`` whose two mixes have different supports are not
    reachable this way.
    """
    A, Bt = counterpart_games(game)
    ys = single_population_equilibria(A)
    xs = single_population_equilibria(Bt)
    out = []
    for x in xs:
        for y in ys:
            if support(x, SUPPORT_THRESHOLD) != support(y, SUPPORT_THRESHOLD):
                continue
            cand = _candidate(game, (x, y), "counterpart")
            if cand.exploitability <= VERIFY_TOL:
                out.append(cand)
            else:
                log.info("counterpart pair %s failed verification (%.3g)", cand.support, cand.exploitability)
    return out


def pure_candidates(game) -> list[EquilibriumCandidate]:
    g = as_normal_form(game)
    out = []
    for joint in pure_equilibria(g):
        profile = [np.eye(k)[j] for k, j in zip(g.shape, joint)]
        out.append(_candidate(g, profile, "pure"))
    return out


def certify_two_epsilon(candidate: EquilibriumCandidate, epsilon: float,
                        tol: float = VERIFY_TOL) -> float:
    """ε-Nash level guaranteed on the true game for an exact equilibrium of an
    empirical game whose payoffs are within ``epsilon`` (sup-norm) of the truth."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if candidate.exploitability > tol:
        raise ValueError(f"candidate is not an equilibrium of the empirical game "
                         f"(exploitability {candidate.exploitability:.3g})")
    return 2.0 * epsilon


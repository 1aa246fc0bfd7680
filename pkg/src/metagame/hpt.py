"""Heuristic (meta) payoff tables.

A table ``M = (N, U)`` has one row per way of distributing ``p`` interchangeable
players over ``k`` strategies. ``N[r]`` holds the player counts and ``U[r]`` the
expected payoff of each strategy present in that row (0 for absent ones).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .game import BimatrixGame, GameFormatError

WEIGHTINGS = ("count", "presence")


def enumerate_profiles(p: int, k: int) -> list[tuple[int, ...]]:
    """All compositions of ``p`` into ``k`` parts, ``(p,0,..,0)`` first and
    ``(0,..,0,p)`` last (reverse lexicographic)."""
    if p < 0 or k < 1:
        raise ValueError(f"need p >= 0 and k >= 1, got p={p}, k={k}")
    if k == 1:
        return [(p,)]
    out = []
    for first in range(p, -1, -1):
        for rest in enumerate_profiles(p - first, k - 1):
            out.append((first,) + rest)
    return out


def multinomial(counts: Sequence[int]) -> int:
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def profile_probability(profile: Sequence[int], x, p: int | None = None) -> float:
    """Probability that ``p`` draws from ``x`` produce exactly ``profile`` (0⁰ = 1)."""
    counts = [int(c) for c in profile]
    if p is not None and sum(counts) != p:
        raise ValueError(f"profile {counts} does not sum to p={p}")
    x = np.asarray(x, dtype=np.float64)
    prob = float(multinomial(counts))
    for c, xi in zip(counts, x):
        if c:
            prob *= xi ** c
    return prob


@dataclass(frozen=True)
class MetaPayoffTable:
    """Symmetric meta payoff table with rows in canonical order."""

    p: int
    counts: np.ndarray
    payoffs: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        N = np.array(self.counts, dtype=np.int64)
        U = np.array(self.payoffs, dtype=np.float64)
        if N.ndim != 2 or N.shape != U.shape:
            raise GameFormatError(f"counts and payoffs must be equal-shape matrices; got {N.shape}, {U.shape}")
        k = N.shape[1]
        expected = enumerate_profiles(self.p, k)
        if [tuple(r) for r in N.tolist()] != expected:
            raise GameFormatError(
                f"rows must be the {len(expected)} profiles of p={self.p}, k={k} in canonical order")
        if np.any((N == 0) & (U != 0)):
            r = int(np.argwhere((N == 0) & (U != 0))[0, 0])
            raise GameFormatError(f"row {N[r].tolist()} pays a strategy that is absent")
        if not np.all(np.isfinite(U)):
            raise GameFormatError("payoffs must be finite")
        labels = tuple(str(s) for s in self.labels) if self.labels is not None else tuple(str(i) for i in range(k))
        if len(labels) != k:
            raise GameFormatError("label count does not match strategy count")
        N.setflags(write=False)
        U.setflags(write=False)
        object.__setattr__(self, "counts", N)
        object.__setattr__(self, "payoffs", U)
        object.__setattr__(self, "labels", labels)

    @property
    def k(self) -> int:
        return self.counts.shape[1]

    def __len__(self) -> int:
        return self.counts.shape[0]

    def row(self, profile: Sequence[int]) -> np.ndarray:
        hits = np.flatnonzero((self.counts == np.asarray(profile)).all(axis=1))
        if hits.size == 0:
            raise KeyError(tuple(profile))
        return self.payoffs[hits[0]]

    def restrict(self, strategies: Sequence[int]) -> "MetaPayoffTable":
        """Sub-table over a subset of strategies (the others frozen at zero)."""
        idx = list(strategies)
        keep = [r for r in range(len(self)) if self.counts[r][[j for j in range(self.k) if j not in idx]].sum() == 0]
        sub = {tuple(self.counts[r][idx]): self.payoffs[r][idx] for r in keep}
        rows = enumerate_profiles(self.p, len(idx))
        return MetaPayoffTable(self.p, rows, [sub[r] for r in rows], [self.labels[j] for j in idx])

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        return {"p": self.p,
                "strategies": list(self.labels),
                "rows": [{"counts": [int(c) for c in n], "payoffs": [float(u) for u in v]}
                         for n, v in zip(self.counts, self.payoffs)]}

    @classmethod
    def from_dict(cls, d: dict) -> "MetaPayoffTable":
        try:
            p = int(d["p"])
            labels = list(d["strategies"])
            rows = {tuple(int(c) for c in r["counts"]): [float(u) for u in r["payoffs"]]
                    for r in d["rows"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise GameFormatError(f"bad meta table: {exc}") from None
        order = enumerate_profiles(p, len(labels))
        missing = [r for r in order if r not in rows]
        if missing or len(rows) != len(order):
            raise GameFormatError(f"meta table rows incomplete or extra; missing {missing[:3]}")
        return cls(p, order, [rows[r] for r in order], labels)

    @classmethod
    def load(cls, path) -> "MetaPayoffTable":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"N_{s}" for s in self.labels] + [f"U_{s}" for s in self.labels])
        for n, u in zip(self.counts, self.payoffs):
            w.writerow([int(c) for c in n] + [repr(float(v)) for v in u])
        return buf.getvalue()


@dataclass(frozen=True)
class AsymmetricMetaTable:
    """Per-player decomposition of a two-population meta game.

    Mixed rows ``{l, m}`` keep both orderings: in ``player1`` slot ``l`` holds
    ``A[l, m]`` and slot ``m`` holds ``A[m, l]``. ``player2`` is built from
    ``Bᵀ`` so that slot ``l`` is the column player's payoff for playing ``l``.
    """

    player1: MetaPayoffTable
    player2: MetaPayoffTable

    def __post_init__(self):
        if self.player1.p != 2 or self.player2.p != 2:
            raise GameFormatError("asymmetric tables are defined for p=2")
        if not np.array_equal(self.player1.counts, self.player2.counts):
            raise GameFormatError("player tables must share the same profile rows")

    def to_dict(self) -> dict:
        return {"player1": self.player1.to_dict(), "player2": self.player2.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "AsymmetricMetaTable":
        return cls(MetaPayoffTable.from_dict(d["player1"]), MetaPayoffTable.from_dict(d["player2"]))


def build_symmetric_table(payoff_fn: Callable[[tuple], Sequence[float]], p: int, k: int,
                          labels: Sequence[str] | None = None) -> MetaPayoffTable:
    rows = enumerate_profiles(p, k)
    U = []
    for n in rows:
        u = np.asarray(payoff_fn(n), dtype=np.float64)
        if u.shape != (k,):
            raise ValueError(f"payoff_fn returned shape {u.shape} for {n}, expected ({k},)")
        absent = [j for j in range(k) if n[j] == 0 and u[j] != 0]
        if absent:
            raise ValueError(f"payoff_fn pays absent strategies {absent} in profile {n}")
        U.append(u)
    return MetaPayoffTable(p, rows, U, labels)


def table_from_matrix(M, labels: Sequence[str] | None = None) -> MetaPayoffTable:
    """Two-player symmetric table where a strategy ``l`` facing ``m`` earns ``M[l, m]``."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise GameFormatError(f"need a square matrix, got shape {M.shape}")
    k = M.shape[0]

    def fn(n):
        u = np.zeros(k)
        present = [j for j in range(k) if n[j]]
        if len(present) == 1:
            u[present[0]] = M[present[0], present[0]]
        else:
            l, m = present
            u[l], u[m] = M[l, m], M[m, l]
        return u

    return build_symmetric_table(fn, 2, k, labels)


def table_to_matrix(table: MetaPayoffTable) -> np.ndarray:
    """Inverse of :func:`table_from_matrix` for p=2 tables."""
    if table.p != 2:
        raise ValueError("only two-player tables map to a matrix")
    k = table.k
    M = np.zeros((k, k))
    for n, u in zip(table.counts, table.payoffs):
        present = np.flatnonzero(n)
        if present.size == 1:
            l = present[0]
            M[l, l] = u[l]
        else:
            l, m = present
            M[l, m], M[m, l] = u[l], u[m]
    return M


def build_from_bimatrix(game: BimatrixGame) -> AsymmetricMetaTable:
    if game.A.shape[0] != game.A.shape[1]:
        raise GameFormatError(f"need a square bimatrix game, got {game.A.shape}")
    return AsymmetricMetaTable(table_from_matrix(game.A, game.row_labels),
                               table_from_matrix(game.B.T, game.col_labels))


def meta_expected_payoff(table: MetaPayoffTable, x, weighting: str = "count") -> np.ndarray:
    """Expected payoff of each strategy when the population mix is ``x``.

    ``weighting="count"`` (default) scores strategy ``i`` from the viewpoint of
    one individual playing ``i`` whose ``p - 1`` co-players are drawn from
    ``x``; it equals ``(A x)_i`` for tables built from a matrix ``A`` and is
    finite at ``x_i = 0``.

    ``weighting="presence"`` weights every row by ``P(N_j | x)`` and divides by
    the probability ``1 - (1 - x_i)^p`` that ``i`` appears at all. That
    coordinate is reported as 0 when ``x_i = 0``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (table.k,):
        raise ValueError(f"x has shape {x.shape}, expected ({table.k},)")
    p, k = table.p, table.k
    out = np.zeros(k)
    if weighting == "count":
        for n, u in zip(table.counts, table.payoffs):
            for i in np.flatnonzero(n):
                rest = n.copy()
                rest[i] -= 1
                out[i] += profile_probability(rest, x) * u[i]
        return out
    if weighting == "presence":
        for n, u in zip(table.counts, table.payoffs):
            out += profile_probability(n, x) * u
        present = -np.expm1(p * np.log1p(-np.clip(x, 0.0, 1.0)))
        return np.where(x > 0, out / np.where(x > 0, present, 1.0), 0.0)
    raise ValueError(f"unknown weighting {weighting!r}; choose from {WEIGHTINGS}")


def fitness_terms(table: MetaPayoffTable, weighting: str = "count"):
    """Monomial encoding of :func:`meta_expected_payoff` for the dynamics kernels.

    Returns ``(targets, coefs, expos, presence)``; see :mod:`metagame.kernels`.
    """
    targets, coefs, expos = [], [], []
    if weighting == "count":
        for n, u in zip(table.counts, table.payoffs):
            for i in np.flatnonzero(n):
                rest = n.copy()
                rest[i] -= 1
                targets.append(i)
                coefs.append(multinomial(rest) * u[i])
                expos.append(rest)
        presence = 0
    elif weighting == "presence":
        for n, u in zip(table.counts, table.payoffs):
            for i in np.flatnonzero(n):
                targets.append(i)
                coefs.append(multinomial(n) * u[i])
                expos.append(n)
        presence = table.p
    else:
        raise ValueError(f"unknown weighting {weighting!r}; choose from {WEIGHTINGS}")
    return (np.array(targets, dtype=np.int64), np.array(coefs, dtype=np.float64),
            np.array(expos, dtype=np.int64).reshape(len(targets), table.k), presence)


@dataclass(frozen=True)
class WinRateMatrix:
    """Labelled square matrix; ``rates[l, m]`` is the probability that ``l`` beats ``m``."""

    labels: tuple
    rates: np.ndarray

    def __post_init__(self):
        R = np.array(self.rates, dtype=np.float64)
        labels = tuple(str(s) for s in self.labels)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise GameFormatError(f"win-rate matrix must be square, got {R.shape}")
        if len(labels) != R.shape[0] or len(set(labels)) != len(labels):
            raise GameFormatError("win-rate labels must be unique and match the matrix size")
        if not np.all(np.isfinite(R)) or R.min() < 0 or R.max() > 1:
            raise GameFormatError("win rates must lie in [0, 1]")
        R.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "rates", R)

    @classmethod
    def from_csv(cls, text: str) -> "WinRateMatrix":
        """Header row of column labels, then one labelled row per strategy."""
        rows = [[c.strip() for c in r] for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
        if len(rows) < 2:
            raise GameFormatError("win-rate CSV needs a header and at least one row")
        cols = rows[0][1:]
        labels = [r[0] for r in rows[1:]]
        if labels != cols:
            raise GameFormatError(f"row labels {labels} must match column labels {cols}")
        try:
            R = [[float(v) for v in r[1:]] for r in rows[1:]]
        except ValueError as exc:
            raise GameFormatError(f"bad win rate: {exc}") from None
        if any(len(r) != len(cols) for r in R):
            raise GameFormatError("win-rate CSV is not square")
        return cls(tuple(labels), np.array(R))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + list(self.labels))
        for lab, row in zip(self.labels, self.rates):
            w.writerow([lab] + [repr(float(v)) for v in row])
        return buf.getvalue()

    def index(self, subset: Sequence[str] | None = None) -> list[int]:
        if subset is None:
            return list(range(len(self.labels)))
        unknown = [s for s in subset if s not in self.labels]
        if unknown:
            raise GameFormatError(f"unknown strategy label(s) {unknown}; known: {list(self.labels)}")
        return [self.labels.index(s) for s in subset]

    def table(self, subset: Sequence[str] | None = None) -> MetaPayoffTable:
        """Symmetric p=2 table on ``subset``; self-play is forced to 0.5."""
        idx = self.index(subset)
        M = self.rates[np.ix_(idx, idx)].copy()
        np.fill_diagonal(M, 0.5)
        return table_from_matrix(M, [self.labels[i] for i in idx])

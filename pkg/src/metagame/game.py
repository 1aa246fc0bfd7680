"""Normal-form games, bimatrix games and mixed strategies."""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

SIMPLEX_TOL = 1e-9


class GameFormatError(ValueError):
    """Raised when a game file or payload does not match the expected schema."""


def _frozen(a, dtype=np.float64) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def mixed_strategy(weights, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate a point on the probability simplex and renormalise it.

    Weights may undershoot zero or miss unit mass by at most ``tol``; anything
    further off raises ``ValueError``.
    """
    x = np.array(weights, dtype=np.float64).ravel()
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise ValueError(f"not a mixed strategy: {weights!r}")
    if x.min() < -tol or abs(x.sum() - 1.0) > tol:
        raise ValueError(f"not on the simplex (tol={tol}): {weights!r}")
    x = np.clip(x, 0.0, None)
    return x / x.sum()


def support(x, threshold: float = 1e-7) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(np.asarray(x) > threshold))


@dataclass(frozen=True)
class NormalFormGame:
    """A p-player game stored as a dense tensor of shape ``(k_1, ..., k_p, p)``.

    ``payoffs[π]`` is the reward vector for joint pure strategy ``π``.
    ``bounds`` defaults to the observed payoff range.
    """

    payoffs: np.ndarray
    strategies: tuple = None
    bounds: tuple = None

    def __post_init__(self):
        r = np.array(self.payoffs, dtype=np.float64)
        if r.ndim < 2 or r.shape[-1] != r.ndim - 1:
            raise GameFormatError(
                f"payoff tensor must have shape (k_1..k_p, p); got {r.shape}")
        if not np.all(np.isfinite(r)):
            raise GameFormatError("payoffs must be finite")
        p = r.shape[-1]
        if self.strategies is None:
            labels = tuple(tuple(str(j) for j in range(k)) for k in r.shape[:-1])
        else:
            labels = tuple(tuple(str(s) for s in ss) for ss in self.strategies)
        if len(labels) != p or any(len(ls) != k for ls, k in zip(labels, r.shape[:-1])):
            raise GameFormatError("strategy labels do not match the payoff tensor")
        if self.bounds is None:
            bounds = (float(r.min()), float(r.max()))
        else:
            bounds = (float(self.bounds[0]), float(self.bounds[1]))
            if bounds[0] > bounds[1]:
                raise GameFormatError(f"bad bounds {bounds}")
            if r.min() < bounds[0] or r.max() > bounds[1]:
                raise GameFormatError(f"payoffs fall outside bounds {bounds}")
        object.__setattr__(self, "payoffs", _frozen(r))
        object.__setattr__(self, "strategies", labels)
        object.__setattr__(self, "bounds", bounds)

    @property
    def num_players(self) -> int:
        return self.payoffs.shape[-1]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.payoffs.shape[:-1]

    @property
    def payoff_range(self) -> float:
        return self.bounds[1] - self.bounds[0]

    def rewards(self, joint) -> np.ndarray:
        return self.payoffs[tuple(joint)]

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        cells = []
        for joint in itertools.product(*(range(k) for k in self.shape)):
            cells.append({"joint": list(joint),
                          "rewards": [float(v) for v in self.payoffs[joint]]})
        return {"players": self.num_players,
                "strategies": [list(s) for s in self.strategies],
                "payoffs": cells,
                "bounds": list(self.bounds)}

    @classmethod
    def from_dict(cls, d: dict) -> "NormalFormGame":
        try:
            p = int(d["players"])
            labels = [list(s) for s in d["strategies"]]
            cells = d["payoffs"]
        except (KeyError, TypeError) as exc:
            raise GameFormatError(f"missing game field: {exc}") from None
        if len(labels) != p:
            raise GameFormatError("'strategies' must list one label set per player")
        shape = tuple(len(s) for s in labels)
        r = np.full(shape + (p,), np.nan)
        for cell in cells:
            joint = tuple(int(j) for j in cell["joint"])
            rewards = [float(v) for v in cell["rewards"]]
            if len(joint) != p or len(rewards) != p:
                raise GameFormatError(f"bad payoff cell {cell!r}")
            if not all(0 <= j < k for j, k in zip(joint, shape)):
                raise GameFormatError(f"joint strategy out of range: {joint}")
            r[joint] = rewards
        if np.isnan(r).any():
            missing = [tuple(int(v) for v in j) for j in np.argwhere(np.isnan(r[..., 0]))]
            raise GameFormatError(f"payoff cells missing: {missing[:5]}")
        return cls(r, labels, d.get("bounds"))

    @classmethod
    def load(cls, path) -> "NormalFormGame":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class BimatrixGame:
    """Two-player game: ``A[l, l']`` pays the row player, ``B[l, l']`` the column player."""

    A: np.ndarray
    B: np.ndarray
    row_labels: tuple = None
    col_labels: tuple = None
    bounds: tuple = field(default=None, compare=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=np.float64)
        B = np.array(self.B, dtype=np.float64)
        if A.ndim != 2 or A.shape != B.shape:
            raise GameFormatError(f"A and B must be matrices of equal shape; got {A.shape}, {B.shape}")
        rows = tuple(self.row_labels) if self.row_labels is not None else tuple(str(i) for i in range(A.shape[0]))
        cols = tuple(self.col_labels) if self.col_labels is not None else tuple(str(i) for i in range(A.shape[1]))
        if len(rows) != A.shape[0] or len(cols) != A.shape[1]:
            raise GameFormatError("labels do not match matrix dimensions")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "B", _frozen(B))
        object.__setattr__(self, "row_labels", tuple(str(s) for s in rows))
        object.__setattr__(self, "col_labels", tuple(str(s) for s in cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def to_normal_form(self) -> NormalFormGame:
        return NormalFormGame(np.stack([self.A, self.B], axis=-1),
                              [self.row_labels, self.col_labels], self.bounds)

    @classmethod
    def from_normal_form(cls, game: NormalFormGame) -> "BimatrixGame":
        if game.num_players != 2:
            raise GameFormatError("bimatrix view needs a two-player game")
        return cls(game.payoffs[..., 0], game.payoffs[..., 1],
                   game.strategies[0], game.strategies[1], game.bounds)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for M in (self.A, self.B):
            w.writerow([""] + list(self.col_labels))
            for lab, row in zip(self.row_labels, M):
                w.writerow([lab] + [repr(float(v)) for v in row])
            if M is self.A:
                w.writerow([])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BimatrixGame":
        """Parse two labelled blocks (A then B) separated by a blank line."""
        blocks, cur = [], []
        for row in csv.reader(io.StringIO(text)):
            if not row or all(not c.strip() for c in row):
                if cur:
                    blocks.append(cur)
                    cur = []
                continue
            cur.append([c.strip() for c in row])
        if cur:
            blocks.append(cur)
        if len(blocks) != 2:
            raise GameFormatError(f"expected 2 matrix blocks, found {len(blocks)}")
        mats, rows_seen = [], []
        cols = blocks[0][0][1:]
        for blk in blocks:
            if blk[0][1:] != cols:
                raise GameFormatError("A and B blocks have different column labels")
            rows = [r[0] for r in blk[1:]]
            try:
                mats.append(np.array([[float(v) for v in r[1:]] for r in blk[1:]]))
            except ValueError as exc:
                raise GameFormatError(str(exc)) from None
            rows_seen.append(rows)
        if rows_seen[0] != rows_seen[1]:
            raise GameFormatError("A and B blocks have different row labels")
        return cls(mats[0], mats[1], rows_seen[0], cols)


def as_normal_form(game) -> NormalFormGame:
    if isinstance(game, BimatrixGame):
        return game.to_normal_form()
    if isinstance(game, NormalFormGame):
        return game
    raise TypeError(f"expected a game, got {type(game).__name__}")


def _permutations_to_check(p: int):
    if p <= 4:
        return itertools.permutations(range(p))
    # adjacent transpositions generate the symmetric group
    gens = []
    for i in range(p - 1):
        s = list(range(p))
        s[i], s[i + 1] = s[i + 1], s[i]
        gens.append(tuple(s))
    return gens


def is_symmetric(game, atol: float = 0.0) -> bool:
    """True iff all strategy sets coincide and ``r(π_σ) = r_σ(π)`` for every σ."""
    g = as_normal_form(game)
    p = g.num_players
    if len(set(g.strategies)) != 1:
        return False
    R = g.payoffs
    for sigma in _permutations_to_check(p):
        inv = np.argsort(sigma)
        lhs = np.transpose(R, tuple(inv) + (p,))   # lhs[π] = R[π_σ]
        rhs = R[..., list(sigma)]                  # rhs[π] = r_σ(π)
        if not np.allclose(lhs, rhs, rtol=0.0, atol=atol):
            return False
    return True


def _check_profile(g: NormalFormGame, profile: Sequence) -> list[np.ndarray]:
    if len(profile) != g.num_players:
        raise ValueError(f"need {g.num_players} mixed strategies, got {len(profile)}")
    xs = [np.asarray(x, dtype=np.float64) for x in profile]
    for i, (x, k) in enumerate(zip(xs, g.shape)):
        if x.shape != (k,):
            raise ValueError(f"player {i} strategy has shape {x.shape}, expected ({k},)")
    return xs


def expected_payoff(game, profile: Sequence) -> np.ndarray:
    """Exact expected reward vector ``Σ_π (Π_i x^i_{π^i}) r(π)``."""
    g = as_normal_form(game)
    xs = _check_profile(g, profile)
    out = g.payoffs
    for x in xs:
        out = np.tensordot(x, out, axes=(0, 0))
    return np.asarray(out)


def deviation_payoffs(game, profile: Sequence, player: int) -> np.ndarray:
    """Expected reward of each pure strategy of ``player`` against the others' mix."""
    g = as_normal_form(game)
    xs = _check_profile(g, profile)
    out = g.payoffs[..., player]
    # contract from the last player backwards so axis indices stay valid
    for i in reversed(range(g.num_players)):
        if i != player:
            out = np.tensordot(out, xs[i], axes=(i, 0))
    return out


def counterpart_games(game: BimatrixGame) -> tuple[np.ndarray, np.ndarray]:
    """The two single-population games ``A`` and ``Bᵀ`` of a square bimatrix game."""
    if game.A.shape[0] != game.A.shape[1]:
        raise GameFormatError(f"counterpart games need a square game; got {game.A.shape}")
    return np.array(game.A), np.array(game.B.T)

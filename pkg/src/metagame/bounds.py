"""Finite-sample confidence for empirical games (Hoeffding-based).

Payoffs live in ``[a, b]``; every bound here uses the rescaled deviation
``epsilon / (b - a)`` so that the classical ``[0, 1]`` form is the special case
``payoff_range=1``. Each per-cell factor ``1 - 2 exp(-2 (ε/range)² n)`` is
clamped at 0 before multiplying.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .game import NormalFormGame


class MissingDataError(ValueError):
    """A (player, joint strategy) cell has no observations."""


@dataclass(frozen=True)
class ObservationLog:
    """Reward samples ``(player, joint, reward)`` with rewards inside ``bounds``."""

    records: tuple
    bounds: tuple = (0.0, 1.0)

    def __post_init__(self):
        a, b = float(self.bounds[0]), float(self.bounds[1])
        if not a < b:
            raise ValueError(f"bad payoff bounds {self.bounds}")
        recs = tuple((int(i), tuple(int(j) for j in joint), float(r)) for i, joint, r in self.records)
        for rec in recs:
            if not a <= rec[2] <= b:
                raise ValueError(f"sample {rec} outside payoff bounds [{a}, {b}]")
        object.__setattr__(self, "records", recs)
        object.__setattr__(self, "bounds", (a, b))

    @property
    def payoff_range(self) -> float:
        return self.bounds[1] - self.bounds[0]

    @classmethod
    def from_csv(cls, text: str, bounds=(0.0, 1.0)) -> "ObservationLog":
        """Lines ``player,idx_1,...,idx_p,reward``; a non-numeric first line is a header."""
        recs = []
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [c.strip() for c in row]
                recs.append((int(vals[0]), tuple(int(v) for v in vals[1:-1]), float(vals[-1])))
            except ValueError:
                if lineno == 1:
                    continue
                raise ValueError(f"line {lineno}: cannot parse {row!r}") from None
        return cls(tuple(recs), bounds)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for i, joint, r in self.records:
            w.writerow([i, *joint, repr(r)])
        return buf.getvalue()


def estimate_game(log: ObservationLog, shape: Sequence[int]):
    """Sample-mean game and per-cell counts (array of shape ``(*shape, p)``)."""
    shape = tuple(int(k) for k in shape)
    p = len(shape)
    sums = np.zeros(shape + (p,))
    counts = np.zeros(shape + (p,), dtype=np.int64)
    for i, joint, r in log.records:
        if not 0 <= i < p or len(joint) != p or not all(0 <= j < k for j, k in zip(joint, shape)):
            raise ValueError(f"observation ({i}, {joint}) does not fit shape {shape}")
        sums[joint + (i,)] += r
        counts[joint + (i,)] += 1
    empty = np.argwhere(counts == 0)
    if len(empty):
        cell = tuple(int(v) for v in empty[0])
        raise MissingDataError(
            f"no samples for player {cell[-1]} at joint strategy {cell[:-1]} "
            f"({len(empty)} empty cell(s) in total)")
    return NormalFormGame(sums / counts, bounds=log.bounds), counts


def _factor(n, epsilon, payoff_range):
    e = epsilon / payoff_range
    return max(0.0, 1.0 - 2.0 * math.exp(-2.0 * e * e * n))


@dataclass(frozen=True)
class ConfidenceReport:
    epsilon: float
    confidence: float
    counts: Mapping = field(default_factory=dict)
    payoff_range: float = 1.0

    @property
    def two_epsilon(self) -> float:
        return 2.0 * self.epsilon

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon,
                "confidence": self.confidence,
                "range": self.payoff_range,
                "two_epsilon": self.two_epsilon,
                "counts": [{"cell": _jsonable(c), "n": int(n)} for c, n in self.counts.items()]}


def _jsonable(cell):
    if isinstance(cell, tuple):
        return [_jsonable(c) for c in cell]
    return cell.item() if hasattr(cell, "item") else cell


def ordered_cells(counts: np.ndarray) -> dict:
    """``{(player, joint): n}`` from a count array of shape ``(*shape, p)``."""
    counts = np.asarray(counts)
    out = {}
    for idx in np.ndindex(counts.shape):
        out[(idx[-1], idx[:-1])] = int(counts[idx])
    return out


def unordered_pairs(counts: np.ndarray, include_self_play: bool = False) -> dict:
    """Collapse a symmetric constant-sum two-player count array to one cell per
    unordered strategy pair ``{a, b}``.

    The row player's counts for ``(a, b)`` and ``(b, a)`` are pooled. Both
    players' payoffs in a pair are determined by that one estimate, and the
    self-play cells are known exactly (0.5 for win rates) unless
    ``include_self_play`` is set.
    """
    counts = np.asarray(counts)
    if counts.ndim != 3 or counts.shape[0] != counts.shape[1] or counts.shape[2] != 2:
        raise ValueError(f"expected a (k, k, 2) count array, got {counts.shape}")
    k = counts.shape[0]
    out = {}
    for a in range(k):
        for b in range(a if include_self_play else a + 1, k):
            n = counts[a, b, 0] + (counts[b, a, 0] if a != b else 0)
            out[(a, b)] = int(n)
    return out


def batch_confidence(counts, epsilon: float, payoff_range: float = 1.0) -> ConfidenceReport:
    """Lower bound on ``P(sup |r - r̂| < ε)`` given ``n`` samples per cell.

    ``counts`` is a mapping ``cell -> n`` (see :func:`ordered_cells`,
    :func:`unordered_pairs`) or any iterable of per-cell sample counts.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not payoff_range > 0:
        raise ValueError("payoff range must be positive")
    if isinstance(counts, Mapping):
        cells = dict(counts)
    else:
        cells = {i: int(n) for i, n in enumerate(np.asarray(list(counts)).ravel())}
    if any(n < 1 for n in cells.values()):
        raise ValueError("every cell needs at least one sample")
    conf = 1.0
    for n in cells.values():
        conf *= _factor(n, epsilon, payoff_range)
    return ConfidenceReport(float(epsilon), conf, cells, float(payoff_range))


def _num_cells(sizes: Iterable[int], p: int | None) -> int:
    sizes = [int(s) for s in sizes]
    p = len(sizes) if p is None else int(p)
    return math.prod(sizes) * p


def uniform_confidence(n: int, sizes: Sequence[int], epsilon: float,
                       payoff_range: float = 1.0, p: int | None = None) -> float:
    """Confidence with ``n`` samples in every (player, joint strategy) cell."""
    if n < 1:
        raise ValueError("n must be >= 1")
    f = _factor(n, epsilon, payoff_range)
    if f == 0.0:
        return 0.0
    return math.exp(_num_cells(sizes, p) * math.log(f))


def _tail(delta, cells):
    # 1 - (1 - δ)^(1/cells), computed without cancellation
    return -math.expm1(math.log1p(-delta) / cells)


def _check_eps_delta(epsilon, delta):
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")


def required_samples(epsilon: float, delta: float, sizes: Sequence[int],
                     payoff_range: float = 1.0, p: int | None = None) -> int:
    """Smallest per-cell ``n`` with ``uniform_confidence(n) >= 1 - delta``.

    Solves ``(1 - 2 exp(-2 (ε/range)² n))^cells = 1 - δ`` in closed form.
    """
    _check_eps_delta(epsilon, delta)
    cells = _num_cells(sizes, p)
    e = epsilon / payoff_range
    n = max(1, math.ceil(-math.log(_tail(delta, cells) / 2.0) / (2.0 * e * e)))
    # the closed form is exact; these loops only absorb floating-point roundoff
    while uniform_confidence(n, sizes, epsilon, payoff_range, p) < 1.0 - delta:
        n += 1
    while n > 1 and uniform_confidence(n - 1, sizes, epsilon, payoff_range, p) >= 1.0 - delta:
        n -= 1
    return n


def required_samples_without_factor(epsilon: float, delta: float, sizes: Sequence[int],
                                    payoff_range: float = 1.0, p: int | None = None) -> int:
    """``ceil(-ln(1 - (1-δ)^(1/cells)) / (2 (ε/range)²))``.

    This drops the factor 2 in front of the exponential, so it solves
    ``(1 - exp(-2 (ε/range)² n))^cells = 1 - δ`` and undershoots
    :func:`required_samples`; kept for comparison only.
    """
    _check_eps_delta(epsilon, delta)
    cells = _num_cells(sizes, p)
    e = epsilon / payoff_range
    return max(1, math.ceil(-math.log(_tail(delta, cells)) / (2.0 * e * e)))

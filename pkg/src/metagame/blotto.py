"""Exact Colonel Blotto payoffs between troop allocations.

A strategy is an allocation of ``m`` troops over ``n`` battlefields whose
arrangement is drawn uniformly at random. The side holding more troops takes a
battlefield; equal troops take it for nobody. The side with more battlefields
wins (1); equal battlefield counts draw (0.5 each).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .hpt import MetaPayoffTable, table_from_matrix


@dataclass(frozen=True)
class BlottoStrategy:
    allocation: tuple

    def __post_init__(self):
        alloc = tuple(int(t) for t in self.allocation)
        if not alloc or min(alloc) < 0:
            raise ValueError(f"allocation must be a non-empty list of non-negative ints: {self.allocation!r}")
        object.__setattr__(self, "allocation", alloc)

    @property
    def m(self) -> int:
        return sum(self.allocation)

    @property
    def n(self) -> int:
        return len(self.allocation)

    @classmethod
    def parse(cls, text: str) -> "BlottoStrategy":
        try:
            return cls(tuple(int(v) for v in text.strip().strip("[]").split(",")))
        except ValueError:
            raise ValueError(f"cannot parse Blotto strategy {text!r}; expected e.g. 36,35,24,3,2") from None

    def __str__(self) -> str:
        return ",".join(str(t) for t in self.allocation)


def _as_strategy(s) -> BlottoStrategy:
    if isinstance(s, BlottoStrategy):
        return s
    if isinstance(s, str):
        return BlottoStrategy.parse(s)
    return BlottoStrategy(tuple(s))


def strategy_count(m: int, n: int) -> int:
    """Number of distinct allocations of ``m`` troops over ``n`` battlefields."""
    if m < 0 or n < 1:
        raise ValueError("need m >= 0 and n >= 1")
    return math.comb(m + n - 1, n - 1)


def distinct_arrangements(allocation: Sequence[int]) -> np.ndarray:
    """Every distinct ordering of ``allocation``; uniform over these equals
    uniform over all ``n!`` permutations since each appears equally often."""
    return np.array(sorted(set(itertools.permutations(allocation))), dtype=np.int64)


def match_payoff_exact(s, t) -> tuple[Fraction, Fraction]:
    s, t = _as_strategy(s), _as_strategy(t)
    if s.n != t.n or s.m != t.m:
        raise ValueError(f"strategies disagree on battlefields/troops: ({s.n}, {s.m}) vs ({t.n}, {t.m})")
    P, Q = distinct_arrangements(s.allocation), distinct_arrangements(t.allocation)
    wins, ties, losses = kernels.blotto_outcomes(P, Q)
    total = 2 * (wins + ties + losses)
    return Fraction(2 * wins + ties, total), Fraction(2 * losses + ties, total)


def match_payoff(s, t) -> tuple[float, float]:
    a, b = match_payoff_exact(s, t)
    return float(a), float(b)


def payoff_matrix_exact(strategies: Sequence) -> list[list[Fraction]]:
    strats = [_as_strategy(s) for s in strategies]
    k = len(strats)
    M = [[Fraction(1, 2)] * k for _ in range(k)]
    for i, j in itertools.combinations(range(k), 2):
        M[i][j], M[j][i] = match_payoff_exact(strats[i], strats[j])
    return M


def blotto_meta_table(strategies: Sequence) -> MetaPayoffTable:
    strats = [_as_strategy(s) for s in strategies]
    if len(strats) < 2:
        raise ValueError("need at least two strategies")
    if len({(s.n, s.m) for s in strats}) != 1:
        raise ValueError("strategies use different troop totals or battlefield counts")
    M = np.array([[float(v) for v in row] for row in payoff_matrix_exact(strats)])
    return table_from_matrix(M, [str(s) for s in strats])

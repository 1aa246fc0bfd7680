import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metagame import fixtures
from metagame.equilibrium import (DegenerateGameWarning, certify_two_epsilon, counterpart_nash_filter,
                                  exploitability, pure_candidates, pure_equilibria,
                                  single_population_equilibria, support_enumeration_2p,
                                  symmetric_equilibria)
from metagame.game import BimatrixGame, NormalFormGame
from metagame.hpt import table_to_matrix


def profiles(cands):
    return sorted(tuple(np.round(np.concatenate(c.profile), 9)) for c in cands)


def solve_fraction(M):
    """Exact solution of ``M q = v·1, Σq = 1`` with rational arithmetic."""
    s = len(M)
    rows = [[Fraction(M[i][j]) for j in range(s)] + [Fraction(-1), Fraction(0)] for i in range(s)]
    rows.append([Fraction(1)] * s + [Fraction(0), Fraction(1)])
    n = s + 1
    for c in range(n):
        piv = next(r for r in range(c, n) if rows[r][c] != 0)
        rows[c], rows[piv] = rows[piv], rows[c]
        for r in range(n):
            if r != c and rows[r][c] != 0:
                f = rows[r][c] / rows[c][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    return [rows[i][n] / rows[i][i] for i in range(n)]


def test_battle_of_sexes_has_three_equilibria():
    cands = support_enumeration_2p(fixtures.load("battle_of_sexes"))
    assert len(cands) == 3
    assert all(c.exploitability <= 1e-12 for c in cands)
    mixed = [c for c in cands if len(c.support[0]) == 2]
    assert len(mixed) == 1
    # row mixes so that the column player is indifferent: 2x = 3(1-x)
    assert np.allclose(mixed[0].profile[0], [0.6, 0.4])
    assert np.allclose(mixed[0].profile[1], [0.4, 0.6])


def test_matching_pennies_unique_mixed():
    A = np.array([[1.0, -1.0], [-1.0, 1.0]])
    cands = support_enumeration_2p(BimatrixGame(A, -A))
    assert len(cands) == 1
    assert np.allclose(cands[0].profile[0], 0.5) and np.allclose(cands[0].profile[1], 0.5)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_random_games_equilibria_verify_and_are_odd(k1, k2, seed):
    r = np.random.default_rng(seed)
    g = BimatrixGame(r.normal(size=(k1, k2)), r.normal(size=(k1, k2)))
    cands = support_enumeration_2p(g)
    assert all(c.exploitability <= 1e-9 for c in cands)
    # generic games have an odd number of equilibria, all with equal-size supports
    assert len(cands) % 2 == 1
    pure = {tuple(j) for j in pure_equilibria(g)}
    found_pure = {(c.support[0][0], c.support[1][0]) for c in cands if len(c.support[0]) == 1}
    assert pure == found_pure


def test_zero_game_warns_about_degeneracy():
    g = BimatrixGame(np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.warns(DegenerateGameWarning):
        cands = support_enumeration_2p(g)
    assert len(cands) == 4 and all(c.exploitability == 0 for c in cands)


def test_constant_sum_blocks_do_not_warn():
    A = table_to_matrix(fixtures.load("blotto_table7").table)
    with warnings.catch_warnings():
        warnings.simplefilter("error", DegenerateGameWarning)
        single_population_equilibria(A)
        support_enumeration_2p(BimatrixGame(A, A.T))


def test_table7_interior_equilibrium_is_exact():
    A = table_to_matrix(fixtures.load("blotto_table7").table)
    eqs = single_population_equilibria(A)
    interior = [x for x in eqs if x.min() > 1e-7]
    assert len(interior) == 1
    exact = solve_fraction([[Fraction(str(v)) for v in row] for row in A])[:3]
    assert exact == [Fraction(2, 7), Fraction(5, 14), Fraction(5, 14)]
    assert np.allclose(interior[0], [float(v) for v in exact], atol=1e-12)


def test_rps_uniform_only():
    A = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
    eqs = single_population_equilibria(A)
    assert len(eqs) == 1 and np.allclose(eqs[0], 1 / 3)


def test_symmetric_equilibria_on_table5():
    cands = symmetric_equilibria(table_to_matrix(fixtures.load("alphago_table5")))
    assert len(cands) == 1
    assert np.allclose(cands[0].profile[0], [1, 0, 0]) and cands[0].exploitability == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_single_population_equilibria_are_symmetric_nash(k, seed):
    A = np.random.default_rng(seed).normal(size=(k, k))
    eqs = single_population_equilibria(A)
    assert eqs  # every symmetric game has a symmetric equilibrium
    g = BimatrixGame(A, A.T)
    for x in eqs:
        assert exploitability(g, (x, x)) <= 1e-9


def test_psro_counterparts():
    g = fixtures.load("psro_leduc")
    A, Bt = np.asarray(g.A), np.asarray(g.B).T
    first = single_population_equilibria(A)
    assert len(first) == 1 and np.allclose(first[0], [1, 0, 0])
    second = single_population_equilibria(Bt)
    supports = sorted(tuple(np.flatnonzero(x > 1e-7)) for x in second)
    assert supports == [(0,), (0, 2), (2,)]
    cands = counterpart_nash_filter(g)
    assert len(cands) == 1
    assert np.allclose(cands[0].profile[0], [1, 0, 0]) and np.allclose(cands[0].profile[1], [1, 0, 0])


def test_psro_published_second_counterpart_is_b_not_b_transposed():
    g = fixtures.load("psro_leduc")
    labels, printed = fixtures.load("psro_counterparts")["counterpart2_as_published"]
    assert np.allclose(printed, g.B)
    assert not np.allclose(printed, np.asarray(g.B).T)


def test_counterpart_filter_battle_of_sexes():
    g = fixtures.load("battle_of_sexes")
    assert profiles(counterpart_nash_filter(g)) == profiles(support_enumeration_2p(g))


def test_counterpart_filter_subset_of_support_enumeration(rng):
    for _ in range(20):
        g = BimatrixGame(rng.normal(size=(3, 3)), rng.normal(size=(3, 3)))
        full = profiles(support_enumeration_2p(g))
        for p in profiles(counterpart_nash_filter(g)):
            assert any(np.allclose(p, q, atol=1e-7) for q in full)


def test_exploitability_properties(rng):
    g = BimatrixGame(rng.normal(size=(3, 3)), rng.normal(size=(3, 3)))
    for _ in range(10):
        prof = (rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3)))
        assert exploitability(g, prof) >= 0
    for c in support_enumeration_2p(g):
        assert exploitability(g, c.profile) <= 1e-9


def test_three_player_pure_equilibria_against_brute_force(rng):
    R = rng.normal(size=(2, 2, 2, 3))
    g = NormalFormGame(R)
    want = []
    for j in np.ndindex(2, 2, 2):
        ok = all(R[j][i] >= max(R[j[:i] + (a,) + j[i + 1:]][i] for a in range(2)) for i in range(3))
        if ok:
            want.append(j)
    assert pure_equilibria(g) == want
    for c in pure_candidates(g):
        assert c.exploitability == 0.0


def test_candidate_to_dict():
    c = support_enumeration_2p(fixtures.load("battle_of_sexes"))[0]
    d = c.to_dict()
    assert set(d) == {"profile", "exploitability", "support", "method"}
    assert d["method"] == "support_enum"


def test_certify_two_epsilon():
    c = support_enumeration_2p(fixtures.load("battle_of_sexes"))[0]
    assert certify_two_epsilon(c, 0.15) == 0.3
    with pytest.raises(ValueError):
        certify_two_epsilon(c, -0.1)
    bad = type(c)(c.profile, 0.5, c.support)
    with pytest.raises(ValueError):
        certify_two_epsilon(bad, 0.1)


def test_max_support_limits_search():
    g = fixtures.load("battle_of_sexes")
    assert len(support_enumeration_2p(g, max_support=1)) == 2

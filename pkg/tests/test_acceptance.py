"""Acceptance criteria, one test each. Every test records a PASS/FAIL line that
is repeated in the pytest terminal summary. Tolerances are fixed here."""

import filecmp
import subprocess
import sys
import time

import numpy as np

from metagame import fixtures
from metagame.blotto import match_payoff, match_payoff_exact
from metagame.bounds import batch_confidence, required_samples, uniform_confidence
from metagame.dynamics import classify, integrate, integrate_many, simplex_lattice, single_population_field
from metagame.equilibrium import (counterpart_nash_filter, exploitability, pure_candidates,
                                  single_population_equilibria, support_enumeration_2p)
from metagame.game import BimatrixGame, NormalFormGame
from metagame.hpt import meta_expected_payoff, table_from_matrix

# pinned tolerances and budgets
BLOTTO_BUDGET_S = 1.0
CONF_RANGES = [((63, 65, 133), 0.78, 0.79), ((65, 106, 91), 0.845, 0.855)]
VERIFY_TOL = 1e-9
PSRO_BUDGET_S = 1.0
VERTEX_TOL = 1e-3
DYNAMICS_BUDGET_S = 5.0
LEMMA_SLACK = 1e-9
HPT_TOL = 1e-10


def _warm_up():
    # compile the numba kernels once so the timed sections measure steady state
    match_payoff("1,1", "2,0")
    integrate(single_population_field(np.eye(3)), [0.2, 0.3, 0.5], t_end=0.1)


def test_ac1_blotto_exactness(record):
    _warm_up()
    S1, S2, S3 = "36,35,24,3,2", "37,37,21,3,2", "35,35,26,2,2"
    T1, T2, T3 = "20,20,20,20,20", "1,32,33,1,33", "10,10,35,35,10"
    cases = [
        ("T6", S1, S3, (0.66, 0.34)),
        ("T6", S1, S2, (0.33, 0.67)),
        ("T6", S2, S3, (0.75, 0.25)),
        ("T7", T1, T3, (1.0, 0.0)),
        ("T7", T1, T2, (0.0, 1.0)),
        ("T7", T2, T3, (0.1, 0.9)),
    ]
    t0 = time.perf_counter()
    got = [match_payoff_exact(s, t) for _, s, t, _ in cases]
    elapsed = time.perf_counter() - t0
    parts, ok = [], elapsed < BLOTTO_BUDGET_S
    for (tag, s, t, want), (a, b) in zip(cases, got):
        rounded = (round(float(a), 2), round(float(b), 2))
        hit = rounded == want
        ok &= hit
        parts.append(f"{tag} [{s}] vs [{t}] exact {a}/{b} -> {rounded[0]:.2f}/{rounded[1]:.2f} "
                     f"(want {want[0]:.2f}/{want[1]:.2f}){'' if hit else ' MISMATCH'}")
    record(1, "Blotto exactness", ok, "; ".join(parts) + f"; {elapsed * 1e3:.1f} ms")
    assert ok


def test_ac2_confidence_regression(record):
    parts, ok = [], True
    for counts, lo, hi in CONF_RANGES:
        c = batch_confidence(counts, 0.15, 1.0).confidence
        ok &= lo <= c <= hi
        parts.append(f"{counts} -> {c:.4f} in [{lo}, {hi}]")
    record(2, "confidence regression", ok, "; ".join(parts))
    assert ok


def test_ac3_psro_counterparts(record):
    g = fixtures.load("psro_leduc")
    t0 = time.perf_counter()
    cands = counterpart_nash_filter(g)
    first = single_population_equilibria(np.asarray(g.A))
    second = single_population_equilibria(np.asarray(g.B).T)
    elapsed = time.perf_counter() - t0
    e1, e3 = np.eye(3)[0], np.eye(3)[2]
    ok_filter = (len(cands) == 1 and np.array_equal(cands[0].profile[0], e1)
                 and np.array_equal(cands[0].profile[1], e1) and cands[0].exploitability <= VERIFY_TOL)
    ok_first = len(first) == 1 and np.allclose(first[0], e1)
    mixed = [x for x in second if (x > 1e-7).sum() == 2]
    ok_second = (len(second) == 3 and any(np.allclose(x, e1) for x in second)
                 and any(np.allclose(x, e3) for x in second)
                 and len(mixed) == 1 and mixed[0][1] == 0.0)
    ok = ok_filter and ok_first and ok_second and elapsed < PSRO_BUDGET_S
    mix = np.round(mixed[0], 4).tolist() if mixed else None
    record(3, "PSRO counterpart analysis", ok,
           f"filter {[np.round(np.concatenate(c.profile), 6).tolist() for c in cands]}; "
           f"counterpart 1 {len(first)} eq; counterpart 2 pure D, pure F, mixed {mix}; {elapsed * 1e3:.1f} ms")
    assert ok


def test_ac4_alphago_attractor(record):
    _warm_up()
    field = single_population_field(fixtures.load("alphago_table5"))
    starts = simplex_lattice(3, 5, interior=True)
    t0 = time.perf_counter()
    trajs = integrate_many(field, starts, t_end=200.0, step=0.01)
    elapsed = time.perf_counter() - t0
    dist = [float(np.abs(t.final - [1, 0, 0]).max()) for t in trajs]
    ok = len(trajs) == 6 and max(dist) <= VERTEX_TOL and elapsed < DYNAMICS_BUDGET_S
    record(4, "AlphaGo attractor", ok,
           f"{len(trajs)} interior starts, max distance to a_rvp {max(dist):.2e}; {elapsed:.2f} s")
    assert ok


def test_ac5_cycling(record):
    _warm_up()
    field = single_population_field(fixtures.load("blotto_table7").table)
    t0 = time.perf_counter()
    traj = integrate(field, [0.6, 0.25, 0.15], t_end=200.0, step=0.01)
    label = classify(traj)
    elapsed = time.perf_counter() - t0
    ok = label == "cycling" and elapsed < DYNAMICS_BUDGET_S
    record(5, "cycling", ok, f"label {label}, min coordinate {traj.points.min():.3f}; {elapsed:.2f} s")
    assert ok


def _perturbed_equilibria(rng, n_players, eps):
    if n_players == 2:
        k1, k2 = rng.integers(2, 4, size=2)
        true = rng.uniform(-1, 1, size=(k1, k2, 2))
        noise = rng.uniform(-eps, eps, size=true.shape)
        noise[rng.random(true.shape) < 0.3] = eps * rng.choice([-1, 1])
        est = BimatrixGame(true[..., 0] + noise[..., 0], true[..., 1] + noise[..., 1])
        return NormalFormGame(true), support_enumeration_2p(est)
    true = rng.uniform(-1, 1, size=(2, 2, 2, 3))
    noise = rng.uniform(-eps, eps, size=true.shape)
    return NormalFormGame(true), pure_candidates(NormalFormGame(true + noise))


def test_ac6_lemma_property(record):
    rng = np.random.default_rng(2024)
    worst, checked, ok = -np.inf, 0, True
    for g in range(100):
        eps = float(rng.uniform(0.01, 0.3))
        true, cands = _perturbed_equilibria(rng, 2 if g % 2 == 0 else 3, eps)
        for c in cands:
            if c.exploitability > VERIFY_TOL:
                continue
            gap = exploitability(true, c.profile) - 2 * eps
            worst = max(worst, gap)
            ok &= gap <= LEMMA_SLACK
            checked += 1
    ok &= checked >= 100
    record(6, "lemma property suite", ok,
           f"{checked} equilibria of perturbed games over 100 games; max(exploitability - 2 eps) = {worst:.3e}")
    assert ok


def test_ac7_hpt_oracle(record):
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(200):
        k = int(rng.integers(1, 5))
        A = rng.uniform(-1, 1, size=(k, k))
        x = rng.dirichlet(np.ones(k))
        if k > 1 and rng.random() < 0.3:
            x[rng.integers(k)] = 0.0
            x /= x.sum()
        got = meta_expected_payoff(table_from_matrix(A), x)
        sup = x > 0
        worst = max(worst, float(np.abs(got - A @ x)[sup].max()))
    ok = worst <= HPT_TOL
    record(7, "HPT oracle equivalence", ok, f"200 games, max |meta - Ax| on support = {worst:.2e}")
    assert ok


def test_ac8_sample_size_round_trip(record):
    rng = np.random.default_rng(8)
    worst, ok = np.inf, True
    for _ in range(100):
        eps = float(rng.uniform(0.005, 0.5))
        delta = float(rng.uniform(0.001, 0.5))
        sizes = [int(v) for v in rng.integers(1, 6, size=int(rng.integers(2, 4)))]
        rng_ = float(rng.uniform(0.5, 30.0))
        n = required_samples(eps, delta, sizes, rng_)
        slack = uniform_confidence(n, sizes, eps, rng_) - (1 - delta)
        worst = min(worst, slack)
        ok &= slack >= 0
    leduc = required_samples(0.05, 0.05, [3, 3], 26.0)
    record(8, "sample-size round trip", ok,
           f"100 settings, min(confidence - (1 - delta)) = {worst:.2e}; Leduc eps=0.05 delta=0.05 range 26 -> n={leduc}")
    assert ok


def _cli(out, *argv):
    subprocess.run([sys.executable, "-m", "metagame", *argv, "--out-dir", str(out)],
                   check=True, capture_output=True)


def test_ac9_determinism(record, tmp_path):
    runs = {
        "trajectories-table5": ["trajectories", "--input", "fixture:alphago_table5"],
        "trajectories-table7": ["trajectories", "--input", "fixture:blotto_table7",
                                "--starts", "0.6,0.25,0.15", "--format", "csv,svg,json"],
        "blotto": ["blotto", "36,35,24,3,2", "37,37,21,3,2", "35,35,26,2,2"],
    }
    parts, ok = [], True
    for name, argv in runs.items():
        a, b = tmp_path / f"{name}-1", tmp_path / f"{name}-2"
        _cli(a, *argv)
        _cli(b, *argv)
        files = sorted(p.name for p in a.iterdir())
        same = files == sorted(p.name for p in b.iterdir()) and all(
            filecmp.cmp(a / f, b / f, shallow=False) for f in files)
        ok &= same and bool(files)
        parts.append(f"{name} {len(files)} files {'identical' if same else 'DIFFER'}")
    record(9, "determinism", ok, "; ".join(parts))
    assert ok

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import sample_cov_se
from ranklab import rng
from ranklab.constants import KAPPA
from ranklab.estimators import average_selmer_rank
from ranklab.predictor import predict_avg_selmer_rank
from ranklab.rank_model import DEFAULT_PARAMS, rho, theta
from ranklab.simulator import (
    MW,
    SHA,
    RngState,
    SimConfig,
    SimulationCapError,
    TestCurve,
    cumulative_count,
    curves_at_height,
    rank_of,
    sample_test_curve,
    simulate_sequence,
)

P = DEFAULT_PARAMS


@pytest.fixture(scope="module")
def sim7():
    return simulate_sequence(SimConfig(max_height=10**7, seed=11))


def test_uniforms_are_keyed_and_in_range():
    h = np.arange(1, 100001, dtype=np.int64)
    u = rng.uniforms(5, h, 0, rng.DRAW_SELMER)
    assert np.all((u >= 0) & (u < 1))
    assert abs(u.mean() - 0.5) < 0.005
    assert np.array_equal(u, rng.uniforms(5, h, 0, rng.DRAW_SELMER))
    assert not np.array_equal(u, rng.uniforms(6, h, 0, rng.DRAW_SELMER))
    assert not np.array_equal(u, rng.uniforms(5, h, 0, rng.DRAW_SYMBOLS))
    # the value for one key does not depend on which other keys are drawn with it
    assert rng.uniforms(5, h[777:778], 0, rng.DRAW_SELMER)[0] == u[777]


def test_rank_of():
    assert rank_of(TestCurve(10, 1, ())) == 1
    assert rank_of(TestCurve(10, 4, (MW, MW))) == 4
    assert rank_of(TestCurve(10, 5, (SHA, SHA))) == 1
    assert rank_of(TestCurve(18932679356, 3, (SHA,))) == 1
    assert rank_of(TestCurve(107245762628, 4, (MW, SHA))) == 2


def test_test_curve_validation():
    with pytest.raises(ValueError):
        TestCurve(10, 4, (MW,))
    with pytest.raises(ValueError):
        TestCurve(0, 1, ())


def test_deterministic_counts():
    assert curves_at_height(1) == 0
    total = int(np.sum(curves_at_height(np.arange(1, 10**6 + 1))))
    assert total == math.floor(KAPPA * 10**5) == 48446


def test_prefix_counts_track_kappa():
    X = np.unique(np.geomspace(1, 10**8, 1000).astype(np.int64))
    assert np.all(np.abs(cumulative_count(X) - KAPPA * X.astype(float) ** (5 / 6)) <= 1)


def test_bernoulli_counts_concentrate():
    heights = np.arange(1, 10**6 + 1)
    sums = [int(np.sum(curves_at_height(heights, "bernoulli", seed))) for seed in range(30)]
    assert abs(np.mean(sums) - KAPPA * 1e5) <= 3 * math.sqrt(KAPPA * 1e5)


def test_degenerate_sampler():
    only3 = P.replace(
        s=tuple(1.0 if n == 3 else 0.0 for n in range(6)),
        theta={n: (0.0, 0.1) for n in range(1, 6)},
        rho={3: (1e-300, 0.0)},
    )
    curve = sample_test_curve(1234, RngState(seed=3, index=0), only3)
    assert curve == TestCurve(1234, 3, (SHA,)) and rank_of(curve) == 1


def test_sample_matches_sequence():
    data = simulate_sequence(SimConfig(max_height=20000, seed=4))
    for i in range(0, len(data), 97):
        h = int(data.height[i])
        index = i - int(np.searchsorted(data.height, h))
        c = sample_test_curve(h, RngState(seed=4, index=index))
        assert (c.selmer_rank, rank_of(c)) == (int(data.selmer_rank[i]), int(data.rank[i]))


def test_parity_and_bounds(sim7):
    assert np.all(sim7.rank % 2 == sim7.selmer_rank % 2)
    assert np.all(sim7.rank <= sim7.selmer_rank)
    assert sim7.selmer_rank.max() <= 5


def test_selmer_histogram_near_1e7():
    data = simulate_sequence(SimConfig(max_height=10**7, seed=12))
    tail = data.window(10**7 - 400_000, 400_000)
    sel = data.selmer_rank[tail]
    H = data.height[tail].astype(float)
    M = len(sel)
    assert M > 10_000
    for n in range(1, 6):
        t = theta(n, H)
        assert abs(np.mean(sel == n) - t.mean()) <= 4 * math.sqrt(float(np.sum(t * (1 - t)))) / M


def test_average_selmer_rank_matches_prediction(sim7):
    H = sim7.height.astype(float)
    per_curve_mean = sum(n * theta(n, H) for n in range(1, 6))
    per_curve_sq = sum(n * n * theta(n, H) for n in range(1, 6))
    sem = math.sqrt(float(np.sum(per_curve_sq - per_curve_mean**2))) / len(H)
    assert abs(average_selmer_rank(sim7, 10**7) - predict_avg_selmer_rank(1e7)) <= 4 * sem


def test_covariance_of_rank4_symbols():
    data = simulate_sequence(SimConfig(max_height=4 * 10**7, seed=13))
    top = data.window(10**6, 4 * 10**7)
    mask = data.selmer_rank[top] == 4
    ranks = data.rank[top][mask]
    r = rho(4, data.height[top][mask].astype(float))
    assert np.all((1 - r) ** 2 > 0.025)  # the covariance is feasible at every height used
    p11 = r * r - 0.025
    rbar = np.mean(ranks) / 4
    est = np.mean(ranks == 4) - rbar**2
    vF, vR, cFR = sample_cov_se(p11, r, -0.025)
    sem = math.sqrt(float(np.sum(vF - 4 * rbar * cFR + 4 * rbar**2 * vR))) / len(ranks)
    # the estimator's target under the model; it differs from -0.025 only by the spread of rho over heights
    target = np.mean(p11) - np.mean(r) ** 2
    assert abs(target + 0.025) < sem
    assert abs(est - target) <= 4 * sem


def test_meta_and_empty():
    empty = simulate_sequence(SimConfig(max_height=0, seed=1))
    assert len(empty) == 0
    data = simulate_sequence(SimConfig(max_height=1000, seed=1))
    assert data.meta["seed"] == 1 and data.meta["params_hash"] == P.params_hash()
    assert data.meta["nmax_modeled"] == 5


def test_seeds_differ():
    a = simulate_sequence(SimConfig(max_height=10**5, seed=1))
    b = simulate_sequence(SimConfig(max_height=10**5, seed=2))
    assert np.array_equal(a.height, b.height)
    assert not np.array_equal(a.selmer_rank, b.selmer_rank)


def test_cap():
    with pytest.raises(SimulationCapError):
        simulate_sequence(SimConfig(max_height=10**7, seed=1), cap=1000)


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2**63 - 1), st.integers(min_value=1, max_value=3 * 10**6))
def test_workers_do_not_change_output(seed, max_height):
    cfg = SimConfig(max_height=max_height, seed=seed)
    a = simulate_sequence(cfg, workers=1)
    b = simulate_sequence(cfg, workers=3)
    assert np.array_equal(a.selmer_rank, b.selmer_rank) and np.array_equal(a.rank, b.rank)


def test_bernoulli_mode_runs():
    data = simulate_sequence(SimConfig(max_height=10**6, seed=3, count_mode="bernoulli"))
    assert abs(len(data) - KAPPA * 1e5) <= 5 * math.sqrt(KAPPA * 1e5)
    with pytest.raises(ValueError):
        SimConfig(max_height=10, seed=1, count_mode="poisson")

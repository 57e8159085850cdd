import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divnfr.baseline import build_bsr
from divnfr.catalog import synth_relevance, zipf_direct_demand
from divnfr.demand import (check_policy, entropy_of_demand, entropy_of_policy_row,
                           expected_cost, expected_session_frequency, sample_recommendation_list,
                           simulate_sessions, stationary_demand, total_variation, write_trace)
from divnfr.errors import DomainError, NumericalError, ShapeError

from conftest import random_policy

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


def renewal_series(p0, R, alpha, N, terms=200):
    """(1 - alpha) sum_k alpha^k p0 (R/N)^k, truncated."""
    acc = np.zeros_like(p0)
    v = np.array(p0, dtype=float)
    for k in range(terms + 1):
        acc += alpha**k * v
        v = v @ R / N
    return (1 - alpha) * acc


def test_two_item_hand_solution():
    np.testing.assert_allclose(stationary_demand([1, 0], SWAP, 0.5, 1), [2 / 3, 1 / 3], atol=1e-15)


def test_symmetric_circulant_keeps_uniform():
    K, N = 7, 2
    R = np.zeros((K, K))
    for i in range(K):
        R[i, (i + 1) % K] = R[i, (i - 1) % K] = 1.0
    for alpha in (0.1, 0.5, 0.99):
        np.testing.assert_allclose(stationary_demand(np.full(K, 1 / K), R, alpha, N),
                                   np.full(K, 1 / K), atol=1e-14)


def test_two_cycle_traps_mass():
    R = np.zeros((4, 4))
    R[0, 1] = R[1, 0] = R[2, 0] = R[3, 1] = 1.0
    p = stationary_demand(np.full(4, 0.25), R, 0.99, 1)
    # independent solve of the same linear system
    ref = np.linalg.solve((np.eye(4) - 0.99 * R).T, 0.01 * np.full(4, 0.25))
    np.testing.assert_allclose(p, ref, atol=1e-12)
    assert p[0] + p[1] >= 0.97


def test_stationary_rejects_bad_inputs():
    with pytest.raises(DomainError):
        stationary_demand([1, 0], SWAP, 1.0, 1)
    with pytest.raises(ShapeError):
        stationary_demand([1, 0, 0], SWAP, 0.5, 1)
    with pytest.raises(NumericalError):
        # not a valid policy: rows summing to 2N make I - alpha/N R singular
        stationary_demand([0.5, 0.5], 2 * SWAP, 0.5, 1)


def test_normalization_and_renewal_1000(rng):
    for _ in range(1000):
        K = int(rng.integers(2, 31))
        N = int(rng.integers(1, K))
        alpha = float(rng.uniform(0.01, 0.9))
        p0 = rng.dirichlet(np.ones(K))
        R = random_policy(K, N, rng)
        p = stationary_demand(p0, R, alpha, N)
        assert abs(p.sum() - 1) <= 1e-9
        assert np.max(np.abs(p - renewal_series(p0, R, alpha, N))) <= 1e-8


def test_session_frequency_converges():
    U = synth_relevance(10, 0.4, 2)
    R, _ = build_bsr(U, 2)
    p0 = zipf_direct_demand(10, 1)
    p = stationary_demand(p0, R, 0.8, 2)
    assert expected_session_frequency(p0, R, 0.8, 2, 1)[0] == p0[0]
    for L in (100, 1000, 10_000):
        bias = total_variation(expected_session_frequency(p0, R, 0.8, 2, L), p)
        assert bias <= 1.0 / ((1 - 0.8) * L)


@pytest.mark.parametrize("p,c,value", [
    ([2 / 3, 1 / 3], [0, 1], 1 / 3),
    ([0.3, 0.7], [0, 0], 0.0),
    ([0.1, 0.4, 0.5], [1, 0, 1], 0.6),
])
def test_expected_cost(p, c, value):
    assert expected_cost(p, c) == pytest.approx(value, abs=1e-15)


def test_entropy_examples():
    assert entropy_of_demand(np.full(4, 0.25)) == pytest.approx(math.log(4), abs=1e-15)
    assert entropy_of_demand([0, 1, 0]) == 0.0
    assert entropy_of_demand([0.5, 0.25, 0.25]) == pytest.approx(1.5 * math.log(2), abs=1e-15)


def test_policy_row_entropy():
    assert entropy_of_policy_row(np.array([[0, 1, 1, 0]]), 0) == 0.0
    uniform = np.array([[0, 0.5, 0.5, 0.5, 0.5]])
    assert entropy_of_policy_row(uniform, 0) == pytest.approx(2 * math.log(2), abs=1e-15)
    assert entropy_of_policy_row(np.array([[1, 0.5, 0.5, 0]]), 0) == pytest.approx(math.log(2))


@given(st.integers(1, 40), st.integers(0, 10_000))
@settings(max_examples=80, deadline=None)
def test_entropy_bounds_and_base_invariance(K, seed):
    g = np.random.default_rng(seed)
    p = g.dirichlet(np.full(K, 0.3))
    q = g.dirichlet(np.ones(K))
    h = entropy_of_demand(p)
    assert -1e-12 <= h <= math.log(K) + 1e-12
    hq = entropy_of_demand(q)
    if hq > 1e-9:
        with np.errstate(divide="ignore", invalid="ignore"):
            h2 = lambda x: -np.nansum(np.where(x > 0, x * np.log2(x), 0.0))
        assert h / hq == pytest.approx(h2(p) / h2(q), rel=1e-12)


def test_check_policy():
    check_policy(SWAP, 1)
    with pytest.raises(DomainError):
        check_policy(np.array([[0.5, 0.5], [1, 0]]), 1)
    with pytest.raises(DomainError):
        check_policy(np.array([[0, 0.9], [1, 0]]), 1)


def test_mc_two_item_within_three_stderr():
    sessions, L = 100, 10_000
    sim = simulate_sessions([1, 0], SWAP, 0.5, 1, L, sessions, seed=5)
    exact = expected_session_frequency([1, 0], SWAP, 0.5, 1, L)
    assert np.all(np.abs(sim.demand - exact) <= 3 * sim.stderr)
    closed = stationary_demand([1, 0], SWAP, 0.5, 1)
    bias = 1.0 / ((1 - 0.5) * L)
    assert np.all(np.abs(sim.demand - closed) <= 3 * sim.stderr + bias)


def test_mc_bsr_entropy_not_above_closed_form():
    U = synth_relevance(12, 0.3, 8)
    R, _ = build_bsr(U, 2)
    p0 = zipf_direct_demand(12, 0)
    sim = simulate_sessions(p0, R, 0.99, 2, 2000, 200, seed=1)
    h = entropy_of_demand(stationary_demand(p0, R, 0.99, 2))
    # sampling noise on the plug-in estimate is well below 0.05 here
    assert entropy_of_demand(sim.demand) <= h + 0.05


def test_single_draw_session():
    sim = simulate_sessions([0.2, 0.8], SWAP, 0.5, 1, 1, 1, seed=0)
    assert sorted(sim.demand.tolist()) == [0.0, 1.0]


def test_simulation_is_deterministic_and_costed():
    U = synth_relevance(6, 0.5, 1)
    R, _ = build_bsr(U, 2)
    p0 = zipf_direct_demand(6, 1)
    c = np.array([0, 1, 1, 0, 1, 1.0])
    a = simulate_sessions(p0, R, 0.7, 2, 50, 20, seed=3, costs=c)
    b = simulate_sessions(p0, R, 0.7, 2, 50, 20, seed=3, costs=c)
    np.testing.assert_array_equal(a.demand, b.demand)
    assert a.cost == pytest.approx(float(c @ a.demand))


def test_materialized_lists_same_marginals(rng):
    R = random_policy(6, 3, rng)
    counts = np.zeros(6)
    for _ in range(20_000):
        lst = sample_recommendation_list(R[2], rng)
        assert len(set(lst.tolist())) == 3 and 2 not in lst
        counts[lst] += 1
    np.testing.assert_allclose(counts / 20_000, R[2], atol=0.02)


def test_materialized_mode_agrees_with_closed_form(rng):
    R = random_policy(5, 2, rng)
    p0 = np.full(5, 0.2)
    sim = simulate_sessions(p0, R, 0.6, 2, 2000, 50, seed=2, materialize_lists=True)
    exact = expected_session_frequency(p0, R, 0.6, 2, 2000)
    assert total_variation(sim.demand, exact) <= 0.01


def test_trace_dump(tmp_path):
    trace = []
    simulate_sessions([0.5, 0.5], SWAP, 0.5, 1, 5, 2, seed=0, costs=[0, 1], trace=trace)
    assert len(trace) == 10 and trace[0][3] is False
    path = tmp_path / "trace.csv"
    write_trace(trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "session,step,item,followed,cost" and len(lines) == 11
    assert {ln.split(",")[2] for ln in lines[1:]} <= {"1", "2"}

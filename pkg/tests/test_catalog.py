import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divnfr.catalog import (ScenarioConfig, build_costs, load_relevance, load_scenario,
                            parse_scenario, preprocess_relevance, save_relevance,
                            synth_relevance, zipf_direct_demand)
from divnfr.errors import ConfigError, DomainError, ParseError, ShapeError

DATA = Path(__file__).parent / "data"


def write(tmp_path, text, name="u.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_dense_threshold(tmp_path):
    u = load_relevance(write(tmp_path, "0,0.6\n0.4,0\n"), 0.5)
    np.testing.assert_array_equal(u, [[0, 0.6], [0, 0]])


def test_dense_all_relevant_unchanged(tmp_path):
    u = load_relevance(write(tmp_path, "0,0.9,0.9\n0.9,0,0.9\n0.9,0.9,0\n"), 0.5)
    np.testing.assert_array_equal(u, 0.9 * (1 - np.eye(3)))


def test_triplet_file(tmp_path):
    u = load_relevance(write(tmp_path, "i,j,u\n1,2,0.7\n2,1,0.55\n1,3,0.49\n"), 0.5)
    expected = np.zeros((3, 3))
    expected[0, 1], expected[1, 0] = 0.7, 0.55
    np.testing.assert_array_equal(u, expected)


def test_diagonal_forced_to_zero(tmp_path):
    u = load_relevance(write(tmp_path, "0.8,0.6\n0.7,0.9\n"), 0.5)
    assert u[0, 0] == 0 and u[1, 1] == 0


def test_malformed_row_reports_line(tmp_path):
    with pytest.raises(ParseError, match="line 2"):
        load_relevance(write(tmp_path, "0,0.6\n0.4,abc\n"), 0.5)


def test_non_square_dense(tmp_path):
    with pytest.raises(ShapeError):
        load_relevance(write(tmp_path, "0,0.6,0.7\n0.4,0,0.1\n"), 0.5)


def test_out_of_range_value(tmp_path):
    with pytest.raises(DomainError):
        load_relevance(write(tmp_path, "0,1.6\n0.4,0\n"), 0.5)


def test_load_is_idempotent(tmp_path):
    u = load_relevance(write(tmp_path, "0,0.6,0.3\n0.4,0,0.8\n0.55,0.2,0\n"), 0.5)
    out = tmp_path / "again.csv"
    save_relevance(u, out)
    np.testing.assert_array_equal(load_relevance(out, 0.5), u)
    np.testing.assert_array_equal(preprocess_relevance(u, 0.5), u)


def test_sparse_round_trip(tmp_path):
    u = synth_relevance(6, 0.5, 3)
    out = tmp_path / "sparse.csv"
    save_relevance(u, out, sparse=True)
    np.testing.assert_array_equal(load_relevance(out, 0.5), u)


def test_synth_density_one():
    u = synth_relevance(5, 1.0, 7)
    off = u[~np.eye(5, dtype=bool)]
    assert off.size == 20 and np.all((off >= 0.5) & (off <= 1.0))
    assert np.all(np.diag(u) == 0)


def test_synth_deterministic():
    np.testing.assert_array_equal(synth_relevance(9, 0.3, 4), synth_relevance(9, 0.3, 4))


def test_synth_golden():
    golden = np.loadtxt(DATA / "synth_k4_d05_s1.csv", delimiter=",")
    np.testing.assert_array_equal(synth_relevance(4, 0.5, 1), golden)
    assert np.count_nonzero(golden) == 6


@given(st.integers(2, 25), st.floats(0.05, 1.0), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_synth_invariants(K, density, seed):
    u = synth_relevance(K, density, seed)
    assert np.all(np.diag(u) == 0)
    assert np.all((u == 0) | ((u >= 0.5) & (u <= 1)))
    assert np.all((u > 0).sum(axis=1) >= 1)


@pytest.mark.parametrize("K,pop,expected", [
    (4, 0, [0.25] * 4),
    (2, 1, [2 / 3, 1 / 3]),
    (3, 1, [6 / 11, 3 / 11, 2 / 11]),
])
def test_zipf_examples(K, pop, expected):
    np.testing.assert_allclose(zipf_direct_demand(K, pop), expected, rtol=0, atol=1e-15)


@pytest.mark.parametrize("pop", [0, 0.5, 1, 2])
@pytest.mark.parametrize("K", [1, 7, 100, 10_000])
def test_zipf_normalized_and_monotone(K, pop):
    p = zipf_direct_demand(K, pop)
    assert abs(math.fsum(p) - 1.0) <= 1e-12
    if pop > 0:
        assert np.all(np.diff(p) <= 0)


@pytest.mark.parametrize("p,C,expected", [
    ([0.5, 0.3, 0.2], 1, [0, 1, 1]),
    ([0.25] * 4, 2, [0, 0, 1, 1]),
    ([0.1, 0.4, 0.15, 0.35], 2, [1, 0, 1, 0]),
])
def test_build_costs_examples(p, C, expected):
    np.testing.assert_array_equal(build_costs(p, C), expected)


@given(st.integers(1, 30), st.integers(0, 1000), st.data())
@settings(max_examples=60, deadline=None)
def test_build_costs_properties(K, seed, data):
    C = data.draw(st.integers(0, K))
    p = np.random.default_rng(seed).dirichlet(np.ones(K))
    c = build_costs(p, C)
    assert np.count_nonzero(c == 0) == C and set(np.unique(c)) <= {0.0, 1.0}
    if 0 < C < K:
        assert p[c == 0].min() >= p[c == 1].max()


def test_build_costs_custom():
    np.testing.assert_array_equal(build_costs([0.5, 0.5], 1, "custom", [0.2, 0.7]), [0.2, 0.7])
    with pytest.raises(ConfigError):
        build_costs([0.5, 0.5], 1, "custom")
    with pytest.raises(DomainError):
        build_costs([0.5, 0.5], 1, "custom", [0.2, 1.7])


SCENARIO = """# toy
K=10
N=2
C=2
L=40
alpha=0.8
pop=1
q=0.8
b=0.5
cf=0.1
fairness=max
seed=3
M=50
cut_mode=secant
"""


def test_scenario_round_trip(tmp_path):
    cfg = parse_scenario(SCENARIO)
    assert (cfg.K, cfg.M_cuts, cfg.fairness_kind, cfg.c_f, cfg.cut_mode) == (10, 50, "max", 0.1, "secant")
    path = write(tmp_path, cfg.to_text(), "s.txt")
    assert load_scenario(path) == cfg


@pytest.mark.parametrize("mutate,err", [
    (lambda t: t.replace("K=10\n", ""), ConfigError),
    (lambda t: t + "K=11\n", ConfigError),
    (lambda t: t + "colour=red\n", ConfigError),
    (lambda t: t.replace("N=2", "N=two"), ParseError),
    (lambda t: t.replace("N=2", "N 2"), ParseError),
    (lambda t: t.replace("alpha=0.8", "alpha=1.0"), ConfigError),
    (lambda t: t.replace("N=2", "N=10"), ConfigError),
    (lambda t: t.replace("b=0.5", "b=1.5"), ConfigError),
    (lambda t: t.replace("fairness=max", "fairness=gini"), ConfigError),
])
def test_scenario_rejects(mutate, err):
    with pytest.raises(err):
        parse_scenario(mutate(SCENARIO))


def test_config_replace_validates():
    cfg = ScenarioConfig(K=5, N=2, C=1, alpha=0.5)
    assert cfg.replace(b=0.3).b == 0.3
    with pytest.raises(ConfigError):
        cfg.replace(c_f=-1)

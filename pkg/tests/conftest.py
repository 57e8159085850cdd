import numpy as np
import pytest

from divnfr.baseline import baseline_for_scenario
from divnfr.catalog import ScenarioConfig, synth_relevance
from divnfr.lp import LinearProgram


def make_instance(K=8, seed=0, alpha=0.8, N=2, C=2, pop=1.0, q=0.8, b=0.8,
                  density=0.4, **kw):
    """Seeded synthetic scenario plus its baseline profile."""
    cfg = ScenarioConfig(K=K, N=N, C=C, alpha=alpha, pop=pop, q=q, b=b, seed=seed, **kw)
    U = synth_relevance(K, density, seed)
    return cfg, baseline_for_scenario(cfg, U)


def random_policy(K, N, rng):
    """Random valid policy: each row is a mixture of two random N-subsets."""
    R = np.zeros((K, K))
    for i in range(K):
        others = np.delete(np.arange(K), i)
        w = rng.random()
        R[i, rng.choice(others, N, replace=False)] += w
        R[i, rng.choice(others, N, replace=False)] += 1.0 - w
    return R


def random_lp(rng):
    """Boxed random LP with at most 6 variables and 8 rows."""
    n = int(rng.integers(1, 7))
    m = int(rng.integers(0, 9))
    lp = LinearProgram("rand")
    lo = rng.integers(-3, 1, n).astype(float)
    hi = lo + rng.integers(1, 5, n)
    x = lp.add_block("x", (n,), lower=lo, upper=hi)
    lp.set_objective(x, rng.integers(-5, 6, n).astype(float))
    for _ in range(m):
        a = rng.integers(-4, 5, n).astype(float)
        a[rng.random(n) < 0.3] = 0.0
        sense = rng.choice(["<=", ">=", "="], p=[0.45, 0.4, 0.15])
        lp.add_constraint(x, a, sense, float(rng.integers(-6, 7)))
    return lp.seal()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria record a line here; it is printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])

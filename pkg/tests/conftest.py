import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from eraseg.graph import DistanceMatrix, tree_from_edges
from eraseg.panel import PricePanel

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def codes(n):
    return tuple(f"N{k:02d}" for k in range(n))


def star_tree(n, weight=1.0):
    c = codes(n)
    return tree_from_edges(c, [(c[0], c[k], weight) for k in range(1, n)])


def path_tree(n, weight=1.0):
    c = codes(n)
    return tree_from_edges(c, [(c[k], c[k + 1], weight) for k in range(n - 1)])


def random_distance(rng, n, ties=False):
    if ties:
        # few distinct values so that equal weights are common
        w = rng.integers(1, 4, size=(n, n)) / 4.0
    else:
        w = rng.uniform(0.0, 1.0, size=(n, n))
    d = np.triu(w, 1)
    d = d + d.T
    return DistanceMatrix(codes(n), d)


def random_panel(rng, n_countries=4, n_months=96, start="1990-01"):
    x = np.cumsum(rng.normal(0, 0.05, size=(n_months, n_countries)), axis=0)
    dates = np.datetime64(start, "M") + np.arange(n_months)
    return PricePanel(dates, tuple(f"C{k}" for k in range(n_countries)), 100 * np.exp(x))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    # acceptance lines are captured per test; repeat them in one block
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)

import os
from pathlib import Path

import numpy as np
import pytest

from expandgraph.filters import FilterSpec, build_shifted_matrix
from expandgraph.graph import erdos_renyi
from expandgraph.optimizer import TrainingSet

ML100K = Path(os.environ.get("ML100K_PATH", "/root/data/ml-100k/u.data"))


def random_problem(rng, n=10, L=3, T=5, p_edge=0.3):
    """Small graph, signal, filter and training set with random attachments."""
    g = erdos_renyi(n, p_edge, int(rng.integers(2**31)))
    x = rng.standard_normal(n)
    f = FilterSpec(rng.uniform(-1, 1, L))
    Ax = build_shifted_matrix(g, x, L)
    b = (rng.random((T, n)) < 0.4).astype(float)
    a = b * rng.uniform(0, 1, (T, n))
    ts = TrainingSet(rng.standard_normal(T), a, b)
    return g, x, f, Ax, ts


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def movielens_path():
    if not ML100K.exists():
        pytest.fail(f"MovieLens-100K u.data not found at {ML100K}; set ML100K_PATH")
    return ML100K


ACCEPTANCE = {}


def record(criterion, ok, detail):
    """Store one acceptance verdict for the end-of-run summary and return it."""
    ACCEPTANCE[criterion] = (bool(ok), detail)
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

"""Reference attachment rules and the per-user mean rating predictor."""

import numpy as np

from .graph import Graph, degree_vector
from .optimizer import as_training_set


def uniform_attachment(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"node count must be positive, got {n}")
    return np.full(n, 1.0 / n)


def preferential_attachment(g: Graph) -> np.ndarray:
    d = degree_vector(g)
    total = d.sum()
    if total <= 0:
        raise ValueError("preferential attachment needs at least one edge")
    return d / total


def training_mean(training):
    """Average binary pattern and average weighted attachment over the training set."""
    ts = as_training_set(training)
    return ts.b.mean(axis=0), ts.a.mean(axis=0)


def user_mean_prediction(user_ratings) -> float:
    r = np.asarray(list(user_ratings), dtype=float)
    if r.size == 0:
        raise ValueError("user has no ratings")
    return float(r.mean())

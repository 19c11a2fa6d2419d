"""Independent-Bernoulli attachment model for a single incoming node."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, expand


@dataclass(frozen=True, eq=False)
class AttachmentModel:
    """Edge ``v+ -> v_i`` forms with probability ``p[i]`` and then has weight ``w[i]``."""

    p: np.ndarray
    w: np.ndarray
    w_max: float = 1.0

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        w = np.array(self.w, dtype=float)
        if p.ndim != 1 or p.shape != w.shape:
            raise ValueError(f"p and w must be vectors of equal length, got {p.shape}, {w.shape}")
        if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must lie in [0, 1]")
        if np.any((w < 0) | (w > self.w_max)) or not np.all(np.isfinite(w)):
            raise ValueError(f"weights must lie in [0, {self.w_max}]")
        p.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.p.size


@dataclass(frozen=True, eq=False)
class AttachmentSample:
    a_plus: np.ndarray
    b_plus: np.ndarray


def sample(model: AttachmentModel, seed) -> AttachmentSample:
    rng = np.random.default_rng(seed)
    b = (rng.random(model.n) < model.p).astype(float)
    return AttachmentSample(b * model.w, b)


def sample_many(model: AttachmentModel, count: int, rng) -> np.ndarray:
    """``count`` weighted attachment draws as a ``(count, N)`` array."""
    rng = np.random.default_rng(rng)
    return (rng.random((count, model.n)) < model.p) * model.w


def mean(model: AttachmentModel) -> np.ndarray:
    return model.p * model.w


def covariance_diag(model: AttachmentModel) -> np.ndarray:
    # off-diagonal covariances vanish by independence
    return model.w**2 * model.p * (1.0 - model.p)


def expected_expanded_adjacency(g: Graph, model: AttachmentModel) -> np.ndarray:
    if model.n != g.n:
        raise ValueError(f"model has {model.n} entries but graph has {g.n} nodes")
    return expand(g, mean(model)).adjacency.toarray()


def save_model(model: AttachmentModel, path) -> None:
    fmt = lambda v: " ".join(repr(float(x)) for x in v)  # noqa: E731
    Path(path).write_text(f"w_max={model.w_max!r}\n{fmt(model.p)}\n{fmt(model.w)}\n")


def load_model(path) -> AttachmentModel:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if len(lines) != 3 or not lines[0].startswith("w_max="):
        raise ValueError(f"{path}: expected header 'w_max=<value>' and two vector lines")
    w_max = float(lines[0].split("=", 1)[1])
    p = np.array(lines[1].split(), dtype=float)
    w = np.array(lines[2].split(), dtype=float)
    return AttachmentModel(p, w, w_max)

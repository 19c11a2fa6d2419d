"""Polynomial graph filters and the incoming-node output shortcut."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import IllConditionedError
from .graph import ExpandedGraph, Graph


@dataclass(frozen=True, eq=False)
class FilterSpec:
    """Coefficients ``h[l-1]`` multiplying the ``l``-th shift, ``l = 1..L``."""

    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float).ravel()
        if h.size < 1:
            raise ValueError("filter order must be at least 1")
        if not np.all(np.isfinite(h)):
            raise ValueError("filter coefficients must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def order(self) -> int:
        return self.h.size


def geometric_coefficients(alpha: float, L: int) -> FilterSpec:
    if L < 1:
        raise ValueError(f"filter order must be at least 1, got {L}")
    return FilterSpec(float(alpha) ** np.arange(1, L + 1))


def build_shifted_matrix(g: Graph, x, L: int) -> np.ndarray:
    """``[x, A x, ..., A^{L-1} x]`` by repeated sparse products, O(L E)."""
    x = np.asarray(x, dtype=float)
    if L < 1:
        raise ValueError(f"filter order must be at least 1, got {L}")
    if x.shape != (g.n,):
        raise ValueError(f"signal must have length {g.n}, got shape {x.shape}")
    out = np.empty((g.n, L))
    out[:, 0] = x
    for l in range(1, L):
        out[:, l] = g.adjacency @ out[:, l - 1]
    return out


def interpolate_incoming(a_plus, Ax: np.ndarray, f: FilterSpec) -> float:
    """Filter output at the incoming node, ``a_plus^T Ax h``."""
    a_plus = np.asarray(a_plus, dtype=float)
    if Ax.shape[1] != f.order or a_plus.shape[-1] != Ax.shape[0]:
        raise ValueError(f"dimension mismatch: a_plus {a_plus.shape}, Ax {Ax.shape}, L={f.order}")
    return a_plus @ (Ax @ f.h)


def filter_graph(g: Graph, x, f: FilterSpec) -> np.ndarray:
    """``sum_l h_l A^l x`` on the base graph."""
    y = np.zeros(g.n)
    shifted = np.asarray(x, dtype=float)
    for hl in f.h:
        shifted = g.adjacency @ shifted
        y += hl * shifted
    return y


def filter_expanded(eg: ExpandedGraph, x, f: FilterSpec) -> np.ndarray:
    """Full filter output on the expanded graph with zero signal at the new node."""
    x = np.asarray(x, dtype=float)
    if x.shape != (eg.base.n,):
        raise ValueError(f"signal must have length {eg.base.n}, got shape {x.shape}")
    A = eg.adjacency
    shifted = np.append(x, 0.0)
    y = np.zeros(eg.n)
    for hl in f.h:
        shifted = A @ shifted
        y += hl * shifted
    return y


def fit_coefficients(g: Graph, observed, L: int, ridge: float = 1e-6) -> FilterSpec:
    """Least-squares filter fit on observed node values.

    ``observed`` is an iterable of ``(signal, mask, targets)`` where ``mask``
    selects the nodes whose filter output should match ``targets`` (either
    aligned with the masked nodes or a full-length vector).  Solves the
    ``L x L`` ridge normal equations.
    """
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    gram = np.zeros((L, L))
    rhs = np.zeros(L)
    count = 0
    for signal, mask, targets in observed:
        mask = np.asarray(mask, dtype=bool)
        targets = np.asarray(targets, dtype=float)
        if targets.shape == mask.shape:
            targets = targets[mask]
        if not mask.any():
            continue
        shifted = build_shifted_matrix(g, signal, L + 1)[:, 1:]
        design = shifted[mask]
        gram += design.T @ design
        rhs += design.T @ targets
        count += mask.sum()
    if count == 0:
        raise ValueError("need at least one observed entry")
    gram += ridge * np.eye(L)
    if ridge == 0 and np.linalg.cond(gram) > 1e12:
        raise IllConditionedError("normal equations are singular; use ridge > 0")
    return FilterSpec(scipy.linalg.solve(gram, rhs, assume_a="pos"))


def save_filter(f: FilterSpec, path) -> None:
    Path(path).write_text(" ".join(repr(float(v)) for v in f.h) + "\n")


def load_filter(path) -> FilterSpec:
    return FilterSpec(np.array(Path(path).read_text().split(), dtype=float))

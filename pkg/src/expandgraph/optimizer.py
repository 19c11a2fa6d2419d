"""Closed-form interpolation MSE, regularized training cost and its descent.

Every quantity depends on the graph and signal only through the filtered
vector ``z = Ax @ h``; it is computed once per call, so a cost or gradient
evaluation is O(L E) for ``Ax`` plus O(|T| N) for the regularizers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attachment import AttachmentModel, covariance_diag, mean, save_model
from .errors import DivergenceError
from .filters import FilterSpec

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrainingSample:
    x_plus: float
    a_plus: np.ndarray
    b_plus: np.ndarray


class TrainingSet:
    """Stacked training samples: ``x`` is ``(T,)``, ``a`` and ``b`` are ``(T, N)``."""

    def __init__(self, x, a, b):
        self.x = np.asarray(x, dtype=float).ravel()
        self.a = np.atleast_2d(np.asarray(a, dtype=float))
        self.b = np.atleast_2d(np.asarray(b, dtype=float))
        if self.x.size == 0:
            raise ValueError("training set is empty")
        if self.a.shape != self.b.shape or self.a.shape[0] != self.x.size:
            raise ValueError(f"inconsistent shapes x{self.x.shape} a{self.a.shape} b{self.b.shape}")
        # sufficient statistics for the squared terms
        self.x_sum = self.x.sum()
        self.x_sq = self.x @ self.x
        self.a_sum = self.a.sum(axis=0)
        self.b_sum = self.b.sum(axis=0)
        self.a_sq = (self.a * self.a).sum()
        self.b_sq = (self.b * self.b).sum()

    @classmethod
    def from_samples(cls, samples) -> "TrainingSet":
        samples = list(samples)
        if not samples:
            raise ValueError("training set is empty")
        return cls([s.x_plus for s in samples], [s.a_plus for s in samples],
                   [s.b_plus for s in samples])

    def __len__(self):
        return self.x.size

    def __getitem__(self, idx):
        return TrainingSet(self.x[idx], self.a[idx], self.b[idx])

    def samples(self):
        return [TrainingSample(float(x), a, b) for x, a, b in zip(self.x, self.a, self.b)]


def as_training_set(training) -> TrainingSet:
    return training if isinstance(training, TrainingSet) else TrainingSet.from_samples(training)


@dataclass(frozen=True)
class OptimizerConfig:
    mu_p: float = 1.0
    mu_w: float = 1.0
    q_p: int = 1
    q_w: int = 2
    lambda_p: float = 1e-5
    lambda_w: float = 1e-5
    iterations: int = 1000
    w_max: float = 1.0
    seed: int = 0
    # optional early stop: trailing-window cost range below plateau_tol * |initial cost|
    plateau_tol: float | None = None
    plateau_window: int = 100

    def __post_init__(self):
        if self.q_p not in (1, 2) or self.q_w not in (1, 2):
            raise ValueError("norm exponents must be 1 or 2")
        for name in ("mu_p", "mu_w", "lambda_p", "lambda_w", "w_max"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")


@dataclass
class FitResult:
    p: np.ndarray
    w: np.ndarray
    cost_trace: list = field(default_factory=list)
    w_max: float = 1.0

    @property
    def model(self) -> AttachmentModel:
        return AttachmentModel(self.p, self.w, self.w_max)

    def save(self, model_path, trace_path=None) -> None:
        save_model(self.model, model_path)
        if trace_path is not None:
            rows = "".join(f"{k},{c!r}\n" for k, c in enumerate(self.cost_trace))
            Path(trace_path).write_text("iteration,cost\n" + rows)


def _filtered(Ax, f: FilterSpec) -> np.ndarray:
    Ax = np.asarray(Ax, dtype=float)
    if Ax.ndim != 2 or Ax.shape[1] != f.order:
        raise ValueError(f"Ax must be N x {f.order}, got {Ax.shape}")
    return Ax @ f.h


def closed_form_mse(model: AttachmentModel, Ax, f: FilterSpec, x_star):
    """Expected squared interpolation error: squared bias plus attachment variance.

    ``x_star`` may be an array of targets, giving one MSE per target.
    """
    z = _filtered(Ax, f)
    if z.size != model.n:
        raise ValueError(f"Ax has {z.size} rows but model has {model.n} entries")
    bias = mean(model) @ z - np.asarray(x_star, dtype=float)
    return bias**2 + covariance_diag(model) @ z**2


def _reg(v, targets, q, total, sq):
    if q == 1:
        return np.abs(v - targets).sum()
    # sum_t ||v - t||^2 expanded around the cached sums
    return len(targets) * (v @ v) - 2.0 * (v @ total) + sq


def _reg_grad(v, targets, q, total):
    # sign(0) = 0 for the l1 subgradient
    if q == 1:
        return np.sign(v - targets).sum(axis=0)
    return 2.0 * (len(targets) * v - total)


def _cost(p, w, z, ts: TrainingSet, cfg: OptimizerConfig) -> float:
    T = len(ts)
    s = (w * p) @ z
    bias = T * s * s - 2.0 * s * ts.x_sum + ts.x_sq
    var = T * (z**2 * w**2 * p * (1.0 - p)).sum()
    return (bias + var + cfg.mu_p * _reg(p, ts.b, cfg.q_p, ts.b_sum, ts.b_sq)
            + cfg.mu_w * _reg(w, ts.a, cfg.q_w, ts.a_sum, ts.a_sq))


def _grad_p(p, w, z, ts, cfg):
    T = len(ts)
    resid = T * ((w * p) @ z) - ts.x_sum
    return (2.0 * resid * (w * z) + T * z**2 * w**2 * (1.0 - 2.0 * p)
            + cfg.mu_p * _reg_grad(p, ts.b, cfg.q_p, ts.b_sum))


def _grad_w(p, w, z, ts, cfg):
    T = len(ts)
    resid = T * ((w * p) @ z) - ts.x_sum
    return (2.0 * resid * (p * z) + 2.0 * T * z**2 * w * p * (1.0 - p)
            + cfg.mu_w * _reg_grad(w, ts.a, cfg.q_w, ts.a_sum))


def empirical_cost(p, w, training, Ax, f, cfg: OptimizerConfig) -> float:
    """Summed per-sample MSE plus the ``q``-norm anchors to ``b_t`` and ``a_t``."""
    ts = as_training_set(training)
    return _cost(np.asarray(p, float), np.asarray(w, float), _filtered(Ax, f), ts, cfg)


def grad_p(p, w, training, Ax, f, cfg: OptimizerConfig) -> np.ndarray:
    ts = as_training_set(training)
    return _grad_p(np.asarray(p, float), np.asarray(w, float), _filtered(Ax, f), ts, cfg)


def grad_w(p, w, training, Ax, f, cfg: OptimizerConfig) -> np.ndarray:
    ts = as_training_set(training)
    return _grad_w(np.asarray(p, float), np.asarray(w, float), _filtered(Ax, f), ts, cfg)


def project_box(v, lo: float, hi: float) -> np.ndarray:
    if lo > hi:
        raise ValueError(f"empty box: lo={lo} > hi={hi}")
    return np.clip(np.asarray(v, dtype=float), lo, hi)


def fit(training, Ax, f: FilterSpec, cfg: OptimizerConfig, p_init=None, w_init=None,
        update_p=True, update_w=True, callback=None) -> FitResult:
    """Alternating projected gradient descent on ``(p, w)``.

    Starts from a seeded uniform draw over the feasible boxes unless
    ``p_init``/``w_init`` are given.  Each iteration takes a projected step in
    ``p`` and then a projected step in ``w`` evaluated at the new ``p``.
    Setting ``update_p`` or ``update_w`` to False freezes that block.
    ``callback(k, p, w)`` sees every iterate, starting with ``k = 0``.
    """
    ts = as_training_set(training)
    z = _filtered(Ax, f)
    n = z.size
    if ts.a.shape[1] != n:
        raise ValueError(f"training attachments have {ts.a.shape[1]} entries, graph has {n}")
    rng = np.random.default_rng(cfg.seed)
    p = rng.uniform(0.0, 1.0, n)
    w = rng.uniform(0.0, cfg.w_max, n)
    if p_init is not None:
        p = project_box(p_init, 0.0, 1.0)
    if w_init is not None:
        w = project_box(w_init, 0.0, cfg.w_max)

    if callback is not None:
        callback(0, p, w)
    trace = [_cost(p, w, z, ts, cfg)]
    if not np.isfinite(trace[0]):
        raise DivergenceError(0)
    window = cfg.plateau_window
    for k in range(1, cfg.iterations + 1):
        if update_p:
            p = np.clip(p - cfg.lambda_p * _grad_p(p, w, z, ts, cfg), 0.0, 1.0)
        if update_w:
            w = np.clip(w - cfg.lambda_w * _grad_w(p, w, z, ts, cfg), 0.0, cfg.w_max)
        if callback is not None:
            callback(k, p, w)
        c = _cost(p, w, z, ts, cfg)
        if not np.isfinite(c):
            raise DivergenceError(k)
        trace.append(c)
        if cfg.plateau_tol is not None and k >= window:
            tail = trace[-window:]
            if max(tail) - min(tail) < cfg.plateau_tol * abs(trace[0]):
                log.debug("plateau reached at iteration %d", k)
                break
    return FitResult(p, w, trace, cfg.w_max)


def convexity_threshold(w, Ax, f: FilterSpec, w_max: float) -> float:
    """Regularization floor for ``mu_p`` from the norm-difference marginal-convexity bound.

    Returns ``w_max^2 max_i z_i^2 - ||w * z||^2`` clamped at zero.  At
    ``w = 0`` this equals ``w_max^2 max_i z_i^2``, which bounds the Hessian
    from below for every feasible ``w`` (Weyl's inequality); for ``w != 0``
    the subtracted term is not backed by a valid eigenvalue argument, see
    :func:`exact_convexity_threshold`.
    """
    z = _filtered(Ax, f)
    u = np.asarray(w, dtype=float) * z
    return max(0.0, w_max**2 * float(np.max(z**2)) - float(u @ u))


def exact_convexity_threshold(w, Ax, f: FilterSpec) -> float:
    """Smallest ``mu_p`` making the p-Hessian positive semidefinite at this ``w``."""
    z = _filtered(Ax, f)
    u = np.asarray(w, dtype=float) * z
    lam = np.linalg.eigvalsh(np.outer(u, u) - np.diag(u**2))[0]
    return max(0.0, -float(lam))


def hessian_p(p, w, Ax, f: FilterSpec, mu_p: float) -> np.ndarray:
    """``2 u u^T - 2 diag(u^2) + 2 mu_p I`` with ``u = w * (Ax h)``.

    This is the per-sample Hessian; the Hessian of the summed cost with
    ``q_p = 2`` is ``|T|`` times it (see :func:`hessian_p_cost`).  It does
    not depend on ``p``.
    """
    u = np.asarray(w, dtype=float) * _filtered(Ax, f)
    return 2.0 * np.outer(u, u) - 2.0 * np.diag(u**2) + 2.0 * mu_p * np.eye(u.size)


def hessian_p_cost(p, w, training, Ax, f: FilterSpec, cfg: OptimizerConfig) -> np.ndarray:
    """Hessian in ``p`` of :func:`empirical_cost`; the l1 anchor contributes nothing a.e."""
    T = len(as_training_set(training))
    mu = cfg.mu_p if cfg.q_p == 2 else 0.0
    return T * hessian_p(p, w, Ax, f, mu)


def save_training_csv(training, path) -> None:
    """One row per sample: ``x_plus``, the ``N`` attachment weights, the ``N`` binary flags."""
    ts = as_training_set(training)
    n = ts.a.shape[1]
    header = ["x_plus"] + [f"a{i}" for i in range(n)] + [f"b{i}" for i in range(n)]
    lines = [",".join(header)]
    for x, a, b in zip(ts.x, ts.a, ts.b):
        lines.append(",".join([repr(float(x))] + [repr(float(v)) for v in a]
                              + [repr(float(v)) for v in b]))
    Path(path).write_text("\n".join(lines) + "\n")


def load_training_csv(path) -> TrainingSet:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n = (rows.shape[1] - 1) // 2
    if rows.shape[1] != 2 * n + 1:
        raise ValueError(f"{path}: expected 1 + 2N columns, got {rows.shape[1]}")
    return TrainingSet(rows[:, 0], rows[:, 1:n + 1], rows[:, n + 1:])

"""Synthetic ER / BA interpolation experiments and the convergence study."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from ..attachment import AttachmentModel, sample_many
from ..baselines import preferential_attachment, training_mean, uniform_attachment
from ..filters import FilterSpec, build_shifted_matrix, geometric_coefficients
from ..graph import Graph, barabasi_albert, erdos_renyi, smooth_signal
from ..optimizer import (OptimizerConfig, TrainingSet, as_training_set, closed_form_mse,
                         convexity_threshold, fit)
from .config import SyntheticConfig
from .report import Report

log = logging.getLogger(__name__)

METHODS = ("proposed", "preferential", "uniform", "training_mean", "only_p", "only_w")


def _seed(*key) -> int:
    return int(np.random.SeedSequence(list(key)).generate_state(1)[0])


@dataclass
class SyntheticInstance:
    graph: Graph
    signal: np.ndarray
    filter: FilterSpec
    Ax: np.ndarray
    true_p: np.ndarray
    data: TrainingSet


def generate_synthetic_training(g: Graph, x, true_p, f: FilterSpec, count: int, seed,
                                noise_std: float = 0.0) -> TrainingSet:
    """Incoming nodes drawn from ``true_p`` with unit weights.

    Each target is the noiseless filter output at the new node, ``a^T Ax h``,
    plus optional Gaussian noise.
    """
    rng = np.random.default_rng(seed)
    true_p = np.asarray(true_p, dtype=float)
    b = (rng.random((count, g.n)) < true_p).astype(float)
    z = build_shifted_matrix(g, x, f.order) @ f.h
    targets = b @ z
    if noise_std > 0:
        targets = targets + noise_std * rng.standard_normal(count)
    return TrainingSet(targets, b.copy(), b)


def _normalize(x, how):
    if how == "max_abs":
        peak = np.abs(x).max()
        return x / peak if peak > 0 else x
    if how == "unit_norm":
        nrm = np.linalg.norm(x)
        return x / nrm if nrm > 0 else x
    return x


def make_instance(cfg: SyntheticConfig, realization: int) -> SyntheticInstance:
    gseed = _seed(cfg.seed, realization, 0)
    if cfg.family == "ER":
        g = erdos_renyi(cfg.n, cfg.p_edge, gseed)
        true_p = uniform_attachment(cfg.n)
    else:
        g = barabasi_albert(cfg.n, cfg.ba_m, gseed)
        true_p = preferential_attachment(g)
    x = _normalize(smooth_signal(g, cfg.eig_k, _seed(cfg.seed, realization, 1)), cfg.signal_norm)
    f = geometric_coefficients(cfg.alpha, cfg.order)
    data = generate_synthetic_training(g, x, true_p, f, cfg.dataset_size,
                                       _seed(cfg.seed, realization, 2), cfg.noise_std)
    return SyntheticInstance(g, x, f, build_shifted_matrix(g, x, f.order), true_p, data)


def optimizer_config(cfg: SyntheticConfig, mu_p=None, mu_w=None, seed=0) -> OptimizerConfig:
    return OptimizerConfig(mu_p=cfg.mu_p if mu_p is None else mu_p,
                           mu_w=cfg.mu_w if mu_w is None else mu_w,
                           q_p=cfg.q_p, q_w=cfg.q_w, lambda_p=cfg.lambda_p,
                           lambda_w=cfg.lambda_w, iterations=cfg.iterations,
                           w_max=cfg.w_max, seed=seed)


def default_grid(low=1e-5, high=1.0, points=6):
    vals = np.logspace(np.log10(low), np.log10(high), points)
    return list(product(vals, vals))


def cross_validate(training, grid, folds: int, seed, Ax, f: FilterSpec,
                   base: OptimizerConfig):
    """Grid search of ``(mu_p, mu_w)`` by k-fold validation MSE.

    Ties go to the larger regularization weights.
    """
    ts = as_training_set(training)
    grid = sorted(set((float(a), float(b)) for a, b in grid))
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if folds > len(ts):
        raise ValueError(f"{folds} folds but only {len(ts)} samples")
    if len(grid) == 1:
        return grid[0]
    parts = np.array_split(np.random.default_rng(seed).permutation(len(ts)), folds)
    scores = []
    for mu_p, mu_w in grid:
        errs = []
        for k, val in enumerate(parts):
            train = np.concatenate([q for j, q in enumerate(parts) if j != k])
            res = fit(ts[train], Ax, f, replace(base, mu_p=mu_p, mu_w=mu_w))
            errs.append(closed_form_mse(res.model, Ax, f, ts.x[val]).mean())
        scores.append((float(np.mean(errs)), -mu_p, -mu_w))
    best = min(range(len(grid)), key=lambda i: scores[i])
    return grid[best]


def evaluate(model: AttachmentModel, Ax, f, targets, cfg: SyntheticConfig, seed) -> float:
    """Average interpolation MSE over test targets under ``model``."""
    if cfg.evaluation == "closed_form":
        return float(closed_form_mse(model, Ax, f, targets).mean())
    z = Ax @ f.h
    rng = np.random.default_rng(seed)
    errs = [((sample_many(model, cfg.mc_draws, rng) @ z - t) ** 2).mean() for t in targets]
    return float(np.mean(errs))


def _run_realization(cfg: SyntheticConfig, r: int):
    inst = make_instance(cfg, r)
    Ax, f, data, n = inst.Ax, inst.filter, inst.data, inst.graph.n
    ones = np.ones(n)
    mu_p, mu_w = cfg.mu_p, cfg.mu_w
    rows = []
    for s in range(cfg.splits):
        perm = np.random.default_rng(_seed(cfg.seed, r, 3, s)).permutation(len(data))
        train, test = data[perm[:cfg.train_size]], data[perm[cfg.train_size:]]
        if cfg.cross_validate and s == 0:
            mu_p, mu_w = cross_validate(
                train, default_grid(cfg.cv_low, cfg.cv_high, cfg.cv_points), cfg.cv_folds,
                _seed(cfg.seed, r, 4), Ax, f, optimizer_config(cfg, seed=_seed(cfg.seed, r, 5)))
            log.info("realization %d: cross-validated mu_p=%g mu_w=%g", r, mu_p, mu_w)
        opt = optimizer_config(cfg, mu_p, mu_w, seed=_seed(cfg.seed, r, 6, s))
        p_g, w_g = training_mean(train)
        joint = fit(train, Ax, f, opt)
        only_p = fit(train, Ax, f, opt, w_init=w_g, update_w=False)
        only_w = fit(train, Ax, f, opt, p_init=p_g, update_p=False)
        models = {
            "proposed": joint.model,
            "preferential": AttachmentModel(preferential_attachment(inst.graph), ones, cfg.w_max),
            "uniform": AttachmentModel(uniform_attachment(n), ones, cfg.w_max),
            "training_mean": AttachmentModel(p_g, w_g, cfg.w_max),
            "only_p": only_p.model,
            "only_w": only_w.model,
        }
        trial = r * cfg.splits + s
        for i, name in enumerate(METHODS):
            mse = evaluate(models[name], Ax, f, test.x, cfg, _seed(cfg.seed, r, 7, s, i))
            rows.append((name, cfg.family, trial, mse))
    return rows, (mu_p, mu_w)


def _pmap(fn, args, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(fn, *zip(*args)))
    return [fn(*a) for a in args]


def run_synthetic(cfg: SyntheticConfig, workers: int = 1) -> Report:
    """Table-1 style comparison: one row per method, realization and split."""
    results = _pmap(_run_realization, [(cfg, r) for r in range(cfg.realizations)], workers)
    report = Report("mse", config=cfg)
    for rows, _ in results:
        for row in rows:
            report.add(*row)
    if cfg.cross_validate:
        report.notes.append("cross-validated (mu_p, mu_w) per realization: "
                            + ", ".join(f"({a:g}, {b:g})" for _, (a, b) in results))
    report.counters["realizations"] = cfg.realizations
    report.counters["splits"] = cfg.splits
    report.notes.append("incoming-node targets are noiseless filter outputs"
                        if cfg.noise_std == 0 else f"target noise std {cfg.noise_std}")
    return report


def _convergence_run(cfg, train, Ax, f, mu_p, seed):
    return fit(train, Ax, f, optimizer_config(cfg, mu_p=mu_p, seed=seed)).cost_trace


def run_convergence_study(cfg: SyntheticConfig, restarts: int = 50, mu_p_convex: float = 30.0,
                          workers: int = 1):
    """Cost traces from ``restarts`` random initializations in two regimes.

    ``nonconvex`` uses ``cfg.mu_p``; ``convex`` uses ``mu_p_convex``, which
    must clear the marginal-convexity floor for every feasible ``w``.
    Restart ``i`` starts from the same point in both regimes.
    """
    inst = make_instance(cfg, 0)
    perm = np.random.default_rng(_seed(cfg.seed, 0, 3, 0)).permutation(len(inst.data))
    train = inst.data[perm[:cfg.train_size]]
    # the floor is largest at w = 0, so this value covers the whole box
    floor = convexity_threshold(np.zeros(inst.graph.n), inst.Ax, inst.filter, cfg.w_max)
    if mu_p_convex < floor:
        raise ValueError(f"mu_p_convex={mu_p_convex} is below the convexity floor {floor:.4g}")
    traces = {}
    for regime, mu_p in (("nonconvex", cfg.mu_p), ("convex", mu_p_convex)):
        args = [(cfg, train, inst.Ax, inst.filter, mu_p, _seed(cfg.seed, 9, i))
                for i in range(restarts)]
        traces[regime] = _pmap(_convergence_run, args, workers)
    return traces, floor

"""Cold-start item rating prediction on MovieLens-100K."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product

import numpy as np

from ..attachment import AttachmentModel, sample_many
from ..baselines import (preferential_attachment, training_mean, uniform_attachment,
                         user_mean_prediction)
from ..data import (ColdStartSplit, RatingsDataset, attachments_from_ratings,
                    build_knn_item_graph, filter_min_ratings, load_movielens,
                    make_cold_start_split)
from ..filters import FilterSpec, build_shifted_matrix, fit_coefficients
from ..graph import Graph
from ..optimizer import OptimizerConfig, TrainingSet, fit
from .config import ColdStartConfig
from .report import Report
from .synthetic import _pmap, _seed

log = logging.getLogger(__name__)

METHODS = ("proposed", "preferential", "uniform", "training_mean", "user_mean")
BUCKETS = ("low", "medium", "high")


@dataclass
class ColdStartSetup:
    """Everything shared by the per-user fits."""

    dataset: RatingsDataset
    split: ColdStartSplit
    graph: Graph
    filter: FilterSpec
    ratings: np.ndarray          # dense users x items
    train_a: np.ndarray          # attachments of training cold items, one row per item
    train_b: np.ndarray


def bucket_of(count: int, cfg: ColdStartConfig) -> str:
    if count < cfg.low_below:
        return "low"
    return "high" if count > cfg.high_above else "medium"


def prepare(cfg: ColdStartConfig, dataset: RatingsDataset | None = None) -> ColdStartSetup:
    d = dataset if dataset is not None else load_movielens(cfg.data_path)
    d = filter_min_ratings(d, cfg.min_ratings)
    split = make_cold_start_split(d, cfg.core_size, cfg.train_size, cfg.seed)
    g = build_knn_item_graph(d, split.core_items, cfg.knn_k)
    R = d.matrix().toarray()
    core = split.core_items
    # one global filter fit to each user's observed core ratings
    observed = [(R[u, core], R[u, core] > 0, R[u, core]) for u in range(d.n_users)]
    f = fit_coefficients(g, observed, cfg.filter_order, cfg.ridge)
    a, b = attachments_from_ratings(d, split.train_items, core, cfg.knn_k)
    return ColdStartSetup(d, split, g, f, R, a, b)


def user_problem(setup: ColdStartSetup, u: int):
    """Signal, training set and test targets of one user, or a skip reason."""
    R, split = setup.ratings, setup.split
    x = R[u, split.core_items]
    if not np.any(x > 0):
        return "no_core_ratings"
    rated = np.flatnonzero(R[u, split.train_items] > 0)
    if rated.size == 0:
        return "no_train_ratings"
    test = split.test_items[R[u, split.test_items] > 0]
    if test.size == 0:
        return "no_test_ratings"
    train = TrainingSet(R[u, split.train_items[rated]], setup.train_a[rated], setup.train_b[rated])
    return x, train, R[u, test]


def _opt(cfg: ColdStartConfig, seed, mu_p=None, mu_w=None) -> OptimizerConfig:
    return OptimizerConfig(mu_p=cfg.mu_p if mu_p is None else mu_p,
                           mu_w=cfg.mu_w if mu_w is None else mu_w, q_p=cfg.q_p, q_w=cfg.q_w,
                           lambda_p=cfg.lambda_p, lambda_w=cfg.lambda_w,
                           iterations=cfg.iterations, w_max=cfg.w_max, seed=seed)


def predict_ratings(model: AttachmentModel, z, count: int, draws: int, rng, lo, hi):
    """Per-item prediction: mean filter output over ``draws`` sampled attachments, clipped."""
    preds = np.array([(sample_many(model, draws, rng) @ z).mean() for _ in range(count)])
    return np.clip(preds, lo, hi)


def _run_user(setup: ColdStartSetup, cfg: ColdStartConfig, u: int):
    prob = user_problem(setup, u)
    if isinstance(prob, str):
        return u, prob
    x, train, targets = prob
    Ax = build_shifted_matrix(setup.graph, x, setup.filter.order)
    z = Ax @ setup.filter.h
    n = x.size
    ones = np.ones(n)
    res = fit(train, Ax, setup.filter, _opt(cfg, _seed(cfg.seed, 11, u)))
    p_g, w_g = training_mean(train)
    models = {
        "proposed": res.model,
        "preferential": AttachmentModel(preferential_attachment(setup.graph), ones, cfg.w_max),
        "uniform": AttachmentModel(uniform_attachment(n), ones, cfg.w_max),
        "training_mean": AttachmentModel(p_g, w_g, cfg.w_max),
    }
    rng = np.random.default_rng(_seed(cfg.seed, 12, u))
    maes = {}
    for name, model in models.items():
        pred = predict_ratings(model, z, targets.size, cfg.draws, rng, cfg.rating_min, cfg.rating_max)
        maes[name] = float(np.abs(pred - targets).mean())
    known = np.concatenate([x[x > 0], train.x])
    mean_pred = np.clip(user_mean_prediction(known), cfg.rating_min, cfg.rating_max)
    maes["user_mean"] = float(np.abs(mean_pred - targets).mean())
    return u, maes


def select_users(d: RatingsDataset, cfg: ColdStartConfig) -> np.ndarray:
    counts = d.user_counts()
    users = np.arange(d.n_users)
    if cfg.users_per_bucket <= 0:
        return users
    rng = np.random.default_rng(_seed(cfg.seed, 10))
    chosen = []
    for b in BUCKETS:
        members = users[[bucket_of(c, cfg) == b for c in counts]]
        k = min(cfg.users_per_bucket, members.size)
        chosen.append(rng.choice(members, size=k, replace=False))
    return np.sort(np.concatenate(chosen))


def run_cold_start(cfg: ColdStartConfig, workers: int = 1, dataset=None,
                   setup: ColdStartSetup | None = None) -> Report:
    """Per-user MAE of every method, bucketed by the user's rating count."""
    setup = setup or prepare(cfg, dataset)
    d = setup.dataset
    users = select_users(d, cfg)
    log.info("cold start: %d users, filter h=%s", users.size, np.round(setup.filter.h, 4))
    results = _pmap(_run_user, [(setup, cfg, int(u)) for u in users], workers)
    report = Report("mae", config=cfg)
    counts = d.user_counts()
    skipped = {}
    for u, out in results:
        if isinstance(out, str):
            skipped[out] = skipped.get(out, 0) + 1
            continue
        bucket = bucket_of(counts[u], cfg)
        for name in METHODS:
            report.add(name, bucket, int(d.user_ids[u]), out[name])
    report.counters["users_evaluated"] = len(results) - sum(skipped.values())
    for reason in ("no_core_ratings", "no_train_ratings", "no_test_ratings"):
        report.counters[f"skipped_{reason}"] = skipped.get(reason, 0)
    report.notes.append("predictions clipped to [%g, %g]" % (cfg.rating_min, cfg.rating_max))
    return report


def tune_regularization(cfg: ColdStartConfig, setup: ColdStartSetup, users: int,
                        grid=None, holdout: float = 0.2):
    """Pick ``(mu_p, mu_w)`` by validation MAE on held-out training items.

    Test items are never touched.  Returns the best pair and the score table.
    """
    grid = grid or list(product(10.0 ** np.arange(-3, 2), 10.0 ** np.arange(-3, 2)))
    rng = np.random.default_rng(_seed(cfg.seed, 13))
    pool = [u for u in rng.permutation(setup.dataset.n_users)
            if not isinstance(user_problem(setup, u), str)]
    problems = []
    for u in pool:
        x, train, _ = user_problem(setup, u)
        if len(train) < 5:
            continue
        perm = rng.permutation(len(train))
        cut = max(1, int(round(holdout * len(train))))
        problems.append((u, x, train[perm[cut:]], train[perm[:cut]]))
        if len(problems) == users:
            break
    scores = {}
    for mu_p, mu_w in grid:
        errs = []
        for u, x, tr, val in problems:
            Ax = build_shifted_matrix(setup.graph, x, setup.filter.order)
            res = fit(tr, Ax, setup.filter, _opt(cfg, _seed(cfg.seed, 14, u), mu_p, mu_w))
            pred = np.clip((res.p * res.w) @ (Ax @ setup.filter.h), cfg.rating_min, cfg.rating_max)
            errs.append(np.abs(pred - val.x).mean())
        scores[(mu_p, mu_w)] = float(np.mean(errs))
    best = min(scores, key=lambda k: (scores[k], -k[0], -k[1]))
    return best, scores

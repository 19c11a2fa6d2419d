import numpy as np
import pytest

from expandgraph.data import RatingsDataset
from expandgraph.experiments.coldstart import (METHODS as CS_METHODS, bucket_of, prepare,
                                               run_cold_start, user_problem)
from expandgraph.experiments.config import (ColdStartConfig, SyntheticConfig, ba_defaults,
                                            er_defaults, read_config, write_config)
from expandgraph.experiments.report import Report
from expandgraph.experiments.synthetic import (METHODS, cross_validate, default_grid,
                                               generate_synthetic_training, make_instance,
                                               optimizer_config, run_convergence_study,
                                               run_synthetic)
from expandgraph.attachment import AttachmentModel
from expandgraph.filters import geometric_coefficients, interpolate_incoming, build_shifted_matrix
from expandgraph.graph import erdos_renyi

SMALL = dict(n=30, eig_k=10, dataset_size=120, train_size=100, realizations=2, splits=2,
             iterations=300)


def test_config_defaults_per_family():
    assert (er_defaults().mu_p, er_defaults().mu_w) == (1.0, 1.0)
    assert (ba_defaults().mu_p, ba_defaults().mu_w) == (1.0, 0.1)
    with pytest.raises(ValueError):
        SyntheticConfig(family="WS")
    with pytest.raises(ValueError):
        SyntheticConfig(train_size=1000, dataset_size=1000)


def test_config_file_round_trip_and_overrides(tmp_path):
    cfg = SyntheticConfig(family="BA", mu_w=0.1, cross_validate=True, alpha=0.25)
    write_config(cfg, tmp_path / "c.ini", "synthetic")
    assert read_config(tmp_path / "c.ini", "synthetic") == cfg
    over = read_config(tmp_path / "c.ini", "synthetic", seed=9, mu_p=None)
    assert over.seed == 9 and over.mu_p == cfg.mu_p
    (tmp_path / "bad.ini").write_text("[synthetic]\nbogus = 1\n")
    with pytest.raises(ValueError):
        read_config(tmp_path / "bad.ini", "synthetic")
    with pytest.raises(FileNotFoundError):
        read_config(tmp_path / "missing.ini", "synthetic")


def test_generated_targets_are_filter_outputs():
    g = erdos_renyi(20, 0.3, 0)
    x = np.random.default_rng(0).standard_normal(20)
    f = geometric_coefficients(0.3, 3)
    ts = generate_synthetic_training(g, x, np.full(20, 0.2), f, 30, seed=1)
    Ax = build_shifted_matrix(g, x, 3)
    np.testing.assert_allclose(ts.x, [interpolate_incoming(a, Ax, f) for a in ts.a])
    np.testing.assert_array_equal(ts.a, ts.b)


def test_instance_truth_by_family():
    er = make_instance(SyntheticConfig(**SMALL), 0)
    ba = make_instance(SyntheticConfig(family="BA", **SMALL), 0)
    np.testing.assert_allclose(er.true_p, 1 / 30)
    deg = ba.graph.to_dense().sum(axis=1)
    np.testing.assert_allclose(ba.true_p, deg / deg.sum())
    assert np.abs(er.signal).max() == pytest.approx(1.0)


def test_synthetic_report_is_deterministic_and_symmetric(tmp_path):
    cfg = SyntheticConfig(**SMALL)
    r1, r2 = run_synthetic(cfg), run_synthetic(cfg, workers=2)
    assert r1.rows == r2.rows
    assert r1.methods() == list(METHODS)
    trials = {t for *_, t, _ in [(m, b, t, v) for m, b, t, v in r1.rows]}
    assert trials == set(range(4))
    for t in trials:
        assert sorted(m for m, _, tt, _ in r1.rows if tt == t) == sorted(METHODS)
    r1.write(tmp_path / "a")
    r2.write(tmp_path / "b")
    for name in ("mse_trials.csv", "mse_summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_monte_carlo_evaluation_close_to_closed_form():
    cf = run_synthetic(SyntheticConfig(**{**SMALL, "realizations": 1, "splits": 1}))
    mc = run_synthetic(SyntheticConfig(**{**SMALL, "realizations": 1, "splits": 1,
                                          "evaluation": "monte_carlo", "mc_draws": 2000}))
    for m in METHODS:
        assert mc.mean(m) == pytest.approx(cf.mean(m), rel=0.15)


def test_learned_model_not_worse_than_preferential_truth():
    cfg = ba_defaults(**{**SMALL, "iterations": 1000})
    rep = run_synthetic(cfg)
    assert rep.mean("proposed") <= 1.1 * rep.mean("preferential")


def test_cross_validation_picks_from_grid():
    cfg = SyntheticConfig(**SMALL)
    inst = make_instance(cfg, 0)
    grid = default_grid(1e-3, 1.0, 3)
    mu = cross_validate(inst.data[:60], grid, 3, 0, inst.Ax, inst.filter,
                        optimizer_config(cfg, seed=0))
    assert tuple(mu) in grid
    with pytest.raises(ValueError):
        cross_validate(inst.data[:5], grid, 6, 0, inst.Ax, inst.filter, optimizer_config(cfg))


def test_convergence_study_shapes():
    cfg = SyntheticConfig(**{**SMALL, "iterations": 100})
    traces, floor = run_convergence_study(cfg, restarts=3, mu_p_convex=30.0)
    assert set(traces) == {"nonconvex", "convex"}
    assert all(len(t) == 101 for t in traces["convex"])
    assert 0 < floor <= 30
    with pytest.raises(ValueError):
        run_convergence_study(cfg, restarts=1, mu_p_convex=floor / 2)


def test_report_summary_and_write(tmp_path):
    rep = Report("mae")
    for t, v in enumerate([1.0, 2.0, 4.0]):
        rep.add("a", "low", t, v)
    rep.add("b", "low", 0, 3.0)
    s = {row["method"]: row for row in rep.summary()}
    assert s["a"]["median"] == 2.0 and s["a"]["count"] == 3
    rep.write(tmp_path)
    lines = (tmp_path / "mae_trials.csv").read_text().splitlines()
    assert lines[0] == "method,bucket,trial,mae" and len(lines) == 5


def toy_ratings(seed=0, users=60, items=40):
    rng = np.random.default_rng(seed)
    taste = rng.standard_normal((users, 2))
    feats = rng.standard_normal((items, 2))
    scores = np.clip(np.rint(3 + taste @ feats.T), 1, 5).astype(int)
    mask = rng.random((users, items)) < 0.5
    u, i = np.nonzero(mask)
    return RatingsDataset.from_raw(u, i, scores[u, i])


def toy_coldstart_cfg(**kw):
    base = dict(min_ratings=3, core_size=12, train_size=18, knn_k=4, filter_order=2,
                iterations=100, draws=10, low_below=18, high_above=22)
    return ColdStartConfig(**{**base, **kw})


def test_coldstart_pipeline_small():
    d = toy_ratings()
    cfg = toy_coldstart_cfg()
    setup = prepare(cfg, d)
    assert setup.graph.n == 12 and setup.train_a.shape == (18, 12)
    rep = run_cold_start(cfg, setup=setup)
    assert rep.methods() == list(CS_METHODS)
    assert set(rep.buckets()) <= {"low", "medium", "high"}
    mae = rep.values("proposed")
    assert np.all((mae >= 0) & (mae <= 4))
    again = run_cold_start(cfg, workers=2, dataset=d)
    assert again.rows == rep.rows
    assert rep.counters["users_evaluated"] == len(rep.values("user_mean"))


def test_coldstart_user_skips():
    d = toy_ratings()
    setup = prepare(toy_coldstart_cfg(), d)
    setup.ratings[0, setup.split.core_items] = 0
    assert user_problem(setup, 0) == "no_core_ratings"
    setup.ratings[1, setup.split.test_items] = 0
    assert user_problem(setup, 1) == "no_test_ratings"


def test_buckets():
    cfg = ColdStartConfig()
    assert [bucket_of(c, cfg) for c in (10, 99, 100, 200, 201)] == \
        ["low", "low", "medium", "medium", "high"]

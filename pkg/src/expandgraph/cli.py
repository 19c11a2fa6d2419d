"""Command line entry point.

Precedence: command-line flags override values from ``--config``, which
override the built-in defaults.  Every command writes its outputs and a
``manifest.ini`` (configuration echo, seed, package versions) under ``--out``.
Exit status: 0 on success, 1 on usage errors, 2 on runtime failures.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .attachment import load_model
from .data import (build_knn_item_graph, filter_min_ratings, load_movielens,
                   make_cold_start_split, write_split_manifest)
from .experiments.coldstart import prepare, run_cold_start
from .experiments.config import config_lines, read_config
from .experiments.synthetic import run_convergence_study, run_synthetic
from .filters import build_shifted_matrix, geometric_coefficients, load_filter, save_filter
from .graph import barabasi_albert, erdos_renyi, read_edgelist, write_edgelist
from .optimizer import OptimizerConfig, fit, load_training_csv

log = logging.getLogger("expandgraph")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def write_manifest(out: Path, command: str, cfg=None, seed=None, extra=None) -> None:
    parser = configparser.ConfigParser()
    parser["run"] = {"command": command, "seed": str(seed)}
    if extra:
        parser["run"].update({k: str(v) for k, v in extra.items()})
    if cfg is not None:
        parser["config"] = dict(line.split(" = ", 1) for line in config_lines(cfg))
    parser["versions"] = {"expandgraph": __version__, "python": platform.python_version(),
                          "numpy": np.__version__, "scipy": scipy.__version__}
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "manifest.ini", "w") as fh:
        parser.write(fh)


def _filter_from_args(args):
    if getattr(args, "filter", None):
        return load_filter(args.filter)
    return geometric_coefficients(args.alpha, args.order)


def cmd_synthetic(args):
    cfg = read_config(args.config, "synthetic", family=args.family, seed=args.seed,
                      realizations=args.realizations, splits=args.splits,
                      iterations=args.iterations, mu_p=args.mu_p, mu_w=args.mu_w,
                      cross_validate=True if args.cross_validate else None,
                      evaluation=args.evaluation)
    report = run_synthetic(cfg, workers=args.workers)
    out = Path(args.out)
    report.write(out)
    write_manifest(out, "synthetic", cfg, cfg.seed)
    print(report.table())


def cmd_convergence(args):
    cfg = read_config(args.config, "synthetic", family=args.family, seed=args.seed,
                      iterations=args.iterations, mu_p=args.mu_p)
    traces, floor = run_convergence_study(cfg, args.restarts, args.mu_p_convex, args.workers)
    out = Path(args.out)
    tdir = out / "traces"
    tdir.mkdir(parents=True, exist_ok=True)
    summary = ["regime,restart,initial,final"]
    for regime, runs in traces.items():
        for i, trace in enumerate(runs):
            rows = "".join(f"{k},{c!r}\n" for k, c in enumerate(trace))
            (tdir / f"{regime}_{i:03d}.csv").write_text("iteration,cost\n" + rows)
            summary.append(f"{regime},{i},{trace[0]!r},{trace[-1]!r}")
    (out / "convergence_summary.csv").write_text("\n".join(summary) + "\n")
    write_manifest(out, "convergence", cfg, cfg.seed,
                   {"restarts": args.restarts, "mu_p_convex": args.mu_p_convex,
                    "convexity_floor": repr(floor)})
    for regime, runs in traces.items():
        finals = [t[-1] for t in runs]
        print(f"{regime:<10} restarts={len(runs)} final cost min={min(finals):.6g} "
              f"max={max(finals):.6g}")


def cmd_coldstart(args):
    cfg = read_config(args.config, "coldstart", data_path=args.data, seed=args.seed,
                      users_per_bucket=args.users_per_bucket, draws=args.draws,
                      iterations=args.iterations, mu_p=args.mu_p, mu_w=args.mu_w)
    if not cfg.data_path:
        raise UsageError("coldstart needs --data or data_path in the config file")
    setup = prepare(cfg)
    report = run_cold_start(cfg, workers=args.workers, setup=setup)
    out = Path(args.out)
    report.write(out)
    d = setup.dataset
    write_split_manifest(setup.split, d, out / "split_manifest.txt")
    write_edgelist(setup.graph, out / "knn_graph.edges")
    save_filter(setup.filter, out / "filter.txt")
    (out / "user_ids.txt").write_text("".join(f"{i}\t{r}\n" for i, r in enumerate(d.user_ids)))
    (out / "item_ids.txt").write_text("".join(f"{i}\t{r}\n" for i, r in enumerate(d.item_ids)))
    write_manifest(out, "coldstart", cfg, cfg.seed, {"workers": args.workers})
    print(report.table())


def cmd_fit(args):
    g = read_edgelist(args.graph)
    x = np.loadtxt(args.signal, ndmin=1)
    f = _filter_from_args(args)
    training = load_training_csv(args.train)
    cfg = OptimizerConfig(mu_p=args.mu_p, mu_w=args.mu_w, q_p=args.q_p, q_w=args.q_w,
                          lambda_p=args.lambda_p, lambda_w=args.lambda_w,
                          iterations=args.iterations, w_max=args.w_max, seed=args.seed)
    res = fit(training, build_shifted_matrix(g, x, f.order), f, cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    res.save(out, args.trace)
    print(f"final cost {res.cost_trace[-1]:.6g} after {len(res.cost_trace) - 1} iterations")


def cmd_predict(args):
    g = read_edgelist(args.graph)
    x = np.loadtxt(args.signal, ndmin=1)
    f = _filter_from_args(args)
    model = load_model(args.model)
    z = build_shifted_matrix(g, x, f.order) @ f.h
    expected = float((model.p * model.w) @ z)
    rng = np.random.default_rng(args.seed)
    draws = (rng.random((args.draws, model.n)) < model.p) * model.w
    sampled = float((draws @ z).mean())
    text = f"expected {expected!r}\nsampled_mean {sampled!r}\ndraws {args.draws}\n"
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")


def cmd_graph_build(args):
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.ratings:
        d = filter_min_ratings(load_movielens(args.ratings), args.min_ratings)
        split = make_cold_start_split(d, args.core_size, args.train_size, args.seed)
        g = build_knn_item_graph(d, split.core_items, args.k)
        if args.split_out:
            write_split_manifest(split, d, args.split_out)
    elif args.family == "ER":
        g = erdos_renyi(args.n, args.p_edge, args.seed)
    else:
        g = barabasi_albert(args.n, args.m, args.seed)
    write_edgelist(g, out)
    print(f"{g.n} nodes, {g.num_edges} edges -> {out}")


def _optimizer_flags(p):
    p.add_argument("--mu-p", type=float, default=1.0)
    p.add_argument("--mu-w", type=float, default=1.0)
    p.add_argument("--q-p", type=int, choices=(1, 2), default=1)
    p.add_argument("--q-w", type=int, choices=(1, 2), default=2)
    p.add_argument("--lambda-p", type=float, default=1e-5)
    p.add_argument("--lambda-w", type=float, default=1e-5)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--w-max", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)


def _filter_flags(p):
    p.add_argument("--filter", help="file with one line of filter coefficients")
    p.add_argument("--alpha", type=float, default=0.3, help="geometric coefficients alpha^l")
    p.add_argument("--order", type=int, default=3)


def build_parser():
    parser = _Parser(prog="expandgraph", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--workers", type=int, default=1, help="worker processes")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synthetic", help="ER/BA interpolation MSE against the baselines")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--family", choices=("ER", "BA"))
    p.add_argument("--seed", type=int)
    p.add_argument("--realizations", type=int)
    p.add_argument("--splits", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--mu-p", type=float)
    p.add_argument("--mu-w", type=float)
    p.add_argument("--cross-validate", action="store_true")
    p.add_argument("--evaluation", choices=("closed_form", "monte_carlo"))
    p.set_defaults(func=cmd_synthetic)

    p = sub.add_parser("convergence", help="training-cost traces, non-convex vs convex")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--mu-p-convex", type=float, default=30.0)
    p.add_argument("--family", choices=("ER", "BA"))
    p.add_argument("--seed", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--mu-p", type=float)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("coldstart", help="MovieLens-100K cold-start MAE per user bucket")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--data", help="path to u.data")
    p.add_argument("--seed", type=int)
    p.add_argument("--users-per-bucket", type=int)
    p.add_argument("--draws", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--mu-p", type=float)
    p.add_argument("--mu-w", type=float)
    p.set_defaults(func=cmd_coldstart)

    p = sub.add_parser("fit", help="learn (p, w) from a training CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trace", help="optional CSV for the cost trace")
    _filter_flags(p)
    _optimizer_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="interpolate the signal at an incoming node")
    p.add_argument("--graph", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    _filter_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("graph-build", help="write a random or item-kNN graph as an edge list")
    p.add_argument("--out", required=True)
    p.add_argument("--family", choices=("ER", "BA"), default="ER")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p-edge", type=float, default=0.05)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratings", help="MovieLens u.data; builds the core item kNN graph")
    p.add_argument("--k", type=int, default=35)
    p.add_argument("--core-size", type=int, default=50)
    p.add_argument("--train-size", type=int, default=700)
    p.add_argument("--min-ratings", type=int, default=10)
    p.add_argument("--split-out", help="also write the item split manifest here")
    p.set_defaults(func=cmd_graph_build)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"expandgraph: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.error("%s failed: %s", args.command, exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Experiment configurations and their ``key = value`` file format."""

from __future__ import annotations

import configparser
import dataclasses
import typing
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class SyntheticConfig:
    family: str = "ER"
    n: int = 100
    p_edge: float = 0.05
    ba_m: int = 2
    eig_k: int = 30
    # "max_abs": zero mean and peak magnitude 1; "unit_norm"; "none": centering only
    signal_norm: str = "max_abs"
    alpha: float = 0.3
    order: int = 3
    dataset_size: int = 1000
    train_size: int = 800
    noise_std: float = 0.0
    mu_p: float = 1.0
    mu_w: float = 1.0
    cross_validate: bool = False
    cv_folds: int = 10
    cv_points: int = 6
    cv_low: float = 1e-5
    cv_high: float = 1.0
    q_p: int = 2
    q_w: int = 2
    lambda_p: float = 1e-5
    lambda_w: float = 1e-5
    iterations: int = 2000
    w_max: float = 1.0
    realizations: int = 100
    splits: int = 100
    # "closed_form" or "monte_carlo" (mc_draws attachment draws per test node)
    evaluation: str = "closed_form"
    mc_draws: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.family not in ("ER", "BA"):
            raise ValueError(f"family must be ER or BA, got {self.family!r}")
        if self.signal_norm not in ("max_abs", "unit_norm", "none"):
            raise ValueError(f"unknown signal_norm {self.signal_norm!r}")
        if self.evaluation not in ("closed_form", "monte_carlo"):
            raise ValueError(f"unknown evaluation {self.evaluation!r}")
        if not 0 < self.train_size < self.dataset_size:
            raise ValueError("need 0 < train_size < dataset_size")
        for name in ("n", "eig_k", "order", "realizations", "splits", "iterations",
                     "mc_draws", "cv_folds", "cv_points"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.eig_k > self.n:
            raise ValueError("eig_k cannot exceed n")


def er_defaults(**overrides) -> SyntheticConfig:
    return SyntheticConfig(**{"family": "ER", "mu_p": 1.0, "mu_w": 1.0, **overrides})


def ba_defaults(**overrides) -> SyntheticConfig:
    return SyntheticConfig(**{"family": "BA", "mu_p": 1.0, "mu_w": 0.1, **overrides})


@dataclass(frozen=True)
class ColdStartConfig:
    data_path: str = ""
    min_ratings: int = 10
    core_size: int = 50
    train_size: int = 700
    knn_k: int = 35
    filter_order: int = 5
    ridge: float = 1e-6
    mu_p: float = 0.01
    mu_w: float = 0.01
    q_p: int = 1
    q_w: int = 2
    lambda_p: float = 1e-4
    lambda_w: float = 1e-4
    iterations: int = 2000
    w_max: float = 1.0
    draws: int = 100
    # 0 keeps every user; otherwise a seeded sample of this many users per bucket
    users_per_bucket: int = 0
    low_below: int = 100
    high_above: int = 200
    rating_min: float = 1.0
    rating_max: float = 5.0
    seed: int = 0


SECTIONS = {"synthetic": SyntheticConfig, "coldstart": ColdStartConfig}


def _coerce(value: str, kind):
    if kind is bool:
        return value.strip().lower() in ("1", "true", "yes", "on")
    return kind(value.strip())


def read_config(path, section: str, **overrides):
    """Load one section of an INI-style file; ``overrides`` (not None) win."""
    cls = SECTIONS[section]
    hints = typing.get_type_hints(cls)
    values = {}
    if path is not None:
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise FileNotFoundError(path)
        if parser.has_section(section):
            for key, raw in parser.items(section):
                if key not in hints:
                    raise ValueError(f"{path}: unknown key {key!r} in [{section}]")
                values[key] = _coerce(raw, hints[key])
    values.update({k: v for k, v in overrides.items() if v is not None})
    return cls(**values)


def config_lines(cfg) -> list:
    return [f"{f.name} = {getattr(cfg, f.name)}" for f in dataclasses.fields(cfg)]


def write_config(cfg, path, section: str) -> None:
    Path(path).write_text(f"[{section}]\n" + "\n".join(config_lines(cfg)) + "\n")

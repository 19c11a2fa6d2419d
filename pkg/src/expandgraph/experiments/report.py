"""Per-trial results, their aggregation and CSV output."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class Report:
    """Rows of ``(method, bucket, trial, value)`` plus run metadata.

    ``metric`` names the value column (``mse`` or ``mae``); ``counters``
    holds bookkeeping such as skipped users.
    """

    metric: str
    rows: list = field(default_factory=list)
    config: object = None
    counters: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add(self, method, bucket, trial, value):
        self.rows.append((method, bucket, trial, float(value)))

    def values(self, method, bucket=None) -> np.ndarray:
        return np.array([v for m, b, _, v in self.rows
                         if m == method and (bucket is None or b == bucket)])

    def methods(self):
        return list(dict.fromkeys(m for m, *_ in self.rows))

    def buckets(self):
        return list(dict.fromkeys(b for _, b, *_ in self.rows))

    def summary(self):
        """One entry per method x bucket with count, mean, std and median."""
        out = []
        for b in self.buckets():
            for m in self.methods():
                v = self.values(m, b)
                if v.size:
                    out.append({"method": m, "bucket": b, "count": int(v.size),
                                "mean": float(v.mean()), "std": float(v.std()),
                                "median": float(np.median(v))})
        return out

    def mean(self, method, bucket=None) -> float:
        return float(self.values(method, bucket).mean())

    def median(self, method, bucket=None) -> float:
        return float(np.median(self.values(method, bucket)))

    def write(self, out_dir, prefix=None):
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        prefix = prefix or self.metric
        trials = out_dir / f"{prefix}_trials.csv"
        with open(trials, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["method", "bucket", "trial", self.metric])
            for m, b, t, v in self.rows:
                wr.writerow([m, b, t, repr(v)])
        summary = out_dir / f"{prefix}_summary.csv"
        with open(summary, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["method", "bucket", "count", "mean", "std", "median"])
            for r in self.summary():
                wr.writerow([r["method"], r["bucket"], r["count"], repr(r["mean"]),
                             repr(r["std"]), repr(r["median"])])
        return trials, summary

    def table(self) -> str:
        head = f"{'method':<14}{'bucket':<8}{'count':>7}{'mean':>10}{'std':>10}{'median':>10}"
        lines = [head, "-" * len(head)]
        for r in self.summary():
            lines.append(f"{r['method']:<14}{r['bucket']:<8}{r['count']:>7}"
                         f"{r['mean']:>10.4f}{r['std']:>10.4f}{r['median']:>10.4f}")
        lines.extend(f"{k}: {v}" for k, v in self.counters.items())
        lines.extend(self.notes)
        return "\n".join(lines)

"""MovieLens ingestion, item-item kNN graphs and cold-start item splits."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .attachment import AttachmentSample
from .errors import DuplicateRatingError, ParseError
from .graph import Graph

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RatingsDataset:
    """Ratings as parallel arrays of dense user index, dense item index and value.

    ``user_ids[u]`` and ``item_ids[i]`` map dense indices back to raw ids.
    """

    users: np.ndarray
    items: np.ndarray
    ratings: np.ndarray
    user_ids: np.ndarray
    item_ids: np.ndarray

    @property
    def n_users(self) -> int:
        return self.user_ids.size

    @property
    def n_items(self) -> int:
        return self.item_ids.size

    def __len__(self):
        return self.ratings.size

    def matrix(self) -> sp.csc_array:
        """Users x items rating matrix, zero where unrated."""
        return sp.csc_array((self.ratings.astype(float), (self.users, self.items)),
                            shape=(self.n_users, self.n_items))

    def user_counts(self) -> np.ndarray:
        return np.bincount(self.users, minlength=self.n_users)

    def item_counts(self) -> np.ndarray:
        return np.bincount(self.items, minlength=self.n_items)

    @classmethod
    def from_raw(cls, raw_users, raw_items, ratings) -> "RatingsDataset":
        raw_users = np.asarray(raw_users, dtype=np.int64)
        raw_items = np.asarray(raw_items, dtype=np.int64)
        user_ids, users = np.unique(raw_users, return_inverse=True)
        item_ids, items = np.unique(raw_items, return_inverse=True)
        return cls(users.ravel(), items.ravel(), np.asarray(ratings, dtype=np.int64),
                   user_ids, item_ids)


def load_movielens(path) -> RatingsDataset:
    """Parse ``user<TAB>item<TAB>rating<TAB>timestamp`` lines; timestamps are dropped."""
    users, items, ratings = [], [], []
    seen = set()
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 4:
                raise ParseError(lineno, f"expected 4 tab-separated fields, got {len(fields)}")
            try:
                u, i, r, _ = (int(v) for v in fields)
            except ValueError:
                raise ParseError(lineno, f"non-integer field in {line.strip()!r}") from None
            if not 1 <= r <= 5:
                raise ParseError(lineno, f"rating {r} outside 1..5")
            if (u, i) in seen:
                raise DuplicateRatingError(f"line {lineno}: user {u} rated item {i} twice")
            seen.add((u, i))
            users.append(u)
            items.append(i)
            ratings.append(r)
    return RatingsDataset.from_raw(users, items, ratings)


def filter_min_ratings(d: RatingsDataset, min_count: int) -> RatingsDataset:
    """Drop users and items with fewer than ``min_count`` ratings until nothing changes."""
    if min_count < 0:
        raise ValueError("min_count must be non-negative")
    keep = np.ones(len(d), dtype=bool)
    while True:
        uc = np.bincount(d.users[keep], minlength=d.n_users)
        ic = np.bincount(d.items[keep], minlength=d.n_items)
        ok = keep & (uc[d.users] >= min_count) & (ic[d.items] >= min_count)
        if ok.sum() == keep.sum():
            break
        keep = ok
    return RatingsDataset.from_raw(d.user_ids[d.users[keep]], d.item_ids[d.items[keep]],
                                   d.ratings[keep])


def item_similarity(d: RatingsDataset, rows, cols) -> np.ndarray:
    """Cosine similarity between item-mean-centered rating columns.

    Unrated entries stay zero after centering.  Items whose centered column
    vanishes (no ratings, or all ratings equal) get zero similarity to everything.
    """
    R = d.matrix()
    counts = np.diff(R.indptr)
    sums = np.asarray(R.sum(axis=0)).ravel()
    means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    C = R.copy()
    C.data -= np.repeat(means, counts)
    norms = np.sqrt(np.asarray(C.multiply(C).sum(axis=0)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    Cr = C[:, rows] * inv[rows]
    Cc = C[:, cols] * inv[cols]
    return np.asarray((Cr.T @ Cc).todense())


def _top_k(sim_row, k, exclude=None):
    """Indices of the ``k`` largest positive similarities, ties to the lower index."""
    s = sim_row.copy()
    if exclude is not None:
        s[exclude] = -np.inf
    order = np.lexsort((np.arange(s.size), -s))
    chosen = [j for j in order[:k] if s[j] > 0]
    return np.array(chosen, dtype=int)


def build_knn_item_graph(d: RatingsDataset, node_items, k: int) -> Graph:
    """Directed graph over ``node_items``; each item points to its ``k`` most similar."""
    node_items = np.asarray(node_items, dtype=int)
    n = node_items.size
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < {n}, got {k}")
    S = item_similarity(d, node_items, node_items)
    edges = []
    for i in range(n):
        nbrs = _top_k(S[i], k, exclude=i)
        if nbrs.size == 0:
            log.warning("item %d has no positive-similarity neighbours; left isolated",
                        d.item_ids[node_items[i]])
        edges.extend((i, int(j), float(S[i, j])) for j in nbrs)
    return Graph.from_edges(n, edges, directed=True)


def attachments_from_ratings(d: RatingsDataset, items, core_items, k: int):
    """Ground-truth ``(a, b)`` arrays, one row per item, over the core items."""
    items = np.asarray(items, dtype=int)
    core_items = np.asarray(core_items, dtype=int)
    if np.intersect1d(items, core_items).size:
        raise ValueError("cold items must not belong to the core set")
    counts = d.item_counts()
    if np.any(counts[items] == 0):
        raise ValueError("cold item has no ratings")
    S = item_similarity(d, items, core_items)
    a = np.zeros_like(S)
    for r in range(items.size):
        nbrs = _top_k(S[r], k)
        a[r, nbrs] = S[r, nbrs]
    b = (a > 0).astype(float)
    return a, b


def attachment_from_ratings(d: RatingsDataset, item: int, core_items, k: int) -> AttachmentSample:
    a, b = attachments_from_ratings(d, [item], core_items, k)
    return AttachmentSample(a[0], b[0])


@dataclass(frozen=True, eq=False)
class ColdStartSplit:
    """Dense item indices for the core graph, the training cold items and the test items."""

    core_items: np.ndarray
    train_items: np.ndarray
    test_items: np.ndarray


def make_cold_start_split(d: RatingsDataset, core_size=50, train_size=700, seed=0) -> ColdStartSplit:
    if core_size < 1 or train_size < 0 or core_size + train_size > d.n_items:
        raise ValueError(f"sizes {core_size}+{train_size} exceed {d.n_items} items")
    perm = np.random.default_rng(seed).permutation(d.n_items)
    return ColdStartSplit(np.sort(perm[:core_size]),
                          np.sort(perm[core_size:core_size + train_size]),
                          np.sort(perm[core_size + train_size:]))


_SECTIONS = ("core", "train", "test")


def write_split_manifest(split: ColdStartSplit, d: RatingsDataset, path) -> None:
    out = []
    for name in _SECTIONS:
        ids = d.item_ids[getattr(split, f"{name}_items")]
        out.append(f"[{name}]")
        out.extend(str(int(i)) for i in ids)
    Path(path).write_text("\n".join(out) + "\n")


def read_split_manifest(d: RatingsDataset, path) -> ColdStartSplit:
    lookup = {int(raw): idx for idx, raw in enumerate(d.item_ids)}
    parts = {name: [] for name in _SECTIONS}
    current = None
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            if current not in parts:
                raise ValueError(f"unknown section {line}")
        elif current is None:
            raise ValueError("item id before any section header")
        else:
            parts[current].append(lookup[int(line)])
    return ColdStartSplit(*(np.sort(np.array(parts[s], dtype=int)) for s in _SECTIONS))

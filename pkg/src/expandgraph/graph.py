"""Graphs, random generators, smooth signals and single-node expansion."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class Graph:
    """Weighted adjacency over ``n`` nodes, stored as CSR.

    ``adjacency[i, j]`` is the weight of the edge used when shifting a signal,
    i.e. ``(A @ x)[i] = sum_j A[i, j] x[j]``.
    """

    adjacency: sp.csr_array
    directed: bool = False

    def __post_init__(self):
        A = sp.csr_array(self.adjacency, dtype=float)
        A.sum_duplicates()
        A.eliminate_zeros()
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"adjacency must be square, got {A.shape}")
        if not np.all(np.isfinite(A.data)):
            raise ValueError("adjacency weights must be finite")
        if np.any(A.diagonal() != 0):
            raise ValueError("self-loops are not allowed")
        if not self.directed and (A != A.T).nnz:
            raise ValueError("undirected graph needs a symmetric adjacency")
        object.__setattr__(self, "adjacency", A)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_edges(self) -> int:
        nnz = self.adjacency.nnz
        return nnz if self.directed else nnz // 2

    def to_dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    @classmethod
    def from_dense(cls, A, directed=False) -> "Graph":
        return cls(sp.csr_array(np.asarray(A, dtype=float)), directed=directed)

    @classmethod
    def from_edges(cls, n, edges, directed=False) -> "Graph":
        """Build from ``(src, dst, weight)`` triples; undirected edges listed once."""
        edges = list(edges)
        if not edges:
            return cls(sp.csr_array((n, n)), directed=directed)
        src, dst, wt = (np.asarray(c) for c in zip(*edges))
        if not directed:
            src, dst, wt = (np.concatenate([src, dst]), np.concatenate([dst, src]),
                            np.concatenate([wt, wt]))
        A = sp.coo_array((wt.astype(float), (src.astype(int), dst.astype(int))), shape=(n, n))
        return cls(A.tocsr(), directed=directed)

    def edges(self):
        """Yield ``(src, dst, weight)``; undirected edges once with ``src < dst``."""
        A = self.adjacency.tocoo()
        for i, j, v in zip(A.row, A.col, A.data):
            if self.directed or i < j:
                yield int(i), int(j), float(v)


def _check_n(n):
    if n < 1:
        raise ValueError(f"node count must be positive, got {n}")


def erdos_renyi(n: int, p_edge: float, seed: int) -> Graph:
    """Undirected unweighted G(n, p): each unordered pair independently with ``p_edge``."""
    _check_n(n)
    if not 0.0 <= p_edge <= 1.0:
        raise ValueError(f"p_edge must lie in [0, 1], got {p_edge}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p_edge
    ones = np.ones(int(keep.sum()))
    return Graph.from_edges(n, zip(iu[keep], ju[keep], ones))


def barabasi_albert(n: int, m: int, seed: int) -> Graph:
    """Preferential-attachment growth from an ``m``-node clique.

    Every arriving node links to ``m`` distinct existing nodes chosen with
    probability proportional to their current degree (uniformly while all
    degrees are zero, which only happens for ``m = 1``).
    """
    _check_n(n)
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    degree = np.zeros(n)
    edges = []
    for i in range(m):
        for j in range(i + 1, m):
            edges.append((i, j))
    degree[:m] = m - 1
    for v in range(m, n):
        d = degree[:v]
        total = d.sum()
        probs = d / total if total > 0 else None
        targets = rng.choice(v, size=m, replace=False, p=probs)
        for u in targets:
            edges.append((int(u), v))
        degree[targets] += 1
        degree[v] = m
    return Graph.from_edges(n, ((i, j, 1.0) for i, j in edges))


def degree_vector(g: Graph) -> np.ndarray:
    """Row sums of the adjacency (out-weight)."""
    return np.asarray(g.adjacency.sum(axis=1)).ravel()


def laplacian_eigenbasis(g: Graph):
    """Eigenpairs of ``L = D - A`` in ascending order with a fixed sign convention.

    Ties are ordered stably by index; each eigenvector is flipped so that its
    largest-magnitude entry is positive.
    """
    if g.directed:
        raise ValueError("Laplacian eigenbasis needs an undirected graph")
    A = g.to_dense()
    lap = np.diag(A.sum(axis=1)) - A
    vals, vecs = np.linalg.eigh(lap)
    order = np.argsort(vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    peak = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[peak, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vals, vecs * signs


def smooth_signal(g: Graph, k: int, seed: int) -> np.ndarray:
    """Random combination of the ``k`` smoothest Laplacian eigenvectors, centered."""
    if not 1 <= k <= g.n:
        raise ValueError(f"need 1 <= k <= {g.n}, got {k}")
    _, vecs = laplacian_eigenbasis(g)
    rng = np.random.default_rng(seed)
    x = vecs[:, :k] @ rng.standard_normal(k)
    return x - x.mean()


@dataclass(frozen=True, eq=False)
class ExpandedGraph:
    """A base graph plus one incoming node whose out-edges are ``attachment``.

    The incoming node is a sink for the base graph: its column above the
    diagonal is zero, so only ``v+ -> v_i`` edges exist.
    """

    base: Graph
    attachment: np.ndarray

    @property
    def n(self) -> int:
        return self.base.n + 1

    @property
    def adjacency(self) -> sp.csr_array:
        row = sp.csr_array(self.attachment.reshape(1, -1))
        top = sp.hstack([self.base.adjacency, sp.csr_array((self.base.n, 1))])
        bottom = sp.hstack([row, sp.csr_array((1, 1))])
        return sp.csr_array(sp.vstack([top, bottom]))

    def truncate(self) -> Graph:
        """Drop the incoming node, reading the base block back out of the expanded matrix."""
        n = self.base.n
        return Graph(self.adjacency[:n, :n], directed=self.base.directed)


def expand(g: Graph, a_plus) -> ExpandedGraph:
    a_plus = np.asarray(a_plus, dtype=float)
    if a_plus.shape != (g.n,):
        raise ValueError(f"attachment must have length {g.n}, got shape {a_plus.shape}")
    if not np.all(np.isfinite(a_plus)):
        raise ValueError("attachment entries must be finite")
    a_plus = a_plus.copy()
    a_plus.setflags(write=False)
    return ExpandedGraph(g, a_plus)


def write_edgelist(g: Graph, path) -> None:
    lines = [f"# n={g.n} directed={str(g.directed).lower()}"]
    lines += [f"{i}\t{j}\t{w!r}" for i, j, w in g.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edgelist(path, n=None, directed=None) -> Graph:
    """Read the tab-separated edge list written by :func:`write_edgelist`.

    The optional ``# n=.. directed=..`` header supplies defaults; explicit
    arguments win.  Without either, ``n`` is one past the largest index.
    """
    header = {}
    edges = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    key, val = tok.split("=", 1)
                    header[key] = val
            continue
        src, dst, wt = line.split("\t")
        edges.append((int(src), int(dst), float(wt)))
    if directed is None:
        directed = header.get("directed", "false") == "true"
    if n is None:
        n = int(header["n"]) if "n" in header else 1 + max((max(i, j) for i, j, _ in edges), default=-1)
    return Graph.from_edges(n, edges, directed=directed)

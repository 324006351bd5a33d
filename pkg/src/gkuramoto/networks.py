"""Graph generation, strength weighting, shuffling, and edge-list I/O.

Undirected simple graphs carry the topology; the two weighting schemes
distribute each node's total strength K_i over its incident links, either
evenly (scheme I) or with random uniform proportions (scheme II).  Row
sums of the resulting weight matrix equal K_i by construction.
"""

import json
from dataclasses import dataclass

import numpy as np
import networkx as nx
import scipy.sparse as sp

from .errors import UsageError


def _as_rng(seed):
    # anything exposing .random() (e.g. numpy Generators or test doubles)
    # is used as-is; other values seed a fresh generator
    if hasattr(seed, "random"):
        return seed
    return np.random.default_rng(seed)

__all__ = ["Graph", "er_generate", "weight_scheme_I", "weight_scheme_II",
           "degree_to_strength", "degree_preserving_shuffle",
           "load_edge_list", "save_edge_list", "graph_summary",
           "configuration_graph"]


@dataclass
class Graph:
    """Undirected simple graph stored as a symmetric sparse 0/1 matrix."""

    adjacency: sp.csr_matrix

    def __post_init__(self):
        A = sp.csr_matrix(self.adjacency)
        if A.shape[0] != A.shape[1]:
            raise UsageError("adjacency must be square")
        if A.diagonal().any():
            raise UsageError("self-loops are not allowed")
        if (A != A.T).nnz:
            raise UsageError("adjacency must be symmetric (undirected graph)")
        A.data = np.ones_like(A.data)
        self.adjacency = A

    @property
    def n(self):
        return self.adjacency.shape[0]

    @property
    def degrees(self):
        return np.asarray((self.adjacency != 0).sum(axis=1)).ravel()

    @property
    def n_edges(self):
        return int(self.adjacency.nnz // 2)

    def is_connected(self):
        n_comp, _ = sp.csgraph.connected_components(self.adjacency, directed=False)
        return n_comp == 1

    def to_networkx(self):
        return nx.from_scipy_sparse_array(self.adjacency)

    @classmethod
    def from_networkx(cls, g, n=None):
        n = n or g.number_of_nodes()
        return cls(nx.to_scipy_sparse_array(g, nodelist=range(n), format="csr"))

    @classmethod
    def from_edges(cls, n, edges):
        edges = np.asarray(list(edges), dtype=int)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise UsageError("edge endpoint out of range")
        if edges.size == 0:
            return cls(sp.csr_matrix((n, n)))
        i, j = edges[:, 0], edges[:, 1]
        if np.any(i == j):
            raise UsageError("self-loops are not allowed")
        data = np.ones(2 * len(edges))
        A = sp.csr_matrix((data, (np.concatenate([i, j]), np.concatenate([j, i]))),
                          shape=(n, n))
        A.data = np.ones_like(A.data)  # collapse duplicate edges
        return cls(A)


def er_generate(n, p, seed=None):
    """Erdos-Renyi G(n, p): every unordered pair linked independently."""
    if not 0 < p < 1:
        raise UsageError("p must be in (0, 1)")
    rng = _as_rng(seed)
    iu = np.triu_indices(n, k=1)
    mask = rng.random(len(iu[0])) < p
    return Graph.from_edges(n, np.column_stack([iu[0][mask], iu[1][mask]]))


def _check_distributable(g, K):
    K = np.asarray(K, dtype=float)
    if len(K) != g.n:
        raise UsageError("strengths must have one entry per node")
    if np.any((K > 0) & (g.degrees == 0)):
        raise UsageError("isolated node with positive strength: "
                         "strength cannot be distributed over zero links")
    return K


def weight_scheme_I(g, K):
    """Even split: W_ij = (K_i / k_i) A_ij; generally asymmetric."""
    K = _check_distributable(g, K)
    deg = np.maximum(g.degrees, 1)
    W = sp.diags(K / deg) @ g.adjacency
    from .model import Network
    return Network(sp.csr_matrix(W))


def weight_scheme_II(g, K, seed=None):
    """Random split: W_ij = xi_ij K_i / sum_j xi_ij with xi uniform on (0, 1]."""
    K = _check_distributable(g, K)
    rng = _as_rng(seed)
    A = sp.csr_matrix(g.adjacency, copy=True)
    xi = 1.0 - rng.random(A.nnz)   # uniform on (0, 1]
    W = sp.csr_matrix((xi, A.indices.copy(), A.indptr.copy()), shape=A.shape)
    row = np.asarray(W.sum(axis=1)).ravel()
    scale = np.divide(K, row, out=np.zeros_like(K), where=row > 0)
    W = sp.diags(scale) @ W
    from .model import Network
    return Network(sp.csr_matrix(W))


def degree_to_strength(g, Km=2.0):
    """Degree-proportional strengths K_i = Km k_i / <k>; mean is exactly Km."""
    deg = g.degrees.astype(float)
    mean_k = deg.mean()
    if mean_k == 0:
        raise UsageError("graph has no edges")
    return Km * deg / mean_k


def degree_preserving_shuffle(g, seed=None, swaps_per_edge=10):
    """Rewire by connectivity-preserving double-edge swaps.

    Keeps the degree sequence, undirectedness, and connectedness exactly;
    rejects self-loops and multi-edges.  Uses the window-verified swap
    routine from networkx.
    """
    if not g.is_connected():
        raise UsageError("shuffle requires a connected graph")
    rng = _as_rng(seed)
    h = g.to_networkx()
    n_swaps = swaps_per_edge * g.n_edges
    nx.connected_double_edge_swap(h, nswap=n_swaps, seed=int(rng.integers(2 ** 31)))
    out = Graph.from_networkx(h, n=g.n)
    if not np.array_equal(np.sort(out.degrees), np.sort(g.degrees)):
        raise UsageError("shuffle changed the degree sequence")
    return out


def configuration_graph(degrees, seed=None, max_tries=200):
    """Connected simple graph with (approximately) the given degree sequence.

    Builds a configuration-model graph, discards self-loops/multi-edges,
    and keeps the giant component; retries until the realization is
    connected with the requested length.  Intended for synthetic
    heavy-tailed degree sequences in shuffle experiments.
    """
    degrees = list(map(int, degrees))
    if sum(degrees) % 2:
        degrees[int(np.argmax(degrees))] += 1
    rng = _as_rng(seed)
    for _ in range(max_tries):
        h = nx.configuration_model(degrees, seed=int(rng.integers(2 ** 31)))
        h = nx.Graph(h)
        h.remove_edges_from(nx.selfloop_edges(h))
        if h.number_of_nodes() == len(degrees) and nx.is_connected(h):
            return Graph.from_networkx(h, n=len(degrees))
    raise UsageError("could not realize a connected graph for this degree sequence")


def load_edge_list(path):
    """Read whitespace-separated 0-indexed integer pairs; '#' starts a comment.

    Duplicate edges (in either orientation) collapse to one; a self-loop
    line raises with its line number.
    """
    edges = []
    n = 0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise UsageError(f"{path}:{lineno}: expected two integers, got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise UsageError(f"{path}:{lineno}: non-integer endpoint in {line!r}")
            if i < 0 or j < 0:
                raise UsageError(f"{path}:{lineno}: negative node index")
            if i == j:
                raise UsageError(f"{path}:{lineno}: self-loop {i}-{j} not allowed")
            edges.append((i, j))
            n = max(n, i + 1, j + 1)
    return Graph.from_edges(n, edges)


def save_edge_list(g, path, header=None):
    """Write each undirected edge once as '<i> <j>' with i < j."""
    A = sp.triu(g.adjacency, k=1).tocoo()
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for i, j in sorted(zip(A.row, A.col)):
            fh.write(f"{i} {j}\n")


def graph_summary(g):
    """JSON-ready dict: node count, edge count, degree histogram."""
    deg = g.degrees
    counts = np.bincount(deg)
    return {
        "n": int(g.n),
        "edges": int(g.n_edges),
        "degree_min": int(deg.min()),
        "degree_max": int(deg.max()),
        "degree_mean": float(deg.mean()),
        "degree_histogram": {str(k): int(c) for k, c in enumerate(counts) if c},
    }

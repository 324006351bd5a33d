import numpy as np
import pytest
import scipy.sparse as sp
from scipy import stats

from gkuramoto import networks as net
from gkuramoto.errors import UsageError
from gkuramoto.model import Network


@pytest.fixture(scope="module")
def er_graph():
    return net.er_generate(1000, 0.08, seed=10)


def test_er_basic_structure(er_graph):
    A = er_graph.adjacency
    assert (A != A.T).nnz == 0
    assert not A.diagonal().any()
    mean_k = er_graph.degrees.mean()
    p, n = 0.08, 1000
    spread = 3 * np.sqrt(p * (1 - p) * (n - 1) / n)
    assert abs(mean_k - p * (n - 1)) < spread


def test_er_degrees_are_binomial(er_graph):
    # chi-square against Binomial(N-1, p) at significance 1e-3
    n, p = 1000, 0.08
    deg = er_graph.degrees
    lo, hi = int(deg.min()), int(deg.max())
    edges = np.arange(lo, hi + 2)
    obs, _ = np.histogram(deg, bins=edges)
    probs = stats.binom.pmf(edges[:-1], n - 1, p)
    # pool sparse tails so expected counts stay reasonable
    keep = probs * n >= 5
    obs_p = np.concatenate([[obs[~keep].sum()], obs[keep]])
    exp_p = np.concatenate([[probs[~keep].sum() * n], probs[keep] * n])
    exp_p *= obs_p.sum() / exp_p.sum()
    _, pval = stats.chisquare(obs_p, exp_p)
    assert pval > 1e-3


def test_er_near_complete():
    g = net.er_generate(10, 0.9999, seed=0)
    assert g.n_edges == 45
    assert not g.adjacency.diagonal().any()


def test_er_rejects_bad_p():
    with pytest.raises(UsageError):
        net.er_generate(10, 0.0)


def test_scheme_I_rows_and_asymmetry(er_graph, rng):
    K = rng.uniform(0.5, 4.0, 1000)
    W = net.weight_scheme_I(er_graph, K)
    assert isinstance(W, Network)
    assert np.max(np.abs(W.strengths - K) / K) <= 1e-12
    # A symmetric but W generally not
    assert (W.W != W.W.T).nnz > 0


def test_scheme_I_regular_graph_uniform_weights():
    # a ring: every node degree 2, K=3 -> all weights 1.5
    n = 12
    edges = [(i, (i + 1) % n) for i in range(n)]
    g = net.Graph.from_edges(n, edges)
    W = net.weight_scheme_I(g, np.full(n, 3.0))
    assert np.allclose(W.W.data, 1.5)


def test_scheme_II_rows_and_variation(er_graph, rng):
    K = rng.uniform(0.5, 4.0, 1000)
    W = net.weight_scheme_II(er_graph, K, seed=2)
    assert np.max(np.abs(W.strengths - K) / K) <= 1e-12
    Wc = W.W.tocsr()
    stds = []
    for i in range(100):
        row = Wc.data[Wc.indptr[i]:Wc.indptr[i + 1]]
        if len(row) >= 2:
            stds.append(row.std())
    assert np.mean(stds) > 0


class ConstantRng:
    def random(self, size):
        return np.full(size, 0.5)


def test_scheme_II_degenerate_xi_reduces_to_scheme_I(er_graph):
    K = np.full(1000, 2.0)
    W1 = net.weight_scheme_I(er_graph, K)
    W2 = net.weight_scheme_II(er_graph, K, seed=ConstantRng())
    assert abs(W1.W - W2.W).max() < 1e-12


def test_isolated_node_with_strength_errors():
    g = net.Graph.from_edges(3, [(0, 1)])
    with pytest.raises(UsageError):
        net.weight_scheme_I(g, np.array([1.0, 1.0, 1.0]))


def test_degree_to_strength_properties(er_graph):
    K = net.degree_to_strength(er_graph, Km=2.0)
    assert K.mean() == pytest.approx(2.0, abs=1e-12)
    ring = net.Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    assert np.allclose(net.degree_to_strength(ring, Km=2.0), 2.0)


def test_shuffle_preserves_structure_and_mixes():
    g = net.er_generate(400, 0.05, seed=4)
    assert g.is_connected()
    out = net.degree_preserving_shuffle(g, seed=5, swaps_per_edge=10)
    assert np.array_equal(out.degrees, g.degrees)
    assert out.is_connected()
    assert (out.adjacency != out.adjacency.T).nnz == 0
    overlap = sp.triu(g.adjacency, 1).multiply(sp.triu(out.adjacency, 1)).nnz
    assert overlap / g.n_edges < 0.6


def test_shuffle_rejects_disconnected():
    g = net.Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(UsageError):
        net.degree_preserving_shuffle(g, seed=0)


def test_configuration_graph_heavy_tail():
    rng = np.random.default_rng(8)
    deg = np.clip((rng.pareto(2.0, 300) * 6 + 1).astype(int), 1, 60)
    g = net.configuration_graph(deg, seed=9)
    assert g.n == 300 and g.is_connected()
    assert g.degrees.max() <= 60 + 1   # parity fix can bump one node


def test_edge_list_roundtrip(tmp_path, er_graph):
    path = tmp_path / "g.edges"
    net.save_edge_list(er_graph, path, header="roundtrip\nfixture")
    back = net.load_edge_list(path)
    assert (back.adjacency != er_graph.adjacency).nnz == 0


def test_edge_list_duplicates_collapse(tmp_path):
    path = tmp_path / "dup.edges"
    path.write_text("# triangle with repeats\n0 1\n1 0\n1 2\n2 0\n")
    g = net.load_edge_list(path)
    assert g.n_edges == 3
    assert np.array_equal(g.degrees, [2, 2, 2])


@pytest.mark.parametrize("bad,msg", [
    ("0 1 2\n", "expected two integers"),
    ("0 x\n", "non-integer"),
    ("3 3\n", "self-loop"),
    ("-1 2\n", "negative"),
])
def test_edge_list_malformed_lines(tmp_path, bad, msg):
    path = tmp_path / "bad.edges"
    path.write_text("0 1\n" + bad)
    with pytest.raises(UsageError, match=r":2:"):
        net.load_edge_list(path)


def test_graph_summary(er_graph):
    s = net.graph_summary(er_graph)
    assert s["n"] == 1000 and s["edges"] == er_graph.n_edges
    assert sum(s["degree_histogram"].values()) == 1000


def test_graph_validation():
    with pytest.raises(UsageError):
        net.Graph(sp.eye(4))   # self-loops
    asym = sp.csr_matrix(np.triu(np.ones((3, 3)), 1))
    with pytest.raises(UsageError):
        net.Graph(asym)

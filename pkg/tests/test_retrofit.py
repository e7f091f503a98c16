import numpy as np
import pytest

from absa.embeddings import EmbeddingTable, Vocabulary, load_embeddings
from absa.errors import ConfigurationError, FormatError, ShapeError
from absa.retrofit import LexicalGraph, load_graph, objective, retrofit, sweep


def literal_objective(w0, w, graph):
    total = 0.0
    for i in range(len(w)):
        total += graph.alpha[i] * sum((w[i, k] - w0[i, k]) ** 2 for k in range(w.shape[1]))
        if i in graph.edges:
            for j, beta in zip(*graph.edges[i]):
                total += beta * sum((w[i, k] - w[j, k]) ** 2 for k in range(w.shape[1]))
    return total


def random_graph(rng, n, max_degree=3):
    adjacency = {}
    for i in range(n):
        k = rng.integers(0, max_degree + 1)
        adjacency[i] = set(rng.choice(n, size=k, replace=False).tolist()) - {i}
    return LexicalGraph.from_adjacency(n, adjacency)


def test_objective_zero_at_originals_without_edges():
    w = np.random.default_rng(0).normal(size=(4, 3))
    assert objective(w, w.copy(), LexicalGraph(4)) == 0.0


def test_objective_single_unit_offset():
    w0 = np.zeros((2, 3))
    w = w0.copy()
    w[0, 1] = 1.0
    assert objective(w0, w, LexicalGraph(2)) == 1.0


@pytest.mark.parametrize("seed", range(5))
def test_objective_matches_double_loop(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 5)
    g.alpha = rng.uniform(0.5, 2.0, size=5)
    w0, w = rng.normal(size=(5, 4)), rng.normal(size=(5, 4))
    assert objective(w0, w, g) == pytest.approx(literal_objective(w0, w, g), rel=1e-12)


def test_objective_shape_mismatch():
    with pytest.raises(ShapeError):
        objective(np.zeros((2, 3)), np.zeros((2, 4)), LexicalGraph(2))


def test_isolated_nodes_untouched():
    rng = np.random.default_rng(1)
    w0 = rng.normal(size=(5, 3))
    g = LexicalGraph.from_adjacency(5, {0: {1}, 1: {0, 2}})
    out = retrofit(w0, g, iterations=25)
    assert out[3:].tobytes() == w0[3:].tobytes()


def test_single_update_is_average():
    w0 = np.array([[0.0, 2.0], [4.0, -2.0]])
    g = LexicalGraph(2, {0: {1: 1.0}})
    w = w0.copy()
    sweep(w0, w, g)
    np.testing.assert_array_equal(w[0], (w0[1] + w0[0]) / 2)


def test_two_node_fixed_point_matches_linear_solve():
    w0 = np.array([[1.0, -3.0, 0.5], [4.0, 2.0, -1.0]])
    g = LexicalGraph(2, {0: {1: 1.0}, 1: {0: 1.0}})
    out = retrofit(w0, g, iterations=200)
    # stationary: 2 w1 - w2 = w0_1, -w1 + 2 w2 = w0_2
    expected = np.linalg.solve(np.array([[2.0, -1.0], [-1.0, 2.0]]), w0)
    np.testing.assert_allclose(out, expected, rtol=0, atol=1e-9)


def test_beta_to_zero_is_identity():
    rng = np.random.default_rng(2)
    w0 = rng.normal(size=(6, 4))
    g = random_graph(rng, 6)
    for i, (ids, betas) in list(g.edges.items()):
        g.edges[i] = (ids, betas * 0.0)
    np.testing.assert_array_equal(retrofit(w0, g, 10), w0)


def test_deterministic():
    rng = np.random.default_rng(3)
    w0 = rng.normal(size=(10, 5))
    g = random_graph(rng, 10)
    assert retrofit(w0, g).tobytes() == retrofit(w0, g).tobytes()


def test_zero_denominator_names_node():
    vocab = Vocabulary(["good", "fine"])
    table = EmbeddingTable(vocab, np.ones((3, 2)))
    g = LexicalGraph(3, {0: {1: 0.0}}, alpha=np.array([0.0, 1.0, 1.0]))
    with pytest.raises(ConfigurationError, match="good"):
        retrofit(table, g)


def test_iterations_must_be_positive():
    with pytest.raises(ConfigurationError):
        retrofit(np.zeros((1, 1)), LexicalGraph(1), 0)


def test_symmetric_once_counted_objective_decreases():
    # With symmetric betas and each undirected edge weighted once, each node
    # update is the exact coordinate minimiser, so this objective never rises.
    for seed in range(10):
        rng = np.random.default_rng(seed)
        n = 12
        pairs = {tuple(sorted(rng.choice(n, 2, replace=False).tolist())) for _ in range(18)}
        weights = {p: rng.uniform(0.1, 1.0) for p in pairs}
        edges = {}
        for (i, j), b in weights.items():
            edges.setdefault(i, {})[j] = b
            edges.setdefault(j, {})[i] = b
        g = LexicalGraph(n, edges)
        w0 = rng.normal(size=(n, 3))
        w = w0.copy()

        def psi():
            return (((w - w0) ** 2).sum()
                    + sum(b * ((w[i] - w[j]) ** 2).sum() for (i, j), b in weights.items()))
        prev = psi()
        for _ in range(10):
            sweep(w0, w, g)
            assert psi() <= prev + 1e-12
            prev = psi()


class TestLoadGraph:
    @pytest.fixture
    def vocab(self, tmp_path):
        p = tmp_path / "v.txt"
        p.write_text("good 1 0\ngreat 0 1\nfine 1 1\nbad -1 0\n")
        return load_embeddings(str(p))[0]

    def write(self, tmp_path, text):
        p = tmp_path / "g.txt"
        p.write_text(text)
        return str(p)

    def test_betas_are_inverse_degree(self, tmp_path, vocab):
        g = load_graph(self.write(tmp_path, "good great fine\n"), vocab)
        i = vocab.index["good"]
        assert g.degree(i) == 2
        np.testing.assert_array_equal(g.edges[i][1], [0.5, 0.5])
        assert g.alpha[i] == 1.0

    def test_oov_neighbours_dropped(self, tmp_path, vocab):
        g = load_graph(self.write(tmp_path, "good great splendid\nsplendid good\n"), vocab)
        i = vocab.index["good"]
        assert g.degree(i) == 1
        np.testing.assert_array_equal(g.edges[i][1], [1.0])
        assert g.num_edges() == 1

    def test_empty_file_gives_identity(self, tmp_path, vocab):
        g = load_graph(self.write(tmp_path, ""), vocab)
        assert g.num_edges() == 0
        w0 = np.random.default_rng(0).normal(size=(len(vocab), 2))
        assert retrofit(w0, g).tobytes() == w0.tobytes()

    def test_malformed_line(self, tmp_path, vocab):
        with pytest.raises(FormatError) as e:
            load_graph(self.write(tmp_path, "good great\nbad\n"), vocab)
        assert e.value.lineno == 2

    def test_self_loops_and_repeats(self, tmp_path, vocab):
        g = load_graph(self.write(tmp_path, "good good great\ngood great fine\n"), vocab)
        assert g.degree(vocab.index["good"]) == 2

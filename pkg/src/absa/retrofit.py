"""Retrofitting word vectors to a lexical graph.

The fitted vectors ``W`` trade closeness to the originals against closeness
to graph neighbours::

    psi = sum_i alpha_i |w_i - w0_i|^2 + sum_(i,j) in E beta_ij |w_i - w_j|^2

and each sweep visits nodes in ascending id, replacing ``w_i`` in place by
``(sum_j beta_ij w_j + alpha_i w0_i) / (sum_j beta_ij + alpha_i)`` over the
out-edges of ``i``.
"""

import numpy as np

from .errors import ConfigurationError, FormatError, ShapeError

DEFAULT_ITERATIONS = 10


class LexicalGraph:
    """Directed edge lists with per-node ``alpha`` and per-edge ``beta``.

    An undirected synonym pair is represented by two directed edges, one
    from each endpoint's own line, each weighted by its source's degree.
    """

    def __init__(self, num_nodes, edges=None, alpha=None):
        self.num_nodes = num_nodes
        self.alpha = np.ones(num_nodes) if alpha is None else np.asarray(alpha, dtype=np.float64)
        # node -> (neighbour ids, betas), both sorted by neighbour id
        self.edges = {}
        for i, nbrs in (edges or {}).items():
            self.set_edges(i, nbrs)

    def set_edges(self, i, neighbours):
        """``neighbours`` maps neighbour id -> beta."""
        items = sorted((j, b) for j, b in dict(neighbours).items() if j != i)
        if not items:
            self.edges.pop(i, None)
            return
        ids = np.array([j for j, _ in items], dtype=np.intp)
        betas = np.array([b for _, b in items], dtype=np.float64)
        if np.any(betas < 0):
            raise ConfigurationError(f"negative beta on an edge from node {i}")
        if ids.min() < 0 or ids.max() >= self.num_nodes:
            raise ConfigurationError(f"edge from node {i} points outside the graph")
        self.edges[i] = (ids, betas)

    @classmethod
    def from_adjacency(cls, num_nodes, adjacency):
        """``alpha = 1`` everywhere and ``beta_ij = 1 / degree(i)``."""
        g = cls(num_nodes)
        for i, nbrs in adjacency.items():
            nbrs = set(nbrs) - {i}
            if nbrs:
                g.set_edges(i, {j: 1.0 / len(nbrs) for j in nbrs})
        return g

    def degree(self, i):
        return len(self.edges[i][0]) if i in self.edges else 0

    def num_edges(self):
        return sum(len(ids) for ids, _ in self.edges.values())


def _matrix(table):
    return np.asarray(getattr(table, "matrix", table), dtype=np.float64)


def objective(original, current, graph):
    w0, w = _matrix(original), _matrix(current)
    if w0.shape != w.shape:
        raise ShapeError(f"original {w0.shape} and current {w.shape} tables differ in shape")
    if w.shape[0] != graph.num_nodes:
        raise ShapeError(f"graph has {graph.num_nodes} nodes, tables have {w.shape[0]} rows")
    total = float((graph.alpha * ((w - w0) ** 2).sum(axis=1)).sum())
    for i, (ids, betas) in graph.edges.items():
        total += float((betas * ((w[i] - w[ids]) ** 2).sum(axis=1)).sum())
    return total


def sweep(original, current, graph, names=None):
    """One in-place pass over all nodes with out-edges, ascending id."""
    for i in sorted(graph.edges):
        ids, betas = graph.edges[i]
        denom = betas.sum() + graph.alpha[i]
        if not denom > 0:
            who = names[i] if names is not None else i
            raise ConfigurationError(f"zero denominator when updating node {who!r}")
        current[i] = (betas @ current[ids] + graph.alpha[i] * original[i]) / denom


def retrofit(original, graph, iterations=DEFAULT_ITERATIONS):
    """Return retrofitted vectors (same type as ``original``) after ``iterations`` sweeps."""
    if iterations < 1:
        raise ConfigurationError(f"iterations must be positive, got {iterations}")
    w0 = _matrix(original)
    if w0.shape[0] != graph.num_nodes:
        raise ShapeError(f"graph has {graph.num_nodes} nodes, table has {w0.shape[0]} rows")
    if np.any(graph.alpha < 0):
        raise ConfigurationError("alpha must be non-negative")
    names = getattr(getattr(original, "vocab", None), "words", None)
    w = w0.copy()
    for _ in range(iterations):
        sweep(w0, w, graph, names)
    if hasattr(original, "with_matrix"):
        return original.with_matrix(w)
    return w


def load_graph(path, vocab):
    """Read ``word neighbour1 neighbour2 ...`` lines into a graph over ``vocab``.

    Lines whose head word is out of vocabulary are skipped; neighbours out
    of vocabulary are dropped before degrees are computed. Repeated lines
    for the same head word are merged.
    """
    adjacency = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) < 2:
                raise FormatError(f"line lists no neighbours for {fields[0]!r}", path, lineno)
            head = fields[0]
            if head not in vocab:
                continue
            i = vocab.index[head]
            nbrs = adjacency.setdefault(i, set())
            nbrs.update(vocab.index[w] for w in fields[1:] if w in vocab and w != head)
    return LexicalGraph.from_adjacency(len(vocab), adjacency)

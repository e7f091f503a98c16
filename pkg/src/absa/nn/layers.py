"""Dense, GRU and bidirectional GRU layers plus their functional forms."""

import math

import numpy as np

from ..errors import ContractError, ShapeError
from . import kernels
from .graph import Graph, Parameter

ACTIVATIONS = ("tanh", "relu", "linear")


def glorot_uniform(rng, fan_in, fan_out, shape):
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape), limit


class Dense:
    """Fully connected layer ``activation(W x + b)``."""

    def __init__(self, in_dim, out_dim, rng, activation="linear", name="dense"):
        if in_dim <= 0 or out_dim <= 0:
            raise ShapeError(f"{name}: dims must be positive, got {in_dim}->{out_dim}")
        if activation not in ACTIVATIONS:
            raise ContractError(f"{name}: unknown activation {activation!r}")
        self.in_dim, self.out_dim, self.activation, self.name = in_dim, out_dim, activation, name
        w, limit = glorot_uniform(rng, in_dim, out_dim, (out_dim, in_dim))
        self.weight = Parameter(f"{name}.weight", w)
        self.bias = Parameter(f"{name}.bias", np.zeros(out_dim))
        self.init_info = {"weight": f"uniform(+-{limit!r})", "bias": "zeros"}

    def parameters(self):
        return [self.weight, self.bias]

    def apply(self, g, x):
        out = g.linear(x, g.param(self.weight), g.param(self.bias))
        if self.activation == "tanh":
            return g.tanh(out)
        if self.activation == "relu":
            return g.relu(out)
        return out


class GRUCell:
    """GRU with gate blocks stacked ``[update; reset; candidate]``.

    ``W`` is (3H, input_dim), ``U`` is (3H, H) and ``b`` is (3H,). The reset
    gate multiplies the previous state before the candidate's recurrent
    transform, and the new state is ``(1 - z) * h_prev + z * candidate``.
    """

    def __init__(self, input_dim, hidden_dim, rng, name="gru"):
        if input_dim <= 0 or hidden_dim <= 0:
            raise ShapeError(f"{name}: dims must be positive, got {input_dim}->{hidden_dim}")
        self.input_dim, self.hidden_dim, self.name = input_dim, hidden_dim, name
        blocks_w, blocks_u = [], []
        for _ in range(3):
            w, lw = glorot_uniform(rng, input_dim, hidden_dim, (hidden_dim, input_dim))
            u, lu = glorot_uniform(rng, hidden_dim, hidden_dim, (hidden_dim, hidden_dim))
            blocks_w.append(w)
            blocks_u.append(u)
        self.W = Parameter(f"{name}.W", np.vstack(blocks_w))
        self.U = Parameter(f"{name}.U", np.vstack(blocks_u))
        self.b = Parameter(f"{name}.b", np.zeros(3 * hidden_dim))
        self.init_info = {"W": f"uniform(+-{lw!r})", "U": f"uniform(+-{lu!r})", "b": "zeros", "h0": "zeros"}

    def parameters(self):
        return [self.W, self.U, self.b]

    def apply(self, g, x, reverse=False):
        return g.gru(x, g.param(self.W), g.param(self.U), g.param(self.b), reverse=reverse)


class BiGRU:
    """Two independent GRU cells; outputs are ``concat(forward_i, backward_i)``."""

    def __init__(self, input_dim, hidden_dim, rng, name="bigru"):
        self.fwd = GRUCell(input_dim, hidden_dim, rng, name=f"{name}.fwd")
        self.bwd = GRUCell(input_dim, hidden_dim, rng, name=f"{name}.bwd")
        self.input_dim = input_dim
        self.output_dim = 2 * hidden_dim

    def parameters(self):
        return self.fwd.parameters() + self.bwd.parameters()

    def apply(self, g, x):
        """Return ``(concatenated states, forward states, backward states)``."""
        hf = self.fwd.apply(g, x)
        hb = self.bwd.apply(g, x, reverse=True)
        return g.concat([hf, hb], axis=1), hf, hb


def _as_matrix(inputs, width, what):
    rows = []
    for i, v in enumerate(inputs):
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (width,):
            raise ShapeError(f"{what}: input {i} has shape {v.shape}, expected ({width},)")
        rows.append(v)
    return np.array(rows).reshape(len(rows), width)


def gru_forward(cell, inputs, h0=None):
    """Hidden states of ``cell`` over ``inputs`` as a list of vectors."""
    x = _as_matrix(inputs, cell.input_dim, cell.name)
    if h0 is None:
        h0 = np.zeros(cell.hidden_dim)
    h0 = np.asarray(h0, dtype=np.float64)
    if h0.shape != (cell.hidden_dim,):
        raise ShapeError(f"{cell.name}: h0 has shape {h0.shape}, expected ({cell.hidden_dim},)")
    if len(x) == 0:
        return []
    xp = x @ cell.W.value.T + cell.b.value
    hs = kernels.gru_forward(xp, cell.U.value, h0)[0]
    return list(hs)


def bigru_forward(fwd, bwd, inputs):
    if fwd.input_dim != bwd.input_dim:
        raise ShapeError(f"bigru: cells disagree on input_dim ({fwd.input_dim} vs {bwd.input_dim})")
    inputs = list(inputs)
    hf = gru_forward(fwd, inputs)
    hb = gru_forward(bwd, inputs[::-1])[::-1]
    return [np.concatenate([a, b]) for a, b in zip(hf, hb)]


def softmax_cross_entropy(logits, expected):
    """Return ``(loss, probs)`` for one logit vector and a target distribution."""
    expected = np.asarray(expected, dtype=np.float64)
    if expected.ndim != 1 or np.any(expected < 0) or np.any(expected > 1):
        raise ContractError("expected distribution entries must lie in [0, 1]")
    if abs(expected.sum() - 1.0) > 1e-9:
        raise ContractError(f"expected distribution sums to {expected.sum()!r}, not 1")
    g = Graph()
    node = g.softmax_cross_entropy(g.constant(logits), expected)
    return float(node.value), node.probs

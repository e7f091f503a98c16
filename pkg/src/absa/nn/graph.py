"""Tape-based reverse-mode differentiation over numpy arrays.

Every operation on a :class:`Graph` appends a node to the tape. Because
nodes are only ever created from existing nodes, reverse creation order is
a valid topological order and :meth:`Graph.backward` simply walks the tape
backwards.
"""

import numpy as np

from ..errors import ShapeError, StateError
from . import kernels


class Parameter:
    """A named, trainable array with an accumulated gradient."""

    def __init__(self, name, value):
        self.name = name
        self.value = np.array(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)

    @property
    def shape(self):
        return self.value.shape

    def zero_grad(self):
        self.grad[...] = 0.0

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.value.shape})"


class Node:
    __slots__ = ("value", "grad", "parents", "backward_fn", "param", "index", "probs")

    def __init__(self, value, parents=(), backward_fn=None, param=None, index=-1):
        self.value = value
        self.grad = None
        self.parents = parents
        self.backward_fn = backward_fn
        self.param = param
        self.index = index
        self.probs = None

    @property
    def shape(self):
        return self.value.shape


class Graph:
    def __init__(self):
        self._tape = []
        self._param_nodes = {}
        self._done = False

    def _push(self, value, parents=(), backward_fn=None, param=None):
        node = Node(value, parents, backward_fn, param, len(self._tape))
        self._tape.append(node)
        return node

    # leaves

    def constant(self, value):
        return self._push(np.asarray(value, dtype=np.float64))

    def param(self, p):
        node = self._param_nodes.get(id(p))
        if node is None:
            node = self._push(p.value, param=p)
            self._param_nodes[id(p)] = node
        return node

    # elementwise

    def add(self, a, b):
        def bw(g):
            return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)
        return self._push(a.value + b.value, (a, b), bw)

    def mul(self, a, b):
        av, bv = a.value, b.value

        def bw(g):
            return _unbroadcast(g * bv, a.shape), _unbroadcast(g * av, b.shape)
        return self._push(av * bv, (a, b), bw)

    def square(self, a):
        av = a.value
        return self._push(av * av, (a,), lambda g: (2.0 * av * g,))

    def tanh(self, a):
        out = np.tanh(a.value)
        return self._push(out, (a,), lambda g: (g * (1.0 - out * out),))

    def sigmoid(self, a):
        out = 0.5 * (np.tanh(0.5 * a.value) + 1.0)
        return self._push(out, (a,), lambda g: (g * out * (1.0 - out),))

    def relu(self, a):
        mask = a.value > 0
        return self._push(a.value * mask, (a,), lambda g: (g * mask,))

    def sum(self, a):
        shape = a.shape
        return self._push(np.asarray(a.value.sum()), (a,), lambda g: (np.broadcast_to(g, shape).copy(),))

    # structural

    def linear(self, x, W, b):
        """Row-wise affine map ``x @ W.T + b``; ``x`` is (n, in) or (in,)."""
        xv, Wv = x.value, W.value
        if xv.shape[-1] != Wv.shape[1]:
            raise ShapeError(f"linear: input width {xv.shape[-1]} != weight columns {Wv.shape[1]}")

        def bw(g):
            if xv.ndim == 1:
                return g @ Wv, np.outer(g, xv), g
            return g @ Wv, g.T @ xv, g.sum(axis=0)
        return self._push(xv @ Wv.T + b.value, (x, W, b), bw)

    def concat(self, nodes, axis=-1):
        values = [n.value for n in nodes]
        ax = axis % values[0].ndim
        sizes = np.cumsum([v.shape[ax] for v in values])[:-1]

        def bw(g):
            return tuple(np.split(g, sizes, axis=ax))
        return self._push(np.concatenate(values, axis=ax), tuple(nodes), bw)

    def row(self, x, i):
        shape = x.shape

        def bw(g):
            out = np.zeros(shape)
            out[i] = g
            return (out,)
        return self._push(x.value[i].copy(), (x,), bw)

    def take_rows(self, table, indices):
        """Gather rows of ``table``; gradient scatters back with accumulation."""
        idx = np.asarray(indices, dtype=np.intp)
        shape = table.shape

        def bw(g):
            out = np.zeros(shape)
            np.add.at(out, idx, g)
            return (out,)
        return self._push(table.value[idx], (table,), bw)

    # fused

    def gru(self, x, W, U, b, h0=None, reverse=False):
        """Run a GRU over the rows of ``x``; returns the (n, hidden) states.

        With ``reverse`` the sequence is read right to left and the states
        are returned aligned with the original positions.
        """
        xv = x.value
        hd = U.value.shape[1]
        if xv.shape[1] != W.value.shape[1]:
            raise ShapeError(f"gru: input width {xv.shape[1]} != cell input_dim {W.value.shape[1]}")
        h0v = np.zeros(hd) if h0 is None else np.asarray(h0, dtype=np.float64)
        xs = xv[::-1] if reverse else xv
        xp = xs @ W.value.T + b.value
        hs, zs, rs, cs = kernels.gru_forward(xp, U.value, h0v)
        Uv = U.value

        def bw(g):
            gs = g[::-1] if reverse else g
            dxp, dU, _ = kernels.gru_backward(gs, Uv, h0v, hs, zs, rs, cs)
            dx = dxp @ W.value
            return (dx[::-1] if reverse else dx), dxp.T @ xs, dU, dxp.sum(axis=0)
        out = hs[::-1] if reverse else hs
        return self._push(out, (x, W, U, b), bw)

    def softmax_cross_entropy(self, logits, targets):
        """Summed cross-entropy ``-sum p log softmax(logits)`` over rows."""
        lv = np.atleast_2d(logits.value)
        pv = np.atleast_2d(np.asarray(targets, dtype=np.float64))
        if lv.shape != pv.shape:
            raise ShapeError(f"cross-entropy: logits {lv.shape} vs targets {pv.shape}")
        shifted = lv - lv.max(axis=1, keepdims=True)
        lse = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        logq = shifted - lse
        q = np.exp(logq)
        loss = -(pv * logq).sum()
        shape = logits.shape

        def bw(g):
            d = q * pv.sum(axis=1, keepdims=True) - pv
            return (g * d.reshape(shape),)
        node = self._push(np.asarray(loss), (logits,), bw)
        node.probs = q if logits.value.ndim == 2 else q[0]
        return node

    # differentiation

    def backward(self, loss):
        """Accumulate ``d loss / d p`` into ``p.grad`` for every parameter used.

        Returns a mapping from parameter name to its gradient array.
        """
        if not self._tape:
            raise StateError("backward called before any forward computation")
        if self._done:
            raise StateError("graph has already been differentiated")
        if loss.index < 0 or loss.index >= len(self._tape) or self._tape[loss.index] is not loss:
            raise StateError("loss node was not produced by this graph")
        if loss.value.size != 1:
            raise ShapeError(f"backward needs a scalar loss, got shape {loss.value.shape}")
        self._done = True
        loss.grad = np.ones_like(loss.value)
        for node in reversed(self._tape[: loss.index + 1]):
            if node.grad is None:
                continue
            if node.param is not None:
                node.param.grad += node.grad
            if node.backward_fn is None:
                continue
            for parent, g in zip(node.parents, node.backward_fn(node.grad)):
                if parent.grad is None:
                    parent.grad = np.array(g, dtype=np.float64)
                else:
                    parent.grad = parent.grad + g
        return {n.param.name: n.param.grad for n in self._param_nodes.values()}


def _unbroadcast(g, shape):
    if g.shape == shape:
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g

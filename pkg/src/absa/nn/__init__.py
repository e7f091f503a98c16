"""Small reverse-mode differentiation core with GRU layers and Adam."""

from .graph import Graph, Node, Parameter
from .kernels import BACKEND
from .layers import BiGRU, Dense, GRUCell, bigru_forward, gru_forward, softmax_cross_entropy
from .optim import Adam
from .serialize import load_params, save_params

__all__ = [
    "Adam", "BACKEND", "BiGRU", "Dense", "GRUCell", "Graph", "Node", "Parameter",
    "bigru_forward", "gru_forward", "load_params", "save_params", "softmax_cross_entropy",
]

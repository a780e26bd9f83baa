from .mlp import Adam, Mlp, sigmoid, softplus
from .serialize import CheckpointError, load_weights, save_weights

__all__ = [
    "Adam",
    "CheckpointError",
    "Mlp",
    "load_weights",
    "save_weights",
    "sigmoid",
    "softplus",
]

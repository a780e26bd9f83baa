from .model import (
    GaeConfig,
    GaeError,
    GaeModel,
    TrainedGae,
    gae_loss_and_grads,
    train_gae,
)
from .ops import (
    aggregate_neighbors,
    attention_score,
    attention_weights,
    decode_link,
    encode_node,
)

__all__ = [
    "GaeConfig",
    "GaeError",
    "GaeModel",
    "TrainedGae",
    "aggregate_neighbors",
    "attention_score",
    "attention_weights",
    "decode_link",
    "encode_node",
    "gae_loss_and_grads",
    "train_gae",
]

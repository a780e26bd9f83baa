from .cgan import CganConfig, CganPair, TrainingDiverged, train_cgan
from .embedding import DEFAULT_DIM, HashedEmbedder
from .lexicon import awareness_score, default_lexicon, load_lexicon
from .model import (
    MIN_TRAINING_POSTS,
    PerceptionConfig,
    PerceptionModel,
    train_perception,
)
from .scoring import (
    REAL_POST_THRESHOLD,
    PerceptionResult,
    area_condition,
    area_perception,
    compute_perceptions,
    posts_by_area_date,
    read_perceptions,
    write_perceptions,
)

__all__ = [
    "CganConfig",
    "CganPair",
    "DEFAULT_DIM",
    "HashedEmbedder",
    "MIN_TRAINING_POSTS",
    "PerceptionConfig",
    "PerceptionModel",
    "PerceptionResult",
    "REAL_POST_THRESHOLD",
    "TrainingDiverged",
    "area_condition",
    "area_perception",
    "awareness_score",
    "compute_perceptions",
    "default_lexicon",
    "load_lexicon",
    "posts_by_area_date",
    "read_perceptions",
    "train_cgan",
    "train_perception",
    "write_perceptions",
]

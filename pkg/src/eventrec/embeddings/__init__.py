"""Language-specific random-walk embeddings and embedding-based candidate retrieval."""

from .skipgram import EmbedConfig, pair_objective, train_embeddings
from .table import EmbeddingTable, candidate_events, cosine
from .walks import WalkConfig, generate_walks

__all__ = [
    "EmbedConfig",
    "EmbeddingTable",
    "WalkConfig",
    "candidate_events",
    "cosine",
    "generate_walks",
    "pair_objective",
    "train_embeddings",
]

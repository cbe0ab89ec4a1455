"""
Language-specific event recommendation.

Given a query entity and a language, recommend events from a knowledge graph
that matter to that language community. Candidates come from random-walk
embeddings of the language's link graph and are re-ranked by a LambdaMART
model over spatial, temporal, link and embedding features, trained on
click-derived relevance labels.
"""

from .clickstream import (
    ClickTable,
    GroundTruth,
    RelevanceTable,
    balance_clicks,
    build_ground_truth,
    load_clicks,
    relevance,
    split_folds,
)
from .features import FEATURE_GROUPS, FEATURE_NAMES, FeatureConfig, FeatureVector, extract
from .kg import EntityRecord, KnowledgeGraph, LinkSet, load_entities, load_graph, load_link_set

__version__ = "0.1.0"

__all__ = [
    "ClickTable",
    "EntityRecord",
    "FEATURE_GROUPS",
    "FEATURE_NAMES",
    "FeatureConfig",
    "FeatureVector",
    "GroundTruth",
    "KnowledgeGraph",
    "LinkSet",
    "RelevanceTable",
    "balance_clicks",
    "build_ground_truth",
    "extract",
    "load_clicks",
    "load_entities",
    "load_graph",
    "load_link_set",
    "relevance",
    "split_folds",
]

"""
LambdaMART: boosted regression trees fit to LambdaRank gradients.

Each round computes per-group lambdas and hessians from the current scores,
fits a Newton tree to gradient ``-lambda`` and adds ``learning_rate`` times its
output to every score.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..errors import ModelFormatError
from ..features import FEATURE_NAMES, FeatureVector
from ..metrics import ndcg_at_k
from .lambdas import compute_lambdas
from .tree import RegressionTree, fit_tree

logger = logging.getLogger(__name__)

MODEL_FORMAT = "eventrec-lambdamart"
MODEL_VERSION = 1


@dataclass(frozen=True)
class LambdaMartConfig:
    n_trees: int = 100
    learning_rate: float = 0.1
    max_leaves: int = 16
    min_samples_leaf: int = 1
    l2_leaf_reg: float = 1.0
    ndcg_truncation: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 0:
            raise ValueError("n_trees must be >= 0")
        if self.learning_rate <= 0 or self.l2_leaf_reg <= 0:
            raise ValueError("learning_rate and l2_leaf_reg must be positive")
        if self.max_leaves < 1 or self.min_samples_leaf < 1 or self.ndcg_truncation < 1:
            raise ValueError("max_leaves, min_samples_leaf and ndcg_truncation must be >= 1")


def feature_fingerprint(names: Sequence[str]) -> str:
    return hashlib.sha256("\n".join(names).encode("utf-8")).hexdigest()[:16]


@dataclass
class QueryGroup:
    query: str
    language: str
    X: np.ndarray
    labels: np.ndarray
    items: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.labels = np.asarray(self.labels, dtype=float)
        if len(self.X) != len(self.labels):
            raise ValueError(f"group {self.query!r}: {len(self.X)} rows but {len(self.labels)} labels")
        if len(self.labels) < 2:
            raise ValueError(f"group {self.query!r} needs at least 2 items")
        if not np.all(np.isfinite(self.labels)):
            raise ValueError(f"group {self.query!r} has non-finite labels")


@dataclass
class TrainingSet:
    groups: list[QueryGroup]
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __len__(self):
        return len(self.groups)

    def stacked(self):
        """All rows, all labels and the group boundaries as offsets."""
        X = np.vstack([g.X for g in self.groups])
        y = np.concatenate([g.labels for g in self.groups])
        offsets = np.zeros(len(self.groups) + 1, dtype=np.int64)
        np.cumsum([len(g.labels) for g in self.groups], out=offsets[1:])
        return X, y, offsets

    def subset(self, queries) -> "TrainingSet":
        keep = set(queries)
        return TrainingSet([g for g in self.groups if g.query in keep], self.feature_names)

    def without(self, names) -> "TrainingSet":
        """Copy with the named feature columns removed."""
        drop = set(names)
        cols = [i for i, n in enumerate(self.feature_names) if n not in drop]
        groups = [dataclasses.replace(g, X=g.X[:, cols]) for g in self.groups]
        return TrainingSet(groups, tuple(self.feature_names[i] for i in cols))


@dataclass
class TreeEnsemble:
    trees: list[RegressionTree]
    learning_rate: float
    base_score: float = 0.0
    config: LambdaMartConfig = field(default_factory=LambdaMartConfig)
    feature_names: tuple[str, ...] = FEATURE_NAMES
    history: list[dict] = field(default_factory=list, compare=False, repr=False)

    @property
    def fingerprint(self) -> str:
        return feature_fingerprint(self.feature_names)

    def predict(self, X, feature_names: Sequence[str] | None = None) -> np.ndarray:
        if feature_names is not None and feature_fingerprint(feature_names) != self.fingerprint:
            raise ValueError("feature order does not match the model's feature fingerprint")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.feature_names):
            raise ValueError(f"expected {len(self.feature_names)} features, got {X.shape[1]}")
        out = np.full(len(X), self.base_score)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out


def group_ndcg(y, scores, offsets, k) -> float:
    vals = []
    for a, b in zip(offsets[:-1], offsets[1:]):
        order = np.argsort(-scores[a:b], kind="stable")
        vals.append(ndcg_at_k(y[a:b][order], k))
    return float(np.mean(vals))


def train(ts: TrainingSet, config: LambdaMartConfig = LambdaMartConfig(),
          on_round: Callable[[int, np.ndarray, np.ndarray], None] | None = None) -> TreeEnsemble:
    """Fit a LambdaMART ensemble.

    ``on_round(round, lambdas, offsets)`` is called after lambdas are computed
    in every round. Training nDCG per round ends up in ``model.history``.
    """
    if not ts.groups:
        raise ValueError("empty training set")
    X, y, offsets = ts.stacked()
    k = config.ndcg_truncation
    model = TreeEnsemble([], config.learning_rate, 0.0, config, tuple(ts.feature_names))
    scores = np.full(len(y), model.base_score)
    lam = np.empty(len(y))
    hess = np.empty(len(y))
    for r in range(config.n_trees):
        for a, b in zip(offsets[:-1], offsets[1:]):
            lam[a:b], hess[a:b] = compute_lambdas(y[a:b], scores[a:b], k)
        if on_round is not None:
            on_round(r, lam, offsets)
        tree = fit_tree(X, -lam, hess, config.max_leaves, config.min_samples_leaf, config.l2_leaf_reg)
        model.trees.append(tree)
        scores += config.learning_rate * tree.predict(X)
        ndcg = group_ndcg(y, scores, offsets, k)
        model.history.append({"round": r, "ndcg": ndcg})
        logger.debug("round %d: train nDCG@%d = %.4f", r, k, ndcg)
    if config.n_trees:
        logger.info("trained %d trees, final train nDCG@%d = %.4f", config.n_trees, k, model.history[-1]["ndcg"])
    return model


def predict(model: TreeEnsemble, fv) -> float:
    """Score one :class:`~eventrec.features.FeatureVector` (full ten-feature models only)."""
    if isinstance(fv, FeatureVector):
        return float(model.predict(fv.as_array(), FEATURE_NAMES)[0])
    return float(model.predict(np.asarray(fv, dtype=float))[0])


def dumps_model(model: TreeEnsemble) -> str:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "feature_names": list(model.feature_names),
        "feature_fingerprint": model.fingerprint,
        "config": dataclasses.asdict(model.config),
        "learning_rate": model.learning_rate,
        "base_score": model.base_score,
        "trees": [{"nodes": t.to_nodes()} for t in model.trees],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def loads_model(text: str) -> TreeEnsemble:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"truncated or malformed model file: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be an object")
    if "version" not in doc:
        raise ModelFormatError("unversioned model")
    if doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"unknown model format {doc.get('format')!r}")
    if doc["version"] != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {doc['version']!r}")
    try:
        names = tuple(doc["feature_names"])
        if feature_fingerprint(names) != doc["feature_fingerprint"]:
            raise ModelFormatError("feature fingerprint does not match feature names")
        return TreeEnsemble(
            trees=[RegressionTree.from_nodes(t["nodes"]) for t in doc["trees"]],
            learning_rate=float(doc["learning_rate"]),
            base_score=float(doc["base_score"]),
            config=LambdaMartConfig(**doc["config"]),
            feature_names=names,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"invalid model document: {exc}") from None


def save_model(model: TreeEnsemble, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path) -> TreeEnsemble:
    return loads_model(Path(path).read_text(encoding="utf-8"))

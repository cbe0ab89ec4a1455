"""
Ranking metrics and single-feature baseline rankers.

nDCG uses linear gain (gain = label) and the ``1 / log2(rank + 1)`` discount.
Average precision follows the truncated variant where the sum of precision
values at relevant ranks is divided by the number of relevant items *within*
the top ``k`` (not by the total number of relevant items).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np


def discounts(n: int, k: int | None = None) -> np.ndarray:
    """Position discounts ``1/log2(r + 1)`` for ranks 1..n, zero beyond ``k``."""
    d = 1.0 / np.log2(np.arange(2, n + 2))
    if k is not None:
        d[k:] = 0.0
    return d


def dcg_at_k(labels, k: int) -> float:
    labels = np.asarray(labels, dtype=float)[:k]
    return float(labels @ discounts(len(labels)))


def ndcg_at_k(labels, k: int) -> float:
    """nDCG@k of labels listed in predicted order; 0 when no label is positive.

    >>> round(ndcg_at_k([2, 3, 0], 3), 4)
    0.9134
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    labels = np.asarray(labels, dtype=float)
    ideal = dcg_at_k(np.sort(labels)[::-1], k)
    if ideal <= 0:
        return 0.0
    return dcg_at_k(labels, k) / ideal


def average_precision_at_k(relevant, k: int) -> float:
    """AP@k of a binary relevance list given in ranked order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rel = np.asarray(relevant, dtype=bool)[:k]
    hits = np.cumsum(rel)
    if hits.size == 0 or hits[-1] == 0:
        return 0.0
    precision = hits / np.arange(1, rel.size + 1)
    return float(precision[rel].sum() / hits[-1])


def map_at_k(ranked_lists, k: int) -> float:
    """Mean AP@k over queries. Each list holds labels in ranked order; label > 0 is relevant."""
    ranked_lists = list(ranked_lists)
    if not ranked_lists:
        raise ValueError("no ranked lists")
    return float(np.mean([average_precision_at_k(np.asarray(r, dtype=float) > 0, k) for r in ranked_lists]))


def candidate_recall(gt_events, candidates) -> float:
    """Fraction of ground-truth events present among the candidates."""
    gt = set(gt_events)
    if not gt:
        raise ValueError("empty ground-truth event set")
    return len(gt & set(candidates)) / len(gt)


@dataclass
class RankedList:
    query: str
    items: list[tuple[str, float]]
    language: str | None = None

    @property
    def events(self) -> list[str]:
        return [v for v, _ in self.items]


def sort_by_score(ids: Sequence[str], scores) -> list[tuple[str, float]]:
    """Descending score order with ties broken by id."""
    scores = np.asarray(scores, dtype=float)
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return [(ids[i], float(scores[i])) for i in order]


def rank_by_feature(query: str, candidates: Mapping, feature: str, language: str | None = None) -> RankedList:
    """Rank candidate events by one feature value.

    ``candidates`` maps event id to a :class:`~eventrec.features.FeatureVector`
    (or any object exposing the feature as an attribute).
    """
    if feature not in ("milne_witten", "embedding_similarity"):
        raise ValueError(f"unsupported baseline feature {feature!r}")
    ids = list(candidates)
    values = [getattr(candidates[v], feature) for v in ids]
    return RankedList(query, sort_by_score(ids, values), language)


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("pearson needs two 1-D series of equal length >= 2")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = np.sqrt(dx @ dx), np.sqrt(dy @ dy)
    if sx == 0 or sy == 0:
        raise ValueError("undefined correlation: constant series")
    return float(np.clip(dx @ dy / (sx * sy), -1.0, 1.0))


def abs_correlation_matrix(X) -> np.ndarray:
    """Pairwise |PCC| between columns; NaN where a column is constant."""
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    out = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(i, n):
            try:
                out[i, j] = out[j, i] = abs(pearson(X[:, i], X[:, j]))
            except ValueError:
                pass
    return out


@dataclass
class EvalReport:
    """Long-format metric rows: (method, language, fold, metric, value)."""

    rows: list[tuple[str, str, str, str, float]] = field(default_factory=list)

    def add(self, method, language, fold, metric, value):
        self.rows.append((method, language, str(fold), metric, float(value)))

    def value(self, method, language, fold, metric) -> float:
        for m, lang, f, name, v in self.rows:
            if (m, lang, f, name) == (method, language, str(fold), metric):
                return v
        raise KeyError((method, language, fold, metric))

    def to_tsv(self) -> str:
        lines = ["method\tlanguage\tfold\tmetric\tvalue"]
        lines += [f"{m}\t{lang}\t{f}\t{name}\t{v!r}" for m, lang, f, name, v in self.rows]
        return "\n".join(lines) + "\n"

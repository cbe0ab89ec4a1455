"""LambdaRank gradients weighted by the nDCG change of swapping two items."""

import numpy as np
from scipy.special import expit

from ..metrics import discounts


def ranks_from_scores(scores) -> np.ndarray:
    """0-based rank of each item under descending scores, ties by position."""
    scores = np.asarray(scores, dtype=float)
    order = np.argsort(-scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.int64)
    ranks[order] = np.arange(len(scores))
    return ranks


def ideal_dcg(labels, k) -> float:
    labels = np.sort(np.asarray(labels, dtype=float))[::-1][:k]
    return float(labels @ discounts(len(labels)))


def delta_ndcg(labels, scores, i, j, k) -> float:
    """|change in nDCG@k| when items ``i`` and ``j`` swap rank positions."""
    if i == j:
        raise ValueError("i and j must differ")
    labels = np.asarray(labels, dtype=float)
    idcg = ideal_dcg(labels, k)
    if idcg <= 0:
        return 0.0
    ranks = ranks_from_scores(scores)
    disc = discounts(len(labels), k)
    di, dj = disc[ranks[i]], disc[ranks[j]]
    return abs((labels[i] - labels[j]) * (di - dj)) / idcg


def compute_lambdas(labels, scores, k):
    """Per-item lambdas and hessians of one query group.

    For every pair with ``label_i > label_j``, ``rho = 1 / (1 + exp(s_i - s_j))``
    and weight ``w = rho * |delta nDCG|``: ``lambda_i += w``, ``lambda_j -= w``,
    both hessians grow by ``rho * (1 - rho) * |delta nDCG|``. Positive lambdas
    push an item up.
    """
    labels = np.asarray(labels, dtype=float)
    scores = np.asarray(scores, dtype=float)
    n = len(labels)
    lam = np.zeros(n)
    hess = np.zeros(n)
    idcg = ideal_dcg(labels, k)
    if n < 2 or idcg <= 0:
        return lam, hess
    disc = discounts(n, k)[ranks_from_scores(scores)]
    better = labels[:, None] > labels[None, :]
    delta = np.abs((labels[:, None] - labels[None, :]) * (disc[:, None] - disc[None, :])) / idcg
    rho = expit(-(scores[:, None] - scores[None, :]))
    w = np.where(better, rho * delta, 0.0)
    hw = np.where(better, rho * (1.0 - rho) * delta, 0.0)
    lam = w.sum(axis=1) - w.sum(axis=0)
    hess = hw.sum(axis=1) + hw.sum(axis=0)
    return lam, hess

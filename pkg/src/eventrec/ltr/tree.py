"""
Second-order regression trees for gradient boosting.

Trees grow best-first: the leaf whose best split has the largest gain is split
next, until ``max_leaves`` is reached or no split has positive gain. For
gradient sum ``G`` and hessian sum ``H`` a split scores::

    G_L^2 / (H_L + lam) + G_R^2 / (H_R + lam) - G^2 / (H + lam)

and a leaf outputs ``-G / (H + lam)``. Ties go to the lowest feature index,
then the lowest threshold. Samples with ``x <= threshold`` go left.
"""

from __future__ import annotations

import numpy as np

LEAF = -1


class RegressionTree:
    """Flat node arrays; ``feature[n] == LEAF`` marks a leaf whose output is ``value[n]``."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float)

    @classmethod
    def leaf(cls, value: float) -> "RegressionTree":
        return cls([LEAF], [0.0], [LEAF], [LEAF], [value])

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    def apply(self, X) -> np.ndarray:
        """Leaf node id reached by each row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            idx = np.nonzero(active)[0]
            n = node[idx]
            go_left = X[idx, self.feature[n]] <= self.threshold[n]
            node[idx] = np.where(go_left, self.left[n], self.right[n])
            active = self.feature[node] != LEAF
        return node

    def predict(self, X) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_nodes(self) -> list[dict]:
        nodes = []
        for i in range(self.n_nodes):
            if self.feature[i] == LEAF:
                nodes.append({"id": i, "value": float(self.value[i])})
            else:
                nodes.append({
                    "id": i,
                    "feature": int(self.feature[i]),
                    "threshold": float(self.threshold[i]),
                    "left": int(self.left[i]),
                    "right": int(self.right[i]),
                })
        return nodes

    @classmethod
    def from_nodes(cls, nodes: list[dict]) -> "RegressionTree":
        n = len(nodes)
        feature = np.full(n, LEAF)
        threshold = np.zeros(n)
        left = np.full(n, LEAF)
        right = np.full(n, LEAF)
        value = np.zeros(n)
        for node in nodes:
            i = node["id"]
            if "value" in node:
                value[i] = node["value"]
            else:
                feature[i] = node["feature"]
                threshold[i] = node["threshold"]
                left[i] = node["left"]
                right[i] = node["right"]
        return cls(feature, threshold, left, right, value)


def _tie_tol(x):
    return 1e-12 * max(1.0, abs(x))


def best_split(X, g, h, idx, min_samples_leaf=1, l2=1.0):
    """Best (gain, feature, threshold) over rows ``idx``; gain 0 and feature None if no split helps."""
    G, H = g[idx].sum(), h[idx].sum()
    parent = G * G / (H + l2)
    n = len(idx)
    best = (0.0, None, None)
    if n < 2 * min_samples_leaf:
        return best
    gi, hi = g[idx], h[idx]
    for f in range(X.shape[1]):
        x = X[idx, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        gl = np.cumsum(gi[order])[:-1]
        hl = np.cumsum(hi[order])[:-1]
        gain = gl * gl / (hl + l2) + (G - gl) ** 2 / (H - hl + l2) - parent
        pos = np.arange(1, n)  # size of the left side
        valid = (xs[:-1] < xs[1:]) & (pos >= min_samples_leaf) & (n - pos >= min_samples_leaf)
        if not valid.any():
            continue
        gain = np.where(valid, gain, -np.inf)
        top = gain.max()
        # rounding noise must not break the lowest-feature / lowest-threshold tie rule
        i = int(np.argmax(gain >= top - _tie_tol(top)))
        if gain[i] > best[0] + _tie_tol(best[0]):
            lo, hi_ = xs[i], xs[i + 1]
            thr = lo + (hi_ - lo) / 2
            if not (lo <= thr < hi_):
                thr = lo
            best = (float(gain[i]), f, float(thr))
    return best


def fit_tree(X, g, h, max_leaves=16, min_samples_leaf=1, l2=1.0) -> RegressionTree:
    """Fit one tree to gradients ``g`` and hessians ``h``."""
    X = np.asarray(X, dtype=float)
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if len(X) == 0:
        raise ValueError("cannot fit a tree on an empty sample set")
    feature, threshold, left, right, value = [LEAF], [0.0], [LEAF], [LEAF], [0.0]
    members = {0: np.arange(len(X))}
    splits = {0: best_split(X, g, h, members[0], min_samples_leaf, l2)}
    n_leaves = 1
    while n_leaves < max_leaves:
        # largest gain first, lowest node id on ties
        node = min((n for n in splits if splits[n][1] is not None), key=lambda n: (-splits[n][0], n), default=None)
        if node is None:
            break
        _, f, thr = splits.pop(node)
        idx = members.pop(node)
        mask = X[idx, f] <= thr
        ids = []
        for part in (idx[mask], idx[~mask]):
            nid = len(feature)
            feature.append(LEAF)
            threshold.append(0.0)
            left.append(LEAF)
            right.append(LEAF)
            value.append(0.0)
            members[nid] = part
            splits[nid] = best_split(X, g, h, part, min_samples_leaf, l2)
            ids.append(nid)
        feature[node], threshold[node] = f, thr
        left[node], right[node] = ids
        n_leaves += 1
    for nid, idx in members.items():
        value[nid] = 0.0 - g[idx].sum() / (h[idx].sum() + l2)
    return RegressionTree(feature, threshold, left, right, value)

"""
Cross-validated evaluation, feature-group ablation and feature correlation.

Held-out queries are ranked by the model (ties broken by event id) and scored
with nDCG@k and MAP@k; per-fold values are means over the fold's queries and
the overall value is the mean over folds.
"""

from __future__ import annotations

import logging

import numpy as np

from .clickstream import FoldAssignment
from .features import FEATURE_GROUPS
from .ltr import LambdaMartConfig, TrainingSet, train
from .metrics import EvalReport, abs_correlation_matrix, map_at_k, ndcg_at_k, sort_by_score

logger = logging.getLogger(__name__)

BASELINES = {"milne_witten": "milne_witten", "embedding": "embedding_similarity"}


def _ordered_labels(group, scores):
    items = group.items or [f"{i:09d}" for i in range(len(group.labels))]
    pos = {v: i for i, v in enumerate(items)}
    return group.labels[[pos[v] for v, _ in sort_by_score(items, scores)]]


def score_groups(groups, scorer, k=10):
    """Mean nDCG@k and MAP@k over groups ranked by ``scorer(group) -> scores``."""
    ranked = [_ordered_labels(g, scorer(g)) for g in groups]
    return float(np.mean([ndcg_at_k(r, k) for r in ranked])), map_at_k(ranked, k)


def feature_scorer(ts: TrainingSet, name: str):
    col = ts.feature_names.index(name)
    return lambda g: g.X[:, col]


def cross_validate(ts: TrainingSet, folds: FoldAssignment, config: LambdaMartConfig = LambdaMartConfig(),
                   k: int = 10, language: str = "", baselines: bool = True,
                   report: EvalReport | None = None) -> EvalReport:
    """k-fold evaluation of LambdaMART (and, optionally, single-feature baselines)."""
    report = report if report is not None else EvalReport()
    methods = {"lambdamart": None}
    if baselines:
        methods.update({m: feature_scorer(ts, f) for m, f in BASELINES.items() if f in ts.feature_names})
    per_fold = {m: [] for m in methods}
    for fold in range(folds.k):
        test = set(folds.members(fold))
        test_groups = [g for g in ts.groups if g.query in test]
        train_set = ts.subset(q for q in folds.folds if q not in test)
        model = train(train_set, config)
        for method, scorer in methods.items():
            if scorer is None:
                scorer = lambda g, m=model: m.predict(g.X)  # noqa: E731
            ndcg, ap = score_groups(test_groups, scorer, k)
            per_fold[method].append((ndcg, ap))
            report.add(method, language, fold, f"ndcg@{k}", ndcg)
            report.add(method, language, fold, f"map@{k}", ap)
    for method, vals in per_fold.items():
        arr = np.array(vals)
        report.add(method, language, "mean", f"ndcg@{k}", arr[:, 0].mean())
        report.add(method, language, "mean", f"map@{k}", arr[:, 1].mean())
    return report


def cv_ndcg(ts: TrainingSet, folds: FoldAssignment, config: LambdaMartConfig, k: int = 10) -> float:
    rep = cross_validate(ts, folds, config, k, baselines=False)
    return rep.value("lambdamart", "", "mean", f"ndcg@{k}")


def run_ablation(ts: TrainingSet, folds: FoldAssignment, config: LambdaMartConfig = LambdaMartConfig(),
                 groups=FEATURE_GROUPS, k: int = 10) -> dict[str, float]:
    """Cross-validated nDCG@k of the full model and with each feature group left out.

    Keys are ``"full"`` and ``"-<group>"``.
    """
    out = {"full": cv_ndcg(ts, folds, config, k)}
    for name, cols in groups.items():
        out[f"-{name}"] = cv_ndcg(ts.without(cols), folds, config, k)
        logger.info("ablation -%s: nDCG@%d = %.4f", name, k, out[f"-{name}"])
    return out


def feature_correlations(ts: TrainingSet) -> np.ndarray:
    X, _, _ = ts.stacked()
    return abs_correlation_matrix(X)


def correlation_tsv(matrix, names) -> str:
    lines = ["feature\t" + "\t".join(names)]
    for name, row in zip(names, matrix):
        lines.append(name + "\t" + "\t".join("nan" if np.isnan(x) else repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"

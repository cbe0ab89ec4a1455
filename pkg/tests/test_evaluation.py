import itertools

import numpy as np
import pytest

import oracles
from eventrec.clickstream import split_folds
from eventrec.evaluation import correlation_tsv, cross_validate, feature_correlations, run_ablation
from eventrec.features import FEATURE_GROUPS, FEATURE_NAMES, FeatureVector
from eventrec.ltr import LambdaMartConfig, QueryGroup, TrainingSet
from eventrec.metrics import (
    EvalReport, abs_correlation_matrix, average_precision_at_k, candidate_recall, map_at_k, ndcg_at_k,
    pearson, rank_by_feature, sort_by_score,
)


def test_ndcg_examples():
    assert ndcg_at_k([3, 2, 1, 0], 4) == 1.0
    assert ndcg_at_k([2, 3, 0], 3) == pytest.approx(3.89279 / 4.26186, abs=1e-4)
    assert abs(ndcg_at_k([2, 3, 0], 3) - 0.9134) <= 1e-4
    assert ndcg_at_k([0, 0, 0], 3) == 0.0
    with pytest.raises(ValueError):
        ndcg_at_k([1], 0)


def test_ap_examples():
    assert average_precision_at_k([1, 0, 1], 3) == pytest.approx((1 + 2 / 3) / 2)
    assert average_precision_at_k([1, 1, 1], 3) == 1.0
    assert average_precision_at_k([0, 0, 0], 3) == 0.0
    # denominator counts relevant items inside the top k only
    assert average_precision_at_k([0, 1, 0, 1], 2) == pytest.approx(0.5)


def test_metrics_match_brute_force_on_permutations():
    rng = np.random.default_rng(0)
    for _ in range(150):
        n = int(rng.integers(1, 7))
        labels = list(rng.integers(0, 4, n).astype(float))
        k = int(rng.integers(1, 8))
        perms = [list(p) for p in itertools.permutations(labels)]
        for p in perms:
            assert abs(ndcg_at_k(p, k) - oracles.ndcg(p, k)) <= 1e-12
        assert abs(map_at_k(perms, k) - oracles.mean_average_precision(perms, k)) <= 1e-12


def test_ndcg_scale_invariant():
    rng = np.random.default_rng(1)
    for _ in range(50):
        labels = rng.random(8)
        assert ndcg_at_k(labels * 7.3, 5) == pytest.approx(ndcg_at_k(labels, 5), abs=1e-12)


def test_map_is_one_iff_relevant_first():
    for p in itertools.permutations([1, 1, 0, 0, 0]):
        ap = map_at_k([list(p)], 5)
        assert 0 <= ap <= 1
        assert (ap == 1.0) == (list(p[:2]) == [1, 1])


def test_candidate_recall():
    assert candidate_recall({"a", "b", "c", "d"}, ["a", "c", "x"]) == 0.5
    assert candidate_recall({"a"}, ["a", "b"]) == 1.0
    assert candidate_recall({"a"}, ["b"]) == 0.0
    with pytest.raises(ValueError):
        candidate_recall(set(), ["a"])


def _fv(mw=0.0, emb=0.0):
    return FeatureVector.from_array([0] * 8 + [mw, emb])


def test_rank_by_feature():
    r = rank_by_feature("q", {"b": _fv(mw=0.1), "a": _fv(mw=0.9)}, "milne_witten", "de")
    assert r.events == ["a", "b"] and r.language == "de"
    r = rank_by_feature("q", {"z": _fv(), "m": _fv(), "a": _fv()}, "milne_witten")
    assert r.events == ["a", "m", "z"]
    r = rank_by_feature("q", {"x": _fv(emb=0.3), "twin": _fv(emb=1.0)}, "embedding_similarity")
    assert r.events[0] == "twin"
    with pytest.raises(ValueError):
        rank_by_feature("q", {}, "incoming_links")


def test_sort_by_score_deterministic():
    assert sort_by_score(["b", "a", "c"], [1.0, 1.0, 2.0]) == [("c", 2.0), ("a", 1.0), ("b", 1.0)]


def test_pearson():
    x = np.arange(10.0)
    assert pearson(x, x) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=40), rng.normal(size=40)
    assert pearson(a, b) == pytest.approx(np.corrcoef(a, b)[0, 1], abs=1e-12)
    with pytest.raises(ValueError, match="undefined correlation"):
        pearson(np.ones(5), x[:5])


def test_abs_correlation_matrix():
    x = np.arange(6.0)
    m = abs_correlation_matrix(np.column_stack([x, -x, np.ones(6)]))
    assert m[0, 1] == pytest.approx(1.0)
    assert np.isnan(m[2, 2]) and np.isnan(m[0, 2])
    text = correlation_tsv(m, ["a", "b", "c"])
    assert text.splitlines()[0] == "feature\ta\tb\tc" and "nan" in text


def test_report_tsv():
    r = EvalReport()
    r.add("lambdamart", "de", 0, "ndcg@10", 0.5)
    assert r.value("lambdamart", "de", "0", "ndcg@10") == 0.5
    assert r.to_tsv().splitlines()[1] == "lambdamart\tde\t0\tndcg@10\t0.5"
    with pytest.raises(KeyError):
        r.value("x", "de", 0, "ndcg@10")


def _planted(signal_cols, n_q=25, n_items=12, seed=0, constant=()):
    rng = np.random.default_rng(seed)
    groups = []
    for q in range(n_q):
        X = rng.normal(size=(n_items, 10))
        for c in constant:
            X[:, c] = 1.0
        s = X[:, signal_cols].sum(axis=1)
        y = np.clip(s - np.median(s), 0, None)
        y[np.argmax(y)] += 0.1
        groups.append(QueryGroup(f"q{q:02d}", "de", X, y, [f"v{i:02d}" for i in range(n_items)]))
    return TrainingSet(groups, FEATURE_NAMES)


def test_cross_validate_report_shape():
    ts = _planted([4])
    folds = split_folds([g.query for g in ts.groups], 5, seed=0)
    rep = cross_validate(ts, folds, LambdaMartConfig(n_trees=10), language="de")
    methods = {r[0] for r in rep.rows}
    assert methods == {"lambdamart", "milne_witten", "embedding"}
    assert {r[2] for r in rep.rows} == {"0", "1", "2", "3", "4", "mean"}
    assert all(0 <= r[4] <= 1 for r in rep.rows)
    again = cross_validate(ts, folds, LambdaMartConfig(n_trees=10), language="de")
    assert rep.to_tsv() == again.to_tsv()


def test_ablation_structure_and_constant_group():
    spatial = [FEATURE_NAMES.index(n) for n in FEATURE_GROUPS["spatial"]]
    ts = _planted([4, 6], constant=spatial)
    folds = split_folds([g.query for g in ts.groups], 5, seed=0)
    res = run_ablation(ts, folds, LambdaMartConfig(n_trees=10))
    assert list(res) == ["full", "-spatial", "-temporal", "-links", "-embeddings"]
    assert abs(res["-spatial"] - res["full"]) < 1e-9
    assert res["-links"] < min(res["-temporal"], res["-embeddings"])


def test_feature_correlations_shape():
    m = feature_correlations(_planted([4]))
    assert m.shape == (10, 10)
    np.testing.assert_allclose(np.diag(m), 1.0)

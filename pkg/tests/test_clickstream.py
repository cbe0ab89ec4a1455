from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eventrec.clickstream import (
    ClickTable, RelevanceTable, balance_clicks, build_ground_truth, load_clicks, read_ground_truth,
    relevance, split_folds, write_ground_truth,
)
from eventrec.errors import DataError


def test_load_click_rows(write):
    t = load_clicks(write("c.tsv", "Coronavirus_pandemic\tCOVID-19_pandemic_in_Germany\t3775\n"), "de")
    assert t.counts[("Coronavirus_pandemic", "COVID-19_pandemic_in_Germany")] == 3775


def test_repeated_pairs_sum(write):
    t = load_clicks(write("c.tsv", "a\tb\t2\na\tb\t3\n"), "de")
    assert t.counts == {("a", "b"): 5}


@pytest.mark.parametrize("line", ["a\tb\t0\n", "a\tb\t-4\n", "a\tb\tx\n", "a\tb\n"])
def test_bad_click_lines(write, line):
    with pytest.raises(DataError):
        load_clicks(write("c.tsv", line), "de")


def test_single_language_is_identity():
    t = ClickTable("de", {("a", "b"): 7, ("a", "c"): 3})
    assert balance_clicks([t]) == {"de": {("a", "b"): 7.0, ("a", "c"): 3.0}}


def _two_language():
    de = ClickTable("de", {("e", "v"): 10, ("x", "y"): 90})
    fr = ClickTable("fr", {("e", "v"): 30, ("x", "z"): 270})
    return balance_clicks([de, fr])


def test_balanced_counts():
    b = _two_language()
    # 10 * 400 / 100 and 30 * 400 / 300
    assert b["de"][("e", "v")] == pytest.approx(40.0)
    assert b["fr"][("e", "v")] == pytest.approx(40.0)


def test_relevance_worked_example():
    b = _two_language()
    assert relevance("e", "v", "de", b) == pytest.approx(0.5)
    assert relevance("x", "y", "de", b) == 1.0
    assert relevance("x", "y", "fr", b) == 0.0
    with pytest.raises(ValueError, match="undefined relevance"):
        relevance("nobody", "v", "de", b)


def test_zero_click_language_dropped(caplog):
    b = balance_clicks([ClickTable("de", {("a", "b"): 1}), ClickTable("fr", {})])
    assert list(b) == ["de"]
    assert "no clicks" in caplog.text


counts = st.integers(min_value=1, max_value=10_000)
pairs = st.tuples(st.sampled_from("abcde"), st.sampled_from("vwxyz"))
tables = st.dictionaries(st.sampled_from(["de", "fr", "it", "es"]),
                         st.dictionaries(pairs, counts, min_size=1, max_size=20), min_size=1)


@settings(max_examples=60, deadline=None)
@given(tables, st.integers(min_value=2, max_value=1000))
def test_normalization_and_scale_invariance(raw, factor):
    b = balance_clicks([ClickTable(l, c) for l, c in raw.items()])
    scaled = balance_clicks([ClickTable(l, {p: n * factor for p, n in c.items()}) for l, c in raw.items()])
    rt, rs = RelevanceTable.from_balanced(b), RelevanceTable.from_balanced(scaled)
    clicked = {p for c in raw.values() for p in c}
    for e, v in clicked:
        assert sum(rt.get(e, v, l) for l in rt.languages) == pytest.approx(1.0, abs=1e-9)
        for l in rt.languages:
            assert rs.get(e, v, l) == pytest.approx(rt.get(e, v, l), abs=1e-9)
            assert rt.get(e, v, l) == pytest.approx(relevance(e, v, l, b), abs=1e-12)
    if len(rt.languages) == 1:
        assert set(rt.rel.values()) == {1.0}


def _table(pos):
    return RelevanceTable(("de",), {("q", v, "de"): r for v, r in pos.items()})


def test_ground_truth_shape_and_order():
    events = [f"n{i}" for i in range(10)] + ["a", "b", "c"]
    gt = build_ground_truth("de", _table({"a": 0.2, "b": 0.7, "c": 0.1}), set(events), seed=3)
    ranked = gt.entry("q").ranked
    assert len(ranked) == 6
    assert [v for v, _ in ranked[:3]] == ["b", "a", "c"]
    assert all(r == 0.0 for _, r in ranked[3:])
    assert {v for v, _ in ranked[3:]}.isdisjoint({"a", "b", "c", "q"})


def test_ground_truth_ties_lexicographic():
    gt = build_ground_truth("de", _table({"z": 0.5, "m": 0.5}), {"m", "z", "n1", "n2"}, seed=0)
    assert [v for v, _ in gt.entry("q").ranked[:2]] == ["m", "z"]


def test_ground_truth_deterministic(tmp_path):
    events = {f"ev{i:02d}" for i in range(40)}
    pos = {f"ev{i:02d}": (i + 1) / 10 for i in range(5)}
    paths = []
    for i in range(2):
        p = tmp_path / f"gt{i}.tsv"
        write_ground_truth(p, [build_ground_truth("de", _table(pos), events, seed=11)])
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    back = read_ground_truth(paths[0])["de"]
    assert back.entry("q").ranked == build_ground_truth("de", _table(pos), events, seed=11).entry("q").ranked


def test_ground_truth_negative_sampling_is_uniform():
    events = {"p"} | {f"n{i}" for i in range(5)}
    hits = Counter()
    for seed in range(2000):
        gt = build_ground_truth("de", _table({"p": 1.0}), events, seed=seed)
        hits[gt.entry("q").ranked[1][0]] += 1
    assert set(hits) == {f"n{i}" for i in range(5)}
    assert max(hits.values()) - min(hits.values()) < 150


def test_too_few_negatives():
    with pytest.raises(ValueError, match="eligible negatives"):
        build_ground_truth("de", _table({"a": 1.0, "b": 0.5}), {"a", "b", "c"})


@pytest.mark.parametrize("n, sizes", [(10, [2] * 5), (11, [3, 2, 2, 2, 2])])
def test_fold_sizes(n, sizes):
    f = split_folds([f"q{i}" for i in range(n)], 5, seed=1)
    assert sorted((len(f.members(i)) for i in range(5)), reverse=True) == sizes
    assert split_folds([f"q{i}" for i in range(n)], 5, seed=1) == f


def test_fold_errors():
    with pytest.raises(ValueError):
        split_folds(["a", "b"], 1)
    with pytest.raises(ValueError):
        split_folds(["a", "b"], 3)

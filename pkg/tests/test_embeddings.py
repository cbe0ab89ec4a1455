import numpy as np
import pytest
from scipy.stats import chisquare

from eventrec.embeddings import (
    EmbedConfig, EmbeddingTable, WalkConfig, candidate_events, cosine, generate_walks, train_embeddings,
)
from eventrec.embeddings.skipgram import pair_objective, sgd_step
from eventrec.embeddings.walks import WalkGraph, next_step, node2vec_weights
from eventrec.kg import LinkSet


def test_path_graph_walk_is_forced():
    ls = LinkSet("de", [("a", "b"), ("b", "a")])
    walks = generate_walks(ls, WalkConfig(walks_per_node=1, walk_length=4))
    assert ["a", "b", "a", "b"] in walks


def test_sink_walk_has_length_one():
    g = WalkGraph(["s", "t"], [("t", "s")])
    rng = np.random.default_rng(0)
    assert next_step(g, [0], rng, WalkConfig()) is None


def test_walks_follow_edges():
    rng = np.random.default_rng(3)
    nodes = [f"n{i}" for i in range(30)]
    edges = [tuple(rng.choice(nodes, 2, replace=False)) for _ in range(90)]
    ls = LinkSet("de", edges)
    edge_set = set(ls.edges())
    for undirected in (False, True):
        for bias in ("uniform", "node2vec"):
            cfg = WalkConfig(walks_per_node=3, walk_length=15, bias=bias, treat_undirected=undirected)
            for walk in generate_walks(ls, cfg):
                for a, b in zip(walk, walk[1:]):
                    assert (a, b) in edge_set or (undirected and (b, a) in edge_set)


def test_walks_independent_of_worker_count():
    ls = LinkSet("de", [(f"n{i}", f"n{(i * 7 + 3) % 40}") for i in range(40)] +
                 [(f"n{i}", f"n{(i + 1) % 40}") for i in range(40)])
    cfg = WalkConfig(walks_per_node=2, walk_length=10, seed=4)
    assert generate_walks(ls, cfg, workers=1) == generate_walks(ls, cfg, workers=3)


def test_node2vec_unit_pq_matches_uniform():
    # hub 0 connected to 1..6; 1 and 2 are also adjacent, so all three weight classes occur
    edges = [(0, i) for i in range(1, 7)] + [(1, 2)]
    g = WalkGraph(range(7), edges, undirected=True)
    cfg = WalkConfig(bias="node2vec", p=1.0, q=1.0)
    # exact part: every transition weight is equal
    assert set(node2vec_weights(g, 1, 0, 1.0, 1.0)) == {1.0}
    # statistical part; a single fixed-seed test has a 1% false-alarm rate by construction
    rng = np.random.default_rng(2024)
    n = 100_000
    draws = [next_step(g, [1, 0], rng, cfg) for _ in range(n)]
    counts = np.bincount(draws, minlength=7)[1:]
    assert chisquare(counts).pvalue > 0.01


def test_node2vec_bias_direction():
    edges = [(0, i) for i in range(1, 7)] + [(1, 2)]
    g = WalkGraph(range(7), edges, undirected=True)
    rng = np.random.default_rng(1)
    draws = np.bincount([next_step(g, [1, 0], rng, WalkConfig(bias="node2vec", p=4, q=0.5))
                         for _ in range(20_000)], minlength=7)
    # weights: back to 1 -> 1/4, to 2 (neighbor of 1) -> 1, others -> 2
    assert draws[1] < draws[2] < draws[3]


def test_walk_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(bias="levy")
    with pytest.raises(ValueError):
        WalkConfig(walk_length=1)


# -- skip-gram ------------------------------------------------------------

def _numeric_grad(f, x, h=1e-5):
    g = np.zeros_like(x)
    for i in np.ndindex(x.shape):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2 * h)
    return g


def test_objective_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    for _ in range(20):
        d, k = rng.integers(2, 10), rng.integers(1, 6)
        u, v, negs = rng.normal(0, 0.5, d), rng.normal(0, 0.5, d), rng.normal(0, 0.5, (k, d))
        _, gu, gv, gn = pair_objective(u, v, negs)
        np.testing.assert_allclose(gu, _numeric_grad(lambda x: pair_objective(x, v, negs)[0], u), rtol=1e-5, atol=1e-8)
        np.testing.assert_allclose(gv, _numeric_grad(lambda x: pair_objective(u, x, negs)[0], v), rtol=1e-5, atol=1e-8)
        np.testing.assert_allclose(gn, _numeric_grad(lambda x: pair_objective(u, v, x)[0], negs), rtol=1e-5, atol=1e-8)


def test_sgd_step_is_minus_lr_times_gradient():
    rng = np.random.default_rng(2)
    w_in, w_out = rng.normal(0, 0.3, (6, 4)), rng.normal(0, 0.3, (6, 4))
    center, context, negs, lr = 0, 1, np.array([2, 3, 4]), 0.05
    loss, gu, gv, gn = pair_objective(w_in[center], w_out[context], w_out[negs])
    a_in, a_out = w_in.copy(), w_out.copy()
    got = sgd_step(a_in, a_out, center, context, negs, lr)
    assert got == pytest.approx(loss, rel=1e-10)
    np.testing.assert_allclose(a_in[center], w_in[center] - lr * gu, atol=1e-12)
    np.testing.assert_allclose(a_out[context], w_out[context] - lr * gv, atol=1e-12)
    np.testing.assert_allclose(a_out[negs], w_out[negs] - lr * gn, atol=1e-12)
    untouched = [5]
    np.testing.assert_array_equal(a_in[untouched + [1, 2, 3, 4]], w_in[untouched + [1, 2, 3, 4]])
    np.testing.assert_array_equal(a_out[untouched + [0]], w_out[untouched + [0]])


def test_sgd_step_skips_masked_negatives():
    rng = np.random.default_rng(3)
    w_in, w_out = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
    a_in, a_out = w_in.copy(), w_out.copy()
    sgd_step(a_in, a_out, 0, 1, np.array([-1, -1]), 0.1)
    b_in, b_out = w_in.copy(), w_out.copy()
    sgd_step(b_in, b_out, 0, 1, np.zeros(0, dtype=np.int64), 0.1)
    np.testing.assert_array_equal(a_in, b_in)
    np.testing.assert_array_equal(a_out, b_out)


def _barbell(n=8):
    left = [(f"a{i}", f"a{j}") for i in range(n) for j in range(n) if i != j]
    right = [(f"b{i}", f"b{j}") for i in range(n) for j in range(n) if i != j]
    return LinkSet("de", left + right + [("a0", "b0"), ("b0", "a0")])


def test_training_separates_barbell_halves():
    corpus = generate_walks(_barbell(), WalkConfig(walks_per_node=10, walk_length=20, seed=1))
    table = train_embeddings(corpus, EmbedConfig(dim=16, epochs=3, seed=1))
    within = np.mean([cosine(table[f"a{i}"], table[f"a{j}"]) for i in range(1, 8) for j in range(1, 8) if i != j])
    across = np.mean([cosine(table[f"a{i}"], table[f"b{j}"]) for i in range(1, 8) for j in range(1, 8)])
    assert within > across + 0.3
    assert np.all(np.isfinite(table.vectors))


def test_serial_training_is_bit_identical():
    corpus = generate_walks(_barbell(5), WalkConfig(walks_per_node=3, walk_length=10))
    cfg = EmbedConfig(dim=8, epochs=1, seed=9)
    a, b = train_embeddings(corpus, cfg), train_embeddings(corpus, cfg)
    assert a.ids == b.ids
    np.testing.assert_array_equal(a.vectors, b.vectors)
    c = train_embeddings(corpus, EmbedConfig(dim=8, epochs=1, seed=10))
    assert not np.array_equal(a.vectors, c.vectors)


def test_parallel_training_runs():
    corpus = generate_walks(_barbell(5), WalkConfig(walks_per_node=3, walk_length=10))
    t = train_embeddings(corpus, EmbedConfig(dim=8, epochs=1), workers=2)
    assert np.all(np.isfinite(t.vectors))


def test_training_input_errors():
    with pytest.raises(ValueError):
        train_embeddings([])
    with pytest.raises(ValueError):
        train_embeddings([["a", "a"]])


# -- table and candidates -------------------------------------------------

def test_cosine_values():
    assert cosine([3.0, 4.0], [3.0, 4.0]) == pytest.approx(1.0)
    assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0
    assert cosine([1.0, 2.0], [2.0, 1.0]) == pytest.approx(4 / (5 ** 0.5 * 5 ** 0.5))
    with pytest.raises(ValueError):
        cosine([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(ValueError):
        cosine([1.0], [1.0, 0.0])


def test_table_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    t = EmbeddingTable("de", ["x", "y", "z"], rng.normal(size=(3, 5)))
    p = tmp_path / "emb.tsv"
    t.save(p)
    assert p.read_text().splitlines()[0] == "dim=5"
    back = EmbeddingTable.load(p, "de")
    assert back.ids == t.ids
    np.testing.assert_allclose(back.vectors, t.vectors, atol=1e-6)


def test_candidate_events():
    ids = ["q", "e1", "e2", "e3", "other"]
    vecs = np.array([[1.0, 0.0], [1.0, 0.1], [0.0, 1.0], [1.0, 0.1], [1.0, 0.0]])
    t = EmbeddingTable("de", ids, vecs)
    events = {"e1", "e2", "e3", "q", "missing"}
    got = candidate_events("q", 10, t, events)
    assert [v for v, _ in got] == ["e1", "e3", "e2"]
    sims = [s for _, s in got]
    assert sims == sorted(sims, reverse=True)
    assert [v for v, _ in candidate_events("q", 1, t, events)] == ["e1"]
    with pytest.raises(KeyError):
        candidate_events("nobody", 3, t, events)

"""
Random-walk corpora over a language's link set.

Walks follow out-edges. ``treat_undirected`` adds every reverse edge first,
which helps on sparse graphs where many nodes have no out-links.

Every start node owns a generator seeded from ``(seed, node index)``, so the
corpus does not depend on how nodes are spread across worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 40
    bias: str = "uniform"  # or "node2vec"
    p: float = 4.0
    q: float = 0.5
    seed: int = 0
    treat_undirected: bool = False

    def __post_init__(self):
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        if self.walk_length < 2:
            raise ValueError("walk_length must be >= 2")
        if self.bias not in ("uniform", "node2vec"):
            raise ValueError(f"unknown walk bias {self.bias!r}")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")


class WalkGraph:
    """Integer adjacency used by the walkers.

    ``neighbors[i]`` is the sorted array of node indexes reachable from node
    ``i`` in one step; ``neighbor_sets`` mirrors it for membership tests.
    """

    def __init__(self, nodes, edges, undirected=False):
        self.nodes = list(nodes)
        index = {n: i for i, n in enumerate(self.nodes)}
        adj = [set() for _ in self.nodes]
        for s, t in edges:
            adj[index[s]].add(index[t])
            if undirected:
                adj[index[t]].add(index[s])
        self.neighbors = [np.array(sorted(a), dtype=np.int64) for a in adj]
        self.neighbor_sets = [frozenset(a) for a in adj]

    @classmethod
    def from_link_set(cls, links, undirected=False):
        return cls(links.nodes(), links.edges(), undirected)


def node2vec_weights(graph: WalkGraph, prev: int, cur: int, p: float, q: float) -> np.ndarray:
    """Unnormalized transition weights out of ``cur`` having arrived from ``prev``."""
    nbrs = graph.neighbors[cur]
    prev_nbrs = graph.neighbor_sets[prev]
    w = np.empty(len(nbrs))
    for k, x in enumerate(nbrs):
        if x == prev:
            w[k] = 1.0 / p
        elif x in prev_nbrs:
            w[k] = 1.0
        else:
            w[k] = 1.0 / q
    return w


def next_step(graph: WalkGraph, walk: list[int], rng: np.random.Generator, config: WalkConfig) -> int | None:
    """Draw the next node of ``walk``, or None at a sink."""
    cur = walk[-1]
    nbrs = graph.neighbors[cur]
    if len(nbrs) == 0:
        return None
    if config.bias == "uniform" or len(walk) == 1:
        return int(nbrs[rng.integers(len(nbrs))])
    w = node2vec_weights(graph, walk[-2], cur, config.p, config.q)
    cum = np.cumsum(w)
    k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return int(nbrs[min(k, len(nbrs) - 1)])


def _walks_for_nodes(graph: WalkGraph, starts, config: WalkConfig):
    out = {}
    for start in starts:
        rng = np.random.default_rng([config.seed, start])
        walks = []
        for _ in range(config.walks_per_node):
            walk = [start]
            while len(walk) < config.walk_length:
                nxt = next_step(graph, walk, rng, config)
                if nxt is None:
                    break
                walk.append(nxt)
            walks.append(walk)
        out[start] = walks
    return out


def generate_walks(links, config: WalkConfig = WalkConfig(), workers: int = 1) -> list[list[str]]:
    """Walk corpus over a :class:`~eventrec.kg.LinkSet`.

    Nodes without any traversable neighbor start no walks. The corpus is
    ordered round by round: walk ``r`` of every start node (in node order)
    precedes walk ``r + 1`` of any node.
    """
    graph = WalkGraph.from_link_set(links, config.treat_undirected)
    starts = [i for i, nb in enumerate(graph.neighbors) if len(nb)]
    if workers > 1 and len(starts) > workers:
        chunks = [starts[i::workers] for i in range(workers)]
        by_node = {}
        with ProcessPoolExecutor(workers) as pool:
            for part in pool.map(_walks_for_nodes, [graph] * workers, chunks, [config] * workers):
                by_node.update(part)
    else:
        by_node = _walks_for_nodes(graph, starts, config)
    names = graph.nodes
    return [
        [names[i] for i in by_node[s][r]]
        for r in range(config.walks_per_node)
        for s in starts
    ]

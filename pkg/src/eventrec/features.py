"""
The ten ranking features for a (query entity, event, language) triple.

Column order is fixed by :data:`FEATURE_NAMES` and shared by the feature
matrix export, the training set and the model fingerprint.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, field, fields
from datetime import date

import numpy as np

from . import geo
from .embeddings.table import EmbeddingTable, cosine
from .kg import KnowledgeGraph

FEATURE_NAMES = (
    "language_distance",
    "pair_distance",
    "interval_overlap",
    "begin_time_distance",
    "incoming_links",
    "outgoing_links",
    "shared_incoming_links",
    "shared_outgoing_links",
    "milne_witten",
    "embedding_similarity",
)

FEATURE_GROUPS = {
    "spatial": ("language_distance", "pair_distance"),
    "temporal": ("interval_overlap", "begin_time_distance"),
    "links": (
        "incoming_links",
        "outgoing_links",
        "shared_incoming_links",
        "shared_outgoing_links",
        "milne_witten",
    ),
    "embeddings": ("embedding_similarity",),
}


@dataclass(frozen=True)
class FeatureConfig:
    missing_distance_sentinel: float = 20015.09
    missing_time_sentinel: float = 36500.0
    reference_date: date = field(default=date(2021, 12, 31))

    def __post_init__(self):
        if self.missing_distance_sentinel <= 0 or self.missing_time_sentinel <= 0:
            raise ValueError("sentinels must be positive")


@dataclass(frozen=True)
class FeatureVector:
    language_distance: float
    pair_distance: float
    interval_overlap: float
    begin_time_distance: float
    incoming_links: float
    outgoing_links: float
    shared_incoming_links: float
    shared_outgoing_links: float
    milne_witten: float
    embedding_similarity: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        return cls(*map(float, values))


assert tuple(f.name for f in fields(FeatureVector)) == FEATURE_NAMES


def language_distance(v: str, language: str, graph: KnowledgeGraph, cfg: FeatureConfig = FeatureConfig()) -> float:
    """Smallest distance in km between the event's coordinates and a country of ``language``."""
    polys = graph.polygons(language)
    coords = graph.resolve_coordinates(v)
    if not coords:
        return cfg.missing_distance_sentinel
    best = math.inf
    for c in coords:
        for poly in polys:
            best = min(best, geo.point_to_polygon(c, poly))
            if best == 0.0:
                return 0.0
    return best


def pair_distance(v: str, e: str, graph: KnowledgeGraph, cfg: FeatureConfig = FeatureConfig()) -> float:
    cv = graph.resolve_coordinates(v)
    ce = graph.resolve_coordinates(e)
    if not cv or not ce:
        return cfg.missing_distance_sentinel
    return min(float(geo.haversine_many(c, ce).min()) for c in cv)


def _interval(rec, cfg):
    if rec.start is None:
        return None
    return rec.start, rec.end if rec.end is not None else cfg.reference_date


def interval_overlap(v: str, e: str, graph: KnowledgeGraph, cfg: FeatureConfig = FeatureConfig()) -> float:
    """Days shared by both intervals (end minus start); 0 if disjoint or unknown."""
    iv = _interval(graph.entity(v), cfg)
    ie = _interval(graph.entity(e), cfg)
    if iv is None or ie is None:
        return 0.0
    days = (min(iv[1], ie[1]) - max(iv[0], ie[0])).days
    return float(max(days, 0))


def begin_time_distance(v: str, e: str, graph: KnowledgeGraph, cfg: FeatureConfig = FeatureConfig()) -> float:
    sv, se = graph.entity(v).start, graph.entity(e).start
    if sv is None or se is None:
        return cfg.missing_time_sentinel
    return float(abs((sv - se).days))


def link_features(e: str, v: str, language: str, graph: KnowledgeGraph) -> tuple[int, int, int, int]:
    """(incoming, outgoing, shared incoming, shared outgoing) link counts of ``v``."""
    links = graph.link_set(language)
    in_v, out_v = links.in_neighbors(v), links.out_neighbors(v)
    return (
        len(in_v),
        len(out_v),
        len(in_v & links.in_neighbors(e)),
        len(out_v & links.out_neighbors(e)),
    )


def milne_witten_from_counts(n_e: int, n_v: int, n_shared: int, n_entities: int, log=math.log) -> float:
    """Link-overlap relatedness from in-link set sizes, clamped to [0, 1]."""
    if n_shared == 0 or n_e == 0 or n_v == 0:
        return 0.0
    lo, hi = min(n_e, n_v), max(n_e, n_v)
    if n_entities <= lo:
        raise ValueError(f"entity count {n_entities} must exceed the smaller in-degree {lo}")
    score = 1.0 - (log(hi) - log(n_shared)) / (log(n_entities) - log(lo))
    return min(1.0, max(0.0, score))


def milne_witten(e: str, v: str, language: str, graph: KnowledgeGraph) -> float:
    links = graph.link_set(language)
    in_e, in_v = links.in_neighbors(e), links.in_neighbors(v)
    return milne_witten_from_counts(len(in_e), len(in_v), len(in_e & in_v), graph.n_entities)


def embedding_similarity(e: str, v: str, embeddings: EmbeddingTable | None) -> float:
    if embeddings is None:
        return 0.0
    a, b = embeddings.get(e), embeddings.get(v)
    if a is None or b is None:
        return 0.0
    try:
        return cosine(a, b)
    except ValueError:
        return 0.0


def extract(e: str, v: str, language: str, graph: KnowledgeGraph, embeddings: EmbeddingTable | None = None,
            cfg: FeatureConfig = FeatureConfig()) -> FeatureVector:
    """All ten features of event ``v`` for query ``e`` in ``language``."""
    inc, out, sh_in, sh_out = link_features(e, v, language, graph)
    return FeatureVector(
        language_distance=language_distance(v, language, graph, cfg),
        pair_distance=pair_distance(v, e, graph, cfg),
        interval_overlap=interval_overlap(v, e, graph, cfg),
        begin_time_distance=begin_time_distance(v, e, graph, cfg),
        incoming_links=float(inc),
        outgoing_links=float(out),
        shared_incoming_links=float(sh_in),
        shared_outgoing_links=float(sh_out),
        milne_witten=milne_witten(e, v, language, graph),
        embedding_similarity=embedding_similarity(e, v, embeddings),
    )


class FeatureExtractor:
    """Batch extraction for one language, caching the per-event language distance."""

    def __init__(self, graph: KnowledgeGraph, language: str, embeddings: EmbeddingTable | None = None,
                 cfg: FeatureConfig = FeatureConfig()):
        self.graph = graph
        self.language = language
        self.embeddings = embeddings
        self.cfg = cfg
        self._lang_dist: dict[str, float] = {}

    def _language_distance(self, v):
        d = self._lang_dist.get(v)
        if d is None:
            d = self._lang_dist[v] = language_distance(v, self.language, self.graph, self.cfg)
        return d

    def vector(self, e: str, v: str) -> FeatureVector:
        g, cfg = self.graph, self.cfg
        inc, out, sh_in, sh_out = link_features(e, v, self.language, g)
        return FeatureVector(
            self._language_distance(v),
            pair_distance(v, e, g, cfg),
            interval_overlap(v, e, g, cfg),
            begin_time_distance(v, e, g, cfg),
            float(inc),
            float(out),
            float(sh_in),
            float(sh_out),
            milne_witten(e, v, self.language, g),
            embedding_similarity(e, v, self.embeddings),
        )

    def matrix(self, e: str, events) -> np.ndarray:
        """Feature rows for ``events`` against query ``e``, shape ``(len(events), 10)``."""
        return np.array([self.vector(e, v).as_array() for v in events], dtype=float).reshape(-1, len(FEATURE_NAMES))


def write_feature_matrix(path, rows) -> None:
    """Write ``(query, event, lang, rel, values)`` rows as TSV with a header line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("query_id\tevent_id\tlang\trel\t" + "\t".join(FEATURE_NAMES) + "\n")
        for q, v, lang, rel, values in rows:
            fh.write(f"{q}\t{v}\t{lang}\t{rel!r}\t" + "\t".join(repr(float(x)) for x in values) + "\n")


def read_feature_matrix(path):
    """Inverse of :func:`write_feature_matrix`; yields ``(query, event, lang, rel, array)``."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header[4:]) != FEATURE_NAMES:
            raise ValueError(f"{path}: unexpected feature columns {header[4:]}")
        for line in fh:
            cols = line.rstrip("\n").split("\t")
            yield cols[0], cols[1], cols[2], float(cols[3]), np.array([float(x) for x in cols[4:]])

"""Embedding storage, cosine similarity and candidate retrieval."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import DataError


def cosine(a, b) -> float:
    """Cosine similarity of two non-zero vectors of equal length."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine undefined for a zero vector")
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


class EmbeddingTable:
    """Vectors of one language, rows of ``vectors`` aligned with ``ids``."""

    def __init__(self, language: str, ids, vectors):
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[0] != len(ids):
            raise ValueError("vectors must be a 2-D array with one row per id")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("embedding contains non-finite values")
        self.language = language
        self.ids = list(ids)
        self.vectors = vectors
        self.index = {e: i for i, e in enumerate(self.ids)}
        if len(self.index) != len(self.ids):
            raise ValueError("duplicate ids in embedding table")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.ids)

    def __contains__(self, eid):
        return eid in self.index

    def __getitem__(self, eid) -> np.ndarray:
        return self.vectors[self.index[eid]]

    def get(self, eid, default=None):
        i = self.index.get(eid)
        return default if i is None else self.vectors[i]

    def save(self, path) -> None:
        """Write ``dim=<d>`` followed by one ``id<TAB>v1<TAB>...`` line per entity."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"dim={self.dim}\n")
            for eid, row in zip(self.ids, self.vectors.tolist()):
                fh.write(eid + "\t" + "\t".join(map(repr, row)) + "\n")

    @classmethod
    def load(cls, path, language: str = "") -> "EmbeddingTable":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("dim="):
                raise DataError("missing 'dim=<d>' header", path, 1)
            dim = int(header[4:])
            ids, rows = [], []
            for lineno, raw in enumerate(fh, start=2):
                cols = raw.rstrip("\r\n").split("\t")
                if len(cols) != dim + 1:
                    raise DataError(f"expected {dim} values", path, lineno)
                ids.append(cols[0])
                rows.append([float(x) for x in cols[1:]])
        return cls(language, ids, np.array(rows, dtype=float).reshape(len(ids), dim))


def candidate_events(query: str, k: int, table: EmbeddingTable, events) -> list[tuple[str, float]]:
    """Top-``k`` embedded events by cosine similarity to ``query``.

    The query itself is excluded; ties are broken by id. Exact scan over all
    event vectors.
    """
    if query not in table:
        raise KeyError(f"query {query!r} has no embedding")
    if k < 1:
        raise ValueError("k must be >= 1")
    ids = sorted(e for e in events if e in table and e != query)
    if not ids:
        return []
    mat = table.vectors[[table.index[e] for e in ids]]
    q = table[query]
    norms = np.linalg.norm(mat, axis=1) * np.linalg.norm(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = np.where(norms > 0, mat @ q / norms, 0.0)
    sims = np.clip(sims, -1.0, 1.0)
    # ids are sorted, so a stable sort on -sim breaks ties by id
    order = np.argsort(-sims, kind="stable")[:k]
    return [(ids[i], float(sims[i])) for i in order]

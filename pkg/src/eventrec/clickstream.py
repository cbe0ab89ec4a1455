"""
Click counts, language-balanced relevance labels and ground truth lists.

Relevance of an event ``v`` for a source entity ``e`` in language ``l`` is
the share of the pair's balanced clicks that happened in ``l``. Balancing
rescales each language so that its total click volume equals the total over
all languages, which removes the bias toward large language editions.
"""

from __future__ import annotations

import logging
import zlib
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)


@dataclass
class ClickTable:
    language: str
    counts: dict[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        for pair, n in self.counts.items():
            if n < 1:
                raise ValueError(f"non-positive click count {n} for {pair}")

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def load_clicks(path, language: str) -> ClickTable:
    """Read ``source<TAB>target<TAB>count`` lines; repeated pairs are summed."""
    path = Path(path)
    counts: dict[tuple[str, str], int] = defaultdict(int)
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3 or not cols[0].strip() or not cols[1].strip():
                raise DataError("expected 'source<TAB>target<TAB>count'", path, lineno)
            try:
                n = int(cols[2])
            except ValueError:
                raise DataError(f"bad count {cols[2]!r}", path, lineno) from None
            if n <= 0:
                raise DataError(f"non-positive count {n}", path, lineno)
            counts[(cols[0].strip(), cols[1].strip())] += n
    return ClickTable(language, dict(counts))


def balance_clicks(tables: Iterable[ClickTable] | Mapping[str, ClickTable]) -> dict[str, dict[tuple[str, str], float]]:
    """Rescale click counts per language to the all-language total.

    Returns ``{language: {(source, target): balanced_count}}``. Languages
    without any clicks are dropped with a warning.
    """
    if isinstance(tables, Mapping):
        tables = tables.values()
    tables = list(tables)
    if not tables:
        raise ValueError("at least one click table is required")
    totals = {}
    for t in tables:
        if t.language in totals:
            raise ValueError(f"duplicate click table for language {t.language!r}")
        totals[t.language] = t.total
    grand = sum(totals.values())
    balanced = {}
    for t in tables:
        if totals[t.language] == 0:
            logger.warning("language %r has no clicks; excluded", t.language)
            continue
        scale = grand / totals[t.language]
        balanced[t.language] = {pair: n * scale for pair, n in t.counts.items()}
    return balanced


def relevance(e: str, v: str, language: str, balanced: Mapping[str, Mapping[tuple[str, str], float]]) -> float:
    """Share of the pair's balanced clicks that fall into ``language``."""
    pair = (e, v)
    denom = sum(table.get(pair, 0.0) for table in balanced.values())
    if denom == 0:
        raise ValueError(f"undefined relevance: {e!r} -> {v!r} never clicked")
    return balanced.get(language, {}).get(pair, 0.0) / denom


@dataclass
class RelevanceTable:
    """Relevance values for every clicked (source, event) pair."""

    languages: tuple[str, ...]
    rel: dict[tuple[str, str, str], float]

    @classmethod
    def from_balanced(cls, balanced, events=None) -> "RelevanceTable":
        """Compute relevance for all clicked pairs, optionally only toward ``events``."""
        pair_sum: dict[tuple[str, str], float] = defaultdict(float)
        for table in balanced.values():
            for pair, b in table.items():
                if events is None or pair[1] in events:
                    pair_sum[pair] += b
        rel = {}
        languages = tuple(sorted(balanced))
        for pair, denom in pair_sum.items():
            for lang in languages:
                b = balanced[lang].get(pair, 0.0)
                rel[(pair[0], pair[1], lang)] = b / denom
        return cls(languages, rel)

    def get(self, e: str, v: str, language: str) -> float:
        try:
            return self.rel[(e, v, language)]
        except KeyError:
            raise KeyError(f"undefined relevance for ({e!r}, {v!r}, {language!r})") from None

    def positives(self, language: str) -> dict[str, dict[str, float]]:
        """``{query: {event: rel}}`` restricted to rel > 0 in ``language``."""
        out: dict[str, dict[str, float]] = defaultdict(dict)
        for (e, v, lang), r in self.rel.items():
            if lang == language and r > 0:
                out[e][v] = r
        return dict(out)

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# source\tevent\tlang\trel\n")
            for (e, v, lang) in sorted(self.rel):
                fh.write(f"{e}\t{v}\t{lang}\t{self.rel[(e, v, lang)]!r}\n")

    @classmethod
    def read_tsv(cls, path) -> "RelevanceTable":
        rel = {}
        langs = set()
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                if raw.startswith("#") or not raw.strip():
                    continue
                cols = raw.rstrip("\r\n").split("\t")
                if len(cols) != 4:
                    raise DataError("expected 4 columns", path, lineno)
                rel[(cols[0], cols[1], cols[2])] = float(cols[3])
                langs.add(cols[2])
        return cls(tuple(sorted(langs)), rel)


@dataclass
class GroundTruthEntry:
    query: str
    ranked: list[tuple[str, float]]

    @property
    def n_positive(self) -> int:
        return sum(1 for _, r in self.ranked if r > 0)


@dataclass
class GroundTruth:
    language: str
    entries: list[GroundTruthEntry]

    @property
    def queries(self) -> list[str]:
        return [e.query for e in self.entries]

    def entry(self, query: str) -> GroundTruthEntry:
        for e in self.entries:
            if e.query == query:
                return e
        raise KeyError(query)

    def tsv_lines(self):
        for entry in self.entries:
            for rank, (v, r) in enumerate(entry.ranked, start=1):
                yield f"{self.language}\t{entry.query}\t{rank}\t{v}\t{r!r}\n"


def language_seed(seed: int, language: str) -> list[int]:
    """Seed material for a per-language generator, independent of language order."""
    return [int(seed), zlib.crc32(language.encode("utf-8"))]


def build_ground_truth(language: str, table: RelevanceTable, events, seed: int = 0) -> GroundTruth:
    """Rank each query's positive events and pad with as many sampled negatives.

    Positives are ordered by descending relevance, ties by event id. Negatives
    are drawn uniformly without replacement from ``events`` minus the
    positives and the query itself, and listed in id order.
    """
    rng = np.random.default_rng(language_seed(seed, language))
    universe = sorted(events)
    entries = []
    for query, pos in sorted(table.positives(language).items()):
        pos = {v: r for v, r in pos.items() if v in events}
        if not pos:
            continue
        ranked = sorted(pos.items(), key=lambda item: (-item[1], item[0]))
        pool = [v for v in universe if v not in pos and v != query]
        if len(pool) < len(ranked):
            raise ValueError(
                f"query {query!r}: {len(ranked)} positives but only {len(pool)} eligible negatives"
            )
        picks = rng.choice(len(pool), size=len(ranked), replace=False)
        negatives = sorted(pool[i] for i in picks)
        entries.append(GroundTruthEntry(query, ranked + [(v, 0.0) for v in negatives]))
    return GroundTruth(language, entries)


def write_ground_truth(path, gts: Iterable[GroundTruth]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# lang\tquery_id\trank\tevent_id\trel\n")
        for gt in gts:
            fh.writelines(gt.tsv_lines())


def read_ground_truth(path) -> dict[str, GroundTruth]:
    """Inverse of :func:`write_ground_truth`, keyed by language."""
    by_lang: dict[str, dict[str, list[tuple[int, str, float]]]] = defaultdict(dict)
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if raw.startswith("#") or not raw.strip():
                continue
            cols = raw.rstrip("\r\n").split("\t")
            if len(cols) != 5:
                raise DataError("expected 5 columns", path, lineno)
            lang, q, rank, v, r = cols
            by_lang[lang].setdefault(q, []).append((int(rank), v, float(r)))
    out = {}
    for lang, queries in by_lang.items():
        entries = [
            GroundTruthEntry(q, [(v, r) for _, v, r in sorted(items)])
            for q, items in queries.items()
        ]
        out[lang] = GroundTruth(lang, entries)
    return out


@dataclass
class FoldAssignment:
    k: int
    folds: dict[str, int]

    def members(self, fold: int) -> list[str]:
        return sorted(q for q, f in self.folds.items() if f == fold)


def split_folds(queries, k: int, seed: int = 0) -> FoldAssignment:
    """Random partition of query ids into ``k`` folds whose sizes differ by at most one.

    ``queries`` may be a :class:`GroundTruth` or any iterable of ids.
    """
    if isinstance(queries, GroundTruth):
        queries = queries.queries
    ids = sorted(set(queries))
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(ids) < k:
        raise ValueError(f"{len(ids)} queries cannot fill {k} folds")
    order = np.random.default_rng(seed).permutation(len(ids))
    return FoldAssignment(k, {ids[i]: pos % k for pos, i in enumerate(order)})

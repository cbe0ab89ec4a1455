"""
Language-specific knowledge graph: entities, events, per-language link sets
and the countries where each language is official.

All loaders read tab-separated UTF-8 files. Lines starting with ``#`` and
blank lines are skipped everywhere.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataError

logger = logging.getLogger(__name__)

Coord = tuple[float, float]
Polygon = tuple[Coord, ...]

_EMPTY: frozenset[str] = frozenset()


@dataclass(frozen=True)
class EntityRecord:
    """One entity (or event) of the graph.

    ``start``/``end`` hold the time interval; an absent ``end`` with a present
    ``start`` denotes an ongoing interval. ``coords`` are (lat, lon) pairs in
    degrees, ``place_links`` point at location entities whose coordinates are
    borrowed when the entity has none of its own.
    """

    id: str
    label: str = ""
    is_event: bool = False
    start: date | None = None
    end: date | None = None
    coords: tuple[Coord, ...] = ()
    place_links: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("entity id must be non-empty")
        if self.start is not None and self.end is not None and self.start > self.end:
            raise ValueError(f"{self.id}: start {self.start} after end {self.end}")
        for lat, lon in self.coords:
            _check_coord(lat, lon)


def _check_coord(lat: float, lon: float) -> None:
    if not (math.isfinite(lat) and math.isfinite(lon)):
        raise ValueError(f"coordinate out of range: ({lat}, {lon})")
    if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
        raise ValueError(f"coordinate out of range: ({lat}, {lon})")


def parse_coords(text: str) -> tuple[Coord, ...]:
    """Parse ``"lat,lon;lat,lon"`` into a tuple of coordinate pairs."""
    text = text.strip()
    if not text:
        return ()
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"bad coordinate {chunk!r}")
        lat, lon = float(parts[0]), float(parts[1])
        _check_coord(lat, lon)
        out.append((lat, lon))
    return tuple(out)


def _parse_date(text: str) -> date | None:
    text = text.strip()
    return date.fromisoformat(text) if text else None


def _data_lines(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield lineno, line


def load_entities(path) -> dict[str, EntityRecord]:
    """Read an entities TSV file.

    Columns: ``id, label, is_event, t_s, t_e, coords, place_links``. Trailing
    empty columns may be omitted.
    """
    path = Path(path)
    entities: dict[str, EntityRecord] = {}
    for lineno, line in _data_lines(path):
        cols = line.split("\t")
        if len(cols) < 3 or len(cols) > 7:
            raise DataError(f"expected 3 to 7 columns, got {len(cols)}", path, lineno)
        cols += [""] * (7 - len(cols))
        eid, label, flag, ts, te, coords, places = cols
        eid = eid.strip()
        if not eid:
            raise DataError("empty entity id", path, lineno)
        if eid in entities:
            raise DataError(f"duplicate entity id {eid!r}", path, lineno)
        if flag.strip() not in ("0", "1"):
            raise DataError(f"is_event must be 0 or 1, got {flag!r}", path, lineno)
        try:
            rec = EntityRecord(
                id=eid,
                label=label,
                is_event=flag.strip() == "1",
                start=_parse_date(ts),
                end=_parse_date(te),
                coords=parse_coords(coords),
                place_links=tuple(p.strip() for p in places.split(";") if p.strip()),
            )
        except ValueError as exc:
            raise DataError(str(exc), path, lineno) from None
        entities[eid] = rec
    return entities


class LinkSet:
    """Directed link set of one language with in/out adjacency indexes.

    Self-loops and repeated edges are dropped; the counts are kept in
    ``n_self_loops`` and ``n_duplicates``.
    """

    def __init__(self, language: str, edges: Iterable[tuple[str, str]] = ()):
        self.language = language
        out_adj: dict[str, set[str]] = {}
        in_adj: dict[str, set[str]] = {}
        self.n_self_loops = 0
        self.n_duplicates = 0
        n_edges = 0
        for src, dst in edges:
            if src == dst:
                self.n_self_loops += 1
                continue
            targets = out_adj.setdefault(src, set())
            if dst in targets:
                self.n_duplicates += 1
                continue
            targets.add(dst)
            in_adj.setdefault(dst, set()).add(src)
            n_edges += 1
        self._out = {k: frozenset(v) for k, v in out_adj.items()}
        self._in = {k: frozenset(v) for k, v in in_adj.items()}
        self.n_edges = n_edges

    def __len__(self):
        return self.n_edges

    def __repr__(self):
        return f"LinkSet({self.language!r}, n_edges={self.n_edges})"

    def out_neighbors(self, node: str) -> frozenset[str]:
        return self._out.get(node, _EMPTY)

    def in_neighbors(self, node: str) -> frozenset[str]:
        return self._in.get(node, _EMPTY)

    def edges(self) -> list[tuple[str, str]]:
        """All edges, sorted."""
        return sorted((s, t) for s, ts in self._out.items() for t in ts)

    def nodes(self) -> list[str]:
        """Every node touched by an edge, sorted."""
        return sorted(set(self._out) | set(self._in))

    def has_edge(self, src: str, dst: str) -> bool:
        return dst in self._out.get(src, _EMPTY)


def load_link_set(path, language: str) -> LinkSet:
    """Read a ``source<TAB>target`` link file for one language."""
    path = Path(path)

    def edges():
        for lineno, line in _data_lines(path):
            cols = line.split("\t")
            if len(cols) != 2 or not cols[0].strip() or not cols[1].strip():
                raise DataError("expected 'source<TAB>target'", path, lineno)
            yield cols[0].strip(), cols[1].strip()

    links = LinkSet(language, edges())
    if links.n_self_loops:
        logger.info("%s: dropped %d self-loops", path, links.n_self_loops)
    return links


def load_countries(path) -> dict[str, list[Polygon]]:
    """Read ``lang<TAB>country_id<TAB>polygon`` rows into language -> polygons."""
    path = Path(path)
    table: dict[str, list[Polygon]] = {}
    for lineno, line in _data_lines(path):
        cols = line.split("\t")
        if len(cols) != 3:
            raise DataError("expected 'lang<TAB>country_id<TAB>polygon'", path, lineno)
        lang = cols[0].strip()
        try:
            poly = parse_coords(cols[2])
        except ValueError as exc:
            raise DataError(str(exc), path, lineno) from None
        if len(poly) < 3:
            raise DataError(f"polygon for {cols[1]!r} has fewer than 3 vertices", path, lineno)
        table.setdefault(lang, []).append(poly)
    return table


@dataclass
class KnowledgeGraph:
    """Entities, the event subset, per-language link sets and country polygons.

    Treat as immutable once built; the only internal state that changes after
    construction is the coordinate-resolution cache.
    """

    entities: Mapping[str, EntityRecord]
    links: Mapping[str, LinkSet] = field(default_factory=dict)
    countries: Mapping[str, list[Polygon]] = field(default_factory=dict)

    def __post_init__(self):
        self.events = frozenset(e.id for e in self.entities.values() if e.is_event)
        self._coord_cache: dict[str, tuple[Coord, ...]] = {}
        for lang, ls in self.links.items():
            unknown = [n for n in ls.nodes() if n not in self.entities]
            if unknown:
                logger.info(
                    "links[%s]: %d endpoints absent from the entity table", lang, len(unknown)
                )

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    @property
    def languages(self) -> list[str]:
        return sorted(self.links)

    def entity(self, eid: str) -> EntityRecord:
        try:
            return self.entities[eid]
        except KeyError:
            raise KeyError(f"unknown entity {eid!r}") from None

    def link_set(self, language: str) -> LinkSet:
        try:
            return self.links[language]
        except KeyError:
            raise KeyError(f"no link set loaded for language {language!r}") from None

    def in_neighbors(self, eid: str, language: str) -> frozenset[str]:
        return self.link_set(language).in_neighbors(eid)

    def out_neighbors(self, eid: str, language: str) -> frozenset[str]:
        return self.link_set(language).out_neighbors(eid)

    def polygons(self, language: str) -> list[Polygon]:
        polys = self.countries.get(language)
        if not polys:
            raise KeyError(f"no country polygons for language {language!r}")
        return polys

    def resolve_coordinates(self, eid: str) -> tuple[Coord, ...]:
        """Coordinates of an entity: its own, else those of its place links."""
        cached = self._coord_cache.get(eid)
        if cached is not None:
            return cached
        rec = self.entity(eid)
        if rec.coords:
            coords = tuple(sorted(set(rec.coords)))
        else:
            found = set()
            for pid in rec.place_links:
                place = self.entities.get(pid)
                if place is not None:
                    found.update(place.coords)
            coords = tuple(sorted(found))
        self._coord_cache[eid] = coords
        return coords


def load_graph(entities_path, link_paths: Mapping[str, str | Path], countries_path=None) -> KnowledgeGraph:
    """Load a complete graph from an entity file, link files and a country file."""
    entities = load_entities(entities_path)
    links = {lang: load_link_set(p, lang) for lang, p in sorted(link_paths.items())}
    countries = load_countries(countries_path) if countries_path is not None else {}
    return KnowledgeGraph(entities, links, countries)

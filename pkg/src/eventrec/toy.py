"""
Synthetic two-language dataset with planted language-specific clusters.

Each language (``de``, ``fr``) owns a cluster of 10 cities, 20 topic entities
and 70 events located inside its country polygon. A language's link set is
dense inside its own cluster and sparse elsewhere; clicks from topics to
linked events are much more frequent inside the home cluster and grow with
shared in-links and spatial proximity. The ``fr`` edition is smaller, so
relevance balancing matters.

One pair is planted: in ``de``, :data:`PLANTED_EVENT` dominates every feature
for :data:`PLANTED_QUERY` (same place, same time, maximal shared links and by
far the most clicks).
"""

from __future__ import annotations

from datetime import date, timedelta
from pathlib import Path

import numpy as np

from . import geo

TOY_DIR = Path(__file__).parent / "data" / "toy"
TOY_CONFIG = TOY_DIR / "toy.cfg"
PLANTED_QUERY = "de_topic_00"
PLANTED_EVENT = "de_event_042"
LANGUAGES = ("de", "fr")

COUNTRIES = {
    "de": {
        "germany": ((47.3, 6.0), (47.3, 15.0), (55.0, 15.0), (55.0, 6.0)),
        "austria": ((46.4, 9.5), (46.4, 17.0), (49.0, 17.0), (49.0, 9.5)),
    },
    "fr": {
        "france": ((43.0, -4.5), (43.0, 5.5), (51.0, 5.5), (51.0, -4.5)),
    },
}
# box cities are drawn from, per language
CITY_BOX = {"de": (48.0, 54.0, 7.0, 14.0), "fr": (44.0, 50.0, -3.0, 4.5)}
CLICK_SCALE = {"de": 1.0, "fr": 0.3}

N_CITIES, N_TOPICS, N_EVENTS = 10, 20, 70


def _fmt_coords(coords):
    return ";".join(f"{lat:.4f},{lon:.4f}" for lat, lon in coords)


def _random_date(rng, start=date(2000, 1, 1), span_days=7670):
    return start + timedelta(days=int(rng.integers(span_days)))


def make_toy_dataset(directory, seed: int = 7) -> Path:
    """Write the toy dataset and its config into ``directory``; returns the config path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    ents = {}  # id -> dict(label, is_event, start, end, coords, places, cluster)
    for lang in LANGUAGES:
        lat0, lat1, lon0, lon1 = CITY_BOX[lang]
        cities = []
        for i in range(N_CITIES):
            cid = f"{lang}_city_{i}"
            c = (round(rng.uniform(lat0, lat1), 4), round(rng.uniform(lon0, lon1), 4))
            ents[cid] = dict(label=f"City {i} ({lang})", is_event=False, start=None, end=None,
                             coords=[c], places=[], cluster=lang, city=cid)
            cities.append(cid)
        for i in range(N_TOPICS):
            tid = f"{lang}_topic_{i:02d}"
            city = cities[rng.integers(N_CITIES)]
            base = ents[city]["coords"][0]
            coords = [(round(base[0] + rng.normal(0, 0.2), 4), round(base[1] + rng.normal(0, 0.2), 4))]
            if rng.random() < 0.4 and tid != PLANTED_QUERY:
                coords = []
            start = end = None
            if rng.random() < 0.6 or tid == PLANTED_QUERY:
                start = _random_date(rng, date(1995, 1, 1), 9000)
                end = start + timedelta(days=int(rng.integers(30, 3000))) if rng.random() < 0.7 else None
            ents[tid] = dict(label=f"Topic {i} ({lang})", is_event=False, start=start, end=end,
                             coords=coords, places=[], cluster=lang, city=city)
        for i in range(N_EVENTS):
            vid = f"{lang}_event_{i:03d}"
            city = cities[rng.integers(N_CITIES)]
            base = ents[city]["coords"][0]
            u = rng.random()
            coords, places = [], []
            if u < 0.5:
                coords = [(round(base[0] + rng.normal(0, 0.3), 4), round(base[1] + rng.normal(0, 0.3), 4))]
            elif u < 0.8:
                places = [city]
            start = end = None
            if rng.random() < 0.8:
                start = _random_date(rng)
                end = start + timedelta(days=int(rng.integers(0, 400)))
            ents[vid] = dict(label=f"Event {i} ({lang})", is_event=True, start=start, end=end,
                             coords=coords, places=places, cluster=lang, city=city)

    q, p = ents[PLANTED_QUERY], ents[PLANTED_EVENT]
    p.update(coords=list(q["coords"]), places=[], start=q["start"],
             end=q["end"] or q["start"] + timedelta(days=365), city=q["city"])

    by_kind = {
        (lang, kind): sorted(e for e, d in ents.items() if d["cluster"] == lang and f"_{kind}_" in e)
        for lang in LANGUAGES for kind in ("city", "topic", "event")
    }

    def pick(pool, n, exclude=()):
        pool = [x for x in pool if x not in exclude]
        return [pool[i] for i in rng.choice(len(pool), size=min(n, len(pool)), replace=False)]

    # shared link structure; each language keeps a link with a probability
    # that is higher when the linked entity belongs to its own cluster
    base = set()
    for cl in LANGUAGES:
        other = LANGUAGES[1 - LANGUAGES.index(cl)]
        topics, events = by_kind[(cl, "topic")], by_kind[(cl, "event")]
        for t in topics:
            base.update((t, v) for v in pick(events, 12))
            base.update((t, v) for v in pick(by_kind[(other, "event")], 4))
            base.update((t, t2) for t2 in pick(topics, 2, exclude=(t,)))
            base.add((t, ents[t]["city"]))
        for v in events:
            base.update((v, v2) for v2 in pick(events, 3, exclude=(v,)))
            base.add((v, ents[v]["city"]))
        for c in by_kind[(cl, "city")]:
            base.update((c, v) for v in pick(events, 5))
    base = sorted(base)

    links = {}
    for lang in LANGUAGES:
        keep = rng.random(len(base))
        edges = {
            (s, t) for (s, t), u in zip(base, keep)
            if u < (0.9 if ents[t]["cluster"] == lang else 0.45)
        }
        if lang == "de":
            q_out = sorted(v for s, v in edges if s == PLANTED_QUERY and v != PLANTED_EVENT)
            for t in by_kind[("de", "topic")]:
                if t != PLANTED_QUERY:
                    edges.add((t, PLANTED_EVENT))
                    edges.add((t, PLANTED_QUERY))
            edges.add((PLANTED_QUERY, PLANTED_EVENT))
            edges.add((PLANTED_EVENT, PLANTED_QUERY))
            edges.update((PLANTED_EVENT, v) for v in q_out)
        else:
            edges = {(s, t) for s, t in edges if PLANTED_EVENT not in (s, t)}
        links[lang] = sorted(edges)

    in_sets = {lang: {} for lang in LANGUAGES}
    for lang in LANGUAGES:
        for s, t in links[lang]:
            in_sets[lang].setdefault(t, set()).add(s)

    def coords_of(eid):
        d = ents[eid]
        if d["coords"]:
            return d["coords"]
        return [c for pl in d["places"] for c in ents[pl]["coords"]]

    clicks = {}
    for lang in LANGUAGES:
        rows = []
        for s, t in links[lang]:
            if "_topic_" not in s or not ents[t]["is_event"]:
                continue
            home = ents[t]["cluster"] == lang
            shared = len(in_sets[lang].get(s, set()) & in_sets[lang].get(t, set()))
            cs, ct = coords_of(s), coords_of(t)
            near = bool(cs and ct and min(geo.haversine(a, b) for a in cs for b in ct) < 150.0)
            mean = 30.0 * (4.0 if home else 1.0) * (1 + shared) * (1.5 if near else 1.0) * CLICK_SCALE[lang]
            n = int(rng.poisson(mean))
            if (s, t) == (PLANTED_QUERY, PLANTED_EVENT):
                n = 50000
            if n > 0:
                rows.append((s, t, n))
        clicks[lang] = rows

    with open(directory / "entities.tsv", "w", encoding="utf-8") as fh:
        fh.write("# id\tlabel\tis_event\tt_s\tt_e\tcoords\tplace_links\n")
        for eid in sorted(ents):
            d = ents[eid]
            fh.write("\t".join([
                eid, d["label"], "1" if d["is_event"] else "0",
                d["start"].isoformat() if d["start"] else "",
                d["end"].isoformat() if d["end"] else "",
                _fmt_coords(d["coords"]), ";".join(d["places"]),
            ]) + "\n")
    with open(directory / "countries.tsv", "w", encoding="utf-8") as fh:
        for lang, countries in COUNTRIES.items():
            for name, poly in countries.items():
                fh.write(f"{lang}\t{name}\t{_fmt_coords(poly)}\n")
    for lang in LANGUAGES:
        with open(directory / f"links_{lang}.tsv", "w", encoding="utf-8") as fh:
            fh.writelines(f"{s}\t{t}\n" for s, t in links[lang])
        with open(directory / f"clicks_{lang}.tsv", "w", encoding="utf-8") as fh:
            fh.writelines(f"{s}\t{t}\t{n}\n" for s, t, n in clicks[lang])

    cfg = directory / "toy.cfg"
    cfg.write_text(TOY_CONFIG_TEXT, encoding="utf-8")
    return cfg


TOY_CONFIG_TEXT = """\
# Toy dataset: two languages, ~200 entities.
data.dir = .
languages = de,fr
output = eventrec-out
seed = 0
workers = 1
candidate_k = 200

walk.walks_per_node = 10
walk.walk_length = 20
walk.treat_undirected = true

embed.dim = 32
embed.window = 5
embed.negatives = 5
embed.epochs = 2

ltr.n_trees = 50
ltr.learning_rate = 0.1
ltr.max_leaves = 8

eval.folds = 5
eval.k = 10
eval.recall_min_positives = 10
"""

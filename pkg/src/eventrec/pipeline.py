"""
End-to-end pipeline: ingest, embed, relevance, ground truth, features, train,
evaluate, plus correlation and ablation reports, and the query-time
``recommend`` call.

Every stage writes its artifacts into the output directory and records them
in ``manifest.json`` together with content hashes of its inputs and a
snapshot of the config sections it depends on. A stage is skipped when its
outputs exist and still match the manifest, its inputs and config are
unchanged, and no upstream stage ran in the same invocation.
"""

from __future__ import annotations

import difflib
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clickstream import (
    RelevanceTable,
    balance_clicks,
    build_ground_truth,
    load_clicks,
    read_ground_truth,
    split_folds,
    write_ground_truth,
)
from .config import PipelineConfig
from .embeddings import EmbeddingTable, candidate_events, generate_walks, train_embeddings
from .errors import DataError
from .evaluation import correlation_tsv, cross_validate, feature_correlations, run_ablation
from .features import FEATURE_NAMES, FeatureExtractor, read_feature_matrix, write_feature_matrix
from .kg import KnowledgeGraph, load_graph
from .ltr import QueryGroup, TrainingSet, load_model, save_model, train
from .metrics import EvalReport, candidate_recall, sort_by_score

logger = logging.getLogger(__name__)

PIPELINE_STAGES = ("ingest", "embed", "relevance", "groundtruth", "features", "train", "evaluate", "correlate")


class StageError(RuntimeError):
    """A stage failed; ``stage`` names it."""

    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"stage {stage!r}: {message}")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class Stage:
    name: str
    deps: tuple[str, ...]
    config_sections: tuple[str, ...]


STAGES = {
    s.name: s
    for s in [
        Stage("ingest", (), ()),
        Stage("embed", ("ingest",), ("walk", "embed", "languages")),
        Stage("relevance", ("ingest",), ("clicks",)),
        Stage("groundtruth", ("relevance",), ("seed", "languages")),
        Stage("features", ("groundtruth", "embed"), ("features",)),
        Stage("train", ("features",), ("ltr",)),
        Stage("evaluate", ("features", "train"), ("ltr", "eval", "candidate_k", "seed")),
        Stage("correlate", ("features",), ()),
        Stage("ablate", ("features",), ("ltr", "eval", "seed")),
    ]
}


class Pipeline:
    def __init__(self, config: PipelineConfig, force: bool = False):
        self.cfg = config
        self.force = force
        self.out = Path(config.output)
        self.ran: list[str] = []
        self.skipped: list[str] = []
        self._graph: KnowledgeGraph | None = None
        self._done: set[str] = set()

    # -- artifact locations ------------------------------------------------
    @property
    def manifest_path(self) -> Path:
        return self.out / "manifest.json"

    def embeddings_path(self, lang):
        return self.out / f"embeddings_{lang}.tsv"

    def model_path(self, lang):
        return self.out / f"model_{lang}.json"

    def outputs(self, stage: str) -> list[Path]:
        langs = self.cfg.languages
        return {
            "ingest": [self.out / "graph_summary.json"],
            "embed": [self.embeddings_path(l) for l in langs],
            "relevance": [self.out / "relevance.tsv"],
            "groundtruth": [self.out / "ground_truth.tsv"],
            "features": [self.out / "features.tsv"],
            "train": [self.model_path(l) for l in langs],
            "evaluate": [self.out / "report.tsv"],
            "correlate": [self.out / f"correlation_{l}.tsv" for l in langs],
            "ablate": [self.out / "ablation.tsv"],
        }[stage]

    def source_inputs(self, stage: str) -> list[Path]:
        cfg = self.cfg
        if stage == "ingest":
            return [cfg.entities, cfg.countries] + [cfg.links[l] for l in cfg.languages]
        if stage == "relevance":
            return [cfg.clicks[l] for l in cfg.languages]
        return []

    def inputs(self, stage: str) -> list[Path]:
        paths = list(self.source_inputs(stage))
        for dep in STAGES[stage].deps:
            paths += self.outputs(dep)
        return paths

    # -- manifest ----------------------------------------------------------
    def _load_manifest(self) -> dict:
        if self.manifest_path.exists():
            try:
                return json.loads(self.manifest_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError:
                logger.warning("corrupt manifest ignored")
        return {"stages": {}}

    def _record(self, stage: str) -> dict:
        return {
            "config": self.cfg.section_snapshot(*STAGES[stage].config_sections),
            "inputs": {str(p): _sha256(p) for p in self.inputs(stage)},
            "outputs": {p.name: _sha256(p) for p in self.outputs(stage)},
        }

    def _up_to_date(self, stage: str, manifest: dict) -> bool:
        if self.force or any(dep in self.ran for dep in STAGES[stage].deps):
            return False
        outs = self.outputs(stage)
        if not all(p.exists() for p in outs):
            return False
        entry = manifest["stages"].get(stage)
        if entry is None:
            return False
        try:
            current = self._record(stage)
        except OSError:
            return False
        snapshot = json.loads(json.dumps(current["config"], default=str))
        return entry == {**current, "config": snapshot}

    # -- running -----------------------------------------------------------
    def run(self, stage: str) -> None:
        """Run ``stage`` after bringing its dependencies up to date."""
        if stage in self._done:
            return
        for dep in STAGES[stage].deps:
            self.run(dep)
        for p in self.source_inputs(stage):
            if not Path(p).exists():
                raise StageError(stage, f"missing input file {p}")
        self.out.mkdir(parents=True, exist_ok=True)
        manifest = self._load_manifest()
        if self._up_to_date(stage, manifest):
            logger.info("stage %s: up to date, skipped", stage)
            self.skipped.append(stage)
        else:
            logger.info("stage %s: running", stage)
            try:
                getattr(self, f"_stage_{stage}")()
            except (DataError, ValueError, KeyError) as exc:
                raise StageError(stage, str(exc)) from exc
            manifest = self._load_manifest()
            manifest["stages"][stage] = json.loads(json.dumps(self._record(stage), default=str))
            self.manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
            self.ran.append(stage)
        self._done.add(stage)

    def run_all(self, stages=PIPELINE_STAGES) -> None:
        for stage in stages:
            self.run(stage)

    # -- shared loaders ----------------------------------------------------
    @property
    def graph(self) -> KnowledgeGraph:
        if self._graph is None:
            cfg = self.cfg
            self._graph = load_graph(cfg.entities, {l: cfg.links[l] for l in cfg.languages}, cfg.countries)
        return self._graph

    def training_sets(self) -> dict[str, TrainingSet]:
        rows: dict[str, dict[str, list]] = {l: {} for l in self.cfg.languages}
        for q, v, lang, rel, x in read_feature_matrix(self.out / "features.tsv"):
            rows.setdefault(lang, {}).setdefault(q, []).append((v, rel, x))
        out = {}
        for lang, queries in rows.items():
            groups = [
                QueryGroup(q, lang, np.array([x for _, _, x in items]), np.array([r for _, r, _ in items]),
                           [v for v, _, _ in items])
                for q, items in queries.items()
            ]
            out[lang] = TrainingSet(groups, FEATURE_NAMES)
        return out

    def ground_truth(self):
        return read_ground_truth(self.out / "ground_truth.tsv")

    # -- stages ------------------------------------------------------------
    def _stage_ingest(self):
        g = self.graph
        summary = {
            "entities": g.n_entities,
            "events": len(g.events),
            "languages": {
                lang: {
                    "edges": ls.n_edges,
                    "nodes": len(ls.nodes()),
                    "self_loops_dropped": ls.n_self_loops,
                    "duplicates_dropped": ls.n_duplicates,
                    "unknown_endpoints": sum(1 for n in ls.nodes() if n not in g.entities),
                }
                for lang, ls in sorted(g.links.items())
            },
            "countries": {lang: len(p) for lang, p in sorted(g.countries.items())},
        }
        for lang in self.cfg.languages:
            g.polygons(lang)
        (self.out / "graph_summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")

    def _stage_embed(self):
        for lang in self.cfg.languages:
            walks = generate_walks(self.graph.link_set(lang), self.cfg.walk, self.cfg.workers)
            table = train_embeddings(walks, self.cfg.embed, lang, self.cfg.workers)
            table.save(self.embeddings_path(lang))
            logger.info("embeddings[%s]: %d walks, %d vectors", lang, len(walks), len(table))

    def _stage_relevance(self):
        tables = [load_clicks(self.cfg.clicks[l], l) for l in self.cfg.languages]
        balanced = balance_clicks(tables)
        RelevanceTable.from_balanced(balanced, self.graph.events).write_tsv(self.out / "relevance.tsv")

    def _stage_groundtruth(self):
        table = RelevanceTable.read_tsv(self.out / "relevance.tsv")
        gts = [build_ground_truth(l, table, self.graph.events, self.cfg.seed) for l in self.cfg.languages]
        write_ground_truth(self.out / "ground_truth.tsv", gts)

    def _stage_features(self):
        gts = self.ground_truth()
        rows = []
        for lang in self.cfg.languages:
            gt = gts.get(lang)
            if gt is None:
                continue
            table = EmbeddingTable.load(self.embeddings_path(lang), lang)
            ex = FeatureExtractor(self.graph, lang, table, self.cfg.features)
            for entry in gt.entries:
                for v, rel in entry.ranked:
                    rows.append((entry.query, v, lang, rel, ex.vector(entry.query, v).as_array()))
        write_feature_matrix(self.out / "features.tsv", rows)

    def _stage_train(self):
        sets = self.training_sets()
        for lang in self.cfg.languages:
            if not sets.get(lang) or not sets[lang].groups:
                raise DataError(f"no training data for language {lang!r}")
            save_model(train(sets[lang], self.cfg.ltr), self.model_path(lang))

    def _stage_evaluate(self):
        cfg = self.cfg
        k = cfg.eval.k
        report = EvalReport()
        sets = self.training_sets()
        gts = self.ground_truth()
        for lang in cfg.languages:
            ts = sets[lang]
            folds = split_folds([g.query for g in ts.groups], cfg.eval.folds, cfg.seed)
            cross_validate(ts, folds, cfg.ltr, k, lang, report=report)
            table = EmbeddingTable.load(self.embeddings_path(lang), lang)
            recalls = []
            for entry in gts[lang].entries:
                if entry.n_positive > cfg.eval.recall_min_positives and entry.query in table:
                    cands = [v for v, _ in candidate_events(entry.query, cfg.candidate_k, table, self.graph.events)]
                    recalls.append(candidate_recall([v for v, r in entry.ranked if r > 0], cands))
            if recalls:
                report.add("candidates", lang, "all", f"recall@{cfg.candidate_k}", np.mean(recalls))
                report.add("candidates", lang, "all", "eligible_queries", len(recalls))
        if len(cfg.languages) > 1:
            for method in ("lambdamart", "milne_witten", "embedding"):
                for metric in (f"ndcg@{k}", f"map@{k}"):
                    vals = [report.value(method, l, "mean", metric) for l in cfg.languages]
                    report.add(method, "avg", "mean", metric, np.mean(vals))
        (self.out / "report.tsv").write_text(report.to_tsv(), encoding="utf-8")

    def _stage_correlate(self):
        for lang, ts in self.training_sets().items():
            mat = feature_correlations(ts)
            (self.out / f"correlation_{lang}.tsv").write_text(correlation_tsv(mat, ts.feature_names), encoding="utf-8")

    def _stage_ablate(self):
        cfg = self.cfg
        lines = ["language\tconfiguration\tndcg@{}".format(cfg.eval.k)]
        for lang, ts in self.training_sets().items():
            folds = split_folds([g.query for g in ts.groups], cfg.eval.folds, cfg.seed)
            for name, value in run_ablation(ts, folds, cfg.ltr, k=cfg.eval.k).items():
                lines.append(f"{lang}\t{name}\t{value!r}")
        (self.out / "ablation.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # -- query phase -------------------------------------------------------
    def recommend(self, query: str, language: str, n: int = 10) -> "RecommendationList":
        """Rank candidate events for ``query`` in ``language`` with the trained model."""
        if n < 1:
            raise ValueError("n must be >= 1")
        if language not in self.cfg.languages:
            raise KeyError(f"language {language!r} is not configured")
        graph = self.graph
        if query not in graph.entities:
            hints = _suggest(query, graph.entities)
            msg = f"unknown query id {query!r}"
            if hints:
                msg += "; did you mean: " + ", ".join(hints)
            raise UnknownEntityError(msg)
        for p in (self.embeddings_path(language), self.model_path(language)):
            if not p.exists():
                raise DataError(f"missing artifact {p}; run the pipeline first")
        table = EmbeddingTable.load(self.embeddings_path(language), language)
        if query not in table:
            raise UnknownEntityError(f"query {query!r} has no embedding in {language!r}")
        model = load_model(self.model_path(language))
        cands = [v for v, _ in candidate_events(query, self.cfg.candidate_k, table, graph.events)]
        if not cands:
            return RecommendationList(query, language, [])
        X = FeatureExtractor(graph, language, table, self.cfg.features).matrix(query, cands)
        scores = model.predict(X, FEATURE_NAMES)
        ranked = sort_by_score(cands, scores)[:n]
        return RecommendationList(query, language, [(v, s, graph.entities[v].label) for v, s in ranked])


def _suggest(query, ids, n=5, cutoff=0.5):
    """Closest ids by similarity ratio, ties in id order."""
    sm = difflib.SequenceMatcher()
    sm.set_seq2(query)
    scored = []
    for eid in ids:
        sm.set_seq1(eid)
        if sm.real_quick_ratio() >= cutoff and sm.quick_ratio() >= cutoff:
            r = sm.ratio()
            if r >= cutoff:
                scored.append((-r, eid))
    return [eid for _, eid in sorted(scored)[:n]]


class UnknownEntityError(KeyError):
    def __str__(self):
        return self.args[0]


@dataclass
class RecommendationList:
    query: str
    language: str
    items: list[tuple[str, float, str]]

    def to_tsv(self) -> str:
        lines = ["rank\tevent_id\tscore\tlabel"]
        lines += [f"{i}\t{v}\t{s!r}\t{label}" for i, (v, s, label) in enumerate(self.items, start=1)]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "query": self.query,
            "language": self.language,
            "results": [{"rank": i, "event": v, "score": s, "label": label}
                        for i, (v, s, label) in enumerate(self.items, start=1)],
        }
        return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"

"""
Pipeline configuration from a flat ``key = value`` file.

Section keys are dotted (``embed.dim = 128``). Data paths are resolved
relative to the config file's directory, ``output`` relative to the current
working directory. Unknown keys are rejected.

Recognised keys::

    data.dir, data.entities, data.countries, data.links.<lang>, data.clicks.<lang>
    languages, output, seed, workers, candidate_k
    walk.{walks_per_node, walk_length, bias, p, q, treat_undirected}
    embed.{dim, window, negatives, epochs, initial_lr}
    ltr.{n_trees, learning_rate, max_leaves, min_samples_leaf, l2_leaf_reg, ndcg_truncation}
    features.{missing_distance_sentinel, missing_time_sentinel, reference_date}
    eval.{folds, k, recall_min_positives}

A single ``seed`` drives walks, embeddings, negative sampling, folds and the
ranker.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .embeddings import EmbedConfig, WalkConfig
from .features import FeatureConfig
from .ltr import LambdaMartConfig


class ConfigError(ValueError):
    """Invalid configuration file or value."""


@dataclass
class EvalConfig:
    folds: int = 5
    k: int = 10
    recall_min_positives: int = 10


@dataclass
class PipelineConfig:
    entities: Path
    countries: Path
    links: dict[str, Path]
    clicks: dict[str, Path]
    languages: tuple[str, ...]
    output: Path = Path("eventrec-out")
    seed: int = 0
    workers: int = 1
    candidate_k: int = 200
    walk: WalkConfig = field(default_factory=WalkConfig)
    embed: EmbedConfig = field(default_factory=EmbedConfig)
    ltr: LambdaMartConfig = field(default_factory=LambdaMartConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self):
        if self.candidate_k < 1:
            raise ConfigError("candidate_k must be >= 1")
        if not self.languages:
            raise ConfigError("no languages configured")
        for lang in self.languages:
            if lang not in self.links or lang not in self.clicks:
                raise ConfigError(f"language {lang!r} needs both a link file and a click file")

    def with_overrides(self, seed=None, workers=None, output=None) -> "PipelineConfig":
        cfg = self
        if seed is not None:
            cfg = dataclasses.replace(
                cfg, seed=seed,
                walk=dataclasses.replace(cfg.walk, seed=seed),
                embed=dataclasses.replace(cfg.embed, seed=seed),
                ltr=dataclasses.replace(cfg.ltr, seed=seed),
            )
        if workers is not None:
            cfg = dataclasses.replace(cfg, workers=workers)
        if output is not None:
            cfg = dataclasses.replace(cfg, output=Path(output))
        return cfg

    def section_snapshot(self, *names) -> dict:
        """Plain-data view of config sections, used to detect stale stage outputs."""
        out = {}
        for name in names:
            value = getattr(self, name)
            if dataclasses.is_dataclass(value):
                value = dataclasses.asdict(value)
            elif isinstance(value, dict):
                value = {k: str(v) for k, v in sorted(value.items())}
            out[name] = value
        return out


_SECTIONS = {"walk": WalkConfig, "embed": EmbedConfig, "ltr": LambdaMartConfig,
             "features": FeatureConfig, "eval": EvalConfig}
_NO_FILE_KEYS = {"seed"}  # per-section seeds follow the global seed


def _convert(raw: str, default, key: str):
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, date):
            return date.fromisoformat(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{key}: invalid value {raw!r}") from None


def parse_config_text(text: str, base_dir: Path | str = ".") -> PipelineConfig:
    base_dir = Path(base_dir)
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    data_dir = base_dir / raw.pop("data.dir", ".")
    entities = data_dir / "entities.tsv"
    countries = data_dir / "countries.tsv"
    links: dict[str, Path] = {}
    clicks: dict[str, Path] = {}
    top: dict = {}
    sections: dict[str, dict] = {name: {} for name in _SECTIONS}
    for key, value in raw.items():
        parts = key.split(".")
        if key == "data.entities":
            entities = base_dir / value
        elif key == "data.countries":
            countries = base_dir / value
        elif len(parts) == 3 and parts[:2] == ["data", "links"]:
            links[parts[2]] = base_dir / value
        elif len(parts) == 3 and parts[:2] == ["data", "clicks"]:
            clicks[parts[2]] = base_dir / value
        elif key == "languages":
            top["languages"] = tuple(s.strip() for s in value.split(",") if s.strip())
        elif key == "output":
            top["output"] = Path(value)
        elif key in ("seed", "workers", "candidate_k"):
            top[key] = _convert(value, 0, key)
        elif len(parts) == 2 and parts[0] in _SECTIONS:
            cls = _SECTIONS[parts[0]]
            defaults = {f.name: getattr(cls(), f.name) for f in dataclasses.fields(cls)}
            if parts[1] not in defaults or parts[1] in _NO_FILE_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            sections[parts[0]][parts[1]] = _convert(value, defaults[parts[1]], key)
        else:
            raise ConfigError(f"unknown config key {key!r}")

    languages = top.pop("languages", None)
    if languages is None:
        languages = tuple(sorted(
            lang for lang in {p.stem.split("_", 1)[1] for p in data_dir.glob("links_*.tsv")}
            if (data_dir / f"clicks_{lang}.tsv").exists()
        ))
    for lang in languages:
        links.setdefault(lang, data_dir / f"links_{lang}.tsv")
        clicks.setdefault(lang, data_dir / f"clicks_{lang}.tsv")

    seed = top.get("seed", 0)
    try:
        built = {name: _SECTIONS[name](**vals) for name, vals in sections.items()}
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for name in ("walk", "embed", "ltr"):
        built[name] = dataclasses.replace(built[name], seed=seed)
    return PipelineConfig(
        entities=entities, countries=countries,
        links={k: links[k] for k in languages}, clicks={k: clicks[k] for k in languages},
        languages=tuple(languages), **top, **built,
    )


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, path.parent)

"""Run configuration: a JSON config file plus CLI flag overrides.

Config keys (flat JSON object): embedding, embedding_format, ontology,
corpus, taxonomy, gold, output, min_count, lowercase, "kmeans.seed",
"kmeans.max_iters", "split.seed", threshold, weights, class_vector_method,
"exclusion.min_seeds", strict.  Linkage for the hierarchical model is
fixed (average); it is not configurable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError

_KEY_TO_FIELD = {
    "embedding": "embedding_path",
    "embedding_format": "embedding_format",
    "ontology": "ontology_path",
    "corpus": "corpus_dir",
    "taxonomy": "taxonomy_path",
    "gold": "gold_path",
    "output": "output_dir",
    "min_count": "min_count",
    "lowercase": "lowercase",
    "kmeans.seed": "kmeans_seed",
    "kmeans.max_iters": "kmeans_max_iters",
    "split.seed": "split_seed",
    "threshold": "threshold",
    "weights": "weights",
    "class_vector_method": "class_vector_method",
    "exclusion.min_seeds": "exclusion_min_seeds",
    "strict": "strict",
}

_PATH_FIELDS = {"embedding_path", "ontology_path", "corpus_dir", "taxonomy_path", "gold_path", "output_dir"}


@dataclass
class RunConfig:
    embedding_path: Path | None = None
    embedding_format: str = "auto"
    ontology_path: Path | None = None
    corpus_dir: Path | None = None
    taxonomy_path: Path | None = None
    gold_path: Path | None = None
    output_dir: Path = field(default_factory=lambda: Path("out"))
    min_count: int = 5
    lowercase: bool = True
    kmeans_seed: int = 42
    kmeans_max_iters: int = 300
    split_seed: int = 0
    threshold: float = 0.0
    weights: list[float] | None = None
    class_vector_method: str = "centroid"
    exclusion_min_seeds: int = 2
    strict: bool = False

    def merged(self, **overrides) -> "RunConfig":
        """Copy with non-None overrides applied."""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        for name, value in overrides.items():
            if value is not None:
                values[name] = value
        return RunConfig(**values)

    def finalize(self) -> "RunConfig":
        """Coerce paths, normalize explicit weights, check what can be
        checked before any computation starts."""
        for name in _PATH_FIELDS:
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, Path(value))
        if self.embedding_format not in ("auto", "text", "binary"):
            raise ConfigError(f"embedding_format must be auto/text/binary, not {self.embedding_format!r}")
        if self.class_vector_method not in ("centroid", "median"):
            raise ConfigError(f"class_vector_method must be centroid/median, not {self.class_vector_method!r}")
        if self.min_count < 1:
            raise ConfigError("min_count must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must lie in [0, 1]")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=np.float64)
            if w.ndim != 1 or len(w) != 5:
                raise ConfigError("explicit weights must be a 5-vector")
            if np.any(w < 0.0):
                raise ConfigError("explicit weights must be non-negative")
            total = float(w.sum())
            if total <= 0.0:
                raise ConfigError("explicit weights must not all be zero")
            self.weights = [float(x) for x in w / total]
        return self

    def require_inputs(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError(f"missing required config value(s): {', '.join(missing)}")
        for name in names:
            path = getattr(self, name)
            if name in _PATH_FIELDS and not Path(path).exists():
                raise ConfigError(f"{name.replace('_', ' ')} does not exist: {path}")


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    values = {}
    for key, value in doc.items():
        field_name = _KEY_TO_FIELD.get(key)
        if field_name is None:
            raise ConfigError(f"unknown config key {key!r}")
        values[field_name] = value
    # Relative paths resolve against the config file's directory.
    cfg = RunConfig(**values)
    for name in _PATH_FIELDS:
        value = getattr(cfg, name)
        if value is not None and not Path(value).is_absolute():
            setattr(cfg, name, path.parent / value)
    return cfg


def save_config(cfg: RunConfig, path) -> None:
    """Inverse of load_config, with paths made relative where possible."""
    path = Path(path)
    doc = {}
    for key, field_name in _KEY_TO_FIELD.items():
        value = getattr(cfg, field_name)
        if value is None:
            continue
        if field_name in _PATH_FIELDS:
            value = Path(value)
            try:
                value = value.relative_to(path.parent)
            except ValueError:
                pass
            value = str(value)
        doc[key] = value
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

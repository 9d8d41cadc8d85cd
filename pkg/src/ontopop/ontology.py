"""Ontology data model: classes, taxonomic links, seed and populated instances.

On-disk schema (JSON)::

    { "classes": [ { "id": str, "label": str, "parent": str|null,
                     "seeds": [str],
                     "populated": [ {"instance": str, "models": [str],
                                     "score": number} ] } ] }

Gold-standard files are ``{ "classes": { "<id>": [str, ...] } }``.

Parent links must form a forest.  Seeds may overlap between classes
(warned, not rejected); a populated instance may never duplicate a seed
of its own class.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingStore
from .errors import DerivationError, FormatError, OntologyError

log = logging.getLogger(__name__)

CLASS_VECTOR_METHODS = ("centroid", "median")


@dataclass
class PopulatedInstance:
    instance: str
    models: list[str]
    score: float


@dataclass
class OntologyClass:
    id: str
    label: str
    parent: str | None
    seeds: set[str]
    populated: list[PopulatedInstance] = field(default_factory=list)

    def populated_tokens(self) -> set[str]:
        return {p.instance for p in self.populated}


@dataclass
class Ontology:
    classes: dict[str, OntologyClass]

    def class_ids(self) -> list[str]:
        """Canonical (lexicographic) class ordering used everywhere downstream."""
        return sorted(self.classes)

    def all_seeds(self) -> set[str]:
        out: set[str] = set()
        for cls in self.classes.values():
            out |= cls.seeds
        return out

    def add_instance(self, class_id: str, instance: str, models: list[str], score: float) -> None:
        cls = self.classes[class_id]
        if instance in cls.seeds:
            raise OntologyError(
                f"instance {instance!r} is already a seed of class {class_id!r}"
            )
        cls.populated.append(PopulatedInstance(instance, sorted(models), float(score)))
        cls.populated.sort(key=lambda p: p.instance)

    def clear_population(self) -> None:
        for cls in self.classes.values():
            cls.populated.clear()


@dataclass(frozen=True)
class ClassVector:
    """Representative embedding-space vector standing for one class."""

    class_id: str
    vector: np.ndarray
    method: str


def _check_forest(classes: dict[str, OntologyClass]) -> None:
    for cid, cls in classes.items():
        if cls.parent is not None and cls.parent not in classes:
            raise OntologyError(f"class {cid!r} references missing parent {cls.parent!r}")
    # Walk each parent chain; revisiting a node within one walk is a cycle.
    for cid in classes:
        chain = [cid]
        seen = {cid}
        cur = classes[cid].parent
        while cur is not None:
            if cur in seen:
                chain.append(cur)
                cycle = " -> ".join(chain[chain.index(cur):])
                raise OntologyError(f"cycle in parent links: {cycle}")
            chain.append(cur)
            seen.add(cur)
            cur = classes[cur].parent


def validate_ontology(onto: Ontology, strict: bool = False) -> None:
    _check_forest(onto.classes)
    seen_seed_owner: dict[str, str] = {}
    for cid in onto.class_ids():
        cls = onto.classes[cid]
        if not cls.seeds:
            if strict:
                raise OntologyError(f"class {cid!r} has an empty seed set")
            log.warning("class %r has an empty seed set", cid)
        overlap = cls.seeds & cls.populated_tokens()
        if overlap:
            raise OntologyError(
                f"class {cid!r}: populated instances duplicate seeds: {sorted(overlap)}"
            )
        for seed in sorted(cls.seeds):
            if seed in seen_seed_owner:
                log.warning(
                    "seed %r appears in both %r and %r (overlap permitted)",
                    seed,
                    seen_seed_owner[seed],
                    cid,
                )
            else:
                seen_seed_owner[seed] = cid


def load_ontology(path, strict: bool = False) -> Ontology:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}", path=path)
    if not isinstance(doc, dict) or not isinstance(doc.get("classes"), list):
        raise FormatError("expected an object with a 'classes' array", path=path)
    classes: dict[str, OntologyClass] = {}
    for entry in doc["classes"]:
        try:
            cid = entry["id"]
            cls = OntologyClass(
                id=cid,
                label=entry.get("label", cid),
                parent=entry.get("parent"),
                seeds=set(entry.get("seeds", [])),
                populated=[
                    PopulatedInstance(p["instance"], sorted(p.get("models", [])), float(p["score"]))
                    for p in entry.get("populated", [])
                ],
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed class entry: {exc}", path=path)
        if not isinstance(cid, str) or not cid:
            raise FormatError("class id must be a non-empty string", path=path)
        if cid in classes:
            raise OntologyError(f"duplicate class id {cid!r}")
        cls.populated.sort(key=lambda p: p.instance)
        classes[cid] = cls
    onto = Ontology(classes=classes)
    validate_ontology(onto, strict=strict)
    return onto


def save_population(onto: Ontology, path) -> None:
    """Write the ontology (seeds and population) back to JSON.

    load(save(o)) is structurally equal to o; output is canonicalized
    (sorted seeds, population sorted by instance) so identical runs
    produce byte-identical files.
    """
    path = Path(path)
    doc = {
        "classes": [
            {
                "id": cid,
                "label": onto.classes[cid].label,
                "parent": onto.classes[cid].parent,
                "seeds": sorted(onto.classes[cid].seeds),
                "populated": [
                    {"instance": p.instance, "models": list(p.models), "score": p.score}
                    for p in sorted(onto.classes[cid].populated, key=lambda p: p.instance)
                ],
            }
            for cid in onto.class_ids()
        ]
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_gold(path) -> dict[str, set[str]]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}", path=path)
    table = doc.get("classes") if isinstance(doc, dict) else None
    if not isinstance(table, dict):
        raise FormatError("expected an object with a 'classes' mapping", path=path)
    return {cid: set(words) for cid, words in table.items()}


def derive_class_vector(
    cls: OntologyClass, store: EmbeddingStore, method: str = "centroid"
) -> ClassVector:
    """Representative vector from the class's in-vocabulary seeds.

    centroid: component-wise mean; median: component-wise median.
    Out-of-vocabulary seeds are skipped with a warning; a class whose
    seeds are all OOV (or whose aggregate is the zero vector) cannot be
    derived.
    """
    if method not in CLASS_VECTOR_METHODS:
        raise ValueError(f"unknown class-vector method {method!r}")
    usable = []
    for seed in sorted(cls.seeds):
        vec = store.get(seed)
        if vec is None:
            log.warning("class %r: seed %r is out of vocabulary, skipped", cls.id, seed)
        else:
            usable.append(vec)
    if not usable:
        raise DerivationError(f"class {cls.id!r}: every seed is out of vocabulary")
    rows = np.vstack(usable)
    vector = np.mean(rows, axis=0) if method == "centroid" else np.median(rows, axis=0)
    if np.all(vector == 0.0):
        raise DerivationError(f"class {cls.id!r}: {method} of seed vectors is the zero vector")
    return ClassVector(class_id=cls.id, vector=vector, method=method)


def derive_all_class_vectors(
    onto: Ontology, store: EmbeddingStore, method: str = "centroid"
) -> dict[str, ClassVector]:
    return {
        cid: derive_class_vector(onto.classes[cid], store, method)
        for cid in onto.class_ids()
    }

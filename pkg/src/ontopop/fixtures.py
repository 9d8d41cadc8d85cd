"""Synthetic, mutually consistent pipeline fixtures.

Desk-scale stand-in for a real corpus + ontology + gold standard: class
tokens are Gaussian blobs around near-orthogonal unit directions, the
corpus repeats candidate tokens past the frequency threshold, the
taxonomy hangs one leaf synset per covered token under its class node,
and the gold standard records the planted labels.

The `noise` knob (0..1) degrades everything in lockstep: each class
token's vector is the convex mix (1-noise) * class_direction + noise *
random_unit_direction, taxonomy leaf placement is corrupted with the
same probability, and taxonomy coverage shrinks with it, so at noise
1.0 no model (taxonomy-driven ones included) retains real signal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig, save_config
from .embeddings import EmbeddingStore, save_text_model
from .errors import ConfigError

# Cycled per class: mixes well-seeded classes with a thin one so the
# models' minimum-seed skip paths stay exercised end to end.
SEED_COUNT_CYCLE = (5, 4, 1)
BASE_TAXONOMY_COVERAGE = 0.9


@dataclass
class FixturePaths:
    root: Path
    embedding: Path
    ontology: Path
    corpus: Path
    taxonomy: Path
    gold: Path
    config: Path


def _class_directions(n_classes: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    raw = rng.standard_normal((dim, n_classes))
    q, _ = np.linalg.qr(raw)
    return q.T[:n_classes]


def generate_fixture(
    out_dir,
    n_classes: int = 3,
    per_class: int = 50,
    noise: float = 0.1,
    seed: int = 7,
    dim: int = 200,
    vocab_size: int = 1000,
    min_count: int = 5,
    n_documents: int = 10,
) -> FixturePaths:
    """Write a complete fixture set into ``out_dir`` and return the paths.

    Deterministic: the same arguments produce byte-identical files.
    """
    if n_classes < 2:
        raise ConfigError("a fixture needs at least 2 classes")
    if dim < n_classes:
        raise ConfigError("embedding dimension must be >= the class count")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    noise = float(noise)
    corrupt_p = min(max(noise, 0.0), 1.0)

    directions = _class_directions(n_classes, dim, rng)
    class_ids = [f"c{c}" for c in range(n_classes)]
    seeds = {
        cid: [f"{cid}-s{i}" for i in range(SEED_COUNT_CYCLE[c % len(SEED_COUNT_CYCLE)])]
        for c, cid in enumerate(class_ids)
    }
    cands = {cid: [f"{cid}-x{i:03d}" for i in range(per_class)] for cid in class_ids}

    class_tokens = [(tok, c) for c, cid in enumerate(class_ids) for tok in seeds[cid] + cands[cid]]
    n_filler = vocab_size - len(class_tokens)
    if n_filler < 0:
        raise ConfigError(
            f"vocab_size={vocab_size} too small for {len(class_tokens)} class tokens"
        )
    filler = [f"fill-{i:04d}" for i in range(n_filler)]

    tokens: list[str] = []
    rows: list[np.ndarray] = []
    for tok, c in class_tokens:
        jitter = rng.standard_normal(dim)
        jitter /= np.linalg.norm(jitter)
        vec = (1.0 - corrupt_p) * directions[c] + corrupt_p * jitter
        tokens.append(tok)
        rows.append(vec)
    for tok in filler:
        tokens.append(tok)
        rows.append(rng.standard_normal(dim))
    matrix = np.vstack(rows)
    matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)
    order = rng.permutation(len(tokens))
    store = EmbeddingStore.from_rows([tokens[i] for i in order], matrix[order])

    embedding_path = out_dir / "embeddings.txt"
    save_text_model(store, embedding_path)

    # ontology + gold carry the planted labels
    ontology_path = out_dir / "ontology.json"
    ontology_path.write_text(
        json.dumps(
            {
                "classes": [
                    {
                        "id": cid,
                        "label": f"Class {cid}",
                        "parent": None,
                        "seeds": seeds[cid],
                        "populated": [],
                    }
                    for cid in class_ids
                ]
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    gold_path = out_dir / "gold.json"
    gold_path.write_text(
        json.dumps({"classes": {cid: cands[cid] for cid in class_ids}}, indent=2) + "\n",
        encoding="utf-8",
    )

    # corpus: candidates and seeds clear min_count, filler stays below it
    bag: list[str] = []
    for cid in class_ids:
        for tok in cands[cid]:
            bag.extend([tok] * int(rng.integers(min_count, min_count + 6)))
        for tok in seeds[cid]:
            bag.extend([tok] * (min_count + 5))
    for tok in filler:
        bag.extend([tok] * int(rng.integers(0, min_count)))
    bag = [bag[i] for i in rng.permutation(len(bag))]
    corpus_dir = out_dir / "corpus"
    corpus_dir.mkdir(exist_ok=True)
    for old in corpus_dir.glob("*.txt"):
        old.unlink()
    docs = np.array_split(np.arange(len(bag)), n_documents)
    for d, idx in enumerate(docs):
        words = [bag[i] for i in idx]
        sentences = [
            " ".join(words[s : s + 8]) + "."
            for s in range(0, len(words), 8)
        ]
        (corpus_dir / f"doc-{d:02d}.txt").write_text(
            "\n".join(sentences) + "\n", encoding="utf-8"
        )

    # taxonomy: per-class nodes under one root; covered tokens hang as
    # leaves under their class node, or a corrupted one with prob `noise`
    coverage = BASE_TAXONOMY_COVERAGE * (1.0 - 0.5 * corrupt_p)
    synsets = [{"id": "syn-root", "lemmas": ["entity"], "hypernyms": []}]
    for c, cid in enumerate(class_ids):
        synsets.append(
            {"id": f"syn-{cid}", "lemmas": [f"cat-{cid}"], "hypernyms": ["syn-root"]}
        )

    def place(token: str, c: int) -> int:
        if corrupt_p > 0.0 and rng.random() < corrupt_p:
            wrong = [x for x in range(n_classes) if x != c]
            return wrong[int(rng.integers(len(wrong)))]
        return c

    for c, cid in enumerate(class_ids):
        for tok in seeds[cid]:
            synsets.append(
                {
                    "id": f"syn-{tok}",
                    "lemmas": [tok],
                    "hypernyms": [f"syn-{class_ids[place(tok, c)]}"],
                }
            )
        for tok in cands[cid]:
            if rng.random() >= coverage:
                continue
            synsets.append(
                {
                    "id": f"syn-{tok}",
                    "lemmas": [tok],
                    "hypernyms": [f"syn-{class_ids[place(tok, c)]}"],
                }
            )
    taxonomy_path = out_dir / "taxonomy.json"
    taxonomy_path.write_text(
        json.dumps({"synsets": synsets}, indent=2) + "\n", encoding="utf-8"
    )

    config_path = out_dir / "config.json"
    save_config(
        RunConfig(
            embedding_path=embedding_path,
            embedding_format="text",
            ontology_path=ontology_path,
            corpus_dir=corpus_dir,
            taxonomy_path=taxonomy_path,
            gold_path=gold_path,
            output_dir=out_dir / "out",
            min_count=min_count,
            split_seed=seed,
        ),
        config_path,
    )
    return FixturePaths(
        root=out_dir,
        embedding=embedding_path,
        ontology=ontology_path,
        corpus=corpus_dir,
        taxonomy=taxonomy_path,
        gold=gold_path,
        config=config_path,
    )

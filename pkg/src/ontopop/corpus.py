"""Raw-text ingestion: tokenizing, sentence splitting, candidate extraction.

The tokenizer is rule based: a token is a maximal run of letters/digits
joined by single internal hyphens or apostrophes; everything else is
dropped.  Lowercasing happens here (configurable), never in the
embedding store.  Only single-word candidates are extracted.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .embeddings import EmbeddingStore
from .errors import ConfigError
from .ontology import Ontology

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+(?:['-][^\W_]+)*", re.UNICODE)

# Periods after these (or after any single letter) do not end a sentence.
ABBREVIATIONS = frozenset({"v", "no", "inc", "co", "mr", "mrs", "dr", "st"})

_BOUNDARY_RE = re.compile(r"[.!?]+(?=\s)")
_WORD_BEFORE_RE = re.compile(r"([^\W_]+(?:['-][^\W_]+)*)$", re.UNICODE)


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    if lowercase:
        text = text.lower()
    return _TOKEN_RE.findall(text)


def split_sentences(text: str) -> list[str]:
    """Split at '.', '!' or '?' followed by whitespace and an uppercase letter,
    except when a lone '.' follows a single letter or a known abbreviation."""
    boundaries: list[int] = []
    for m in _BOUNDARY_RE.finditer(text):
        after = text[m.end():].lstrip()
        if not after or not after[0].isupper():
            continue
        if m.group() == ".":
            before = _WORD_BEFORE_RE.search(text[: m.start()])
            if before is not None:
                word = before.group(1)
                if len(word) == 1 or word.lower() in ABBREVIATIONS:
                    continue
        boundaries.append(m.end())
    sentences = []
    start = 0
    for end in boundaries:
        chunk = text[start:end].strip()
        if chunk:
            sentences.append(chunk)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


@dataclass
class InstanceCorpus:
    """Token statistics plus the ordered candidate pool for population."""

    documents: list[str]
    tokens: dict[str, int]
    candidates: list[str]


def read_corpus_dir(path, lowercase: bool = True) -> Iterator[tuple[str, str]]:
    """Yield (document id, text) for every .txt file in the directory, sorted."""
    path = Path(path)
    if not path.is_dir():
        raise ConfigError(f"corpus directory not found: {path}")
    for doc in sorted(path.glob("*.txt")):
        yield doc.name, doc.read_text(encoding="utf-8")


def extract_candidates(
    docs: Iterable[tuple[str, str]],
    store: EmbeddingStore,
    onto: Ontology,
    min_count: int = 5,
    lowercase: bool = True,
) -> InstanceCorpus:
    """Candidate instances: in-vocabulary tokens with frequency >= min_count,
    excluding every seed of every class; ordered by descending frequency
    then lexicographically."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts: Counter[str] = Counter()
    documents: list[str] = []
    for doc_id, text in docs:
        documents.append(doc_id)
        counts.update(tokenize(text, lowercase=lowercase))
    seeds = onto.all_seeds()
    candidates = sorted(
        (
            tok
            for tok, freq in counts.items()
            if freq >= min_count and tok in store and tok not in seeds
        ),
        key=lambda tok: (-counts[tok], tok),
    )
    if not counts:
        log.warning("corpus is empty: no documents or no tokens")
    elif not candidates:
        log.warning("corpus yielded no candidates (min_count=%d)", min_count)
    return InstanceCorpus(documents=documents, tokens=dict(counts), candidates=candidates)

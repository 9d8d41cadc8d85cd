"""Pretrained word-embedding stores.

Supports the two standard word2vec interchange formats:

* text: a header line ``<vocab_count> <dimension>`` followed by one line per
  token, ``token v1 v2 ... vD`` (space separated decimal reals);
* binary: the same ASCII header terminated by ``\\n``, then per entry the
  token bytes terminated by a single space followed by ``dimension``
  little-endian IEEE-754 float32 values, optionally separated by ``\\n``.

Vectors are held in float64 regardless of the on-disk precision so that
downstream argmax comparisons are stable.  Token lookup is exact and
case-sensitive; any normalization is the corpus side's job.  Zero vectors
are dropped at load time (with a warning) because cosine similarity is
undefined for them.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateVectorError, FormatError

log = logging.getLogger(__name__)

_PRINTABLE = frozenset(range(0x20, 0x7F)) | {0x09, 0x0A, 0x0D}


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable token -> dense vector map of fixed dimension.

    Safe to share across concurrent readers once constructed.
    """

    dimension: int
    vocabulary: tuple[str, ...]
    vectors: np.ndarray
    token_index: dict[str, int] = field(repr=False)

    @classmethod
    def from_rows(cls, tokens: Sequence[str], matrix: np.ndarray) -> "EmbeddingStore":
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("expected a 2-D token/vector matrix")
        if len(tokens) != matrix.shape[0]:
            raise ValueError("token count does not match matrix row count")
        index: dict[str, int] = {}
        for i, tok in enumerate(tokens):
            if not tok:
                raise ValueError("empty token")
            if tok in index:
                raise ValueError(f"duplicate token {tok!r}")
            index[tok] = i
        matrix.setflags(write=False)
        return cls(
            dimension=int(matrix.shape[1]),
            vocabulary=tuple(tokens),
            vectors=matrix,
            token_index=index,
        )

    def __len__(self) -> int:
        return len(self.vocabulary)

    def __contains__(self, token: str) -> bool:
        return token in self.token_index

    def __getitem__(self, token: str) -> np.ndarray:
        return self.vectors[self.token_index[token]]

    def get(self, token: str) -> np.ndarray | None:
        """Stored row for ``token``, or None as the out-of-vocabulary signal."""
        i = self.token_index.get(token)
        return None if i is None else self.vectors[i]

    def rows_for(self, tokens: Iterable[str]) -> np.ndarray:
        """Matrix of rows for known tokens, in the given order."""
        return self.vectors[[self.token_index[t] for t in tokens]]


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two equal-length vectors, in [-1, 1].

    Raises DegenerateVectorError for zero vectors, for which the value
    is undefined.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateVectorError("cosine is undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def unit_rows(matrix: np.ndarray) -> np.ndarray:
    """Rows scaled to unit L2 norm.  Rows must be non-zero."""
    matrix = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise DegenerateVectorError("cannot normalize a zero row")
    return matrix / norms


def _parse_header(line: str, path) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise FormatError(
            f"header must be '<vocab_count> <dimension>', got {line!r}",
            path=path,
            line=1,
        )
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(f"non-integer header field in {line!r}", path=path, line=1)
    if count < 0 or dim <= 0:
        raise FormatError(f"nonsensical header {line!r}", path=path, line=1)
    return count, dim


def _finish_load(tokens, matrix, dropped, path) -> EmbeddingStore:
    if dropped:
        log.warning(
            "%s: dropped %d zero-vector token(s): %s",
            path,
            len(dropped),
            ", ".join(dropped[:5]) + ("..." if len(dropped) > 5 else ""),
        )
    return EmbeddingStore.from_rows(tokens, matrix)


def load_text_model(path) -> EmbeddingStore:
    """Parse a text-format embedding file.

    Malformed input (bad header, wrong arity, duplicate token, non-numeric
    field) raises FormatError carrying the offending line number.
    """
    path = Path(path)
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dropped: list[str] = []
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            raise FormatError("missing header line", path=path, line=1)
        count, dim = _parse_header(header, path)
        lineno = 1
        for raw in fh:
            lineno += 1
            if not raw.strip():
                continue
            parts = raw.split()
            if len(parts) != dim + 1:
                raise FormatError(
                    f"expected token + {dim} values, got {len(parts)} fields",
                    path=path,
                    line=lineno,
                )
            token = parts[0]
            if token in seen:
                raise FormatError(f"duplicate token {token!r}", path=path, line=lineno)
            seen.add(token)
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise FormatError("non-numeric vector field", path=path, line=lineno)
            if not np.all(np.isfinite(vec)):
                raise FormatError("non-finite vector field", path=path, line=lineno)
            if np.all(vec == 0.0):
                dropped.append(token)
                continue
            tokens.append(token)
            rows.append(vec)
    if len(tokens) + len(dropped) != count:
        raise FormatError(
            f"header declares {count} entries but file holds {len(tokens) + len(dropped)}",
            path=path,
        )
    matrix = np.vstack(rows) if rows else np.empty((0, dim), dtype=np.float64)
    return _finish_load(tokens, matrix, dropped, path)


def load_binary_model(path) -> EmbeddingStore:
    """Parse a binary-format embedding file (float32 payload)."""
    path = Path(path)
    data = path.read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise FormatError("missing header line", path=path, line=1)
    try:
        header = data[:nl].decode("ascii")
    except UnicodeDecodeError:
        raise FormatError("header is not ASCII", path=path, line=1)
    count, dim = _parse_header(header, path)
    vec_bytes = 4 * dim
    pos = nl + 1
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dropped: list[str] = []
    for entry in range(count):
        while pos < len(data) and data[pos : pos + 1] == b"\n":
            pos += 1
        sp = data.find(b" ", pos)
        if sp < 0:
            raise FormatError(
                f"truncated file: no token terminator for entry {entry}", path=path
            )
        try:
            token = data[pos:sp].decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError(f"entry {entry}: token is not UTF-8", path=path)
        if not token:
            raise FormatError(f"entry {entry}: empty token", path=path)
        if token in seen:
            raise FormatError(f"duplicate token {token!r}", path=path)
        seen.add(token)
        end = sp + 1 + vec_bytes
        if end > len(data):
            raise FormatError(
                f"truncated file: vector of entry {entry} ({token!r}) is incomplete",
                path=path,
            )
        vec = np.frombuffer(data[sp + 1 : end], dtype="<f4").astype(np.float64)
        pos = end
        if np.all(vec == 0.0):
            dropped.append(token)
            continue
        tokens.append(token)
        rows.append(vec)
    if data[pos:].strip(b"\n"):
        raise FormatError(
            f"trailing data after the {count} entries declared by the header",
            path=path,
        )
    matrix = np.vstack(rows) if rows else np.empty((0, dim), dtype=np.float64)
    return _finish_load(tokens, matrix, dropped, path)


def save_text_model(store: EmbeddingStore, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"{len(store)} {store.dimension}\n")
        for token in store.vocabulary:
            row = store[token]
            fh.write(token + " " + " ".join(f"{x:.8g}" for x in row) + "\n")


def save_binary_model(store: EmbeddingStore, path) -> None:
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(f"{len(store)} {store.dimension}\n".encode("ascii"))
        for token in store.vocabulary:
            fh.write(token.encode("utf-8") + b" ")
            fh.write(store[token].astype("<f4").tobytes())
            fh.write(b"\n")


def sniff_format(path) -> str:
    """Guess 'text' or 'binary' by inspecting the bytes after the first token.

    A text row holds only printable ASCII; a float32 block almost surely
    does not, so any non-printable byte inside the first vector-sized
    window means binary.
    """
    path = Path(path)
    with path.open("rb") as fh:
        header = fh.readline()
        try:
            _, dim = _parse_header(header.decode("ascii"), path)
        except UnicodeDecodeError:
            raise FormatError("header is not ASCII", path=path, line=1)
        rest = fh.read(8192 + 4 * dim)
    sp = rest.find(b" ")
    if sp < 0:
        return "text"
    window = rest[sp + 1 : sp + 1 + 4 * dim]
    if all(b in _PRINTABLE for b in window):
        return "text"
    return "binary"


def load_model(path, fmt: str = "auto") -> EmbeddingStore:
    """Load an embedding model; ``fmt`` is 'text', 'binary' or 'auto'."""
    if fmt == "auto":
        fmt = sniff_format(path)
    if fmt == "text":
        return load_text_model(path)
    if fmt == "binary":
        return load_binary_model(path)
    raise ValueError(f"unknown embedding format {fmt!r}")

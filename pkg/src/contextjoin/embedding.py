"""Embedding providers, column sentences, and cosine-KNN tables.

Two providers sit behind the same interface: a deterministic local embedder
(feature-hashed bag of tokens, CI-runnable, no model download) and a client
for a remote ``POST /embed`` service hosting a real sentence encoder. Both
return unit-norm vectors.

The two semantic candidate strategies search these vectors: metadata
sentences describe a column through its table's metadata, value sentences
through its (frequency-ordered) values.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from hashlib import blake2b
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import requests

from . import binio
from .errors import (
    DimensionError,
    EmptyColumnError,
    EmptyIndexError,
    InvalidKError,
    ProviderUnavailableError,
    UnknownColumnError,
)
from .ingest import ColumnProfile, ColumnRef, TableMetadata

MAGIC = b"CJEM1"

# token window of the sentence encoder, expressed in characters
VALUE_SENTENCE_MAX_CHARS = 2500

# Tokens are maximal alphanumeric runs of the lowercased text, so that URL
# components ("data.texas.gov") and punctuated values contribute tokens too.
_TOKEN_RE = re.compile(r"[a-z0-9']+")


@dataclass(frozen=True)
class MetadataSentence:
    ref: ColumnRef
    text: str


@dataclass(frozen=True)
class ValueSentence:
    ref: ColumnRef
    text: str


def metadata_sentence(meta: TableMetadata, column: str) -> MetadataSentence:
    """Render one column's table metadata as a fixed-order sentence.

    Absent fields are omitted together with their labels; ``table:`` falls
    back to the table_id and ``sibling columns:`` is always present (possibly
    with an empty value).
    """
    if column not in meta.column_names:
        raise UnknownColumnError(f"column {column!r} not in table {meta.table_id!r}")
    parts = [f"table: {meta.table_name or meta.table_id}."]
    if meta.description:
        parts.append(f"description: {meta.description}.")
    if meta.source:
        parts.append(f"source: {meta.source}.")
    if meta.tags:
        parts.append(f"tags: {', '.join(meta.tags)}.")
    parts.append(f"column: {column}.")
    col_desc = (meta.column_descriptions or {}).get(column)
    if col_desc:
        parts.append(f"column description: {col_desc}.")
    siblings = [c for c in meta.column_names if c != column]
    parts.append(f"sibling columns: {', '.join(siblings)}.")
    return MetadataSentence(
        ref=ColumnRef(meta.table_id, column), text=" ".join(parts)
    )


def frequent_value_text(
    counts: Mapping[str, int],
    top_n: int | None = None,
    max_chars: int = VALUE_SENTENCE_MAX_CHARS,
    subset: Iterable[str] | None = None,
) -> str:
    """Join distinct values by descending frequency (ties lexicographic).

    ``subset`` restricts the rendered values (for difference sets) while the
    frequencies still come from ``counts``. Truncates at ``max_chars`` on a
    value boundary; a single oversized first value is cut mid-value so the
    result is never empty.
    """
    pool = counts.keys() if subset is None else subset
    key = lambda v: (-counts[v], v)  # noqa: E731
    if top_n is not None:
        ordered = heapq.nsmallest(top_n, pool, key=key)
    else:
        ordered = sorted(pool, key=key)
    pieces: list[str] = []
    length = 0
    for value in ordered:
        extra = len(value) + (2 if pieces else 0)
        if length + extra > max_chars:
            break
        pieces.append(value)
        length += extra
    if not pieces and ordered:
        return ordered[0][:max_chars]
    return ", ".join(pieces)


def value_sentence(profile: ColumnProfile) -> ValueSentence:
    """All distinct values of a column as one frequency-ordered sentence."""
    if profile.is_empty():
        raise EmptyColumnError(f"column {profile.ref} has no values")
    return ValueSentence(ref=profile.ref, text=frequent_value_text(profile.value_counts))


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class LocalHashEmbedder:
    """Deterministic feature-hashing bag-of-tokens embedder.

    Each token lands in one of ``dims`` buckets with a ±1 sign, both taken
    from a 64-bit digest of the token; the accumulated vector is
    L2-normalized. Shared tokens therefore push cosines up, which is all the
    structure the pipeline needs from a local, dependency-free provider.
    """

    def __init__(self, dims: int = 384):
        self.dims = dims

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dims), dtype=np.float64)
        for row, text in enumerate(texts):
            tokens = tokenize(text)
            if not tokens:
                raise ValueError(f"text {row} has no tokens: {text!r}")
            for token in tokens:
                digest = blake2b(token.encode("utf-8"), digest_size=8).digest()
                h = int.from_bytes(digest, "little")
                sign = 1.0 if h & 1 else -1.0
                out[row, (h >> 1) % self.dims] += sign
        return out / np.linalg.norm(out, axis=1, keepdims=True)


class RemoteEmbedder:
    """Client for the ``POST /embed`` wire protocol.

    Batches large inputs, verifies the response shape, and re-normalizes the
    returned vectors. Any transport or protocol failure raises
    :class:`ProviderUnavailableError` so callers can degrade or fall back.
    """

    def __init__(
        self,
        base_url: str,
        dims: int | None = None,
        timeout: float = 30.0,
        batch_size: int = 256,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.dims = dims
        self.timeout = timeout
        self.batch_size = batch_size
        self._session = session or requests.Session()

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        chunks: list[np.ndarray] = []
        for start in range(0, len(texts), self.batch_size):
            batch = list(texts[start : start + self.batch_size])
            try:
                resp = self._session.post(
                    f"{self.base_url}/embed",
                    json={"texts": batch},
                    timeout=self.timeout,
                )
                resp.raise_for_status()
                payload = resp.json()
            except (requests.RequestException, ValueError) as exc:
                raise ProviderUnavailableError(
                    f"embed service at {self.base_url} failed: {exc}"
                ) from exc
            vectors = np.asarray(payload.get("embeddings"), dtype=np.float64)
            if vectors.ndim != 2 or vectors.shape[0] != len(batch):
                raise ProviderUnavailableError(
                    f"embed service returned {vectors.shape} for {len(batch)} texts"
                )
            if self.dims is None:
                self.dims = int(payload.get("dims", vectors.shape[1]))
            if vectors.shape[1] != self.dims:
                raise DimensionError(
                    f"service dims {vectors.shape[1]} != expected {self.dims}"
                )
            chunks.append(vectors)
        out = np.vstack(chunks) if chunks else np.zeros((0, self.dims or 0))
        norms = np.linalg.norm(out, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise ProviderUnavailableError("embed service returned a zero vector")
        return out / norms


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


class EmbeddingTable:
    """Immutable (ColumnRef, vector) table with exact cosine KNN."""

    def __init__(self, dims: int, refs: list[ColumnRef], vectors: np.ndarray):
        if vectors.shape != (len(refs), dims):
            raise DimensionError(
                f"vector matrix {vectors.shape} does not match {len(refs)}x{dims}"
            )
        self.dims = dims
        self.refs = refs
        self.vectors = np.asarray(vectors, dtype=np.float32)

    def __len__(self) -> int:
        return len(self.refs)

    def save(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            binio.write_u32(fh, self.dims)
            binio.write_u32(fh, len(self.refs))
            for ref, vec in zip(self.refs, self.vectors):
                binio.write_str(fh, ref.table_id)
                binio.write_str(fh, ref.column_name)
                fh.write(vec.astype("<f4").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingTable":
        with open(path, "rb") as fh:
            binio.check_magic(fh, MAGIC)
            dims = binio.read_u32(fh)
            n = binio.read_u32(fh)
            refs: list[ColumnRef] = []
            vectors = np.empty((n, dims), dtype=np.float32)
            for i in range(n):
                refs.append(ColumnRef(binio.read_str(fh), binio.read_str(fh)))
                vectors[i] = np.frombuffer(fh.read(dims * 4), dtype="<f4")
        return cls(dims, refs, vectors)


def build_table(vectors_by_ref: dict[ColumnRef, np.ndarray], dims: int) -> EmbeddingTable:
    refs = sorted(vectors_by_ref)
    if refs:
        matrix = np.vstack([vectors_by_ref[r] for r in refs]).astype(np.float32)
    else:
        matrix = np.zeros((0, dims), dtype=np.float32)
    return EmbeddingTable(dims, refs, matrix)


def knn_cosine(
    table: EmbeddingTable,
    query: np.ndarray,
    k: int,
    exclude: ColumnRef | None = None,
) -> list[ColumnRef]:
    """Exact top-k by cosine similarity; ties lexicographic; self excluded."""
    if k < 1:
        raise InvalidKError(f"k must be >= 1, got {k}")
    if len(table) == 0:
        raise EmptyIndexError("embedding table is empty")
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (table.dims,):
        raise DimensionError(f"query shape {query.shape} != ({table.dims},)")
    qnorm = np.linalg.norm(query)
    if qnorm == 0:
        raise ValueError("query vector has zero norm")
    sims = table.vectors.astype(np.float64) @ (query / qnorm)
    order = sorted(
        (i for i in range(len(table.refs)) if table.refs[i] != exclude),
        key=lambda i: (-sims[i], table.refs[i]),
    )
    return [table.refs[i] for i in order[:k]]


def embed_texts_by_ref(provider, texts: dict[ColumnRef, str]) -> dict[ColumnRef, np.ndarray]:
    """Embed a ref->text map in one batched provider call."""
    refs = sorted(texts)
    if not refs:
        return {}
    matrix = provider.embed([texts[r] for r in refs])
    return {ref: matrix[i] for i, ref in enumerate(refs)}


def unit(vec: Iterable[float]) -> np.ndarray:
    arr = np.asarray(list(vec), dtype=np.float64)
    return arr / np.linalg.norm(arr)

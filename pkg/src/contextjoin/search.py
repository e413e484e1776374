"""Query orchestration: candidate strategies, scoring, ranking, persistence.

A search runs three candidate-identification strategies (syntactic overlap,
metadata-sentence KNN, value-sentence KNN), unions their top candidates,
scores every candidate on the seven criteria, and ranks the lot with TOPSIS.
The four search structures plus the catalog persist together as an
:class:`IndexBundle` directory.
"""

from __future__ import annotations

import difflib
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import EngineConfig
from .criteria import CandidateScorer, CriteriaVector
from .embedding import (
    EmbeddingTable,
    LocalHashEmbedder,
    RemoteEmbedder,
    build_table,
    embed_texts_by_ref,
    knn_cosine,
    metadata_sentence,
    value_sentence,
)
from .errors import (
    BuildError,
    EmptyColumnError,
    EmptyQueryError,
    EmptySetError,
    ProviderUnavailableError,
    QueryNotFoundError,
)
from .ingest import ColumnProfile, ColumnRef, LakeCatalog, load_table
from .inverted import InvertedIndex, build_inverted, search_overlap
from .minhash import MinHashIndex, build_minhash, knn_hamming, signature
from .topsis import RankedResult, matrix_from_criteria, rank, weights_from_config

logger = logging.getLogger(__name__)

STRATEGY_SYNTACTIC = "Syntactic"
STRATEGY_METADATA = "Metadata"
STRATEGY_VALUE = "ValueSemantics"

CATALOG_FILE = "catalog.json"
INVERTED_FILE = "inverted.cjii"
MINHASH_FILE = "minhash.cjmh"
METADATA_VEC_FILE = "metadata.cjem"
VALUE_VEC_FILE = "values.cjem"


def make_provider(config: EngineConfig):
    if config.provider == "remote":
        if not config.embed_url:
            raise BuildError("remote provider selected but no embed URL configured")
        return RemoteEmbedder(config.embed_url, timeout=config.embed_timeout)
    return LocalHashEmbedder(config.dims)


@dataclass
class IndexBundle:
    """The persisted search structures for one lake."""

    catalog: LakeCatalog
    inverted: InvertedIndex
    minhash: MinHashIndex
    metadata_vectors: EmbeddingTable
    value_vectors: EmbeddingTable

    def save(self, dir_path: str | Path) -> dict[str, int]:
        """Write all files; returns per-file byte sizes."""
        dir_path = Path(dir_path)
        dir_path.mkdir(parents=True, exist_ok=True)
        (dir_path / CATALOG_FILE).write_text(self.catalog.to_json(), encoding="utf-8")
        self.inverted.save(dir_path / INVERTED_FILE)
        self.minhash.save(dir_path / MINHASH_FILE)
        self.metadata_vectors.save(dir_path / METADATA_VEC_FILE)
        self.value_vectors.save(dir_path / VALUE_VEC_FILE)
        return {
            name: (dir_path / name).stat().st_size
            for name in (
                CATALOG_FILE,
                INVERTED_FILE,
                MINHASH_FILE,
                METADATA_VEC_FILE,
                VALUE_VEC_FILE,
            )
        }

    @classmethod
    def load(cls, dir_path: str | Path) -> "IndexBundle":
        dir_path = Path(dir_path)
        return cls(
            catalog=LakeCatalog.from_json(
                (dir_path / CATALOG_FILE).read_text(encoding="utf-8")
            ),
            inverted=InvertedIndex.load(dir_path / INVERTED_FILE),
            minhash=MinHashIndex.load(dir_path / MINHASH_FILE),
            metadata_vectors=EmbeddingTable.load(dir_path / METADATA_VEC_FILE),
            value_vectors=EmbeddingTable.load(dir_path / VALUE_VEC_FILE),
        )


def build_indexes(catalog: LakeCatalog, provider, config: EngineConfig) -> IndexBundle:
    """Build all four search structures over a catalog.

    Deterministic per config seed. If the remote provider is down the build
    either falls back to the local embedder (when permitted) or fails.
    """
    meta_texts = {
        ref: metadata_sentence(catalog.metadata[ref.table_id], ref.column_name).text
        for ref in catalog.refs()
    }
    value_texts = {
        ref: value_sentence(catalog.profiles[ref]).text
        for ref in catalog.refs()
        if not catalog.profiles[ref].is_empty()
    }
    try:
        meta_vecs = embed_texts_by_ref(provider, meta_texts)
        value_vecs = embed_texts_by_ref(provider, value_texts)
    except ProviderUnavailableError as exc:
        if not config.fallback_local:
            raise BuildError(f"embedding provider unavailable: {exc}") from exc
        logger.warning("remote provider unavailable (%s); falling back to local", exc)
        provider = LocalHashEmbedder(config.dims)
        meta_vecs = embed_texts_by_ref(provider, meta_texts)
        value_vecs = embed_texts_by_ref(provider, value_texts)
    dims = getattr(provider, "dims", None) or config.dims
    return IndexBundle(
        catalog=catalog,
        inverted=build_inverted(catalog, config.index_row_sample),
        minhash=build_minhash(catalog, perm_seed=config.seed),
        metadata_vectors=build_table(meta_vecs, dims),
        value_vectors=build_table(value_vecs, dims),
    )


@dataclass
class SearchRequest:
    query: ColumnRef | None = None
    query_table: str | Path | None = None   # ad-hoc CSV path
    query_column: str | None = None
    k: int = 10
    budget: int = 100                       # per-strategy candidate budget
    only: str | None = None                 # single-criterion ablation
    drop: str | None = None                 # leave-one-out ablation
    minhash_mode: bool = False              # replace the inverted index with MinHash KNN

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.budget < self.k:
            logger.warning(
                "budget %d < k %d: fewer results than requested are possible",
                self.budget,
                self.k,
            )


@dataclass
class ScoredCandidates:
    """Per-query intermediate: the merged candidate set with criteria."""

    query: ColumnRef
    vectors: list[CriteriaVector]
    sources: dict[ColumnRef, set[str]]
    warnings: list[str] = field(default_factory=list)


class SearchEngine:
    """Read-only search facade over an IndexBundle and a provider."""

    def __init__(self, bundle: IndexBundle, provider, config: EngineConfig | None = None):
        self.bundle = bundle
        self.provider = provider
        self.config = config or bundle.catalog.config
        # shared across queries: profiles are immutable once ingested
        self._text_cache: dict[ColumnRef, str] = {}
        self._embed_cache: dict[str, object] = {}

    @property
    def catalog(self) -> LakeCatalog:
        return self.bundle.catalog

    def resolve_query(self, request: SearchRequest) -> ColumnProfile:
        if request.query is not None:
            profile = self.catalog.get(request.query)
            if profile is None:
                raise QueryNotFoundError(
                    f"query column {request.query} not in catalog; "
                    f"close matches: {self.suggest(request.query)}"
                )
            return profile
        if request.query_table is None or request.query_column is None:
            raise QueryNotFoundError("no query column given")
        profiles, _, _ = load_table(request.query_table, self.config)
        for profile in profiles:
            if profile.ref.column_name == request.query_column:
                return profile
        names = [p.ref.column_name for p in profiles]
        close = difflib.get_close_matches(request.query_column, names, n=3, cutoff=0.0)
        raise QueryNotFoundError(
            f"column {request.query_column!r} not in {request.query_table}; "
            f"close matches: {close}"
        )

    def suggest(self, ref: ColumnRef, n: int = 3) -> list[str]:
        names = [str(r) for r in self.catalog.refs()]
        return difflib.get_close_matches(str(ref), names, n=n, cutoff=0.0)

    def prepare(self, profile: ColumnProfile, request: SearchRequest) -> ScoredCandidates:
        """Run the three strategies and score the merged candidate set."""
        sources: dict[ColumnRef, set[str]] = {}
        warnings: list[str] = []

        def add(refs, strategy):
            for ref in refs:
                sources.setdefault(ref, set()).add(strategy)

        try:
            if request.minhash_mode:
                sig = self.bundle.minhash.signature_for(profile.ref) or signature(
                    profile.distinct_values, self.bundle.minhash.perm_seed, ref=profile.ref
                )
                add(knn_hamming(self.bundle.minhash, sig, request.budget), STRATEGY_SYNTACTIC)
            else:
                hits = search_overlap(self.bundle.inverted, profile, request.budget)
                add((h.candidate for h in hits), STRATEGY_SYNTACTIC)
        except (EmptyQueryError, EmptySetError) as exc:
            warnings.append(f"syntactic strategy skipped: {exc}")

        try:
            meta_text = metadata_sentence(profile.metadata, profile.ref.column_name).text
            qvec = self.provider.embed([meta_text])[0]
            add(
                knn_cosine(self.bundle.metadata_vectors, qvec, request.budget, exclude=profile.ref),
                STRATEGY_METADATA,
            )
        except ProviderUnavailableError as exc:
            warnings.append(f"metadata strategy skipped: {exc}")

        try:
            qvec = self.provider.embed([value_sentence(profile).text])[0]
            add(
                knn_cosine(self.bundle.value_vectors, qvec, request.budget, exclude=profile.ref),
                STRATEGY_VALUE,
            )
        except (EmptyColumnError, ProviderUnavailableError) as exc:
            warnings.append(f"value strategy skipped: {exc}")

        for message in warnings:
            logger.warning("%s", message)

        candidates = sorted(sources)
        scorer = CandidateScorer(
            profile,
            self.provider,
            self.config,
            minhash_index=self.bundle.minhash,
            intersection_mode="minhash" if request.minhash_mode else None,
            text_cache=self._text_cache,
            embed_cache=self._embed_cache,
        )
        vectors = scorer.score([self.catalog.profiles[ref] for ref in candidates])
        return ScoredCandidates(
            query=profile.ref, vectors=vectors, sources=sources, warnings=warnings
        )

    def rank_scored(
        self, scored: ScoredCandidates, weights: np.ndarray, k: int
    ) -> list[RankedResult]:
        if not scored.vectors:
            return []
        by_ref = {vec.candidate: vec for vec in scored.vectors}
        results = rank(matrix_from_criteria(scored.vectors, weights))
        for result in results:
            result.per_criterion = by_ref[result.candidate]
            result.sources = scored.sources[result.candidate]
        return results[:k]

    def search(self, request: SearchRequest) -> list[RankedResult]:
        profile = self.resolve_query(request)
        scored = self.prepare(profile, request)
        weights = weights_from_config(self.config, only=request.only, drop=request.drop)
        return self.rank_scored(scored, weights, request.k)


def result_to_dict(result: RankedResult, explain: bool = False) -> dict:
    """JSON-lines shape: one object per ranked result."""
    doc = {
        "rank": result.rank,
        "table": result.candidate.table_id,
        "column": result.candidate.column_name,
        "closeness": result.closeness,
        "criteria": result.per_criterion.to_dict() if result.per_criterion else {},
        "sources": sorted(result.sources),
    }
    if explain:
        doc["contributions"] = result.contributions
    return doc

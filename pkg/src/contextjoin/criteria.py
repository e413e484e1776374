"""The seven per-candidate joinability criteria.

For a (query, candidate) column pair:

* ``unique_values``      — candidate distinct / sampled rows (primary-key-ness)
* ``intersection``       — set containment of the query in the candidate, or
                           the MinHash Jaccard estimate in minhash mode
* ``join_size``          — rows of the left join, on sampled histograms (cost)
* ``reverse_join_size``  — rows of the right join (cost)
* ``value_semantics``    — cosine of the two top-frequent-value embeddings
* ``disjoint_value_semantics`` — cosine of the embeddings of Q-minus-C vs C-minus-Q
* ``metadata_semantics`` — cosine of the two metadata-sentence embeddings

The three value-level semantic criteria apply to String (and Date) columns
only; numeric columns carry no usable value semantics. Inapplicable or
unavailable criteria score a neutral 0 with ``applicable=False`` so the
decision matrix stays rectangular.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .config import CRITERIA, EngineConfig
from .embedding import cosine, frequent_value_text, metadata_sentence
from .errors import CriterionUnavailable, ProviderUnavailableError
from .ingest import TYPE_DATE, TYPE_STRING, ColumnProfile, ColumnRef
from .minhash import MinHashIndex, MinHashSignature, estimate_jaccard, signature

BENEFIT = "benefit"
COST = "cost"

DIRECTIONS: dict[str, str] = {
    "unique_values": BENEFIT,
    "intersection": BENEFIT,
    "join_size": COST,
    "reverse_join_size": COST,
    "value_semantics": BENEFIT,
    "disjoint_value_semantics": BENEFIT,
    "metadata_semantics": BENEFIT,
}

# how many of a column's most frequent values feed the semantic criteria
TOP_FREQUENT_VALUES = 20


class Score(NamedTuple):
    value: float
    applicable: bool = True


NEUTRAL = Score(0.0, False)


@dataclass
class CriteriaVector:
    candidate: ColumnRef
    unique_values: float
    intersection: float
    join_size: float
    reverse_join_size: float
    value_semantics: float
    disjoint_value_semantics: float
    metadata_semantics: float
    applicability: dict[str, bool]

    def as_row(self) -> list[float]:
        return [getattr(self, name) for name in CRITERIA]

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in CRITERIA}


def _semantics_applicable(profile: ColumnProfile) -> bool:
    # dates tokenize meaningfully, so they pass the string-only gate
    return profile.type_class in (TYPE_STRING, TYPE_DATE)


def frequent_text(counts, subset=None) -> str:
    return frequent_value_text(counts, top_n=TOP_FREQUENT_VALUES, subset=subset)


def unique_values_score(candidate: ColumnProfile) -> Score:
    if candidate.is_empty():
        return NEUTRAL
    return Score(candidate.distinct_count / candidate.sampled_size)


def intersection_score(
    query: ColumnProfile,
    candidate: ColumnProfile,
    mode: str = "exact",
    query_sig: MinHashSignature | None = None,
    candidate_sig: MinHashSignature | None = None,
) -> Score:
    if query.is_empty() or candidate.is_empty():
        return NEUTRAL
    if mode == "minhash":
        if query_sig is None:
            raise ValueError("minhash mode requires a query signature")
        if candidate_sig is None:
            return NEUTRAL
        return Score(estimate_jaccard(query_sig, candidate_sig))
    overlap = len(query.value_counts.keys() & candidate.value_counts.keys())
    return Score(overlap / query.distinct_count)


def join_sizes(query: ColumnProfile, candidate: ColumnProfile) -> tuple[Score, Score]:
    """Left/right join row counts computed exactly on the sampled histograms.

    A row joining m matches contributes m rows, an unmatched row contributes
    itself, so the size is the base row count plus the surplus over the
    shared values.
    """
    if query.is_empty() or candidate.is_empty():
        return NEUTRAL, NEUTRAL
    qc, cc = query.value_counts, candidate.value_counts
    shared = qc.keys() & cc.keys()
    join = query.sampled_size + sum(qc[v] * (cc[v] - 1) for v in shared)
    reverse = candidate.sampled_size + sum(cc[v] * (qc[v] - 1) for v in shared)
    return Score(float(join)), Score(float(reverse))


def value_semantics_score(
    query: ColumnProfile, candidate: ColumnProfile, provider
) -> Score:
    if not (_semantics_applicable(query) and _semantics_applicable(candidate)):
        return NEUTRAL
    if query.is_empty() or candidate.is_empty():
        return NEUTRAL
    vectors = _embed(
        provider, [frequent_text(query.value_counts), frequent_text(candidate.value_counts)]
    )
    return Score(cosine(vectors[0], vectors[1]))


def disjoint_semantics_score(
    query: ColumnProfile, candidate: ColumnProfile, provider
) -> Score:
    if not (_semantics_applicable(query) and _semantics_applicable(candidate)):
        return NEUTRAL
    q_only = query.value_counts.keys() - candidate.value_counts.keys()
    c_only = candidate.value_counts.keys() - query.value_counts.keys()
    if not q_only or not c_only:
        return NEUTRAL
    vectors = _embed(
        provider,
        [
            frequent_text(query.value_counts, subset=q_only),
            frequent_text(candidate.value_counts, subset=c_only),
        ],
    )
    return Score(cosine(vectors[0], vectors[1]))


def metadata_semantics_score(
    query_sentence: str, candidate_sentence: str, provider
) -> Score:
    vectors = _embed(provider, [query_sentence, candidate_sentence])
    return Score(cosine(vectors[0], vectors[1]))


def _embed(provider, texts: list[str]):
    try:
        return provider.embed(texts)
    except ProviderUnavailableError as exc:
        raise CriterionUnavailable(str(exc)) from exc


def score_candidate(
    query: ColumnProfile,
    candidate: ColumnProfile,
    provider,
    config: EngineConfig,
    minhash_index: MinHashIndex | None = None,
) -> CriteriaVector:
    """All seven criteria for one candidate; never aborts on provider failure."""
    scorer = CandidateScorer(query, provider, config, minhash_index)
    return scorer.score([candidate])[0]


class CandidateScorer:
    """Scores many candidates against one query with batched embedding calls.

    All texts needed by the semantic criteria are collected first and embedded
    in one provider round (deduplicated), then criterion values are assembled
    per candidate. A provider failure downgrades the semantic criteria to
    neutral/inapplicable for every candidate instead of failing the search.

    ``text_cache`` / ``embed_cache`` may be shared across scorers (e.g. by a
    long-lived engine): profiles are immutable, so cached top-frequent texts
    and embedding vectors stay valid.
    """

    def __init__(
        self,
        query: ColumnProfile,
        provider,
        config: EngineConfig,
        minhash_index: MinHashIndex | None = None,
        intersection_mode: str | None = None,
        text_cache: dict[ColumnRef, str] | None = None,
        embed_cache: dict[str, object] | None = None,
    ):
        self.query = query
        self.provider = provider
        self.config = config
        self.minhash_index = minhash_index
        self.mode = intersection_mode or config.intersection_mode
        self.provider_failed = False
        self._texts = text_cache if text_cache is not None else {}
        self._vectors = embed_cache if embed_cache is not None else {}

        self.query_sig: MinHashSignature | None = None
        if self.mode == "minhash" and not query.is_empty():
            if minhash_index is None:
                raise ValueError("minhash intersection mode requires a MinHash index")
            self.query_sig = minhash_index.signature_for(query.ref) or signature(
                query.distinct_values, minhash_index.perm_seed, ref=query.ref
            )

    def score(self, candidates: list[ColumnProfile]) -> list[CriteriaVector]:
        plans = [self._plan(c) for c in candidates]
        self._embed_missing({text for plan in plans for text in plan["texts"]})
        return [self._assemble(c, plan) for c, plan in zip(candidates, plans)]

    # -- internals ---------------------------------------------------------

    def _column_text(self, profile: ColumnProfile) -> str:
        text = self._texts.get(profile.ref)
        if text is None:
            text = frequent_text(profile.value_counts)
            self._texts[profile.ref] = text
        return text

    def _plan(self, candidate: ColumnProfile) -> dict:
        """Decide which texts this pair needs embedded."""
        plan: dict = {"texts": [], "value": None, "disjoint": None}
        q, c = self.query, candidate

        q_meta = metadata_sentence(q.metadata, q.ref.column_name).text
        c_meta = metadata_sentence(c.metadata, c.ref.column_name).text
        plan["meta"] = (q_meta, c_meta)
        plan["texts"] += [q_meta, c_meta]

        both_strings = _semantics_applicable(q) and _semantics_applicable(c)
        if both_strings and not q.is_empty() and not c.is_empty():
            pair = (self._column_text(q), self._column_text(c))
            plan["value"] = pair
            plan["texts"] += list(pair)
            shared = q.value_counts.keys() & c.value_counts.keys()
            if not shared:
                # zero overlap: the difference sets are the full columns
                plan["disjoint"] = pair
            elif len(shared) < q.distinct_count and len(shared) < c.distinct_count:
                pair = (
                    frequent_text(q.value_counts, subset=q.value_counts.keys() - shared),
                    frequent_text(c.value_counts, subset=c.value_counts.keys() - shared),
                )
                plan["disjoint"] = pair
                plan["texts"] += list(pair)
        return plan

    def _embed_missing(self, texts: set[str]) -> None:
        missing = sorted(t for t in texts if t not in self._vectors)
        if not missing or self.provider_failed:
            return
        try:
            matrix = self.provider.embed(missing)
        except ProviderUnavailableError:
            self.provider_failed = True
            return
        for i, text in enumerate(missing):
            self._vectors[text] = matrix[i]

    def _cosine_of(self, pair) -> Score:
        if pair is None:
            return NEUTRAL
        if self.provider_failed or pair[0] not in self._vectors or pair[1] not in self._vectors:
            return NEUTRAL
        return Score(cosine(self._vectors[pair[0]], self._vectors[pair[1]]))

    def _assemble(self, candidate: ColumnProfile, plan: dict) -> CriteriaVector:
        cand_sig = None
        if self.mode == "minhash" and self.minhash_index is not None:
            cand_sig = self.minhash_index.signature_for(candidate.ref)
        scores = {
            "unique_values": unique_values_score(candidate),
            "intersection": intersection_score(
                self.query, candidate, self.mode, self.query_sig, cand_sig
            ),
            "value_semantics": self._cosine_of(plan["value"]),
            "disjoint_value_semantics": self._cosine_of(plan["disjoint"]),
            "metadata_semantics": self._cosine_of(plan["meta"]),
        }
        scores["join_size"], scores["reverse_join_size"] = join_sizes(self.query, candidate)
        return CriteriaVector(
            candidate=candidate.ref,
            applicability={name: s.applicable for name, s in scores.items()},
            **{name: s.value for name, s in scores.items()},
        )

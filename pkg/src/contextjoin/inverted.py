"""Posting-list inverted index over normalized cell values.

One posting list per distinct value, pointing at the columns that contain it.
Top-k overlap search over this index is both the syntactic candidate strategy
and, with k spanning the whole lake, the exact set-intersection baseline.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from . import binio
from .errors import EmptyQueryError, InvalidKError
from .ingest import ColumnProfile, ColumnRef, LakeCatalog

MAGIC = b"CJII1"


@dataclass(frozen=True)
class OverlapResult:
    candidate: ColumnRef
    overlap: int          # shared distinct normalized values
    containment: float    # overlap / query distinct count


class InvertedIndex:
    """Immutable value -> sorted column-id postings map."""

    def __init__(self, refs: list[ColumnRef], postings: dict[str, list[int]]):
        self.refs = refs
        self.ref_ids = {ref: i for i, ref in enumerate(refs)}
        self.postings = postings

    def __len__(self) -> int:
        return len(self.postings)

    def columns_for(self, value: str) -> list[ColumnRef]:
        return [self.refs[i] for i in self.postings.get(value, [])]

    def save(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            binio.write_u32(fh, len(self.refs))
            for ref in self.refs:
                binio.write_str(fh, ref.table_id)
                binio.write_str(fh, ref.column_name)
            binio.write_u64(fh, len(self.postings))
            for value in sorted(self.postings):
                binio.write_str(fh, value)
                ids = self.postings[value]
                binio.write_u32(fh, len(ids))
                for cid in ids:
                    binio.write_u32(fh, cid)

    @classmethod
    def load(cls, path: str | Path) -> "InvertedIndex":
        with open(path, "rb") as fh:
            binio.check_magic(fh, MAGIC)
            n_refs = binio.read_u32(fh)
            refs = [
                ColumnRef(binio.read_str(fh), binio.read_str(fh)) for _ in range(n_refs)
            ]
            postings: dict[str, list[int]] = {}
            for _ in range(binio.read_u64(fh)):
                value = binio.read_str(fh)
                count = binio.read_u32(fh)
                postings[value] = [binio.read_u32(fh) for _ in range(count)]
        return cls(refs, postings)


def build_inverted(catalog: LakeCatalog, row_sample: int) -> InvertedIndex:
    """Index the first ``row_sample`` sampled values of every column.

    Each (value, column) pair appears exactly once regardless of value
    multiplicity within the column.
    """
    refs = catalog.refs()
    postings: dict[str, list[int]] = {}
    for cid, ref in enumerate(refs):
        profile = catalog.profiles[ref]
        for value in dict.fromkeys(profile.sampled_values[:row_sample]):
            postings.setdefault(value, []).append(cid)
    return InvertedIndex(refs, postings)


def search_overlap(
    index: InvertedIndex, query: ColumnProfile, k: int
) -> list[OverlapResult]:
    """Top-k columns by distinct-value overlap with the query column.

    The query column itself is excluded; ties break on (table_id,
    column_name) ascending. Only columns sharing at least one value appear.
    """
    if k < 1:
        raise InvalidKError(f"k must be >= 1, got {k}")
    query_values = query.distinct_values
    if not query_values:
        raise EmptyQueryError(f"query column {query.ref} has no values")

    counts: Counter[int] = Counter()
    for value in query_values:
        for cid in index.postings.get(value, ()):
            counts[cid] += 1
    self_id = index.ref_ids.get(query.ref)
    if self_id is not None:
        counts.pop(self_id, None)

    ordered = sorted(counts.items(), key=lambda item: (-item[1], index.refs[item[0]]))
    denom = len(query_values)
    return [
        OverlapResult(candidate=index.refs[cid], overlap=n, containment=n / denom)
        for cid, n in ordered[:k]
    ]

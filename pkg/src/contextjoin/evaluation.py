"""Benchmark harness: ground truth, MRR/MAP/Recall@K, ablation reports.

Ground truth is a CSV with header
``query_table,query_column,target_table,target_column`` and one relevant pair
per row. Queries that cannot be resolved against the catalog are reported and
excluded from the means, never silently dropped.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .config import CRITERIA
from .errors import GroundTruthError, QueryNotFoundError
from .ingest import ColumnRef, LakeCatalog
from .search import ScoredCandidates, SearchEngine, SearchRequest
from .topsis import weights_from_config

GT_HEADER = ["query_table", "query_column", "target_table", "target_column"]


def reciprocal_rank(ranked: list[ColumnRef], relevant: set[ColumnRef]) -> float:
    """1/position of the first relevant item; 0 when none is present."""
    for position, ref in enumerate(ranked, start=1):
        if ref in relevant:
            return 1.0 / position
    return 0.0


def average_precision(ranked: list[ColumnRef], relevant: set[ColumnRef], k: int) -> float:
    """Precision at each relevant hit within top-k, over min(|relevant|, k)."""
    hits = 0
    total = 0.0
    for position, ref in enumerate(ranked[:k], start=1):
        if ref in relevant:
            hits += 1
            total += hits / position
    denom = min(len(relevant), k)
    return total / denom if denom else 0.0


def recall_at_k(ranked: list[ColumnRef], relevant: set[ColumnRef], k: int) -> float:
    return len(set(ranked[:k]) & relevant) / len(relevant)


@dataclass
class BenchmarkGroundTruth:
    entries: dict[ColumnRef, set[ColumnRef]]

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_csv(cls, path: str | Path) -> "BenchmarkGroundTruth":
        entries: dict[ColumnRef, set[ColumnRef]] = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise GroundTruthError("ground truth file is empty", line=1) from None
            if [h.strip() for h in header] != GT_HEADER:
                raise GroundTruthError(
                    f"expected header {','.join(GT_HEADER)}, got {','.join(header)}", line=1
                )
            for line, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 4 or any(not cell.strip() for cell in row):
                    raise GroundTruthError(f"malformed ground truth row: {row}", line=line)
                query = ColumnRef(row[0], row[1])
                entries.setdefault(query, set()).add(ColumnRef(row[2], row[3]))
        if not entries:
            raise GroundTruthError("ground truth has no rows", line=2)
        return cls(entries)

    def resolve(
        self, catalog: LakeCatalog
    ) -> tuple[dict[ColumnRef, set[ColumnRef]], list[tuple[str, str]]]:
        """Split into catalog-resolvable entries and reported problems."""
        resolved: dict[ColumnRef, set[ColumnRef]] = {}
        issues: list[tuple[str, str]] = []
        for query in sorted(self.entries):
            targets = self.entries[query]
            if catalog.get(query) is None:
                issues.append((str(query), "query not in catalog"))
                continue
            present = {t for t in targets if catalog.get(t) is not None}
            for missing in sorted(targets - present):
                issues.append((str(missing), f"target of {query} not in catalog"))
            if not present:
                issues.append((str(query), "no resolvable targets"))
                continue
            resolved[query] = present
        return resolved, issues


@dataclass
class PerQueryMetrics:
    query: ColumnRef
    reciprocal_rank: float
    average_precision: float
    recall: float


@dataclass
class MetricsReport:
    label: str                      # "full", "only:<criterion>", "drop:<criterion>"
    k: int
    mrr: float
    map: float
    recall_at_k: float
    per_query: list[PerQueryMetrics]
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "k": self.k,
            "n_queries": len(self.per_query),
            "mrr": self.mrr,
            "map": self.map,
            "recall_at_k": self.recall_at_k,
            "skipped": [{"ref": ref, "reason": reason} for ref, reason in self.skipped],
            "per_query": [
                {
                    "query_table": pq.query.table_id,
                    "query_column": pq.query.column_name,
                    "reciprocal_rank": pq.reciprocal_rank,
                    "average_precision": pq.average_precision,
                    "recall": pq.recall,
                }
                for pq in self.per_query
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))


def build_report(
    label: str,
    rankings: dict[ColumnRef, list[ColumnRef]],
    entries: dict[ColumnRef, set[ColumnRef]],
    k: int,
    skipped: list[tuple[str, str]],
) -> MetricsReport:
    per_query = [
        PerQueryMetrics(
            query=query,
            reciprocal_rank=reciprocal_rank(rankings[query], entries[query]),
            average_precision=average_precision(rankings[query], entries[query], k),
            recall=recall_at_k(rankings[query], entries[query], k),
        )
        for query in sorted(rankings)
    ]
    n = len(per_query)
    return MetricsReport(
        label=label,
        k=k,
        mrr=sum(pq.reciprocal_rank for pq in per_query) / n if n else 0.0,
        map=sum(pq.average_precision for pq in per_query) / n if n else 0.0,
        recall_at_k=sum(pq.recall for pq in per_query) / n if n else 0.0,
        per_query=per_query,
        skipped=skipped,
    )


def ablation_arms(mode: str) -> list[tuple[str, str | None, str | None]]:
    """(label, only, drop) triples for a benchmark mode."""
    if mode == "full":
        return [("full", None, None)]
    if mode == "single":
        return [(f"only:{c}", c, None) for c in CRITERIA]
    if mode == "loo":
        return [(f"drop:{c}", None, c) for c in CRITERIA]
    raise ValueError(f"unknown benchmark mode: {mode!r}")


def run_benchmark(
    gt: BenchmarkGroundTruth,
    engine: SearchEngine,
    k: int = 10,
    mode: str = "full",
    minhash_mode: bool = False,
    budget: int = 100,
    k_sweep: list[int] | None = None,
) -> list[MetricsReport]:
    """One search per query, re-ranked per ablation arm.

    Candidate identification does not depend on criterion weights, so each
    query is prepared once and only the TOPSIS weights vary across arms.
    With ``k_sweep``, one report per (arm, K) is produced from the same
    rankings.
    """
    ks = sorted(set(k_sweep)) if k_sweep else [k]
    max_k = max(ks)
    entries, issues = gt.resolve(engine.catalog)
    skipped = list(issues)

    prepared: dict[ColumnRef, ScoredCandidates] = {}
    for query in sorted(entries):
        request = SearchRequest(query=query, k=max_k, budget=budget, minhash_mode=minhash_mode)
        try:
            profile = engine.resolve_query(request)
        except QueryNotFoundError as exc:
            skipped.append((str(query), str(exc)))
            continue
        prepared[query] = engine.prepare(profile, request)

    reports = []
    for label, only, drop in ablation_arms(mode):
        weights = weights_from_config(engine.config, only=only, drop=drop)
        rankings = {
            query: [r.candidate for r in engine.rank_scored(scored, weights, max_k)]
            for query, scored in prepared.items()
        }
        for k_value in ks:
            reports.append(
                build_report(
                    label,
                    rankings,
                    {q: entries[q] for q in rankings},
                    k_value,
                    skipped,
                )
            )
    return reports


def render_table(reports: list[MetricsReport]) -> str:
    """Aligned-text table, one row per report."""
    headers = ["label", "k", "queries", "MRR", "MAP", "Recall@K"]
    rows = [
        [
            r.label,
            str(r.k),
            str(len(r.per_query)),
            f"{r.mrr:.4f}",
            f"{r.map:.4f}",
            f"{r.recall_at_k:.4f}",
        ]
        for r in reports
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) for row in rows]
    return "\n".join(lines)

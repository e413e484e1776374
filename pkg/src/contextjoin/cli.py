"""Command-line interface: ``contextjoin index | search | evaluate``.

stdout carries machine-readable output only (JSON lines, or CSV with
``--csv``); diagnostics and the aligned metrics table go to stderr. Exit
codes: 0 success, 1 engine error, 2 usage, 3 unresolvable query column,
4 malformed ground truth.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import CRITERIA, EngineConfig
from .errors import ContextJoinError, GroundTruthError, QueryNotFoundError
from .evaluation import BenchmarkGroundTruth, render_table, run_benchmark
from .ingest import ColumnRef, load_lake
from .search import (
    IndexBundle,
    SearchEngine,
    SearchRequest,
    build_indexes,
    make_provider,
    result_to_dict,
)

logger = logging.getLogger("contextjoin")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_QUERY_NOT_FOUND = 3
EXIT_BAD_GROUND_TRUTH = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contextjoin",
        description="Context-aware joinable-column search over CSV data lakes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--config", help="TOML or JSON config file")
        p.add_argument("--seed", type=int, help="deterministic seed")
        p.add_argument("--provider", choices=["local", "remote"], help="embedding provider")
        p.add_argument("--embed-url", help="remote embedding service base URL")
        p.add_argument(
            "--fallback-local",
            action="store_true",
            default=None,
            help="fall back to the local embedder if the remote service is down",
        )

    p_index = sub.add_parser("index", help="ingest a lake directory and build indexes")
    p_index.add_argument("--lake", required=True, help="directory of CSV tables")
    p_index.add_argument("--out", required=True, help="output index directory")
    p_index.add_argument("--sample-cap", type=int, help="max sampled values per column")
    p_index.add_argument("--index-row-sample", type=int, help="values per column in the inverted index")
    p_index.add_argument("--dims", type=int, help="embedding dimensionality")
    add_config_flags(p_index)
    p_index.set_defaults(func=cmd_index)

    p_search = sub.add_parser("search", help="rank joinable columns for a query column")
    p_search.add_argument("--idx", required=True, help="index directory")
    p_search.add_argument("--query-table", required=True, help="catalog table_id or ad-hoc CSV path")
    p_search.add_argument("--query-column", required=True)
    p_search.add_argument("-k", type=int, default=10)
    p_search.add_argument("--budget", type=int, default=100, help="candidates per strategy")
    p_search.add_argument("--only", choices=CRITERIA, help="rank by a single criterion")
    p_search.add_argument("--drop", choices=CRITERIA, help="leave one criterion out")
    p_search.add_argument("--minhash", action="store_true", help="MinHash-only syntactic mode (no inverted index)")
    p_search.add_argument("--explain", action="store_true", help="include per-criterion contributions")
    add_config_flags(p_search)
    p_search.set_defaults(func=cmd_search)

    p_eval = sub.add_parser("evaluate", help="run a ground-truth benchmark")
    p_eval.add_argument("--idx", required=True, help="index directory")
    p_eval.add_argument("--gt", required=True, help="ground-truth CSV")
    p_eval.add_argument("-k", type=int, default=10)
    p_eval.add_argument("--budget", type=int, default=100)
    p_eval.add_argument("--ablate", choices=["single", "loo"], help="ablation mode")
    p_eval.add_argument("--k-sweep", help="K range, e.g. 1..20")
    p_eval.add_argument("--minhash", action="store_true", help="MinHash-only syntactic mode (no inverted index)")
    p_eval.add_argument("--csv", action="store_true", help="emit per-query CSV rows")
    add_config_flags(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)
    return parser


def resolve_config(args, base: EngineConfig | None = None) -> EngineConfig:
    """flags > env > config file > defaults."""
    config = base or EngineConfig()
    if getattr(args, "config", None):
        config = EngineConfig.from_file(args.config)
    config = config.with_env()
    overrides = {}
    for flag, key in [
        ("seed", "seed"),
        ("sample_cap", "sample_cap"),
        ("index_row_sample", "index_row_sample"),
        ("dims", "dims"),
        ("provider", "provider"),
        ("embed_url", "embed_url"),
        ("fallback_local", "fallback_local"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if overrides.get("embed_url") and "provider" not in overrides:
        overrides["provider"] = "remote"
    return config.replace(**overrides) if overrides else config


def cmd_index(args) -> int:
    config = resolve_config(args)
    catalog = load_lake(args.lake, config)
    bundle = build_indexes(catalog, make_provider(config), config)
    sizes = bundle.save(args.out)
    summary = {
        "tables": len(catalog.metadata),
        "columns": len(catalog),
        "skipped_rows": sum(catalog.warnings.values()),
        "index_bytes": sizes,
    }
    print(json.dumps(summary, separators=(",", ":")))
    return EXIT_OK


def _load_engine(args) -> SearchEngine:
    bundle = IndexBundle.load(args.idx)
    config = resolve_config(args, base=bundle.catalog.config)
    return SearchEngine(bundle, make_provider(config), config)


def cmd_search(args) -> int:
    engine = _load_engine(args)
    if Path(args.query_table).exists():
        request = SearchRequest(
            query_table=args.query_table,
            query_column=args.query_column,
            k=args.k,
            budget=args.budget,
            only=args.only,
            drop=args.drop,
            minhash_mode=args.minhash,
        )
    else:
        request = SearchRequest(
            query=ColumnRef(args.query_table, args.query_column),
            k=args.k,
            budget=args.budget,
            only=args.only,
            drop=args.drop,
            minhash_mode=args.minhash,
        )
    results = engine.search(request)
    for result in results:
        print(json.dumps(result_to_dict(result, explain=args.explain), separators=(",", ":")))
    return EXIT_OK


def _parse_sweep(spec: str) -> list[int]:
    lo, _, hi = spec.partition("..")
    return list(range(int(lo), int(hi) + 1))


def cmd_evaluate(args) -> int:
    engine = _load_engine(args)
    gt = BenchmarkGroundTruth.from_csv(args.gt)
    reports = run_benchmark(
        gt,
        engine,
        k=args.k,
        mode={"single": "single", "loo": "loo"}.get(args.ablate, "full"),
        minhash_mode=args.minhash,
        budget=args.budget,
        k_sweep=_parse_sweep(args.k_sweep) if args.k_sweep else None,
    )
    if args.csv:
        print("label,k,query_table,query_column,reciprocal_rank,average_precision,recall")
        for report in reports:
            for pq in report.per_query:
                print(
                    f"{report.label},{report.k},{pq.query.table_id},{pq.query.column_name},"
                    f"{pq.reciprocal_rank},{pq.average_precision},{pq.recall}"
                )
    else:
        for report in reports:
            print(report.to_json())
    print(render_table(reports), file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QueryNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUERY_NOT_FOUND
    except GroundTruthError as exc:
        print(f"error: ground truth line {exc.line}: {exc}", file=sys.stderr)
        return EXIT_BAD_GROUND_TRUTH
    except ContextJoinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

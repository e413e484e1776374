#!/usr/bin/env python3
"""Run the planted-ground-truth benchmark with all ablation arms.

Builds the 200-table synthetic lake (50 queries, one planted target each),
then reports, in order: the full ensemble, the seven single-criterion arms,
the seven leave-one-out arms, and the MinHash variant, at K=10.
"""

import argparse
import sys
import tempfile
import time

from contextjoin.evaluation import render_table, run_benchmark
from contextjoin.search import SearchEngine, build_indexes, make_provider
from contextjoin.synth import build_planted_lake


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-k", type=int, default=10)
    parser.add_argument("--queries", type=int, default=50)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    started = time.time()
    catalog, gt = build_planted_lake(n_queries=args.queries, seed=args.seed)
    provider = make_provider(catalog.config)
    bundle = build_indexes(catalog, provider, catalog.config)
    with tempfile.TemporaryDirectory() as tmp:
        sizes = bundle.save(tmp)
    engine = SearchEngine(bundle, provider)
    print(
        f"lake: {len(catalog.metadata)} tables, {len(catalog)} columns; "
        f"inverted {sizes['inverted.cjii'] / 1e6:.1f} MB vs "
        f"minhash {sizes['minhash.cjmh'] / 1e3:.0f} KB "
        f"({sizes['minhash.cjmh'] / sizes['inverted.cjii']:.2%})",
        file=sys.stderr,
    )

    reports = run_benchmark(gt, engine, k=args.k, mode="full")
    reports += run_benchmark(gt, engine, k=args.k, mode="single")
    reports += run_benchmark(gt, engine, k=args.k, mode="loo")
    minhash = run_benchmark(gt, engine, k=args.k, mode="full", minhash_mode=True)
    minhash[0].label = "full (minhash)"
    reports += minhash

    print(render_table(reports))
    print(f"done in {time.time() - started:.1f}s", file=sys.stderr)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Index the bundled example lake and search for joins on the County column.

Shows the context-aware ordering the engine is built for: the assistance
table joins cleanly, the retailer table would multiply the query rows, and
the other state's counties match by name only.
"""

import argparse
import json
from pathlib import Path

from contextjoin import (
    ColumnRef,
    EngineConfig,
    SearchEngine,
    SearchRequest,
    build_indexes,
    load_lake,
    make_provider,
)
from contextjoin.search import result_to_dict


def main():
    repo = Path(__file__).resolve().parents[1]
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lake", type=Path, default=repo / "data" / "example_lake")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("-k", type=int, default=10)
    parser.add_argument("--minhash", action="store_true")
    args = parser.parse_args()

    config = EngineConfig(seed=args.seed)
    catalog = load_lake(args.lake, config)
    provider = make_provider(config)
    engine = SearchEngine(build_indexes(catalog, provider, config), provider)

    request = SearchRequest(
        query=ColumnRef("texas_child_population", "County"),
        k=args.k,
        minhash_mode=args.minhash,
    )
    for result in engine.search(request):
        print(json.dumps(result_to_dict(result)))


if __name__ == "__main__":
    main()

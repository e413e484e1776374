import random
from pathlib import Path

import hypothesis
import pytest

from contextjoin.config import EngineConfig
from contextjoin.ingest import ColumnRef, LakeCatalog, TableMetadata, build_profile

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile("ci")

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def example_lake_dir() -> Path:
    return REPO_ROOT / "data" / "example_lake"


@pytest.fixture(scope="session")
def example_gt_path() -> Path:
    return REPO_ROOT / "data" / "example_lake_gt.csv"


def make_catalog(
    tables: dict[str, dict[str, list[str]]],
    config: EngineConfig | None = None,
    metadata: dict[str, dict] | None = None,
) -> LakeCatalog:
    """In-memory catalog from {table_id: {column: [raw values]}}."""
    config = config or EngineConfig(seed=0)
    metadata = metadata or {}
    profiles, metas = {}, {}
    for table_id, columns in tables.items():
        meta = TableMetadata(
            table_id=table_id, column_names=list(columns), **metadata.get(table_id, {})
        )
        metas[table_id] = meta
        for name, values in columns.items():
            ref = ColumnRef(table_id, name)
            profiles[ref] = build_profile(ref, values, meta, config)
    return LakeCatalog(profiles=profiles, metadata=metas, warnings={}, config=config)


def random_lake(
    rng: random.Random,
    n_columns: int,
    universe: list[str],
    min_values: int = 1,
    max_values: int = 40,
) -> LakeCatalog:
    """Random small catalog drawing values from a shared universe."""
    tables: dict[str, dict[str, list[str]]] = {}
    for i in range(n_columns):
        size = rng.randint(min_values, max_values)
        values = [rng.choice(universe) for _ in range(size)]
        tables.setdefault(f"t{i // 3:03d}", {})[f"c{i % 3}"] = values
    return make_catalog(tables)

"""Context-aware joinable-column search for CSV data lakes."""

from .config import CRITERIA, DEFAULT_WEIGHTS, EngineConfig
from .ingest import (
    ColumnProfile,
    ColumnRef,
    LakeCatalog,
    TableMetadata,
    load_lake,
    load_table,
    normalize_value,
)
from .search import IndexBundle, SearchEngine, SearchRequest, build_indexes, make_provider

__version__ = "0.1.0"

__all__ = [
    "CRITERIA",
    "DEFAULT_WEIGHTS",
    "ColumnProfile",
    "ColumnRef",
    "EngineConfig",
    "IndexBundle",
    "LakeCatalog",
    "SearchEngine",
    "SearchRequest",
    "TableMetadata",
    "build_indexes",
    "load_lake",
    "load_table",
    "make_provider",
    "normalize_value",
    "__version__",
]

"""Lake ingestion: CSV loading, value normalization, sampling, column profiling.

A lake is a directory of UTF-8 CSV files (first row = header), each optionally
accompanied by a ``<table_id>.meta.json`` sidecar carrying table-level
metadata. Ingestion produces one :class:`ColumnProfile` per header column,
holding a seeded random sample of the column's normalized non-empty values.
"""

from __future__ import annotations

import csv
import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime
from hashlib import blake2b
from pathlib import Path

from .config import EngineConfig
from .errors import DuplicateTableError, MalformedTableError, NoTablesError

TYPE_STRING = "String"
TYPE_NUMERIC = "Numeric"
TYPE_DATE = "Date"
TYPE_EMPTY = "Empty"

# fraction of non-empty values that must parse for Numeric/Date classification
TYPE_THRESHOLD = 0.95

CATALOG_FORMAT = "CJCAT1"


@dataclass(frozen=True, order=True)
class ColumnRef:
    """Identifies one column: (file stem, verbatim header cell)."""

    table_id: str
    column_name: str

    def __str__(self) -> str:
        return f"{self.table_id}.{self.column_name}"


@dataclass
class TableMetadata:
    table_id: str
    column_names: list[str]
    table_name: str | None = None
    description: str | None = None
    tags: list[str] = field(default_factory=list)
    source: str | None = None
    column_descriptions: dict[str, str] | None = None

    def to_dict(self) -> dict:
        return {
            "table_id": self.table_id,
            "column_names": self.column_names,
            "table_name": self.table_name,
            "description": self.description,
            "tags": self.tags,
            "source": self.source,
            "column_descriptions": self.column_descriptions,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TableMetadata":
        return cls(**data)


@dataclass
class ColumnProfile:
    """Profile of one lake column over its sampled values.

    ``sampled_values`` is the multiset of normalized non-empty values that
    survived sampling, kept in sample order so that a deterministic prefix
    can feed the inverted index. ``value_counts`` and ``distinct_count`` are
    derived from it.
    """

    ref: ColumnRef
    type_class: str
    row_count: int
    sampled_values: list[str]
    metadata: TableMetadata
    value_counts: Counter = field(init=False)
    distinct_count: int = field(init=False)

    def __post_init__(self):
        self.value_counts = Counter(self.sampled_values)
        self.distinct_count = len(self.value_counts)

    @property
    def sampled_size(self) -> int:
        return len(self.sampled_values)

    @property
    def distinct_values(self) -> set[str]:
        return set(self.value_counts)

    def is_empty(self) -> bool:
        return not self.sampled_values


@dataclass
class LakeCatalog:
    """Immutable result of ingesting a lake directory."""

    profiles: dict[ColumnRef, ColumnProfile]
    metadata: dict[str, TableMetadata]
    warnings: dict[str, int]  # table_id -> count of skipped unreadable rows
    config: EngineConfig

    def refs(self) -> list[ColumnRef]:
        return sorted(self.profiles)

    def __len__(self) -> int:
        return len(self.profiles)

    def get(self, ref: ColumnRef) -> ColumnProfile | None:
        return self.profiles.get(ref)

    def to_json(self) -> str:
        tables: dict[str, dict] = {}
        for ref in self.refs():
            prof = self.profiles[ref]
            entry = tables.setdefault(
                ref.table_id,
                {
                    "table_id": ref.table_id,
                    "metadata": self.metadata[ref.table_id].to_dict(),
                    "skipped_rows": self.warnings.get(ref.table_id, 0),
                    "columns": [],
                },
            )
            entry["columns"].append(
                {
                    "name": ref.column_name,
                    "type_class": prof.type_class,
                    "row_count": prof.row_count,
                    "values": prof.sampled_values,
                }
            )
        doc = {
            "format": CATALOG_FORMAT,
            "config": self.config.to_dict(),
            "tables": [tables[tid] for tid in sorted(tables)],
        }
        return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "LakeCatalog":
        doc = json.loads(text)
        if doc.get("format") != CATALOG_FORMAT:
            raise MalformedTableError(f"unknown catalog format: {doc.get('format')!r}")
        config = EngineConfig.from_dict(doc["config"])
        profiles: dict[ColumnRef, ColumnProfile] = {}
        metadata: dict[str, TableMetadata] = {}
        warnings: dict[str, int] = {}
        for entry in doc["tables"]:
            meta = TableMetadata.from_dict(entry["metadata"])
            metadata[meta.table_id] = meta
            if entry.get("skipped_rows"):
                warnings[meta.table_id] = entry["skipped_rows"]
            for col in entry["columns"]:
                ref = ColumnRef(meta.table_id, col["name"])
                profiles[ref] = ColumnProfile(
                    ref=ref,
                    type_class=col["type_class"],
                    row_count=col["row_count"],
                    sampled_values=col["values"],
                    metadata=meta,
                )
        return cls(profiles=profiles, metadata=metadata, warnings=warnings, config=config)


def normalize_value(raw: str) -> str:
    """Trim, collapse internal whitespace runs to one space, lowercase."""
    return " ".join(raw.split()).lower()


def _parses_numeric(raw: str) -> bool:
    try:
        return math.isfinite(float(raw))
    except ValueError:
        return False


def _parses_date(raw: str) -> bool:
    s = raw.strip()
    for parser in (date.fromisoformat, datetime.fromisoformat):
        try:
            parser(s)
            return True
        except ValueError:
            pass
    try:
        datetime.strptime(s, "%m/%d/%Y")
        return True
    except ValueError:
        return False


def classify_type(values: list[str]) -> str:
    """Classify a sampled, pre-normalization value list into a type class."""
    non_empty = [v for v in values if v.strip()]
    if not non_empty:
        return TYPE_EMPTY
    n = len(non_empty)
    if sum(_parses_numeric(v) for v in non_empty) / n >= TYPE_THRESHOLD:
        return TYPE_NUMERIC
    if sum(_parses_date(v) for v in non_empty) / n >= TYPE_THRESHOLD:
        return TYPE_DATE
    return TYPE_STRING


def sample_column(values: list, cap: int, seed: int) -> list:
    """Uniform sample without replacement of at most ``cap`` items."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if len(values) <= cap:
        return list(values)
    return random.Random(seed).sample(values, cap)


def column_seed(base_seed: int, ref: ColumnRef) -> int:
    """Stable per-column sampling seed, independent of ingestion order."""
    key = f"{base_seed}\x1f{ref.table_id}\x1f{ref.column_name}".encode("utf-8")
    return int.from_bytes(blake2b(key, digest_size=8).digest(), "big")


def build_profile(
    ref: ColumnRef,
    raw_values: list[str],
    meta: TableMetadata,
    config: EngineConfig,
) -> ColumnProfile:
    """Profile one column: normalize, drop empties, sample, classify."""
    pairs = []
    for raw in raw_values:
        norm = normalize_value(raw)
        if norm:
            pairs.append((raw, norm))
    sampled = sample_column(pairs, config.sample_cap, column_seed(config.seed, ref))
    return ColumnProfile(
        ref=ref,
        type_class=classify_type([raw for raw, _ in sampled]),
        row_count=len(raw_values),
        sampled_values=[norm for _, norm in sampled],
        metadata=meta,
    )


def read_sidecar(csv_path: Path) -> dict:
    sidecar = csv_path.with_name(csv_path.stem + ".meta.json")
    if not sidecar.exists():
        return {}
    return json.loads(sidecar.read_text(encoding="utf-8"))


def load_table(
    csv_path: str | Path, config: EngineConfig
) -> tuple[list[ColumnProfile], TableMetadata, int]:
    """Load one CSV (+ optional sidecar) into profiles.

    Returns (profiles, metadata, skipped_row_count). Rows whose field count
    does not match the header are skipped and counted.
    """
    csv_path = Path(csv_path)
    table_id = csv_path.stem
    with open(csv_path, newline="", encoding="utf-8", errors="replace") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedTableError(f"{csv_path}: no header row") from None
        if not header or all(not h.strip() for h in header):
            raise MalformedTableError(f"{csv_path}: empty header row")
        if len(set(header)) != len(header):
            raise MalformedTableError(f"{csv_path}: duplicate column names in header")
        columns: list[list[str]] = [[] for _ in header]
        skipped = 0
        for row in reader:
            if len(row) != len(header):
                skipped += 1
                continue
            for values, cell in zip(columns, row):
                values.append(cell)

    side = read_sidecar(csv_path)
    meta = TableMetadata(
        table_id=table_id,
        column_names=list(header),
        table_name=side.get("table_name"),
        description=side.get("description"),
        tags=list(side.get("tags", [])),
        source=side.get("source"),
        column_descriptions=side.get("column_descriptions"),
    )
    profiles = [
        build_profile(ColumnRef(table_id, name), values, meta, config)
        for name, values in zip(header, columns)
    ]
    return profiles, meta, skipped


def load_lake(dir_path: str | Path, config: EngineConfig) -> LakeCatalog:
    """Ingest every ``*.csv`` under ``dir_path`` (recursive) into a catalog."""
    dir_path = Path(dir_path)
    csv_files = sorted(dir_path.rglob("*.csv"))
    if not csv_files:
        raise NoTablesError(f"no CSV files under {dir_path}")

    seen: dict[str, Path] = {}
    for path in csv_files:
        if path.stem in seen:
            raise DuplicateTableError(
                f"table_id {path.stem!r} from both {seen[path.stem]} and {path}"
            )
        seen[path.stem] = path

    profiles: dict[ColumnRef, ColumnProfile] = {}
    metadata: dict[str, TableMetadata] = {}
    warnings: dict[str, int] = {}
    for path in csv_files:
        table_profiles, meta, skipped = load_table(path, config)
        metadata[meta.table_id] = meta
        if skipped:
            warnings[meta.table_id] = skipped
        for prof in table_profiles:
            profiles[prof.ref] = prof
    return LakeCatalog(profiles=profiles, metadata=metadata, warnings=warnings, config=config)

"""Synthetic lakes for experiments and acceptance checks.

Two generators live here:

* ``write_example_lake`` — a four-table county lake (child population /
  assistance / tobacco retailers / another state's counties) in which the
  assistance table is the one context-appropriate join partner: the retailer
  table inflates the join, the other state's table matches names but not
  places.
* ``build_planted_lake`` — a 200-table lake with known ground truth. Each of
  50 query tables gets one planted join target (high overlap, matching
  context), one syntactic distractor (higher overlap but duplicated values
  and alien metadata), and one semantic distractor (matching context, zero
  overlap), so every criterion has a confuser and only the ensemble sees the
  full picture.
"""

from __future__ import annotations

import json
import random
from hashlib import blake2b
from pathlib import Path

from .config import EngineConfig
from .evaluation import BenchmarkGroundTruth
from .ingest import ColumnRef, LakeCatalog, TableMetadata, build_profile

TEXAS_COUNTIES = [
    "Anderson", "Bexar", "Bowie", "Brazoria", "Cameron", "Collin",
    "Dallas", "Denton", "El Paso", "Fort Bend", "Franklin", "Grayson",
    "Harris", "Hidalgo", "Jackson", "Jefferson", "Johnson", "Madison",
    "Montgomery", "Polk", "Smith", "Tarrant", "Travis", "Williamson",
]

MISSOURI_COUNTIES = [
    "Adair", "Barry", "Boone", "Callaway", "Clay", "Cole",
    "Dallas", "Franklin", "Greene", "Henry", "Jackson", "Jasper",
    "Jefferson", "Johnson", "Lafayette", "Madison", "Miller", "Montgomery",
    "Newton", "Pettis", "Phelps", "Platte", "Polk", "Webster",
]

REGIONS = ["North", "East", "Gulf Coast", "Central", "West"]


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)] + [",".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_meta(path: Path, **fields) -> None:
    path.write_text(json.dumps(fields, indent=2) + "\n", encoding="utf-8")


def write_example_lake(dir_path: str | Path) -> Path:
    """Write the bundled four-table example lake; returns the directory."""
    out = Path(dir_path)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240601)

    rows = []
    for i, county in enumerate(TEXAS_COUNTIES):
        child = rng.randrange(5_000, 900_000)
        total = child * rng.randrange(3, 5)
        rows.append([county, REGIONS[i % len(REGIONS)], str(child), str(total)])
    _write_csv(
        out / "texas_child_population.csv",
        ["County", "Region", "Child Population", "Total Population"],
        rows,
    )
    _write_meta(
        out / "texas_child_population.meta.json",
        table_name="Child Population by County",
        description="Estimated child population and total population for each county",
        source="https://data.texas.gov/dataset/child-population-by-county",
        tags=["texas", "children", "population", "demographics"],
    )

    # the assistance table: lowercase county names (the fuzzy-join wrinkle),
    # high overlap, one row per county, metadata that names the state only
    # through the source URL
    assisted = [c for c in TEXAS_COUNTIES if c not in ("Smith", "Tarrant", "Williamson")]
    rows = []
    for county in assisted:
        receiving = rng.randrange(500, 60_000)
        rows.append([county.lower(), str(receiving), f"{rng.randrange(2, 30)}.{rng.randrange(10)}"])
    _write_csv(
        out / "child_assistance_recipients.csv",
        ["County", "Children Receiving Assistance", "Percent of Child Population"],
        rows,
    )
    _write_meta(
        out / "child_assistance_recipients.meta.json",
        table_name="Children Receiving Assistance",
        description="Monthly count of children receiving financial assistance by county",
        source="https://data.texas.gov/dataset/children-receiving-assistance",
        tags=["children", "assistance", "health"],
    )

    # the retailer table: counties repeat once per license, so a join on
    # County multiplies the query table
    licensed = [
        c for c in TEXAS_COUNTIES
        if c not in ("Anderson", "Bowie", "Franklin", "Grayson", "Polk", "Smith")
    ]
    rows = []
    for county in licensed:
        for n in range(1, 10):
            rows.append(
                [
                    county,
                    f"{county} Smoke Shop #{n}",
                    f"{rng.randrange(100, 9999)} Main St",
                    f"{county} City",
                ]
            )
    _write_csv(
        out / "texas_tobacco_retailers.csv",
        ["County", "Retailer Name", "Address", "City"],
        rows,
    )
    _write_meta(
        out / "texas_tobacco_retailers.meta.json",
        table_name="Active Tobacco Retailer Licenses",
        description="Active tobacco retailer license holders",
        source="https://data.texas.gov/dataset/tobacco-retailer-licenses",
        tags=["texas", "tobacco", "retail", "licenses"],
    )

    # same column name, many shared county names, different state
    rows = [
        [county, str(rng.randrange(2_000, 200_000))] for county in MISSOURI_COUNTIES
    ]
    _write_csv(
        out / "missouri_child_population.csv", ["County", "Child Population"], rows
    )
    _write_meta(
        out / "missouri_child_population.meta.json",
        table_name="Child Population by County",
        description="Estimated child population for each Missouri county",
        source="https://data.mo.gov/dataset/child-population-by-county",
        tags=["missouri", "children", "population", "demographics"],
    )
    return out


def write_example_ground_truth(path: str | Path) -> Path:
    path = Path(path)
    path.write_text(
        "query_table,query_column,target_table,target_column\n"
        "texas_child_population,County,child_assistance_recipients,County\n",
        encoding="utf-8",
    )
    return path


# --- planted benchmark ------------------------------------------------------

DOMAINS = [
    "harbor", "orchid", "granite", "meadow", "falcon",
    "cobalt", "juniper", "ember", "lagoon", "prairie",
]

KEY_COLUMN = "entity_id"


def _family_rng(seed: int, index: int, role: str) -> random.Random:
    digest = blake2b(f"{seed}\x1f{index}\x1f{role}".encode(), digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _values(rng: random.Random, domain: str, n: int) -> list[str]:
    return [f"{domain} {rng.getrandbits(112):028x}" for _ in range(n)]


def _table(
    profiles: dict,
    metadata: dict,
    table_id: str,
    key_values: list[str],
    attr_name: str,
    attr_values: list[str],
    meta_kwargs: dict,
    config: EngineConfig,
) -> None:
    meta = TableMetadata(
        table_id=table_id, column_names=[KEY_COLUMN, attr_name], **meta_kwargs
    )
    metadata[table_id] = meta
    for name, values in ((KEY_COLUMN, key_values), (attr_name, attr_values)):
        ref = ColumnRef(table_id, name)
        profiles[ref] = build_profile(ref, values, meta, config)


def build_planted_lake(
    config: EngineConfig | None = None,
    n_queries: int = 50,
    values_per_column: int = 2600,
    target_overlap: float = 0.75,
    distractor_overlap: float = 0.78,
    duplication: int = 6,
    seed: int = 7,
) -> tuple[LakeCatalog, BenchmarkGroundTruth]:
    """200-table lake (4 per query) with one planted target per query."""
    config = config or EngineConfig(seed=seed)
    profiles: dict[ColumnRef, object] = {}
    metadata: dict[str, TableMetadata] = {}
    truth: dict[ColumnRef, set[ColumnRef]] = {}

    for i in range(n_queries):
        domain = DOMAINS[i % len(DOMAINS)]
        wrong = DOMAINS[(i + 3) % len(DOMAINS)]
        rng = _family_rng(seed, i, "family")
        query_values = _values(rng, domain, values_per_column)

        query_id = f"survey_{domain}_{i:03d}"
        _table(
            profiles, metadata, query_id, query_values,
            "measurement", _values(rng, "m", values_per_column),
            dict(
                table_name=f"{domain} field survey {i}",
                description=f"observations of {domain} sites collected by the annual {domain} survey",
                tags=[domain, "survey", "observations"],
                source=f"https://data.example.org/{domain}/survey-{i}",
            ),
            config,
        )

        target_id = f"registry_{domain}_{i:03d}"
        shared = rng.sample(query_values, int(target_overlap * values_per_column))
        target_values = shared + _values(rng, domain, values_per_column - len(shared))
        _table(
            profiles, metadata, target_id, target_values,
            "inspection", _values(rng, "n", values_per_column),
            dict(
                table_name=f"{domain} site registry",
                description=f"registry of {domain} sites surveyed by the annual {domain} survey",
                tags=[domain, "registry", "survey", "inspections"],
                source=f"https://data.example.org/{domain}/registry-{i}",
            ),
            config,
        )
        truth[ColumnRef(query_id, KEY_COLUMN)] = {ColumnRef(target_id, KEY_COLUMN)}

        # syntactic distractor: even more shared values, but each repeated
        # (join inflation, low uniqueness) and metadata from another domain
        ledger_id = f"ledger_{wrong}_{i:03d}"
        shared = rng.sample(query_values, int(distractor_overlap * values_per_column))
        distinct = shared + _values(rng, wrong, values_per_column - len(shared))
        _table(
            profiles, metadata, ledger_id, distinct * duplication,
            "amount", _values(rng, "p", values_per_column) * duplication,
            dict(
                table_name=f"{wrong} billing ledger {i}",
                description=f"monthly billing ledger of {wrong} accounts and invoices",
                tags=[wrong, "billing", "ledger"],
                source=f"https://data.example.org/{wrong}/ledger-{i}",
            ),
            config,
        )

        # semantic distractor: right context, zero value overlap
        atlas_id = f"atlas_{domain}_{i:03d}"
        _table(
            profiles, metadata, atlas_id, _values(rng, domain, values_per_column),
            "region", _values(rng, "r", values_per_column),
            dict(
                table_name=f"{domain} regional atlas {i}",
                description=f"atlas of {domain} regions and survey sites",
                tags=[domain, "atlas", "regions", "survey"],
                source=f"https://data.example.org/{domain}/atlas-{i}",
            ),
            config,
        )

    catalog = LakeCatalog(profiles=profiles, metadata=metadata, warnings={}, config=config)
    return catalog, BenchmarkGroundTruth(entries=truth)

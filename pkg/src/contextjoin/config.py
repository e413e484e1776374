"""Engine configuration: dataclass, file loading (TOML/JSON), env overrides.

Precedence (lowest to highest): built-in defaults, config file, environment
variables (``CONTEXTJOIN_*``), command-line flags.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - py310 path
    import tomli as tomllib

from .errors import ConfigError

# Criterion identifiers, in canonical order. Weight vectors, decision-matrix
# columns, and report fields all follow this order.
CRITERIA: tuple[str, ...] = (
    "unique_values",
    "intersection",
    "join_size",
    "reverse_join_size",
    "value_semantics",
    "disjoint_value_semantics",
    "metadata_semantics",
)

DEFAULT_WEIGHTS: dict[str, float] = {
    "unique_values": 0.2,
    "intersection": 0.5,
    "join_size": 0.2,
    "reverse_join_size": 0.2,
    "value_semantics": 0.2,
    "disjoint_value_semantics": 0.2,
    "metadata_semantics": 0.2,
}


@dataclass
class EngineConfig:
    """All knobs for ingestion, indexing, and search."""

    seed: int = 0
    sample_cap: int = 1_000_000        # random value sample per column
    index_row_sample: int = 10_000     # values per column fed to the inverted index
    dims: int = 384                    # embedding dimensionality
    intersection_mode: str = "exact"   # "exact" | "minhash"
    budget: int = 100                  # candidates per identification strategy
    k: int = 10
    weights: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    six_criteria: bool = False         # split the joint 0.2 across join/reverse-join
    provider: str = "local"            # "local" | "remote"
    embed_url: str | None = None
    embed_timeout: float = 30.0
    fallback_local: bool = False       # permit local fallback when remote is down

    def __post_init__(self):
        if self.sample_cap < 1 or self.index_row_sample < 1:
            raise ConfigError("sample caps must be >= 1")
        if self.intersection_mode not in ("exact", "minhash"):
            raise ConfigError(f"unknown intersection_mode: {self.intersection_mode!r}")
        unknown = set(self.weights) - set(CRITERIA)
        if unknown:
            raise ConfigError(f"unknown criteria in weights: {sorted(unknown)}")
        for name, w in self.weights.items():
            if w < 0:
                raise ConfigError(f"negative weight for {name}: {w}")

    def replace(self, **kwargs) -> "EngineConfig":
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "weights" in data:
            merged = dict(DEFAULT_WEIGHTS)
            merged.update(data["weights"])
            data = {**data, "weights": merged}
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "EngineConfig":
        path = Path(path)
        raw = path.read_bytes()
        if path.suffix.lower() == ".json":
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode("utf-8"))
        return cls.from_dict(data)

    def with_env(self, env: dict[str, str] | None = None) -> "EngineConfig":
        """Apply CONTEXTJOIN_* environment overrides."""
        env = os.environ if env is None else env
        cfg = self
        if env.get("CONTEXTJOIN_SEED"):
            cfg = cfg.replace(seed=int(env["CONTEXTJOIN_SEED"]))
        if env.get("CONTEXTJOIN_EMBED_URL"):
            cfg = cfg.replace(embed_url=env["CONTEXTJOIN_EMBED_URL"], provider="remote")
        return cfg

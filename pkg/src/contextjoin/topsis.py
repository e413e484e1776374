"""TOPSIS multi-criteria ranking (classical Hwang-Yoon formulation).

Five steps: vector-normalize each criterion column, weight it, locate the
positive/negative ideal points (per-column best/worst respecting the
benefit/cost direction), measure Euclidean distances to both, and rank by the
closeness coefficient d-/(d+ + d-). A candidate identical to both ideals
(single row, or all rows equal) gets closeness 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import CRITERIA, EngineConfig
from .criteria import COST, DIRECTIONS, CriteriaVector
from .errors import ConfigError, EmptyMatrixError, InvalidScoreError
from .ingest import ColumnRef


@dataclass
class DecisionMatrix:
    """Candidates x criteria, with per-column direction and weight."""

    refs: list[ColumnRef]
    values: np.ndarray                 # shape (n, m)
    directions: tuple[str, ...]        # per column: "benefit" | "cost"
    weights: np.ndarray                # shape (m,), non-negative
    criteria: tuple[str, ...] = ()     # column names (for explain output)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if len(self.refs) == 0:
            raise EmptyMatrixError("decision matrix has no candidates")
        n, m = self.values.shape
        if n != len(self.refs) or m != len(self.directions) or m != len(self.weights):
            raise ValueError("matrix/direction/weight shape mismatch")
        if not np.all(np.isfinite(self.values)):
            raise InvalidScoreError("decision matrix contains NaN or infinite entries")
        if np.any(self.weights < 0):
            raise ConfigError("weights must be non-negative")
        if not np.any(self.weights > 0):
            raise ConfigError("at least one weight must be positive")
        if not self.criteria:
            self.criteria = tuple(f"c{i}" for i in range(m))


@dataclass
class RankedResult:
    candidate: ColumnRef
    closeness: float
    rank: int
    per_criterion: CriteriaVector | None = None
    sources: set[str] = field(default_factory=set)
    contributions: dict[str, float] = field(default_factory=dict)


def rank(matrix: DecisionMatrix) -> list[RankedResult]:
    """Rank candidates by TOPSIS closeness, descending; ties lexicographic."""
    x = matrix.values
    norms = np.sqrt((x * x).sum(axis=0))
    r = np.divide(x, norms, out=np.zeros_like(x), where=norms > 0)
    v = r * matrix.weights

    is_cost = np.array([d == COST for d in matrix.directions])
    col_max, col_min = v.max(axis=0), v.min(axis=0)
    ideal_pos = np.where(is_cost, col_min, col_max)
    ideal_neg = np.where(is_cost, col_max, col_min)

    d_pos = np.sqrt(((v - ideal_pos) ** 2).sum(axis=1))
    d_neg = np.sqrt(((v - ideal_neg) ** 2).sum(axis=1))
    total = d_pos + d_neg
    closeness = np.divide(d_neg, total, out=np.ones_like(total), where=total > 0)

    order = sorted(range(len(matrix.refs)), key=lambda i: (-closeness[i], matrix.refs[i]))
    return [
        RankedResult(
            candidate=matrix.refs[i],
            closeness=float(closeness[i]),
            rank=position,
            contributions={name: float(v[i, j]) for j, name in enumerate(matrix.criteria)},
        )
        for position, i in enumerate(order, start=1)
    ]


def weights_from_config(
    config: EngineConfig, only: str | None = None, drop: str | None = None
) -> np.ndarray:
    """Weight vector in canonical criterion order.

    Defaults come from the config (0.5 intersection, 0.2 elsewhere). A
    single-criterion ablation (``only``) sets one weight to 1 and the rest to
    0; leave-one-out (``drop``) zeroes one weight. ``six_criteria`` halves
    the two join-size weights so the pair jointly carries one criterion's
    weight.
    """
    if only and drop:
        raise ConfigError("only and drop are mutually exclusive")
    for name in (only, drop):
        if name is not None and name not in CRITERIA:
            raise ConfigError(f"unknown criterion: {name!r}")
    if only:
        return np.array([1.0 if c == only else 0.0 for c in CRITERIA])
    weights = np.array([config.weights[c] for c in CRITERIA], dtype=np.float64)
    if config.six_criteria:
        for name in ("join_size", "reverse_join_size"):
            weights[CRITERIA.index(name)] /= 2.0
    if drop:
        weights[CRITERIA.index(drop)] = 0.0
    if not np.any(weights > 0):
        raise ConfigError("all weights are zero")
    return weights


def matrix_from_criteria(
    vectors: list[CriteriaVector], weights: np.ndarray
) -> DecisionMatrix:
    """Assemble the 7-column decision matrix from scored candidates.

    Inapplicable benefit entries stay at their neutral 0; inapplicable cost
    entries (join sizes of empty columns) are imputed pessimistically as the
    column maximum so missing data is never rewarded.
    """
    if not vectors:
        raise EmptyMatrixError("no scored candidates")
    values = np.array([vec.as_row() for vec in vectors], dtype=np.float64)
    for j, name in enumerate(CRITERIA):
        if DIRECTIONS[name] != COST:
            continue
        applicable = np.array([vec.applicability[name] for vec in vectors])
        if applicable.all():
            continue
        worst = values[applicable, j].max() if applicable.any() else 0.0
        values[~applicable, j] = worst
    return DecisionMatrix(
        refs=[vec.candidate for vec in vectors],
        values=values,
        directions=tuple(DIRECTIONS[name] for name in CRITERIA),
        weights=weights,
        criteria=CRITERIA,
    )

"""Exception hierarchy for the contextjoin engine."""


class ContextJoinError(Exception):
    """Base class for all engine errors."""


# --- ingest ---------------------------------------------------------------

class NoTablesError(ContextJoinError):
    """Lake directory contains no CSV files."""


class DuplicateTableError(ContextJoinError):
    """Two CSV files resolve to the same table_id."""


class MalformedTableError(ContextJoinError):
    """CSV file has no header row."""


# --- indexes --------------------------------------------------------------

class EmptyQueryError(ContextJoinError):
    """Query column has zero distinct values."""


class EmptySetError(ContextJoinError):
    """MinHash signature requested for an empty value set."""


class IncompatibleSignatureError(ContextJoinError):
    """MinHash signatures built with different permutation seeds."""


class InvalidKError(ContextJoinError):
    """k < 1 passed to a top-k search."""


class IndexFormatError(ContextJoinError):
    """Persisted index file is corrupt or has an unknown header."""


# --- embedding ------------------------------------------------------------

class UnknownColumnError(ContextJoinError):
    """Column name not present in the table metadata."""


class EmptyColumnError(ContextJoinError):
    """Value sentence requested for a column with no values."""


class ProviderUnavailableError(ContextJoinError):
    """Remote embedding provider unreachable or misbehaving."""


class DimensionError(ContextJoinError):
    """Embedding dimensionality does not match the index."""


class EmptyIndexError(ContextJoinError):
    """KNN search against an embedding table with no rows."""


class CriterionUnavailable(ContextJoinError):
    """A criterion could not be computed; caller substitutes neutral 0."""


# --- ranking --------------------------------------------------------------

class EmptyMatrixError(ContextJoinError):
    """TOPSIS invoked with zero candidates."""


class InvalidScoreError(ContextJoinError):
    """Decision matrix contains NaN or infinite entries."""


class ConfigError(ContextJoinError):
    """Invalid configuration value (e.g. negative weight)."""


# --- search / eval --------------------------------------------------------

class QueryNotFoundError(ContextJoinError):
    """Query column cannot be resolved against the catalog."""


class BuildError(ContextJoinError):
    """Index build failed (e.g. provider unavailable, no fallback allowed)."""


class GroundTruthError(ContextJoinError):
    """Malformed ground-truth file; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.line = line

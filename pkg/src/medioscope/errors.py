"""Exception hierarchy shared across the toolkit.

DataError subclasses map to CLI exit code 2, everything unexpected to 3.
"""


class MedioscopeError(Exception):
    """Base class for all toolkit errors."""


class DataError(MedioscopeError):
    """Bad or unusable input data (corpus, gazetteer, store, config paths)."""


class InputError(DataError):
    """Unreadable or structurally invalid input source."""


class CanonicalizationError(DataError):
    """URL cannot be parsed into a canonical form."""


class TrainingError(DataError):
    """Model training preconditions violated (empty or single-class corpus)."""


class GazetteerError(DataError):
    """Gazetteer source unreadable or empty."""


class QueryError(DataError):
    """Malformed store query (bad date range, unknown facet field)."""


class StoreError(DataError):
    """Store corruption or framing violation detected."""


class ConfigError(DataError):
    """Pipeline configuration invalid or referencing missing paths."""

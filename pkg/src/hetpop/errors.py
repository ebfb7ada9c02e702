"""Exception types shared across the package."""


class HetpopError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HetpopError, ValueError):
    """A parameter lies outside its admissible range."""


class DataError(HetpopError):
    """Input data cannot be used: unreadable, wrong shape, non-numeric."""


class DegenerateDataError(DataError):
    """Data is numerically degenerate, e.g. a constant column or |r| at 1."""

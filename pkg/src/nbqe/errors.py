class DataError(ValueError):
    """Input data violates a file format or domain constraint."""


class UsageError(ValueError):
    """The caller passed inconsistent arguments (e.g. mismatched lengths)."""

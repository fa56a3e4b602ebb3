"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a configured desk-scale cap."""


class CsvFormatError(ValueError):
    """A point-set CSV file could not be parsed; message carries the line number."""

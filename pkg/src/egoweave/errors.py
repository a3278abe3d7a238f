"""Exception types raised across the pipeline."""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(PipelineError):
    """A column-role mapping is missing or points at a nonexistent column."""


class RowError(PipelineError):
    """A single input row is malformed; carries the 1-based data row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class ConfigError(PipelineError):
    """Chart configuration is inconsistent with itself or with the data."""


class DataError(PipelineError):
    """Per-entity data required at render time is missing."""


class StyleError(PipelineError):
    """A style scale does not cover an observed category."""


class LayoutError(PipelineError):
    """The layout pipeline received inputs it cannot lay out."""


class InstanceTooLargeError(PipelineError):
    """An exhaustive search would exceed its configured bounds."""

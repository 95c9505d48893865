"""Exception types shared across the package.

The service layer maps these onto HTTP statuses: ConfigError means the
caller asked for something invalid (usage), everything else means the
data or stored artifacts were bad.
"""


class SummarizerError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SummarizerError):
    """Source text could not be parsed; carries the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class CorpusError(SummarizerError):
    """Corpus construction failed (empty corpus, bad instance file, ...)."""


class ConfigError(SummarizerError):
    """A configuration value is out of its legal range."""


class ShapeError(SummarizerError):
    """Operands of a numeric primitive have incompatible shapes."""


class CheckpointError(SummarizerError):
    """A persisted model could not be loaded back."""


class TrainingError(SummarizerError):
    """Training aborted (non-finite loss, empty training set, ...)."""


class DecodeError(SummarizerError):
    """Decoding produced or received an identifier outside the extended vocabulary."""


class MetricError(SummarizerError):
    """Evaluation inputs are malformed (length mismatch, empty reference)."""

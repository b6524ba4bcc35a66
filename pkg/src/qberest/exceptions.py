class QberestError(Exception):
    """Base class for package-specific failures."""


class AlistParseError(QberestError):
    """Malformed alist file. `line` holds the 1-based offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class ConstructionError(QberestError):
    """A parity-check matrix cannot be built as requested."""


class EstimationError(QberestError):
    """The syndrome likelihood admits no valid QBER estimate."""


class TraceExhausted(QberestError):
    """A replayed QBER trace has fewer entries than requested."""

"""Exception types raised across the toolkit.

Every error that a parser or metric can raise lives here so that callers
(and the CLI) can catch one base class and still report precise causes.
"""


class PunctEvalError(Exception):
    """Base class for all toolkit errors."""


class EmptyInput(PunctEvalError):
    """No parseable content found (e.g. a transcript without turn labels)."""


class EncodingError(PunctEvalError):
    """Input bytes are not valid UTF-8."""


class SchemaError(PunctEvalError):
    """A JSONL record is malformed; message names the line and field."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message if line_no is None else f"line {line_no}: {message}")
        self.line_no = line_no


class TimeOrderError(PunctEvalError):
    """A record's end time precedes its start time."""


class DimensionMismatch(PunctEvalError):
    """A vector's dimension differs from the table's; message cites the id."""


class DuplicateId(PunctEvalError):
    """Two records in one vector table share an id."""


class RangeError(PunctEvalError):
    """A number lies outside the supported spelling range."""


class InsufficientClasses(PunctEvalError):
    """Macro averaging needs at least two class scores."""


class EmptyReference(PunctEvalError):
    """Error-rate computation found no reference units."""


class ZeroVector(PunctEvalError):
    """Cosine similarity is undefined for a zero vector."""


class ZeroTotal(PunctEvalError):
    """A masked-token tally has no masked tokens at all."""


class EmptyDocument(PunctEvalError):
    """Masking-task generation received a document without tokens."""


class UnbalancedDelimiterWarning(UserWarning):
    """An unmatched '(' or '[' was left verbatim during annotation stripping."""

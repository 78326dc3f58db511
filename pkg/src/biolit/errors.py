"""Exception taxonomy shared across the package.

Every error the HTTP layer can surface carries a stable machine-readable
code (see :mod:`biolit.service`); internal callers catch the classes.
"""


class BiolitError(Exception):
    """Base class for all package errors."""


class MarkupError(BiolitError):
    """Input document markup is malformed (bad XML/JSON structure)."""


class SchemaError(BiolitError):
    """Document or relation violates a structural requirement."""


class OffsetError(BiolitError):
    """An annotation span disagrees with the document text."""


class UnsupportedDocument(BiolitError):
    """Document cannot be represented losslessly in the target format."""


class LexiconError(BiolitError):
    """Lexicon file is malformed or internally ambiguous."""


class DuplicatePmid(BiolitError):
    """Two corpus documents share a PMID."""


class BadKey(BiolitError):
    """Malformed or unusable semantic key in a relation query."""


class VersionMismatch(BiolitError):
    """Snapshot file was written by an incompatible format version."""


class ChecksumMismatch(BiolitError):
    """Snapshot file is corrupt or truncated."""


class QueryParseError(BiolitError):
    """Query text could not be parsed.

    ``position`` is the 0-based character offset of the failure.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EmptyQuery(QueryParseError):
    """Query was empty after trimming."""

    def __init__(self):
        super().__init__("empty query", 0)


class BadPage(BiolitError):
    """Pagination parameters out of range."""


class LlmTransportError(BiolitError):
    """The chat-completion endpoint could not be reached or answered."""


class ProtocolError(BiolitError):
    """The model produced a malformed tool request."""


class BudgetExhausted(BiolitError):
    """Tool-call budget ran out before the model produced a final answer.

    Carries the partial transcript gathered so far.
    """

    def __init__(self, message: str, transcript):
        super().__init__(message)
        self.transcript = transcript


class ClaimParseError(BiolitError):
    """Agent answer text did not contain a parseable claims block."""

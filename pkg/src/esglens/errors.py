"""Exception taxonomy shared by all esglens modules.

Every error carries a stable ``code`` string so the HTTP service and CLI can
map failures to structured error bodies and exit codes without string
matching on messages.
"""

from __future__ import annotations


class EsgLensError(Exception):
    """Base class for all esglens errors."""

    code = "INTERNAL"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.context = context


# --- corpus ---------------------------------------------------------------

class EmptyDocumentError(EsgLensError):
    code = "EMPTY_DOCUMENT"


class DuplicatePageError(EsgLensError):
    code = "DUPLICATE_PAGE"


# --- embed ----------------------------------------------------------------

class EmptyTextError(EsgLensError):
    code = "EMPTY_TEXT"


class DimensionMismatchError(EsgLensError):
    code = "DIMENSION_MISMATCH"


class ProviderUnavailableError(EsgLensError):
    code = "PROVIDER_UNAVAILABLE"


# --- index ----------------------------------------------------------------

class DuplicateKeyError(EsgLensError):
    code = "DUPLICATE_KEY"


class ProviderMismatchError(EsgLensError):
    code = "PROVIDER_MISMATCH"


class EmptyIndexError(EsgLensError):
    code = "EMPTY_INDEX"


class CorruptIndexFileError(EsgLensError):
    code = "CORRUPT_INDEX_FILE"


class IoFailureError(EsgLensError):
    code = "IO_FAILURE"


# --- extract ---------------------------------------------------------------

class BudgetExceededError(EsgLensError):
    code = "BUDGET_EXCEEDED"


class ParseFailureError(EsgLensError):
    """Unrecoverable model output; ``raw`` keeps the original text."""

    code = "PARSE_FAILURE"

    def __init__(self, message: str = "", raw: str = "", **context):
        super().__init__(message, **context)
        self.raw = raw


class SchemaViolationError(EsgLensError):
    code = "SCHEMA_VIOLATION"


class EmptyRetrievalError(EsgLensError):
    code = "EMPTY_RETRIEVAL"


class UnknownQuestionError(EsgLensError):
    code = "UNKNOWN_QUESTION"


# --- trace ----------------------------------------------------------------

class MissingPageError(EsgLensError):
    code = "MISSING_PAGE"


# --- score ----------------------------------------------------------------

class ShapeMismatchError(EsgLensError):
    code = "SHAPE_MISMATCH"


class NonFiniteLossError(EsgLensError):
    code = "NON_FINITE_LOSS"


class ZeroVarianceError(EsgLensError):
    code = "ZERO_VARIANCE"


class LengthMismatchError(EsgLensError):
    code = "LENGTH_MISMATCH"


class UnknownCategoryError(EsgLensError):
    code = "UNKNOWN_CATEGORY"


class EmptyPeerGroupError(EsgLensError):
    code = "EMPTY_PEER_GROUP"


class EmptyClaimsError(EsgLensError):
    code = "EMPTY_CLAIMS"


# --- app ------------------------------------------------------------------

class ConfigError(EsgLensError):
    code = "CONFIG_ERROR"


class DataError(EsgLensError):
    code = "DATA_ERROR"


class ReportNotFoundError(DataError):
    code = "REPORT_NOT_FOUND"


class ReportNotIndexedError(DataError):
    code = "REPORT_NOT_INDEXED"

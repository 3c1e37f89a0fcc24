"""Exception types shared across the package."""

from __future__ import annotations


class ExcessVocabError(Exception):
    """Base class for all errors raised by this package."""


class MalformedXmlError(ExcessVocabError):
    """Raised when an XML input cannot be parsed.

    ``byte_offset`` is an upper bound on the position of the offending
    construct (bytes consumed by the parser when it failed).
    """

    def __init__(self, message: str, byte_offset: int | None = None,
                 line: int | None = None, column: int | None = None):
        self.byte_offset = byte_offset
        self.line = line
        self.column = column
        where = []
        if byte_offset is not None:
            where.append(f"byte offset <= {byte_offset}")
        if line is not None:
            where.append(f"line {line}, column {column}")
        suffix = f" ({'; '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class JsonlError(ExcessVocabError):
    """Raised on a malformed JSONL line in strict mode."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class RuleFileError(ExcessVocabError):
    """Raised when a cleaning-rule file cannot be loaded."""

    def __init__(self, rule_id: str | None, position: int, message: str):
        self.rule_id = rule_id
        self.position = position
        label = f"rule {rule_id}" if rule_id else f"line {position}"
        super().__init__(f"{label}: {message}")


class WordUnknownError(ExcessVocabError):
    """Raised when a word is absent from an occurrence matrix."""

    code = "WORD_UNKNOWN"

    def __init__(self, word: str):
        self.word = word
        super().__init__(f"WORD_UNKNOWN: {word!r} is not in the matrix vocabulary")


class MissingYearsError(ExcessVocabError):
    """Raised when a matrix does not cover the years an analysis needs."""

    def __init__(self, needed, available):
        self.needed = tuple(needed)
        self.available = tuple(available)
        super().__init__(
            f"matrix covers years {list(self.available)} but the analysis needs {list(self.needed)}"
        )


class MatrixFormatError(ExcessVocabError):
    """Raised when a matrix CSV cannot be read. ``code`` names the defect."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


class SetsOverlapError(ExcessVocabError):
    """Raised when marker sets that must be disjoint share words."""

    code = "SETS_OVERLAP"

    def __init__(self, overlap):
        self.overlap = frozenset(overlap)
        words = ", ".join(sorted(self.overlap)[:10])
        super().__init__(f"SETS_OVERLAP: marker sets share {len(self.overlap)} word(s): {words}")


class MarkerPoolExhaustedError(ExcessVocabError):
    """Raised when no novel marker is available for an injected document."""


class SizeCapError(ExcessVocabError):
    """Raised when the naive oracle is invoked on a corpus above its size cap."""


class EmptyCorpusError(ExcessVocabError):
    """Raised when an operation requires a non-empty corpus."""

"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class UtivError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(UtivError):
    """Invalid anchor or CLI configuration."""


class DecodeError(UtivError):
    """Box regression decode produced an unusable rectangle."""


class AnnotationError(UtivError):
    """Problem in a ground-truth annotation document.

    Carries the position of the offending construct when known.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message)


class MalformedXmlError(AnnotationError):
    """Document is not well-formed XML."""


class SchemaError(AnnotationError):
    """Unknown or missing element in strict mode."""


class MissingAttributeError(AnnotationError):
    """A required attribute is absent."""


class InvalidValueError(AnnotationError):
    """An attribute value cannot be interpreted (bad integer, degenerate box)."""


class OutOfBoundsError(AnnotationError):
    """A text line box does not lie fully inside the frame."""


class UnknownScriptError(AnnotationError):
    """Script attribute is not one of the supported values."""


class DatasetError(UtivError):
    """Problem assembling a dataset from disk (orphans, duplicates, unreadable files)."""


class DetectionFormatError(UtivError):
    """Problem in a detection file; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


class MalformedLineError(DetectionFormatError):
    """Detection record does not match the documented field layout."""


class UnknownLabelError(DetectionFormatError):
    """Detection label is not one of the supported values."""


class ScoreRangeError(DetectionFormatError):
    """Detection confidence is outside [0, 1]."""


class MixedModeError(DetectionFormatError):
    """File mixes script-agnostic and script-aware labels."""


class UndefinedScoreError(UtivError):
    """Precision/recall is undefined for the given tallies or matrix."""


class ValidationFailure(UtivError):
    """An annotation write was rejected; lists the individual problems."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(problems))


class StaleRevisionError(UtivError):
    """Optimistic-concurrency conflict: the frame changed since it was read."""

    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected revision {expected}, frame is at revision {actual}")


class UnknownFrameError(UtivError):
    """Requested frame key does not exist."""

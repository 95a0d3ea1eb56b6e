"""
Exception hierarchy for GAMSum.

Every error raised on purpose by the library derives from ``GamSumError`` and
from the builtin it specializes, so callers may catch either.
"""

from typing import Any, Dict, Optional


class GamSumError(Exception):
    """Base class for all GAMSum errors."""


class CorpusParseError(GamSumError, ValueError):
    """A corpus record could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CorpusValidationError(GamSumError, ValueError):
    """A corpus parsed but violates an invariant (e.g. duplicate ids)."""


class SplitError(GamSumError, ValueError):
    """Invalid split request."""


class UnsupportedModelVersionError(GamSumError, ValueError):
    """Model file was written by an unknown format version."""


class ModelIntegrityError(GamSumError, ValueError):
    """Model file payload is corrupted or fails its checksum."""


class EmptyDocumentError(GamSumError, ValueError):
    """A document yielded no sentences with terms."""


class LabelingError(GamSumError, ValueError):
    """Oracle labels cannot be produced for a document."""


class BalancingError(GamSumError, ValueError):
    """Undersampling needs both classes present."""


class TrainingError(GamSumError, RuntimeError):
    """A trainer was given data it cannot fit."""


class StepSizeError(TrainingError):
    """Loss became non-finite during gradient descent."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        if self.diagnostics:
            details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            message = f"{message} ({details})"
        super().__init__(message)


class ZeroImportanceError(GamSumError, ValueError):
    """Every term contributes zero variation; ratios are undefined."""


class SelectionError(GamSumError, ValueError):
    """Summary selection on an invalid input."""


class PairingError(GamSumError, ValueError):
    """Summaries and references do not cover the same documents."""


class SchemaError(GamSumError, ValueError):
    """A dataset does not match the feature schema a model expects."""


class LogisticConvergenceWarning(UserWarning):
    """Gradient descent hit its iteration cap before reaching tolerance."""

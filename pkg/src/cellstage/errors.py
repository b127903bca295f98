"""Shared exception types raised across the toolkit."""

from __future__ import annotations


class CellstageError(Exception):
    """Base class for every error this package raises on purpose."""


class ProbabilityMatrixError(CellstageError, ValueError):
    """A per-frame probability matrix failed validation.

    Attributes:
        frame: 1-based index of the first offending frame.
        stage: 1-based stage index of the offending entry, when one entry
            is at fault (sum violations concern the whole frame).
    """

    def __init__(self, message: str, frame: int | None = None, stage: int | None = None):
        super().__init__(message)
        self.frame = frame
        self.stage = stage


class NonFiniteEntryError(ProbabilityMatrixError):
    """NaN or infinity found in a probability matrix."""


class NegativeEntryError(ProbabilityMatrixError):
    """Negative probability found in a probability matrix."""


class BadSumError(ProbabilityMatrixError):
    """A frame's probabilities do not sum to one within tolerance."""


class LengthMismatchError(CellstageError, ValueError):
    """Paired sequences have different lengths (or are empty)."""


class ShapeMismatchError(CellstageError, ValueError):
    """An array does not have the shape the network configuration implies."""


class VariantMismatchError(CellstageError, ValueError):
    """A forward function was called on parameters of a different variant."""


class DivergenceError(CellstageError, RuntimeError):
    """Training produced a non-finite loss."""


class EmptyFrameError(CellstageError, ValueError):
    """A prediction grid has no predictions at some frame index."""


class TooLargeError(CellstageError, ValueError):
    """Exhaustive enumeration would exceed its instance-size bound."""


class EmptySplitError(CellstageError, ValueError):
    """A requested dataset split rounds to zero videos."""


class ConfigError(CellstageError, ValueError):
    """An experiment config file or value is invalid."""


class MissingVideoError(CellstageError, ValueError):
    """Prediction files reference a video absent from the ground truth."""


class PipelineStageError(CellstageError, RuntimeError):
    """A pipeline stage failed; the message names the stage and the cause."""

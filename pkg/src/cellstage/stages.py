"""Core label and probability types shared by the whole toolkit.

Stage indices are 1-based everywhere, including file formats: a sequence
over an alphabet of size L takes values in {1, ..., L}, and the list
order of the alphabet defines the total order used by the monotonicity
constraint (a cell count never goes down).

A probability matrix is stored as a float array of shape ``(N, L)`` with
one row per frame; "frame n" in error messages refers to row n (1-based).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadSumError,
    NegativeEntryError,
    NonFiniteEntryError,
    ShapeMismatchError,
)

DEFAULT_STAGE_LABELS = ("tStart", "tPNf", "t2", "t3", "t4", "t4+")

#: Frame probabilities may drift from sum 1 by this much (CSV round trips
#: lose precision); anything worse is rejected.
PROB_SUM_TOL = 1e-6


@dataclass(frozen=True)
class StageAlphabet:
    """Ordered set of development-stage names; order defines the stage order."""

    labels: tuple[str, ...] = DEFAULT_STAGE_LABELS

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise ValueError("stage alphabet needs at least 2 labels")
        if len(set(labels)) != len(labels):
            raise ValueError("stage labels must be distinct")

    @property
    def size(self) -> int:
        return len(self.labels)

    def name_of(self, stage: int) -> str:
        """Name of a 1-based stage index."""
        if not 1 <= stage <= self.size:
            raise ValueError(f"stage {stage} outside [1, {self.size}]")
        return self.labels[stage - 1]


@dataclass(frozen=True)
class ContextConfig:
    """Temporal context half-width; the full window covers ``2*tau + 1`` frames."""

    tau: int = 0

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be >= 0")

    @property
    def window(self) -> int:
        return 2 * self.tau + 1


def as_stage_sequence(seq, n_stages: int | None = None) -> np.ndarray:
    """Coerce to a 1-D int array of 1-based stage indices, checking bounds."""
    arr = np.asarray(seq, dtype=int)
    if arr.ndim != 1:
        raise ShapeMismatchError(f"stage sequence must be 1-D, got shape {arr.shape}")
    if arr.size and arr.min() < 1:
        raise ValueError("stage indices are 1-based; found value < 1")
    if n_stages is not None and arr.size and arr.max() > n_stages:
        raise ValueError(f"stage index {arr.max()} exceeds alphabet size {n_stages}")
    return arr


def is_monotone(seq) -> bool:
    """True iff the stage sequence never decreases."""
    arr = as_stage_sequence(seq)
    return bool(np.all(np.diff(arr) >= 0))


def validate_probability_matrix(matrix, *, tol: float = PROB_SUM_TOL) -> np.ndarray:
    """Check a per-frame probability matrix and return it as a float array.

    Accepts iff every entry is finite and non-negative and every row sums
    to 1 within ``tol``. The raised error identifies the first offending
    frame (checked in frame order; within a frame, non-finite entries are
    reported before negative ones, then sum violations).
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatchError(
            f"probability matrix must be (frames, stages) with at least one row, got {m.shape}"
        )
    finite = np.isfinite(m)
    negative = finite & (m < 0.0)
    sums = m.sum(axis=1)
    bad_row = ~finite.all(axis=1) | negative.any(axis=1) | (np.abs(sums - 1.0) > tol)
    if not bad_row.any():
        return m
    n = int(np.argmax(bad_row))
    row = m[n]
    if not finite[n].all():
        s = int(np.argmax(~finite[n]))
        raise NonFiniteEntryError(
            f"non-finite probability {row[s]!r} at frame {n + 1}, stage {s + 1}",
            frame=n + 1,
            stage=s + 1,
        )
    if negative[n].any():
        s = int(np.argmax(negative[n]))
        raise NegativeEntryError(
            f"negative probability {row[s]!r} at frame {n + 1}, stage {s + 1}",
            frame=n + 1,
            stage=s + 1,
        )
    raise BadSumError(
        f"frame {n + 1} probabilities sum to {sums[n]!r}, expected 1 within {tol}",
        frame=n + 1,
    )


def normalize_rows(matrix) -> np.ndarray:
    """Rescale each frame's probabilities to sum exactly to 1."""
    m = np.asarray(matrix, dtype=float)
    return m / m.sum(axis=1, keepdims=True)


def argmax_sequence(matrix) -> np.ndarray:
    """Per-frame most probable stage; ties go to the lowest stage index."""
    m = validate_probability_matrix(matrix)
    return np.argmax(m, axis=1) + 1

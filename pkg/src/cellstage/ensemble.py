"""Aggregation of overlapping per-frame predictions.

A multi-output net predicts each frame index from up to ``2*tau + 1``
neighboring source frames. These overlapping predictions are combined
into one probability vector per frame by an additive mean, an elementwise
product ("multiplicative mean", computed in log space and renormalized),
or by simply keeping the prediction whose source frame equals the frame
index (the net's middle output).
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .decoder import LOG_CLAMP
from .errors import EmptyFrameError
from .stages import argmax_sequence, validate_probability_matrix


class AggregationRule(str, Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"
    MIDDLE = "middle"


def _combine(vectors: np.ndarray, sources, frame: int, rule: AggregationRule) -> np.ndarray:
    if rule is AggregationRule.ADDITIVE:
        merged = vectors.mean(axis=0)
        return merged / merged.sum()
    if rule is AggregationRule.MULTIPLICATIVE:
        logs = np.log(np.clip(vectors, LOG_CLAMP, None)).sum(axis=0)
        merged = np.exp(logs - logs.max())
        return merged / merged.sum()
    # middle output: the prediction made from the frame itself when present,
    # otherwise the nearest source frame (ties toward the earlier frame)
    sources = np.asarray(sources)
    pick = int(np.argmin(np.abs(sources - frame)))
    return vectors[pick]


def aggregate(grid, rule: AggregationRule) -> np.ndarray:
    """Collapse a prediction grid to one probability row per frame.

    ``grid`` is anything with a ``frames`` attribute (or a plain sequence)
    whose n-th item lists ``(source_frame, probability_vector)`` pairs for
    frame index n+1. Boundary frames simply aggregate over however many
    predictions they have.
    """
    rule = AggregationRule(rule)
    frames = getattr(grid, "frames", grid)
    rows = []
    for n, entries in enumerate(frames, start=1):
        if len(entries) == 0:
            raise EmptyFrameError(f"no predictions at frame {n}")
        sources = [t for t, _ in entries]
        vectors = np.asarray([np.asarray(v, dtype=float) for _, v in entries])
        rows.append(_combine(vectors, sources, n, rule))
    matrix = np.asarray(rows)
    return validate_probability_matrix(matrix)


def classify(matrix) -> np.ndarray:
    """Hard labels by per-frame probability maximization."""
    return argmax_sequence(matrix)

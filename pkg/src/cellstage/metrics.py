"""Frame-level evaluation measures: accuracy, RMSE, and confusion counts.

All three micro-average over frames, so evaluating a list of videos is
the same as evaluating their concatenation. RMSE treats the 1-based stage
indices as ordinal values (adjacent stages are distance 1 apart).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatchError


@dataclass(frozen=True)
class ConfusionMatrix:
    """Stage confusion counts; rows are true stages, columns predictions."""

    counts: np.ndarray  # (L, L) int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=int)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("confusion counts must be square")
        if (c < 0).any():
            raise ValueError("confusion counts must be non-negative")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def row_normalized(self) -> np.ndarray:
        """Rows rescaled to sum to 1 (empty rows stay all zero)."""
        c = self.counts.astype(float)
        sums = c.sum(axis=1, keepdims=True)
        return np.divide(c, sums, out=np.zeros_like(c), where=sums > 0)


def _flatten_pairs(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    """Accept single sequences or lists of per-video sequences."""

    def listify(x):
        arr = np.asarray(x, dtype=object)
        if arr.ndim == 1 and (arr.size == 0 or np.isscalar(arr[0]) or np.ndim(arr[0]) == 0):
            return [np.asarray(x, dtype=int)]
        return [np.asarray(v, dtype=int) for v in x]

    p_list, t_list = listify(pred), listify(truth)
    if len(p_list) != len(t_list):
        raise LengthMismatchError(f"{len(p_list)} prediction videos vs {len(t_list)} truth videos")
    for i, (p, t) in enumerate(zip(p_list, t_list)):
        if p.shape != t.shape:
            raise LengthMismatchError(f"video {i}: {p.shape[0]} predicted frames vs {t.shape[0]} true frames")
    p_all = np.concatenate(p_list) if p_list else np.empty(0, dtype=int)
    t_all = np.concatenate(t_list) if t_list else np.empty(0, dtype=int)
    if p_all.size == 0:
        raise LengthMismatchError("no frames to evaluate")
    return p_all, t_all


def accuracy(pred, truth) -> float:
    """Fraction of frames classified correctly, micro-averaged over frames."""
    p, t = _flatten_pairs(pred, truth)
    return float(np.mean(p == t))


def rmse(pred, truth) -> float:
    """Root mean squared error between integer stage sequences."""
    p, t = _flatten_pairs(pred, truth)
    return float(np.sqrt(np.mean((p - t) ** 2.0)))


def confusion(pred, truth, n_stages: int | None = None) -> ConfusionMatrix:
    """Counts of (true stage, predicted stage) pairs over all frames."""
    p, t = _flatten_pairs(pred, truth)
    if n_stages is None:
        n_stages = int(max(p.max(), t.max()))
    if p.min() < 1 or t.min() < 1 or p.max() > n_stages or t.max() > n_stages:
        raise ValueError(f"stage values must lie in [1, {n_stages}]")
    flat = (t - 1) * n_stages + (p - 1)
    counts = np.bincount(flat, minlength=n_stages * n_stages).reshape(n_stages, n_stages)
    return ConfusionMatrix(counts)

"""Monotone decoding of per-frame stage probabilities.

Given a probability matrix for one video, find the stage sequence that
minimizes the summed per-frame loss subject to the hard constraint that
stages never decrease over time. Two per-frame losses are supported:

* ``LL``: negative log of the probability assigned to the candidate stage.
* ``EM``: expected absolute stage distance between the candidate stage and
  the predicted distribution (an earth-mover distance on the stage line).

The minimization runs as a dynamic program over a suffix-cost table:
``best[n, s]`` is the cheapest cost of frames ``n..N`` when frame ``n`` is
at stage ``s``, computed backward with a running suffix minimum (so the
whole table costs O(N * L)). The sequence is then read off front to back,
taking at each frame the lowest admissible stage that still achieves the
optimum; this makes the result the lexicographically smallest optimal
sequence, which pins down ties deterministically.

``brute_force_decode`` solves the same problem by exhaustive enumeration
and exists purely as a verification oracle for ``decode``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations_with_replacement

import numpy as np

from .errors import LengthMismatchError, TooLargeError
from .stages import is_monotone, normalize_rows, validate_probability_matrix

#: Probabilities are clamped here before taking logs.
LOG_CLAMP = 1e-12

#: Refuse exhaustive enumeration beyond this many monotone sequences.
MAX_BRUTE_FORCE_SEQUENCES = 10**6


class LossKind(str, Enum):
    LL = "ll"
    EM = "em"


@dataclass(frozen=True)
class DecodeResult:
    """A monotone stage sequence with its per-frame and total losses."""

    sequence: np.ndarray     # (N,) int, 1-based, monotone
    total_loss: float
    frame_losses: np.ndarray  # (N,) float, sums to total_loss

    def __post_init__(self):
        seq = np.asarray(self.sequence, dtype=int)
        losses = np.asarray(self.frame_losses, dtype=float)
        if seq.shape != losses.shape or seq.ndim != 1:
            raise ValueError("sequence and frame_losses must be matching 1-D arrays")
        if not is_monotone(seq):
            raise ValueError("decoded sequence must be monotone non-decreasing")
        seq = seq.copy()
        seq.setflags(write=False)
        losses = losses.copy()
        losses.setflags(write=False)
        object.__setattr__(self, "sequence", seq)
        object.__setattr__(self, "frame_losses", losses)


def per_frame_loss(stage: int, probs, kind: LossKind) -> float:
    """Loss of committing frame-level probabilities ``probs`` to ``stage``."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1:
        raise ValueError("probs must be a 1-D probability vector")
    if not 1 <= stage <= p.shape[0]:
        raise ValueError(f"stage {stage} outside [1, {p.shape[0]}]")
    kind = LossKind(kind)
    if kind is LossKind.LL:
        return float(-np.log(max(p[stage - 1], LOG_CLAMP)))
    distances = np.abs(np.arange(1, p.shape[0] + 1) - stage)
    return float(p @ distances)


def _loss_table(probs: np.ndarray, kind: LossKind) -> np.ndarray:
    """(N, L) table of per-frame losses for every candidate stage."""
    if kind is LossKind.LL:
        return -np.log(np.maximum(probs, LOG_CLAMP))
    n_stages = probs.shape[1]
    idx = np.arange(n_stages)
    distances = np.abs(idx[:, None] - idx[None, :]).astype(float)
    return probs @ distances


def _prepare(matrix, kind) -> tuple[np.ndarray, LossKind]:
    probs = validate_probability_matrix(matrix)
    return normalize_rows(probs), LossKind(kind)


def decode(matrix, kind: LossKind) -> DecodeResult:
    """Minimum-loss monotone stage sequence for one video.

    Ties between co-optimal sequences resolve to the lexicographically
    smallest one. Runs in O(N * L).
    """
    probs, kind = _prepare(matrix, kind)
    costs = _loss_table(probs, kind)
    n_frames, n_stages = costs.shape

    # best[n, s]: cheapest cost of frames n..N-1 given frame n sits at stage s
    best = np.empty_like(costs)
    best[-1] = costs[-1]
    for n in range(n_frames - 2, -1, -1):
        # ahead[s] = min over s' >= s of best[n+1, s']
        ahead = np.minimum.accumulate(best[n + 1][::-1])[::-1]
        best[n] = costs[n] + ahead

    sequence = np.empty(n_frames, dtype=int)
    floor = 0  # 0-based lower bound from the previous frame
    for n in range(n_frames):
        floor += int(np.argmin(best[n][floor:]))  # first minimum = lowest stage
        sequence[n] = floor + 1

    frame_losses = costs[np.arange(n_frames), sequence - 1]
    return DecodeResult(sequence, float(frame_losses.sum()), frame_losses)


def count_monotone_sequences(n_frames: int, n_stages: int) -> int:
    """Number of monotone stage sequences (stars and bars)."""
    return math.comb(n_frames + n_stages - 1, n_stages - 1)


def brute_force_decode(matrix, kind: LossKind) -> DecodeResult:
    """Exhaustive-search oracle: same contract as ``decode``, by enumeration.

    Iterates every monotone sequence in lexicographic order and keeps the
    strictly best total, so ties resolve to the lexicographically smallest
    sequence just like ``decode``.
    """
    probs, kind = _prepare(matrix, kind)
    n_frames, n_stages = probs.shape
    total_sequences = count_monotone_sequences(n_frames, n_stages)
    if total_sequences > MAX_BRUTE_FORCE_SEQUENCES:
        raise TooLargeError(
            f"{total_sequences} monotone sequences exceed the "
            f"{MAX_BRUTE_FORCE_SEQUENCES} enumeration bound"
        )

    best_seq = None
    best_losses = None
    best_total = math.inf
    for candidate in combinations_with_replacement(range(1, n_stages + 1), n_frames):
        losses = [per_frame_loss(s, probs[n], kind) for n, s in enumerate(candidate)]
        total = sum(losses)
        if total < best_total:
            best_total = total
            best_seq = candidate
            best_losses = losses
    return DecodeResult(np.array(best_seq, dtype=int), float(best_total), np.array(best_losses))


def total_loss(sequence, matrix, kind: LossKind) -> float:
    """Summed per-frame loss of an arbitrary stage sequence."""
    probs, kind = _prepare(matrix, kind)
    seq = np.asarray(sequence, dtype=int)
    if seq.ndim != 1 or seq.shape[0] != probs.shape[0] or seq.shape[0] == 0:
        raise LengthMismatchError(
            f"sequence length {seq.shape} does not match {probs.shape[0]} frames"
        )
    return float(sum(per_frame_loss(int(s), probs[n], kind) for n, s in enumerate(seq)))

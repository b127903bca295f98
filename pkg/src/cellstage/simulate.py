"""Synthetic time-lapse video generator.

Stands in for a real microscope dataset: each video is a monotone
non-decreasing ground-truth stage sequence plus noisy per-frame feature
vectors. Stage blocks are drawn from a duration model (optionally skipping
intermediate stages, e.g. a rarely observed 3-cell stage), and features
are Gaussian perturbations of per-stage mean vectors.

Durations use a gamma law with the configured mean: ``dispersion`` is the
ratio of the standard deviation to the mean, so 0 gives deterministic
block lengths and 1 gives exponential (geometric-like once rounded to
whole frames) lengths. Draws are rounded and clipped to at least 1 frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EmptySplitError
from .seeds import STREAM_FEATURES, STREAM_SPLIT, STREAM_STAGE_LABELS, derived_rng
from .stages import as_stage_sequence, is_monotone

#: Frames per video when none is configured (long-form profile).
DEFAULT_FRAMES = 350


@dataclass(frozen=True)
class StageDurationModel:
    """Per-stage block-length law plus per-stage skip probabilities.

    ``skip_prob[k]`` is the chance stage ``k+1`` is absent from a video.
    The first and last stages are always retained: every sequence starts
    at stage 1, and the final stage absorbs any remaining frames.
    """

    mean_frames: tuple[float, ...]
    dispersion: tuple[float, ...]
    skip_prob: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "mean_frames", tuple(float(v) for v in self.mean_frames))
        object.__setattr__(self, "dispersion", tuple(float(v) for v in self.dispersion))
        object.__setattr__(self, "skip_prob", tuple(float(v) for v in self.skip_prob))
        n = len(self.mean_frames)
        if n < 2:
            raise ValueError("need at least 2 stages")
        if len(self.dispersion) != n or len(self.skip_prob) != n:
            raise ValueError("mean_frames, dispersion and skip_prob must have equal length")
        if any(m <= 0 for m in self.mean_frames):
            raise ValueError("mean durations must be positive")
        if any(d < 0 for d in self.dispersion):
            raise ValueError("dispersions must be >= 0")
        if any(not 0.0 <= p <= 1.0 for p in self.skip_prob):
            raise ValueError("skip probabilities must lie in [0, 1]")
        if self.skip_prob[-1] != 0.0:
            raise ValueError("the final stage can never be skipped")

    @property
    def n_stages(self) -> int:
        return len(self.mean_frames)


@dataclass(frozen=True)
class EmissionModel:
    """Per-stage feature distribution: mean vector plus isotropic Gaussian noise.

    Default means put ``amplitude`` on the coordinate matching the stage
    index (one-hot layout), which requires ``dim >= n_stages``.
    """

    n_stages: int
    dim: int
    amplitude: float = 1.0
    sigma: float = 0.0
    means: np.ndarray | None = None

    def __post_init__(self):
        if self.n_stages < 2:
            raise ValueError("need at least 2 stages")
        if self.sigma < 0 or not np.isfinite(self.sigma):
            raise ValueError("sigma must be finite and >= 0")
        if self.dim < self.n_stages:
            raise ValueError(f"feature dim {self.dim} must be >= number of stages {self.n_stages}")
        if self.means is not None:
            m = np.asarray(self.means, dtype=float)
            if m.shape != (self.n_stages, self.dim):
                raise ValueError(f"means must have shape ({self.n_stages}, {self.dim})")
            m = m.copy()
            m.setflags(write=False)
            object.__setattr__(self, "means", m)

    def stage_means(self) -> np.ndarray:
        """(n_stages, dim) array of per-stage mean feature vectors."""
        if self.means is not None:
            return self.means
        m = np.zeros((self.n_stages, self.dim))
        m[np.arange(self.n_stages), np.arange(self.n_stages)] = self.amplitude
        return m


@dataclass(frozen=True)
class SimVideo:
    """One synthetic video: ground-truth labels and per-frame features."""

    video_id: str
    labels: np.ndarray    # (N,) int, 1-based, monotone, starts at stage 1
    features: np.ndarray  # (N, dim) float

    def __post_init__(self):
        labels = as_stage_sequence(self.labels)
        features = np.asarray(self.features, dtype=float)
        if features.ndim != 2 or features.shape[0] != labels.shape[0]:
            raise ValueError("features must be (N, dim) with one row per label")
        if labels.size == 0:
            raise ValueError("a video needs at least one frame")
        if labels[0] != 1:
            raise ValueError("label sequences must start at stage 1")
        if not is_monotone(labels):
            raise ValueError("label sequences must be monotone non-decreasing")
        labels = labels.copy()
        labels.setflags(write=False)
        features = features.copy()
        features.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", features)

    @property
    def n_frames(self) -> int:
        return int(self.labels.shape[0])


class Splits(NamedTuple):
    train: list[SimVideo]
    validation: list[SimVideo]
    test: list[SimVideo]


def _sample_duration(rng: np.random.Generator, mean: float, dispersion: float) -> int:
    if dispersion <= 0.0:
        raw = mean
    else:
        # gamma with mean `mean` and std `dispersion * mean`
        shape = 1.0 / dispersion**2
        raw = rng.gamma(shape, mean / shape)
    return max(1, int(np.rint(raw)))


def sample_stage_sequence(seed, model: StageDurationModel, n_frames: int) -> np.ndarray:
    """Draw one monotone stage sequence of length ``n_frames``.

    Draw order (fixed for reproducibility): one skip decision per
    intermediate stage 2..L-1, then one duration per retained stage in
    stage order until the video is full. The sequence starts at stage 1
    and is padded with the final reached stage if all blocks end early.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    rng = np.random.default_rng(seed)
    n_stages = model.n_stages
    retained = [1]
    for stage in range(2, n_stages):
        if rng.uniform() >= model.skip_prob[stage - 1]:
            retained.append(stage)
    retained.append(n_stages)

    out = np.empty(n_frames, dtype=int)
    filled = 0
    for stage in retained:
        if filled >= n_frames:
            break
        d = _sample_duration(rng, model.mean_frames[stage - 1], model.dispersion[stage - 1])
        take = min(d, n_frames - filled)
        out[filled : filled + take] = stage
        filled += take
    if filled < n_frames:
        out[filled:] = out[filled - 1]
    return out


def emit_features(seed, labels, model: EmissionModel) -> np.ndarray:
    """Per-frame features: the stage's mean vector plus N(0, sigma^2) noise."""
    lab = as_stage_sequence(labels, model.n_stages)
    means = model.stage_means()
    x = means[lab - 1].copy()
    if model.sigma > 0.0:
        rng = np.random.default_rng(seed)
        x += rng.normal(0.0, model.sigma, size=x.shape)
    return x


def generate_videos(
    duration_model: StageDurationModel,
    emission_model: EmissionModel,
    n_videos: int,
    n_frames: int = DEFAULT_FRAMES,
    master_seed: int = 0,
) -> list[SimVideo]:
    """Generate ``n_videos`` videos with per-video derived seeds.

    Video ``i`` depends only on ``(master_seed, i)``, so any subset can be
    regenerated, in any order or in parallel, without changing results.
    """
    videos = []
    for i in range(n_videos):
        labels = sample_stage_sequence(
            derived_rng(master_seed, STREAM_STAGE_LABELS, i), duration_model, n_frames
        )
        features = emit_features(
            derived_rng(master_seed, STREAM_FEATURES, i), labels, emission_model
        )
        videos.append(SimVideo(video_id=f"{i + 1:04d}", labels=labels, features=features))
    return videos


def _largest_remainder_sizes(n: int, fractions) -> list[int]:
    fr = np.asarray(fractions, dtype=float)
    if fr.ndim != 1 or fr.size < 1:
        raise ValueError("fractions must be a non-empty 1-D sequence")
    if abs(float(fr.sum()) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {float(fr.sum())!r}")
    if (fr < 0).any():
        raise ValueError("fractions must be non-negative")
    exact = fr * n
    sizes = np.floor(exact).astype(int)
    remainder = exact - sizes
    # hand out the leftover videos to the largest remainders (ties by part order)
    for i in np.argsort(-remainder, kind="stable")[: n - int(sizes.sum())]:
        sizes[i] += 1
    return [int(s) for s in sizes]


def split_dataset(videos: Sequence, fractions, seed) -> Splits:
    """Partition videos (never frames) into train/validation/test parts.

    Part sizes follow largest-remainder rounding of ``fractions``; the
    assignment is a seeded shuffle, and each part is returned in original
    video order. Raises ``EmptySplitError`` if any part would be empty.
    """
    sizes = _largest_remainder_sizes(len(videos), fractions)
    if len(sizes) != 3:
        raise ValueError("expected exactly three fractions (train, validation, test)")
    for name, size in zip(Splits._fields, sizes):
        if size == 0:
            raise EmptySplitError(f"split '{name}' rounds to zero videos")
    rng = derived_rng(seed, STREAM_SPLIT) if isinstance(seed, int) else np.random.default_rng(seed)
    order = rng.permutation(len(videos))
    parts = []
    start = 0
    for size in sizes:
        chosen = sorted(order[start : start + size])
        parts.append([videos[i] for i in chosen])
        start += size
    return Splits(*parts)

"""Trainable frame classifiers: shared trunk, per-offset heads.

Five framework variants map one or ``2*tau + 1`` input frames to one or
``2*tau + 1`` stage predictions:

* ``one_to_one``: one frame in, one prediction out (the baseline).
* ``many_to_one_maxpool``: a window of frames in, encodings fused by an
  elementwise max over time, one prediction out.
* ``many_to_one_concat``: as above but encodings are concatenated.
* ``one_to_many``: one frame in, one head per output offset.
* ``many_to_many``: a window in (concatenated encodings), one head per
  output offset.

All variants share the same topology: a small fully-connected trunk with
rectifier activations produces a frame encoding, and each head is a
two-layer softmax classifier on the (possibly fused) encoding. Heads are
stored stacked along a leading axis so the forward and backward passes
vectorize over heads as well as over the batch.

Training is plain mini-batch SGD, deterministic given a seed, and runs in
two phases: first a ``one_to_one`` model end to end, then (for the other
variants) the trained trunk is copied across, frozen, and only the heads
are fitted. Early stopping tracks validation loss and the parameters at
the best validation loss are returned.

The gradient is hand-derived backpropagation; tests verify it against
central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import (
    DivergenceError,
    EmptyFrameError,
    LengthMismatchError,
    ShapeMismatchError,
    VariantMismatchError,
)
from .seeds import STREAM_PHASE_INIT, STREAM_PHASE_SHUFFLE, derived_rng
from .simulate import SimVideo

LOG_CLAMP = 1e-12


class Variant(str, Enum):
    ONE_TO_ONE = "one_to_one"
    MANY_TO_ONE_MAXPOOL = "many_to_one_maxpool"
    MANY_TO_ONE_CONCAT = "many_to_one_concat"
    ONE_TO_MANY = "one_to_many"
    MANY_TO_MANY = "many_to_many"


class Fusion(str, Enum):
    MAXPOOL = "maxpool"
    CONCAT = "concat"


_SINGLE_INPUT = {Variant.ONE_TO_ONE, Variant.ONE_TO_MANY}
_SINGLE_OUTPUT = {Variant.ONE_TO_ONE, Variant.MANY_TO_ONE_MAXPOOL, Variant.MANY_TO_ONE_CONCAT}
_CONCAT_FUSED = {Variant.MANY_TO_ONE_CONCAT, Variant.MANY_TO_MANY}


@dataclass(frozen=True)
class NetConfig:
    """Architecture description; all shapes derive from these fields."""

    variant: Variant
    input_dim: int
    n_stages: int
    tau: int = 0
    trunk_sizes: tuple[int, ...] = (32,)
    head_hidden: int = 16

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "trunk_sizes", tuple(int(s) for s in self.trunk_sizes))
        if self.input_dim < 1 or self.n_stages < 2 or self.head_hidden < 1:
            raise ValueError("input_dim >= 1, n_stages >= 2 and head_hidden >= 1 required")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.variant is Variant.ONE_TO_ONE and self.tau != 0:
            raise ValueError("one_to_one is context-free; tau must be 0")
        if not self.trunk_sizes or any(s < 1 for s in self.trunk_sizes):
            raise ValueError("trunk_sizes must be a non-empty tuple of positive ints")

    @property
    def window(self) -> int:
        return 2 * self.tau + 1

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.tau, self.tau + 1)

    @property
    def single_input(self) -> bool:
        return self.variant in _SINGLE_INPUT

    @property
    def n_heads(self) -> int:
        return 1 if self.variant in _SINGLE_OUTPUT else self.window

    @property
    def encoding_dim(self) -> int:
        return self.trunk_sizes[-1]

    @property
    def fused_dim(self) -> int:
        if self.variant in _CONCAT_FUSED:
            return self.window * self.encoding_dim
        return self.encoding_dim


@dataclass(frozen=True)
class NetParams:
    """Immutable parameter snapshot for one configuration.

    Heads are stacked: ``head_w1[k]`` etc. belong to output offset
    ``k - tau``. ``to_vector`` and ``from_vector`` give a flat float64
    view used by the optimizer and by finite-difference checks; trunk
    coordinates come first (see ``trunk_param_count``).
    """

    config: NetConfig
    trunk_w: tuple[np.ndarray, ...]
    trunk_b: tuple[np.ndarray, ...]
    head_w1: np.ndarray  # (K, fused_dim, head_hidden)
    head_b1: np.ndarray  # (K, head_hidden)
    head_w2: np.ndarray  # (K, head_hidden, n_stages)
    head_b2: np.ndarray  # (K, n_stages)

    def __post_init__(self):
        cfg = self.config
        shapes = _trunk_shapes(cfg)
        if len(self.trunk_w) != len(shapes) or any(
            w.shape != s for w, s in zip(self.trunk_w, shapes)
        ):
            raise ShapeMismatchError("trunk weight shapes do not match the configuration")
        k, f, h, L = cfg.n_heads, cfg.fused_dim, cfg.head_hidden, cfg.n_stages
        expected = {
            "head_w1": (k, f, h),
            "head_b1": (k, h),
            "head_w2": (k, h, L),
            "head_b2": (k, L),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ShapeMismatchError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        for arr in (*self.trunk_w, *self.trunk_b, self.head_w1, self.head_b1, self.head_w2, self.head_b2):
            arr.setflags(write=False)

    @property
    def trunk_param_count(self) -> int:
        return sum(w.size for w in self.trunk_w) + sum(b.size for b in self.trunk_b)

    @property
    def n_params(self) -> int:
        return self.trunk_param_count + sum(
            a.size for a in (self.head_w1, self.head_b1, self.head_w2, self.head_b2)
        )

    def to_vector(self) -> np.ndarray:
        parts = [a.ravel() for a in self.trunk_w] + [a.ravel() for a in self.trunk_b]
        parts += [self.head_w1.ravel(), self.head_b1.ravel(), self.head_w2.ravel(), self.head_b2.ravel()]
        return np.concatenate(parts)

    @classmethod
    def from_vector(cls, config: NetConfig, vector: np.ndarray) -> NetParams:
        vector = np.asarray(vector, dtype=float)
        shapes = _trunk_shapes(config)
        k, f, h, L = config.n_heads, config.fused_dim, config.head_hidden, config.n_stages
        layout = (
            shapes
            + [(s[1],) for s in shapes]
            + [(k, f, h), (k, h), (k, h, L), (k, L)]
        )
        n_layers = len(shapes)
        arrays, pos = [], 0
        for shape in layout:
            size = int(np.prod(shape))
            arrays.append(vector[pos : pos + size].reshape(shape))
            pos += size
        if pos != vector.size:
            raise ShapeMismatchError(f"vector has {vector.size} entries, expected {pos}")
        return cls(
            config=config,
            trunk_w=tuple(arrays[:n_layers]),
            trunk_b=tuple(arrays[n_layers : 2 * n_layers]),
            head_w1=arrays[-4],
            head_b1=arrays[-3],
            head_w2=arrays[-2],
            head_b2=arrays[-1],
        )


def _trunk_shapes(config: NetConfig) -> list[tuple[int, int]]:
    dims = (config.input_dim, *config.trunk_sizes)
    return [(dims[i], dims[i + 1]) for i in range(len(config.trunk_sizes))]


def init_params(config: NetConfig, rng) -> NetParams:
    """He-style random weights, zero biases; deterministic given the rng."""
    rng = np.random.default_rng(rng)
    trunk_w, trunk_b = [], []
    for fan_in, fan_out in _trunk_shapes(config):
        trunk_w.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
        trunk_b.append(np.zeros(fan_out))
    k, f, h, L = config.n_heads, config.fused_dim, config.head_hidden, config.n_stages
    head_w1 = rng.normal(0.0, np.sqrt(2.0 / f), size=(k, f, h))
    head_w2 = rng.normal(0.0, np.sqrt(2.0 / h), size=(k, h, L))
    return NetParams(
        config=config,
        trunk_w=tuple(trunk_w),
        trunk_b=tuple(trunk_b),
        head_w1=head_w1,
        head_b1=np.zeros((k, h)),
        head_w2=head_w2,
        head_b2=np.zeros((k, L)),
    )


@dataclass(frozen=True)
class TrainConfig:
    """Optimization knobs. ``output_weights`` scales each head's loss term
    (defaults to 1 for every output) and applies to the target variant;
    the phase-1 baseline always trains with weight 1 on its single head."""

    learning_rate: float = 0.1
    batch_size: int = 64
    max_epochs: int = 80
    patience: int = 8
    seed: int = 0
    output_weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1 or self.max_epochs < 1:
            raise ValueError("batch_size and max_epochs must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.output_weights is not None:
            object.__setattr__(self, "output_weights", tuple(float(w) for w in self.output_weights))


def _resolve_weights(train_config: TrainConfig | None, n_heads: int) -> np.ndarray:
    weights = None if train_config is None else train_config.output_weights
    if weights is None:
        return np.ones(n_heads)
    if len(weights) != n_heads:
        raise LengthMismatchError(f"{len(weights)} output weights for {n_heads} heads")
    return np.asarray(weights, dtype=float)


# ---------------------------------------------------------------------------
# batches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameBatch:
    """Training examples for one variant.

    ``inputs`` is (B, d) for single-input variants and (B, 2*tau+1, d)
    otherwise (edge frames replicated). ``labels`` is (B, n_heads); a 0
    marks an output offset falling outside the video, which is dropped
    from the loss.
    """

    inputs: np.ndarray
    labels: np.ndarray

    @property
    def size(self) -> int:
        return int(self.labels.shape[0])

    def subset(self, index) -> FrameBatch:
        return FrameBatch(self.inputs[index], self.labels[index])


def build_batch(videos: list[SimVideo] | SimVideo, config: NetConfig) -> FrameBatch:
    """One training example per frame of every video."""
    if isinstance(videos, SimVideo):
        videos = [videos]
    inputs, labels = [], []
    offsets = config.offsets
    for video in videos:
        feats = video.features
        if feats.shape[1] != config.input_dim:
            raise ShapeMismatchError(
                f"video {video.video_id} has {feats.shape[1]} features, config expects {config.input_dim}"
            )
        n = video.n_frames
        if config.single_input:
            inputs.append(feats)
        else:
            idx = np.clip(np.arange(n)[:, None] + offsets[None, :], 0, n - 1)
            inputs.append(feats[idx])
        if config.n_heads == 1:
            labels.append(video.labels[:, None])
        else:
            target = np.arange(n)[:, None] + offsets[None, :]
            valid = (target >= 0) & (target < n)
            labels.append(np.where(valid, video.labels[np.clip(target, 0, n - 1)], 0))
    return FrameBatch(np.concatenate(inputs), np.concatenate(labels))


# ---------------------------------------------------------------------------
# forward / backward
# ---------------------------------------------------------------------------


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _forward_batch(params: NetParams, inputs: np.ndarray):
    """Probabilities (B, K, L) plus the cache needed for backprop."""
    cfg = params.config
    inputs = np.asarray(inputs, dtype=float)
    if cfg.single_input:
        if inputs.ndim != 2 or inputs.shape[1] != cfg.input_dim:
            raise ShapeMismatchError(f"expected (B, {cfg.input_dim}) inputs, got {inputs.shape}")
        rows = inputs
    else:
        if inputs.ndim != 3 or inputs.shape[1:] != (cfg.window, cfg.input_dim):
            raise ShapeMismatchError(
                f"expected (B, {cfg.window}, {cfg.input_dim}) windows, got {inputs.shape}"
            )
        rows = inputs.reshape(-1, cfg.input_dim)

    layer_in = [rows]
    preacts = []
    for w, b in zip(params.trunk_w, params.trunk_b):
        a = layer_in[-1] @ w + b
        preacts.append(a)
        layer_in.append(np.maximum(a, 0.0))
    enc = layer_in[-1]

    batch = inputs.shape[0]
    argmax_t = None
    if cfg.single_input:
        fused = enc
    elif cfg.variant is Variant.MANY_TO_ONE_MAXPOOL:
        enc3 = enc.reshape(batch, cfg.window, cfg.encoding_dim)
        fused = enc3.max(axis=1)
        argmax_t = enc3.argmax(axis=1)  # first max wins on ties
    else:
        fused = enc.reshape(batch, cfg.fused_dim)

    hidden_pre = np.einsum("bf,kfh->bkh", fused, params.head_w1) + params.head_b1
    hidden = np.maximum(hidden_pre, 0.0)
    logits = np.einsum("bkh,khl->bkl", hidden, params.head_w2) + params.head_b2
    probs = _softmax(logits)
    cache = (layer_in, preacts, fused, argmax_t, hidden_pre, hidden)
    return probs, cache


def _backward_batch(params: NetParams, cache, dlogits: np.ndarray) -> np.ndarray:
    """Gradient as a flat vector, given d(loss)/d(logits)."""
    cfg = params.config
    layer_in, preacts, fused, argmax_t, hidden_pre, hidden = cache
    batch = fused.shape[0]

    g_head_w2 = np.einsum("bkh,bkl->khl", hidden, dlogits)
    g_head_b2 = dlogits.sum(axis=0)
    d_hidden = np.einsum("bkl,khl->bkh", dlogits, params.head_w2)
    d_hidden_pre = d_hidden * (hidden_pre > 0.0)
    g_head_w1 = np.einsum("bf,bkh->kfh", fused, d_hidden_pre)
    g_head_b1 = d_hidden_pre.sum(axis=0)
    d_fused = np.einsum("bkh,kfh->bf", d_hidden_pre, params.head_w1)

    if cfg.single_input:
        d_enc = d_fused
    elif cfg.variant is Variant.MANY_TO_ONE_MAXPOOL:
        d_enc3 = np.zeros((batch, cfg.window, cfg.encoding_dim))
        np.put_along_axis(d_enc3, argmax_t[:, None, :], d_fused[:, None, :], axis=1)
        d_enc = d_enc3.reshape(-1, cfg.encoding_dim)
    else:
        d_enc = d_fused.reshape(-1, cfg.encoding_dim)

    g_trunk_w = [None] * len(params.trunk_w)
    g_trunk_b = [None] * len(params.trunk_b)
    d_out = d_enc
    for i in range(len(params.trunk_w) - 1, -1, -1):
        d_pre = d_out * (preacts[i] > 0.0)
        g_trunk_w[i] = layer_in[i].T @ d_pre
        g_trunk_b[i] = d_pre.sum(axis=0)
        d_out = d_pre @ params.trunk_w[i].T

    parts = [g.ravel() for g in g_trunk_w] + [g.ravel() for g in g_trunk_b]
    parts += [g_head_w1.ravel(), g_head_b1.ravel(), g_head_w2.ravel(), g_head_b2.ravel()]
    return np.concatenate(parts)


def _batch_loss(params: NetParams, batch: FrameBatch, weights: np.ndarray, *, grad: bool):
    """Mean-over-examples multi-task loss, optionally with its gradient."""
    if batch.size == 0:
        raise ValueError("batch must be nonempty")
    probs, cache = _forward_batch(params, batch.inputs)
    labels = np.asarray(batch.labels)
    if labels.shape != probs.shape[:2]:
        raise ShapeMismatchError(f"labels shaped {labels.shape}, expected {probs.shape[:2]}")
    mask = labels > 0
    safe = np.where(mask, labels - 1, 0)
    picked = np.take_along_axis(probs, safe[..., None], axis=2)[..., 0]
    scale = mask * weights[None, :]
    loss = float((-np.log(np.maximum(picked, LOG_CLAMP)) * scale).sum() / batch.size)
    if not grad:
        return loss, None
    dlogits = probs.copy()
    np.put_along_axis(
        dlogits,
        safe[..., None],
        np.take_along_axis(dlogits, safe[..., None], axis=2) - 1.0,
        axis=2,
    )
    dlogits *= (scale / batch.size)[..., None]
    return loss, _backward_batch(params, cache, dlogits)


# ---------------------------------------------------------------------------
# public forward surface
# ---------------------------------------------------------------------------


def trunk_forward(params: NetParams, x) -> np.ndarray:
    """Shared-trunk encoding of a single frame."""
    x = np.asarray(x, dtype=float)
    if x.shape != (params.config.input_dim,):
        raise ShapeMismatchError(f"expected a ({params.config.input_dim},) frame, got {x.shape}")
    out = x[None, :]
    for w, b in zip(params.trunk_w, params.trunk_b):
        out = np.maximum(out @ w + b, 0.0)
    return out[0]


def _require_variant(params: NetParams, *allowed: Variant):
    if params.config.variant not in allowed:
        names = ", ".join(v.value for v in allowed)
        raise VariantMismatchError(f"parameters are for {params.config.variant.value}, expected {names}")


def forward_one_to_one(params: NetParams, x) -> np.ndarray:
    """Stage probabilities for a single frame."""
    _require_variant(params, Variant.ONE_TO_ONE)
    probs, _ = _forward_batch(params, np.asarray(x, dtype=float)[None, :])
    return probs[0, 0]


def forward_many_to_one(params: NetParams, window, fusion: Fusion) -> np.ndarray:
    """Stage probabilities for a window of ``2*tau + 1`` frames."""
    fusion = Fusion(fusion)
    expected = (
        Variant.MANY_TO_ONE_MAXPOOL if fusion is Fusion.MAXPOOL else Variant.MANY_TO_ONE_CONCAT
    )
    _require_variant(params, expected)
    probs, _ = _forward_batch(params, np.asarray(window, dtype=float)[None, :, :])
    return probs[0, 0]


def forward_one_to_many(params: NetParams, x) -> list[np.ndarray]:
    """Per-offset stage probabilities from a single frame (offsets -tau..tau)."""
    _require_variant(params, Variant.ONE_TO_MANY)
    probs, _ = _forward_batch(params, np.asarray(x, dtype=float)[None, :])
    return list(probs[0])


def forward_many_to_many(params: NetParams, window) -> list[np.ndarray]:
    """Per-offset stage probabilities from a window of frames."""
    _require_variant(params, Variant.MANY_TO_MANY)
    probs, _ = _forward_batch(params, np.asarray(window, dtype=float)[None, :, :])
    return list(probs[0])


def multitask_loss(outputs, labels, weights=None) -> float:
    """Weighted sum of per-output cross-entropy losses.

    ``outputs`` are probability vectors (one per involved output),
    ``labels`` the matching true stages, ``weights`` the per-output loss
    weights (default 1 everywhere).
    """
    outputs = [np.asarray(o, dtype=float) for o in outputs]
    if weights is None:
        weights = np.ones(len(outputs))
    else:
        weights = np.asarray(weights, dtype=float)
    if len(outputs) != len(labels) or weights.shape != (len(outputs),):
        raise LengthMismatchError(
            f"{len(outputs)} outputs, {len(labels)} labels, {weights.size} weights"
        )
    total = 0.0
    for out, label, w in zip(outputs, labels, weights):
        if not 1 <= label <= out.shape[0]:
            raise ValueError(f"label {label} outside [1, {out.shape[0]}]")
        total += w * -np.log(max(out[label - 1], LOG_CLAMP))
    return float(total)


def gradient(params: NetParams, batch: FrameBatch, train_config: TrainConfig | None = None) -> NetParams:
    """Gradient of the batch-mean multi-task loss, in parameter shapes.

    Trunk gradients are always included; phase-2 training simply ignores
    them when the trunk is frozen.
    """
    weights = _resolve_weights(train_config, params.config.n_heads)
    _, gvec = _batch_loss(params, batch, weights, grad=True)
    return NetParams.from_vector(params.config, gvec)


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpochStats:
    phase: int
    epoch: int
    train_loss: float
    val_loss: float


@dataclass(frozen=True)
class TrainResult:
    params: NetParams          # target variant, at best validation loss
    phase1_params: NetParams   # the one_to_one baseline
    history: tuple[EpochStats, ...]


def _fit(config, start_vec, train_batch, val_batch, weights, tc, phase):
    shuffle_rng = derived_rng(tc.seed, STREAM_PHASE_SHUFFLE, phase)
    frozen = NetParams.from_vector(config, start_vec).trunk_param_count if phase == 2 else 0
    vec = start_vec
    params = NetParams.from_vector(config, vec)
    best_val, _ = _batch_loss(params, val_batch, weights, grad=False)
    best_vec = vec.copy()
    history = []
    since_best = 0
    for epoch in range(1, tc.max_epochs + 1):
        order = shuffle_rng.permutation(train_batch.size)
        epoch_losses = []
        for start in range(0, train_batch.size, tc.batch_size):
            sub = train_batch.subset(order[start : start + tc.batch_size])
            loss, gvec = _batch_loss(params, sub, weights, grad=True)
            if not np.isfinite(loss):
                raise DivergenceError(f"training loss became non-finite in phase {phase}")
            if frozen:
                gvec[:frozen] = 0.0
            vec = vec - tc.learning_rate * gvec
            params = NetParams.from_vector(config, vec)
            epoch_losses.append(loss)
        val_loss, _ = _batch_loss(params, val_batch, weights, grad=False)
        if not np.isfinite(val_loss):
            raise DivergenceError(f"validation loss became non-finite in phase {phase}")
        history.append(EpochStats(phase, epoch, float(np.mean(epoch_losses)), val_loss))
        if val_loss < best_val:
            best_val = val_loss
            best_vec = vec.copy()
            since_best = 0
        else:
            since_best += 1
            if since_best >= tc.patience:
                break
    return best_vec, history


def train(dataset, net_config: NetConfig, train_config: TrainConfig) -> TrainResult:
    """Two-phase training on a dataset with train and validation parts.

    Phase 1 fits a ``one_to_one`` baseline end to end. For any other
    variant, phase 2 copies the baseline trunk into the target
    architecture, freezes it, and fits only the heads.
    """
    if not dataset.train or not dataset.validation:
        raise ValueError("dataset needs nonempty train and validation parts")

    base_cfg = replace(net_config, variant=Variant.ONE_TO_ONE, tau=0)
    p1_train = build_batch(dataset.train, base_cfg)
    p1_val = build_batch(dataset.validation, base_cfg)
    p1_init = init_params(base_cfg, derived_rng(train_config.seed, STREAM_PHASE_INIT, 1))
    p1_vec, history = _fit(
        base_cfg, p1_init.to_vector(), p1_train, p1_val, np.ones(1), train_config, phase=1
    )
    phase1 = NetParams.from_vector(base_cfg, p1_vec)
    if net_config.variant is Variant.ONE_TO_ONE:
        return TrainResult(phase1, phase1, tuple(history))

    p2_train = build_batch(dataset.train, net_config)
    p2_val = build_batch(dataset.validation, net_config)
    p2_init = init_params(net_config, derived_rng(train_config.seed, STREAM_PHASE_INIT, 2))
    start = p2_init.to_vector()
    trunk_n = phase1.trunk_param_count
    start[:trunk_n] = p1_vec[:trunk_n]  # identical trunk, then frozen
    weights = _resolve_weights(train_config, net_config.n_heads)
    p2_vec, hist2 = _fit(net_config, start, p2_train, p2_val, weights, train_config, phase=2)
    history.extend(hist2)
    return TrainResult(NetParams.from_vector(net_config, p2_vec), phase1, tuple(history))


# ---------------------------------------------------------------------------
# inference
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredictionGrid:
    """Overlapping predictions per frame index.

    ``frames[n-1]`` lists ``(source_frame, probability_vector)`` pairs for
    frame index ``n``, source frames 1-based and ascending.
    """

    frames: tuple[tuple[tuple[int, np.ndarray], ...], ...]

    def __post_init__(self):
        for n, entries in enumerate(self.frames, start=1):
            if len(entries) == 0:
                raise EmptyFrameError(f"no predictions at frame {n}")

    @property
    def n_frames(self) -> int:
        return len(self.frames)


def predict_video(params: NetParams, video: SimVideo):
    """Per-frame predictions for one video.

    Single-output variants return an (N, L) probability matrix (inputs
    edge-replicated at the boundaries). Multi-output variants return a
    ``PredictionGrid``; predictions for offsets falling outside the video
    are dropped.
    """
    cfg = params.config
    batch = build_batch(video, cfg)
    probs, _ = _forward_batch(params, batch.inputs)
    if cfg.n_heads == 1:
        return probs[:, 0, :]
    n = video.n_frames
    frames = [[] for _ in range(n)]
    for source in range(n):
        for k, offset in enumerate(cfg.offsets):
            target = source + offset
            if 0 <= target < n:
                frames[target].append((source + 1, probs[source, k]))
    return PredictionGrid(tuple(tuple(f) for f in frames))

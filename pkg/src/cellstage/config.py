"""Experiment configuration: one flat ``key = value`` text file.

A config file holds every knob of the simulator, the network, training,
the ensemble rule and the decoder loss, plus the master seed. Lines
starting with ``#`` (and anything after an inline ``#``) are comments.
Unknown keys are rejected so typos fail loudly. Every run writes the
fully resolved config next to its outputs.

The field defaults form the benchmark profile: 170 videos of 100 frames,
six stages with one-hot feature means, a rarely observed stage 4, and
noise tuned so the baseline per-frame classifier lands in the mid-80%
accuracy range.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass

from .decoder import LossKind
from .ensemble import AggregationRule
from .errors import ConfigError
from .net import NetConfig, TrainConfig, Variant
from .simulate import EmissionModel, StageDurationModel
from .stages import DEFAULT_STAGE_LABELS, StageAlphabet


def _parse_tuple(cast):
    def parse(text: str):
        text = text.strip()
        if not text:
            return ()
        return tuple(cast(part.strip()) for part in text.split(","))

    return parse


def _render_tuple(values) -> str:
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in values)


def _parse_optional_floats(text: str):
    values = _parse_tuple(float)(text)
    return values or None


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    videos: int = 170
    frames: int = 100
    stage_labels: tuple[str, ...] = DEFAULT_STAGE_LABELS
    duration_means: tuple[float, ...] = (16.0, 14.0, 18.0, 7.0, 15.0, 30.0)
    duration_dispersions: tuple[float, ...] = (0.6, 0.6, 0.6, 0.6, 0.6, 0.6)
    skip_probs: tuple[float, ...] = (0.0, 0.0, 0.0, 0.8, 0.0, 0.0)
    feature_dim: int = 6
    signal_amplitude: float = 1.0
    noise_sigma: float = 0.55
    split_fractions: tuple[float, ...] = (0.7, 0.1, 0.2)
    variant: Variant = Variant.ONE_TO_MANY
    tau: int = 1
    trunk_sizes: tuple[int, ...] = (32,)
    head_hidden: int = 16
    output_weights: tuple[float, ...] | None = None
    learning_rate: float = 0.1
    batch_size: int = 64
    max_epochs: int = 80
    patience: int = 8
    rule: AggregationRule = AggregationRule.MULTIPLICATIVE
    dp_loss: LossKind = LossKind.EM
    repeats: int = 5
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "rule", AggregationRule(self.rule))
        object.__setattr__(self, "dp_loss", LossKind(self.dp_loss))
        n = len(self.stage_labels)
        for field in ("duration_means", "duration_dispersions", "skip_probs"):
            if len(getattr(self, field)) != n:
                raise ConfigError(f"{field} must list one value per stage label ({n})")
        if len(self.split_fractions) != 3:
            raise ConfigError("split_fractions must list train, validation and test fractions")
        if self.videos < 1 or self.frames < 1 or self.repeats < 1 or self.jobs < 1:
            raise ConfigError("videos, frames, repeats and jobs must be >= 1")
        if self.variant is Variant.ONE_TO_ONE and self.tau != 0:
            raise ConfigError("one_to_one is context-free; set tau = 0")

    # -- builders -----------------------------------------------------------

    def alphabet(self) -> StageAlphabet:
        return StageAlphabet(self.stage_labels)

    def duration_model(self) -> StageDurationModel:
        return StageDurationModel(self.duration_means, self.duration_dispersions, self.skip_probs)

    def emission_model(self) -> EmissionModel:
        return EmissionModel(
            n_stages=len(self.stage_labels),
            dim=self.feature_dim,
            amplitude=self.signal_amplitude,
            sigma=self.noise_sigma,
        )

    def net_config(self) -> NetConfig:
        return NetConfig(
            variant=self.variant,
            input_dim=self.feature_dim,
            n_stages=len(self.stage_labels),
            tau=self.tau,
            trunk_sizes=self.trunk_sizes,
            head_hidden=self.head_hidden,
        )

    def train_config(self, seed: int | None = None) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            patience=self.patience,
            seed=self.seed if seed is None else seed,
            output_weights=self.output_weights,
        )


_PARSERS = {
    "seed": int,
    "videos": int,
    "frames": int,
    "stage_labels": _parse_tuple(str),
    "duration_means": _parse_tuple(float),
    "duration_dispersions": _parse_tuple(float),
    "skip_probs": _parse_tuple(float),
    "feature_dim": int,
    "signal_amplitude": float,
    "noise_sigma": float,
    "split_fractions": _parse_tuple(float),
    "variant": Variant,
    "tau": int,
    "trunk_sizes": _parse_tuple(int),
    "head_hidden": int,
    "output_weights": _parse_optional_floats,
    "learning_rate": float,
    "batch_size": int,
    "max_epochs": int,
    "patience": int,
    "rule": AggregationRule,
    "dp_loss": LossKind,
    "repeats": int,
    "jobs": int,
}


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse a flat ``key = value`` config, rejecting unknown keys."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value.strip())
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    try:
        return ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def render_config_text(config: ExperimentConfig) -> str:
    """Serialize a config in a fixed key order (stable for hashing)."""
    lines = []
    for field in dataclasses.fields(ExperimentConfig):
        value = getattr(config, field.name)
        if value is None:
            rendered = ""
        elif isinstance(value, tuple):
            rendered = _render_tuple(value)
        elif isinstance(value, Variant | AggregationRule | LossKind):
            rendered = value.value
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{field.name} = {rendered}")
    return "\n".join(lines) + "\n"


def config_hash(config: ExperimentConfig) -> str:
    """Short stable digest of the resolved config."""
    return hashlib.sha256(render_config_text(config).encode()).hexdigest()[:12]


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())

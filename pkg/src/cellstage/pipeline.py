"""End-to-end experiment stages and their orchestration.

Each stage is a plain function over an output directory: simulate writes
a dataset, train writes parameter files and a loss log, predict writes
per-video probability files (after ensembling, for multi-output
variants), decode writes monotone label files plus the pre-decode argmax
labels, and evaluate writes a metrics report. ``run_pipeline`` chains
them over one or more repeat seeds and aggregates the reports.

Per-video work (simulate, predict, decode) can fan out to a process pool;
results depend only on derived seeds, so the worker count never changes
any output byte.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .config import ExperimentConfig, config_hash, render_config_text
from .decoder import LossKind, decode
from .ensemble import AggregationRule, aggregate
from .errors import ConfigError, MissingVideoError, PipelineStageError
from .metrics import accuracy, confusion, rmse
from .net import NetParams, PredictionGrid, predict_video, train
from .seeds import STREAM_FEATURES, STREAM_STAGE_LABELS, derived_rng
from .simulate import SimVideo, Splits, emit_features, sample_stage_sequence, split_dataset
from .stages import argmax_sequence

SPLIT_PARTS = ("train", "validation", "test")


def _map_jobs(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def write_resolved_config(config: ExperimentConfig, out_dir: Path) -> None:
    io.atomic_write_text(out_dir / "resolved_config.txt", render_config_text(config))


# -- simulate -----------------------------------------------------------------


def _simulate_one(task) -> str:
    config, index, out_dir = task
    labels = sample_stage_sequence(
        derived_rng(config.seed, STREAM_STAGE_LABELS, index),
        config.duration_model(),
        config.frames,
    )
    features = emit_features(
        derived_rng(config.seed, STREAM_FEATURES, index), labels, config.emission_model()
    )
    video = SimVideo(video_id=f"{index + 1:04d}", labels=labels, features=features)
    io.write_video_csv(Path(out_dir) / f"video_{video.video_id}.csv", video)
    return video.video_id


def run_simulate(config: ExperimentConfig, out_dir, jobs: int = 1) -> Path:
    """Write ``video_<id>.csv`` per video plus ``split.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(config, i, str(out_dir)) for i in range(config.videos)]
    ids = _map_jobs(_simulate_one, tasks, jobs)
    parts = split_dataset(sorted(ids), config.split_fractions, config.seed)
    assignment = {
        vid: part_name for part_name, part in zip(SPLIT_PARTS, parts) for vid in part
    }
    io.write_split_csv(out_dir / "split.csv", assignment)
    write_resolved_config(config, out_dir)
    return out_dir


def load_dataset(dataset_dir) -> tuple[dict[str, SimVideo], dict[str, str]]:
    dataset_dir = Path(dataset_dir)
    videos = {}
    for path in sorted(dataset_dir.glob("video_*.csv")):
        video = io.read_video_csv(path)
        videos[video.video_id] = video
    if not videos:
        raise ConfigError(f"no video_*.csv files under {dataset_dir}")
    assignment = io.read_split_csv(dataset_dir / "split.csv")
    return videos, assignment


def load_splits(dataset_dir) -> Splits:
    videos, assignment = load_dataset(dataset_dir)
    parts = {name: [] for name in SPLIT_PARTS}
    for vid in sorted(videos):
        parts[assignment[vid]].append(videos[vid])
    return Splits(parts["train"], parts["validation"], parts["test"])


# -- train ---------------------------------------------------------------------


def run_train(config: ExperimentConfig, dataset_dir, out_dir) -> Path:
    """Train on the dataset's train/validation parts; persist both phases.

    Writes ``params_phase1.csv`` (the one_to_one baseline), for multi-task
    variants ``params_phase2.csv`` referencing the phase-1 file digest,
    and ``train_log.csv`` with one row per epoch.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    splits = load_splits(dataset_dir)
    digest = config_hash(config)

    started = time.perf_counter()
    result = train(splits, config.net_config(), config.train_config())
    elapsed = time.perf_counter() - started
    print(f"trained {config.variant.value} (tau={config.tau}) in {elapsed:.2f}s")

    phase1_digest = io.write_params(
        out_dir / "params_phase1.csv", result.phase1_params, phase=1, config_digest=digest
    )
    final = out_dir / "params_phase1.csv"
    if config.variant.value != "one_to_one":
        io.write_params(
            out_dir / "params_phase2.csv",
            result.params,
            phase=2,
            config_digest=digest,
            parent_digest=phase1_digest,
        )
        final = out_dir / "params_phase2.csv"
    rows = [
        [e.phase, e.epoch, io.fmt_prob(e.train_loss), io.fmt_prob(e.val_loss)]
        for e in result.history
    ]
    io.write_csv(out_dir / "train_log.csv", ["phase", "epoch", "train_loss", "val_loss"], rows)
    write_resolved_config(config, out_dir)
    return final


# -- predict --------------------------------------------------------------------


def _predict_one(task) -> str:
    params, video, rule, out_path = task
    predicted = predict_video(params, video)
    if isinstance(predicted, PredictionGrid):
        probs = aggregate(predicted, rule)
    else:
        probs = predicted
    io.write_probs_csv(out_path, probs)
    return video.video_id


def run_predict(
    config: ExperimentConfig,
    params_path,
    dataset_dir,
    out_dir,
    rule: AggregationRule | None = None,
    split: str = "test",
    jobs: int = 1,
) -> Path:
    """Write ``probs_<id>.csv`` for every video of the chosen split part."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rule = AggregationRule(rule if rule is not None else config.rule)
    params, _ = io.read_params(params_path)
    videos, assignment = load_dataset(dataset_dir)
    if split == "all":
        chosen = sorted(videos)
    elif split in SPLIT_PARTS:
        chosen = sorted(v for v, part in assignment.items() if part == split)
    else:
        raise ConfigError(f"unknown split {split!r}")
    tasks = [
        (params, videos[vid], rule, str(out_dir / f"probs_{vid}.csv")) for vid in chosen
    ]
    _map_jobs(_predict_one, tasks, jobs)
    write_resolved_config(config, out_dir)
    return out_dir


# -- decode ----------------------------------------------------------------------


def _decode_one(task) -> str:
    probs_path, out_dir, kind = task
    vid = Path(probs_path).stem.removeprefix("probs_")
    probs = io.read_probs_csv(probs_path)
    io.write_labels_csv(Path(out_dir) / f"argmax_{vid}.csv", argmax_sequence(probs))
    result = decode(probs, kind)
    io.write_labels_csv(Path(out_dir) / f"decoded_{vid}.csv", result.sequence)
    return vid


def run_decode(probs_dir, out_dir, kind: LossKind, jobs: int = 1) -> Path:
    """Decode every ``probs_*.csv``; also emit the pre-decode argmax labels."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    kind = LossKind(kind)
    paths = sorted(Path(probs_dir).glob("probs_*.csv"))
    if not paths:
        raise ConfigError(f"no probs_*.csv files under {probs_dir}")
    tasks = [(str(p), str(out_dir), kind) for p in paths]
    _map_jobs(_decode_one, tasks, jobs)
    return out_dir


# -- evaluate --------------------------------------------------------------------


def evaluate_predictions(preds_dir, dataset_dir, n_stages: int) -> list[list]:
    """Metric rows for every prediction kind found under ``preds_dir``."""
    preds_dir = Path(preds_dir)
    dataset_dir = Path(dataset_dir)
    rows = []
    for kind in ("argmax", "decoded"):
        paths = sorted(preds_dir.glob(f"{kind}_*.csv"))
        if not paths:
            continue
        pred_seqs, true_seqs = [], []
        for path in paths:
            vid = path.stem.removeprefix(f"{kind}_")
            truth_path = dataset_dir / f"video_{vid}.csv"
            if not truth_path.exists():
                raise MissingVideoError(f"no ground-truth video for prediction {path.name}")
            pred_seqs.append(io.read_labels_csv(path))
            true_seqs.append(io.read_video_csv(truth_path).labels)
        rows.append([kind, "accuracy", "", "", io.fmt_prob(accuracy(pred_seqs, true_seqs))])
        rows.append([kind, "rmse", "", "", io.fmt_prob(rmse(pred_seqs, true_seqs))])
        counts = confusion(pred_seqs, true_seqs, n_stages).counts
        for i in range(n_stages):
            for j in range(n_stages):
                rows.append([kind, "confusion", i + 1, j + 1, int(counts[i, j])])
    if not rows:
        raise ConfigError(f"no argmax_*/decoded_* files under {preds_dir}")
    return rows


def _print_report_summary(rows) -> None:
    print(f"{'kind':<10}{'accuracy':>10}{'rmse':>10}")
    for kind in ("argmax", "decoded"):
        values = {r[1]: r[4] for r in rows if r[0] == kind and r[1] in ("accuracy", "rmse")}
        if values:
            print(f"{kind:<10}{float(values['accuracy']):>10.4f}{float(values['rmse']):>10.4f}")


def run_evaluate(preds_dir, dataset_dir, out_dir, n_stages: int) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = evaluate_predictions(preds_dir, dataset_dir, n_stages)
    report = out_dir / "report.csv"
    io.write_report_csv(report, rows)
    _print_report_summary(rows)
    return report


# -- full pipeline -----------------------------------------------------------------


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise PipelineStageError(f"stage '{name}' failed ({type(exc).__name__}): {exc}") from exc


def run_pipeline(config: ExperimentConfig, out_dir, jobs: int = 1) -> Path:
    """Simulate, train, predict, decode and evaluate over ``repeats`` seeds.

    Repeat ``r`` runs under master seed ``config.seed + r`` in its own
    ``seed_<r>`` directory; ``aggregate.csv`` reports the mean and
    standard deviation of each metric across repeats.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_resolved_config(config, out_dir)
    n_stages = len(config.stage_labels)
    per_seed = []
    for r in range(config.repeats):
        seed_cfg = replace(config, seed=config.seed + r)
        seed_dir = out_dir / f"seed_{r:03d}"
        dataset = _stage("simulate", run_simulate, seed_cfg, seed_dir / "dataset", jobs)
        params = _stage("train", run_train, seed_cfg, dataset, seed_dir)
        probs = _stage(
            "predict", run_predict, seed_cfg, params, dataset, seed_dir / "probs", jobs=jobs
        )
        decoded = _stage("decode", run_decode, probs, seed_dir / "decoded", config.dp_loss, jobs)
        _stage("evaluate", run_evaluate, decoded, dataset, seed_dir, n_stages)
        rows = io.read_report_csv(seed_dir / "report.csv")
        per_seed.append(
            {(r_[0], r_[1]): float(r_[4]) for r_ in rows if r_[1] in ("accuracy", "rmse")}
        )

    agg_rows = []
    for kind in ("argmax", "decoded"):
        for metric in ("accuracy", "rmse"):
            values = np.array([seed[(kind, metric)] for seed in per_seed])
            agg_rows.append([kind, metric, io.fmt_prob(values.mean()), io.fmt_prob(values.std())])
    io.write_csv(out_dir / "aggregate.csv", ["kind", "metric", "mean", "std"], agg_rows)
    print(f"{'kind':<10}{'metric':<10}{'mean':>12}{'std':>12}")
    for kind, metric, mean, std in agg_rows:
        print(f"{kind:<10}{metric:<10}{float(mean):>12.4f}{float(std):>12.4f}")
    return out_dir

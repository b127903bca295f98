"""File formats: CSV datasets, probability files, labels, params, reports.

All files are UTF-8 text with LF line endings and a header row, written
atomically (temp file then rename) so parallel workers never expose a
half-written file. Frames and stage labels are 1-based in every format.
Probabilities are printed with 9 significant digits; other reals use
``repr`` and therefore round-trip exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import os
from pathlib import Path

import numpy as np

from .errors import ConfigError, ShapeMismatchError
from .net import NetConfig, NetParams, Variant
from .simulate import SimVideo

PARAMS_FORMAT = "cellstage-params/1"


def fmt_prob(x: float) -> str:
    return format(float(x), ".9g")


def fmt_exact(x: float) -> str:
    return repr(float(x))


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def write_csv(path, header, rows) -> None:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write_text(path, buf.getvalue())


def _read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, list(reader)


# -- datasets ---------------------------------------------------------------


def write_video_csv(path, video: SimVideo) -> None:
    dim = video.features.shape[1]
    header = ["frame", "label"] + [f"f{j + 1}" for j in range(dim)]
    rows = [
        [n + 1, int(video.labels[n])] + [fmt_exact(v) for v in video.features[n]]
        for n in range(video.n_frames)
    ]
    write_csv(path, header, rows)


def read_video_csv(path) -> SimVideo:
    header, rows = _read_csv(path)
    if header[:2] != ["frame", "label"]:
        raise ConfigError(f"{path}: expected columns frame,label,f1.., got {header}")
    labels = np.array([int(r[1]) for r in rows])
    features = np.array([[float(v) for v in r[2:]] for r in rows])
    video_id = Path(path).stem.removeprefix("video_")
    return SimVideo(video_id=video_id, labels=labels, features=features)


def write_split_csv(path, assignment: dict[str, str]) -> None:
    rows = [[vid, part] for vid, part in sorted(assignment.items())]
    write_csv(path, ["video_id", "part"], rows)


def read_split_csv(path) -> dict[str, str]:
    _, rows = _read_csv(path)
    return {vid: part for vid, part in rows}


# -- probabilities and labels ------------------------------------------------


def write_probs_csv(path, probs: np.ndarray) -> None:
    probs = np.asarray(probs, dtype=float)
    header = ["frame"] + [f"p{j + 1}" for j in range(probs.shape[1])]
    rows = [[n + 1] + [fmt_prob(v) for v in probs[n]] for n in range(probs.shape[0])]
    write_csv(path, header, rows)


def read_probs_csv(path) -> np.ndarray:
    _, rows = _read_csv(path)
    return np.array([[float(v) for v in r[1:]] for r in rows])


def write_labels_csv(path, labels) -> None:
    rows = [[n + 1, int(v)] for n, v in enumerate(labels)]
    write_csv(path, ["frame", "label"], rows)


def read_labels_csv(path) -> np.ndarray:
    _, rows = _read_csv(path)
    return np.array([int(r[1]) for r in rows])


# -- network parameters -------------------------------------------------------

_VALUES_PER_LINE = 8


def render_params(
    params: NetParams,
    *,
    phase: int,
    config_digest: str,
    parent_digest: str | None = None,
) -> str:
    """Versioned flat text dump; values use ``repr`` and round-trip exactly."""
    cfg = params.config
    lines = [
        f"format = {PARAMS_FORMAT}",
        f"phase = {phase}",
        f"variant = {cfg.variant.value}",
        f"tau = {cfg.tau}",
        f"input_dim = {cfg.input_dim}",
        f"n_stages = {cfg.n_stages}",
        f"trunk_sizes = {','.join(str(s) for s in cfg.trunk_sizes)}",
        f"head_hidden = {cfg.head_hidden}",
        f"config_hash = {config_digest}",
        f"parent_params_hash = {parent_digest or '-'}",
        "",
    ]
    named = [(f"trunk_w{i}", w) for i, w in enumerate(params.trunk_w)]
    named += [(f"trunk_b{i}", b) for i, b in enumerate(params.trunk_b)]
    named += [
        ("head_w1", params.head_w1),
        ("head_b1", params.head_b1),
        ("head_w2", params.head_w2),
        ("head_b2", params.head_b2),
    ]
    for name, arr in named:
        shape = "x".join(str(s) for s in arr.shape)
        lines.append(f"[{name}] {shape}")
        flat = arr.ravel()
        for start in range(0, flat.size, _VALUES_PER_LINE):
            lines.append(",".join(fmt_exact(v) for v in flat[start : start + _VALUES_PER_LINE]))
    return "\n".join(lines) + "\n"


def parse_params(text: str) -> tuple[NetParams, dict[str, str]]:
    lines = text.splitlines()
    meta: dict[str, str] = {}
    i = 0
    while i < len(lines) and lines[i].strip():
        key, _, value = lines[i].partition("=")
        meta[key.strip()] = value.strip()
        i += 1
    if meta.get("format") != PARAMS_FORMAT:
        raise ConfigError(f"unsupported params format {meta.get('format')!r}")
    config = NetConfig(
        variant=Variant(meta["variant"]),
        input_dim=int(meta["input_dim"]),
        n_stages=int(meta["n_stages"]),
        tau=int(meta["tau"]),
        trunk_sizes=tuple(int(s) for s in meta["trunk_sizes"].split(",")),
        head_hidden=int(meta["head_hidden"]),
    )
    arrays: dict[str, np.ndarray] = {}
    name, shape, values = None, None, []

    def flush():
        if name is None:
            return
        arr = np.array(values, dtype=float).reshape(shape)
        arrays[name] = arr

    for line in lines[i:]:
        line = line.strip()
        if not line:
            continue
        if line.startswith("["):
            flush()
            head, _, shape_text = line.partition("]")
            name = head[1:].strip()
            shape = tuple(int(s) for s in shape_text.strip().split("x"))
            values = []
        else:
            values.extend(float(v) for v in line.split(","))
    flush()

    n_layers = len(config.trunk_sizes)
    try:
        params = NetParams(
            config=config,
            trunk_w=tuple(arrays[f"trunk_w{i}"] for i in range(n_layers)),
            trunk_b=tuple(arrays[f"trunk_b{i}"] for i in range(n_layers)),
            head_w1=arrays["head_w1"],
            head_b1=arrays["head_b1"],
            head_w2=arrays["head_w2"],
            head_b2=arrays["head_b2"],
        )
    except KeyError as exc:
        raise ConfigError(f"params file is missing array {exc}") from exc
    except ShapeMismatchError as exc:
        raise ConfigError(f"params file arrays inconsistent: {exc}") from exc
    return params, meta


def write_params(path, params, *, phase, config_digest, parent_digest=None) -> str:
    """Write a params file and return the digest of its content."""
    text = render_params(
        params, phase=phase, config_digest=config_digest, parent_digest=parent_digest
    )
    atomic_write_text(path, text)
    return text_digest(text)


def read_params(path) -> tuple[NetParams, dict[str, str]]:
    return parse_params(Path(path).read_text(encoding="utf-8"))


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


# -- evaluation reports --------------------------------------------------------

REPORT_HEADER = ["kind", "metric", "true_stage", "pred_stage", "value"]


def write_report_csv(path, rows) -> None:
    write_csv(path, REPORT_HEADER, rows)


def read_report_csv(path) -> list[list[str]]:
    header, rows = _read_csv(path)
    if header != REPORT_HEADER:
        raise ConfigError(f"{path}: unexpected report header {header}")
    return rows

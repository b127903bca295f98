"""Command-line entry point.

Subcommands mirror the pipeline stages::

    cellstage simulate  --out DIR [--config FILE] [--seed N] [--jobs N]
    cellstage train     --dataset DIR --out DIR [...]
    cellstage predict   --params FILE --dataset DIR --out DIR [--rule R] [--split S]
    cellstage decode    --probs DIR --out DIR [--loss {ll,em}]
    cellstage evaluate  --preds DIR --dataset DIR --out DIR
    cellstage pipeline  --out DIR [--repeats R] [...]

Options beat the config file, which beats the built-in defaults. Errors
exit nonzero after printing a single ``ERROR:<code>: message`` line.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ExperimentConfig, load_config
from .decoder import LossKind
from .ensemble import AggregationRule
from .errors import CellstageError
from .net import Variant
from .pipeline import (
    run_decode,
    run_evaluate,
    run_pipeline,
    run_predict,
    run_simulate,
    run_train,
)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config file (key = value lines)")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--seed", type=int, help="override the master seed")
    common.add_argument("--jobs", type=int, help="parallel workers for per-video work")
    common.add_argument("--variant", choices=[v.value for v in Variant], help="override the framework variant")
    common.add_argument("--tau", type=int, help="override the context half-width")
    common.add_argument(
        "--rule",
        choices=[r.value for r in AggregationRule],
        help="override the ensemble aggregation rule",
    )
    common.add_argument(
        "--loss", choices=[k.value for k in LossKind], help="override the decoder per-frame loss"
    )
    common.add_argument("--repeats", type=int, help="override the number of pipeline repeats")

    parser = argparse.ArgumentParser(
        prog="cellstage",
        description="Synthetic time-lapse stage classification with monotone decoding.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="generate a synthetic dataset")
    p = sub.add_parser("train", parents=[common], help="train the configured variant")
    p.add_argument("--dataset", required=True, help="dataset directory from `simulate`")
    p = sub.add_parser("predict", parents=[common], help="write per-video probability files")
    p.add_argument("--params", required=True, help="parameter file from `train`")
    p.add_argument("--dataset", required=True)
    p.add_argument("--split", default="test", choices=["train", "validation", "test", "all"])
    p = sub.add_parser("decode", parents=[common], help="monotone-decode probability files")
    p.add_argument("--probs", required=True, help="directory of probs_*.csv files")
    p = sub.add_parser("evaluate", parents=[common], help="score predictions against ground truth")
    p.add_argument("--preds", required=True, help="directory of decoded_*/argmax_* files")
    p.add_argument("--dataset", required=True)
    sub.add_parser("pipeline", parents=[common], help="run every stage over repeat seeds")
    return parser


def _resolve_config(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for field in ("seed", "jobs", "variant", "tau", "rule", "repeats"):
        value = getattr(args, field)
        if value is not None:
            overrides[field] = value
    if args.loss is not None:
        overrides["dp_loss"] = args.loss
    if overrides:
        config = replace(config, **overrides)
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        if args.command == "simulate":
            run_simulate(config, args.out, config.jobs)
        elif args.command == "train":
            run_train(config, args.dataset, args.out)
        elif args.command == "predict":
            run_predict(
                config, args.params, args.dataset, args.out, split=args.split, jobs=config.jobs
            )
        elif args.command == "decode":
            run_decode(args.probs, args.out, config.dp_loss, config.jobs)
        elif args.command == "evaluate":
            run_evaluate(args.preds, args.dataset, args.out, len(config.stage_labels))
        elif args.command == "pipeline":
            run_pipeline(config, args.out, config.jobs)
    except CellstageError as exc:
        print(f"ERROR:{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ERROR:IoError: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""``neurovectors`` command line: train, evaluate, predict, inspect.

Exit codes: 0 success, 2 usage, 3 data error, 4 model error. Results go to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import model as model_io
from .core import EnergyParams, Tokenizer
from .data import SplitSpec, Task, load_csv, load_rows, split
from .errors import DataError, ModelError, TaskMismatchError
from .evaluation import evaluate
from .report import REFERENCES, render, render_eval, summary_metrics, summary_row, train_metrics
from .train import TrainConfig, train, training_summary

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MODEL = 4

REQUIRED = {
    "train": ("data", "target", "task", "model"),
    "evaluate": ("model", "data"),
    "predict": ("model", "data"),
    "inspect": ("model",),
}


def _fractions(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad split {text!r}") from None
    if len(parts) == 2:
        parts = (parts[0], 0.0, parts[1])
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("split takes TRAIN,TEST or TRAIN,VAL,TEST")
    return parts  # type: ignore[return-value]


def _override(text: str) -> tuple[str, str]:
    name, sep, kind = text.rpartition("=")
    if not sep or kind not in ("numeric", "categorical"):
        raise argparse.ArgumentTypeError("override must look like COLUMN=numeric|categorical")
    return name, kind


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neurovectors", description="Neurovector learning for tabular data.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file of option defaults; flags win")
    common.add_argument("--format", choices=("table", "machine"), default="table")
    common.add_argument("--delimiter", default=",")

    split_opts = argparse.ArgumentParser(add_help=False)
    split_opts.add_argument("--split", type=_fractions, default=(0.7, 0.0, 0.3), help="TRAIN,TEST or TRAIN,VAL,TEST")
    split_opts.add_argument("--seed", type=int, default=0, help="split seed")

    p = sub.add_parser("train", parents=[common, split_opts], help="train a model on the training split")
    p.add_argument("--data", type=Path)
    p.add_argument("--target")
    p.add_argument("--task", choices=[t.value for t in Task])
    p.add_argument("--model", type=Path, help="output model file")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--tolerance", type=float, default=0.0)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--shuffle-seed", type=int)
    p.add_argument("--fallback", choices=("auto", "error"), default="auto")
    p.add_argument("--decimals", type=int, help="round numeric cells before tokenizing")
    p.add_argument("--skip-missing", action="store_true")
    p.add_argument("--override", type=_override, action="append", default=[], metavar="COLUMN=KIND")

    p = sub.add_parser("evaluate", parents=[common, split_opts], help="score a model on the test split")
    p.add_argument("--model", type=Path)
    p.add_argument("--data", type=Path)
    p.add_argument("--task", choices=[t.value for t in Task])
    p.add_argument("--all", action="store_true", help="evaluate every row instead of the test split")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--reference", choices=sorted(REFERENCES))

    p = sub.add_parser("predict", parents=[common], help="predict each row of a CSV file")
    p.add_argument("--model", type=Path)
    p.add_argument("--data", type=Path)
    p.add_argument("--explain", action="store_true")

    p = sub.add_parser("inspect", parents=[common], help="store statistics of a model file")
    p.add_argument("--model", type=Path)
    p.add_argument("--reference", choices=sorted(REFERENCES))
    parser.set_defaults(_subparsers=dict(sub.choices))
    return parser


def parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        try:
            cfg = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            parser.error("config file must hold a JSON object")
        subparser = args._subparsers[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(k for k in (key.replace("-", "_") for key in cfg) if k not in known)
        if unknown:
            parser.error(f"unknown config keys: {unknown}")
        subparser.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
        args = parser.parse_args(argv)
        if isinstance(args.split, str):
            args.split = _fractions(args.split)
        for key in ("data", "model"):
            if isinstance(getattr(args, key, None), str):
                setattr(args, key, Path(getattr(args, key)))
    missing = [f"--{name}" for name in REQUIRED[args.command] if getattr(args, name, None) is None]
    if missing:
        parser.error(f"{args.command}: missing required {', '.join(missing)}")
    try:
        args.split_spec = SplitSpec(*args.split, seed=args.seed) if hasattr(args, "split") else None
        if args.command == "train":
            args.energy = EnergyParams(args.alpha, args.tolerance)
            if args.epochs < 1:
                raise ValueError("--epochs must be >= 1")
        if getattr(args, "workers", 1) < 1:
            raise ValueError("--workers must be >= 1")
    except (DataError, ValueError) as exc:
        parser.error(str(exc))
    return args


def cmd_train(args: argparse.Namespace) -> int:
    dataset = load_csv(args.data, args.target, args.task, dict(args.override), args.delimiter)
    train_part, _, _ = split(dataset, args.split_spec)
    config = TrainConfig(
        epochs=args.epochs,
        energy=args.energy,
        fallback=args.fallback,
        shuffle_seed=args.shuffle_seed,
        tokenizer=Tokenizer(decimals=args.decimals, skip_missing=args.skip_missing),
    )
    store, report = train(train_part, config)
    trained = model_io.TrainedModel(store, dataset.schema, args.energy, report.fallback)
    checksum = model_io.save(trained, args.model)
    metrics = train_metrics(report, dataset.schema.d)
    metrics["checksum"] = checksum
    out = render(metrics, args.format, "Training")
    if args.format == "table":
        out += "neurovectors | energy | success | max_energy\n" + summary_row(report.summary) + "\n"
    sys.stdout.write(out)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    trained = model_io.load(args.model)
    if args.task is not None and Task(args.task) is not trained.store.task:
        raise TaskMismatchError(f"model is {trained.store.task.value}, --task is {args.task}")
    dataset = load_rows(args.data, trained.schema, args.delimiter)
    if not args.all:
        _, _, dataset = split(dataset, args.split_spec)
        if len(dataset) == 0:
            raise DataError("test split is empty; pass --all or a non-zero test fraction")
    report = evaluate(trained.store, dataset, trained.params, trained.fallback, args.workers)
    ref = REFERENCES.get(args.reference) if args.reference else None
    sys.stdout.write(render_eval(report, args.format, ref))
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    trained = model_io.load(args.model)
    store = trained.store
    dataset = load_rows(args.data, trained.schema, args.delimiter, require_target=False)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    header = ["row", "prediction"]
    if args.explain:
        header += ["nv_id", "match_count", "energy", "source_row", "fallback"]
    writer.writerow(header)
    for i in range(len(dataset)):
        tokens = store.tokenizer.tokenize(dataset.feature_values(i), trained.schema, row_number=dataset.row_ids[i])
        out = store.predict(tokens, trained.params, trained.fallback)
        predicted = repr(out.predicted) if isinstance(out.predicted, float) else out.predicted
        row = [dataset.row_ids[i], predicted]
        if args.explain:
            if out.used_fallback:
                row += ["", 0, "", "", "fallback"]
            else:
                src = store.records[out.selected_id].source_row  # type: ignore[index]
                row += [out.selected_id, out.match_count, repr(out.selected_energy), "" if src is None else src, ""]
        writer.writerow(row)
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    trained = model_io.load(args.model)
    summary = training_summary(trained.store, trained.params)
    metrics: dict[str, object] = {"task": trained.store.task.value, "features": trained.schema.d}
    metrics.update(summary_metrics(summary))
    out = render(metrics, args.format, "Store")
    if args.format == "table":
        out += "neurovectors | energy | success | max_energy\n" + summary_row(summary) + "\n"
        if args.reference:
            ref = REFERENCES[args.reference]
            out += f"published: {ref.neurovectors} | {ref.energy} | {ref.success} | {ref.max_energy}\n"
    sys.stdout.write(out)
    return 0


COMMANDS = {"train": cmd_train, "evaluate": cmd_evaluate, "predict": cmd_predict, "inspect": cmd_inspect}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DataError as exc:
        print(f"neurovectors: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ModelError as exc:
        print(f"neurovectors: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as exc:
        print(f"neurovectors: I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

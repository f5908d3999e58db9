"""Command line entry point: train, predict, evaluate, tic, features."""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from cif.features import FEATURE_NAMES


def _config(args):
    from cif.forest import CIFConfig

    return CIFConfig(
        num_trees=args.trees,
        intervals_per_tree=args.intervals,
        atts_per_tree=25 if args.no_subsample else args.atts,
        contract_minutes=args.contract_minutes,
        bagging=args.bagging,
        seed=args.seed,
        mode=args.mode,
        catch22_only=args.catch22_only,
    )


def _add_forest_options(p):
    p.add_argument("--trees", type=int, default=None, help="number of trees (default 500, 250 for cif-fast)")
    p.add_argument("--intervals", type=int, default=None, help="intervals per tree (default from the mode)")
    p.add_argument("--atts", type=int, default=8, help="features sampled per tree (default 8)")
    p.add_argument("--no-subsample", action="store_true", help="use every feature in every tree (atts=25)")
    p.add_argument("--mode", choices=["cif", "cif-fast", "tsf", "hybrid"], default="cif")
    p.add_argument("--catch22-only", action="store_true", help="restrict the feature pool to the 22 catch22 features")
    p.add_argument("--contract-minutes", type=float, default=None)
    p.add_argument("--bagging", action="store_true", help="report an out-of-bag accuracy estimate")
    p.add_argument("--seed", type=int, default=0)


def _add_common(p):
    p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--pad-zeros", action="store_true", help="right-pad unequal length series with zeros")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cif", description="Canonical interval forest time series classifier")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("train", help="fit a forest on a .ts file and save it")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="model file (JSON)")
    p.add_argument("--tic-out", default=None, help="also write temporal importance curves to this CSV")
    _add_forest_options(p)
    _add_common(p)

    p = sub.add_parser("predict", help="predict a .ts file with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="prediction CSV")
    _add_common(p)

    p = sub.add_parser("evaluate", help="seeded resampling experiment on a train/test pair")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--folds", type=int, default=30)
    p.add_argument("--out", required=True, help="results CSV (rows are merged into an existing file)")
    p.add_argument("--classifier", choices=["forest", "1nn"], default="forest")
    _add_forest_options(p)
    _add_common(p)

    p = sub.add_parser("tic", help="temporal importance curves of a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--top", type=int, default=None, help="only write rows for the top v features")

    sub.add_parser("features", help="list the 25 features")
    return parser


def _train(args) -> int:
    from cif.forest import fit, oob_estimate, predict, save_model
    from cif.tsdata import parse_ts_file

    data = parse_ts_file(args.data, pad_zeros=args.pad_zeros)
    config = _config(args)
    if config.bagging:
        estimate, model = oob_estimate(data, config, n_jobs=args.threads)
        print(f"oob_accuracy: {estimate:.6f}")
    else:
        model = fit(data, config, n_jobs=args.threads)
    train_acc = float(np.mean(predict(model, data, n_jobs=args.threads) == data.y()))
    print(f"trees: {len(model.trees)}")
    print(f"train_time_s: {model.train_time_s:.3f}")
    print(f"train_accuracy: {train_acc:.6f}")
    save_model(model, args.out)
    if args.tic_out:
        from cif.interpret import temporal_importance, write_tic_csv

        write_tic_csv(temporal_importance(model), args.tic_out)
    return 0


def _predict(args) -> int:
    from cif.forest import load_model, predict_proba
    from cif.tsdata import parse_ts_file, relabel

    model = load_model(args.model)
    data = parse_ts_file(args.data, pad_zeros=args.pad_zeros)
    if data.length < model.length and args.pad_zeros:
        from cif.tsdata import TimeSeriesDataset, TimeSeriesInstance

        pad = model.length - data.length
        data = TimeSeriesDataset(
            tuple(TimeSeriesInstance(np.pad(i.values, ((0, 0), (0, pad))), i.label) for i in data.instances),
            data.class_labels,
            data.name,
        )
    proba = predict_proba(model, data, n_jobs=args.threads)
    pred = np.argmax(proba, axis=1)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "predicted_label", *(f"p({c})" for c in model.class_labels)])
        for i, (k, row) in enumerate(zip(pred, proba)):
            w.writerow([i, model.class_labels[k], *map(repr, row.tolist())])
    labelled = all(i.label is not None for i in data.instances) and data.class_labels
    if labelled and set(data.class_labels) <= set(model.class_labels):
        truth = relabel(data, model.class_labels).y()
        print(f"accuracy: {np.mean(pred == truth):.6f}")
    print(f"predictions: {len(pred)}")
    return 0


def _evaluate(args) -> int:
    from cif.evaluation import run_experiment

    config = "1nn" if args.classifier == "1nn" else _config(args)
    results = run_experiment(
        args.train, args.test, config, folds=args.folds, out_csv=args.out, n_jobs=args.threads, pad_zeros=args.pad_zeros
    )
    for r in results:
        print(f"{r.dataset} fold {r.fold} {r.classifier}: accuracy {r.accuracy:.4f}")
    print(f"mean accuracy: {np.mean([r.accuracy for r in results]):.6f}")
    return 0


def _tic(args) -> int:
    from cif.forest import load_model
    from cif.interpret import temporal_importance, top_features, write_tic_csv

    curves = temporal_importance(load_model(args.model))
    write_tic_csv(curves, args.out, top=args.top)
    for f in top_features(curves, args.top or 3):
        print(f"{f.index}\t{f.name}\t{curves.curves[:, f.index].max():.6f}")
    return 0


def _features(args) -> int:
    for i, name in enumerate(FEATURE_NAMES):
        print(f"{i}\t{name}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"train": _train, "predict": _predict, "evaluate": _evaluate, "tic": _tic, "features": _features}
    try:
        return handler[args.verb](args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line harness.

::

    hera corrupt --in F --out F --p R --r N [--eps R] --seed N
    hera train   --data F --out F [hyperparameter flags]
    hera predict --train F --model F --data F [--out F]
    hera eval    --data F --folds N --seed N [--out F] [hyperparameter flags]
                 [--baseline plknn] [--standardize] [--grid-alpha LIST]
    hera sweep   --data F --protocol {r1,r2,r3,eps} --grid 0.1:0.7:0.1
                 --folds N --seed N --out F [--records F]
    hera convert --csv FEATURES LABELS [--truth-csv F] --out F

``--csv FEATURES LABELS`` may replace ``--data`` anywhere a dataset is read.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

``train`` writes the iteration log to ``<model>.log``: a header line then
one tab-separated line per outer iteration with the columns
``iteration objective residual_y_pe residual_p_j lambda rho``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .core import DataError, Hyperparams, NumericalError
from .data import (CorruptionSpec, corrupt, load_csv, load_dataset,
                   save_dataset, standardize)
from .harness import cross_validate, format_sweep, parse_grid, sweep
from .modelfile import load_model, save_model
from .predict import predict_batch
from .solver import fit

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4

HP_FLAGS = {
    "alpha": float, "beta": float, "mu": float, "nu": float,
    "iter_max": int, "loss_tol": float, "inner_steps": int,
    "lambda0": float, "rho0": float, "tau": float, "k_neighbors": int,
}


def _add_data(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--data", help="dataset in the native PLL text format")
    g.add_argument("--csv", nargs=2, metavar=("FEATURES", "LABELS"),
                   help="row-per-instance features CSV and candidate-list CSV")
    p.add_argument("--truth-csv", help="true labels CSV (with --csv)")


def _add_hp(p):
    for name, typ in HP_FLAGS.items():
        flag = "--k" if name == "k_neighbors" else "--" + name.replace("_", "-")
        p.add_argument(flag, dest=name, type=typ, default=None)


def _hp(args) -> Hyperparams:
    given = {k: getattr(args, k) for k in HP_FLAGS if getattr(args, k, None) is not None}
    try:
        return Hyperparams(**given)
    except ValueError as exc:
        raise _Usage(str(exc)) from None


class _Usage(Exception):
    pass


def _read(args):
    if args.data is not None:
        return load_dataset(args.data)
    return load_csv(args.csv[0], args.csv[1], args.truth_csv)


def _name(args):
    return os.path.basename(args.data) if args.data else os.path.basename(args.csv[0])


def _timestamp():
    # SOURCE_DATE_EPOCH pins the timestamp for reproducible records
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = time.gmtime(int(epoch)) if epoch else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", t)


def _append_record(path, record):
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def cmd_corrupt(args):
    ds = load_dataset(args.input)
    spec = CorruptionSpec(p=args.p, r=args.r, epsilon=args.eps, seed=args.seed)
    out = corrupt(ds, spec)
    save_dataset(out, args.out)
    sizes = out.candidates.sum(axis=0)
    print(f"n={out.n}\tq={out.q}\tcorrupted={int((sizes > 1).sum())}\t"
          f"mean_candidates={sizes.mean():.4f}")
    return 0


def cmd_train(args):
    ds = _read(args)
    hp = _hp(args)
    if args.standardize:
        ds = standardize(ds)
    with open(args.out + ".log", "w", encoding="utf-8", newline="\n") as log:
        model, state, report = fit(ds, hp, log=log)
    save_model(args.out, model, state.confidence, hp)
    last = report.feasibility_trace[-1] if report.iterations else (0.0, 0.0)
    final = report.loss_trace[-1] if report.iterations else float("nan")
    print(f"iterations={report.iterations}\tconverged={str(report.converged).lower()}\t"
          f"objective={final:.6g}\tresidual_y_pe={last[0]:.3e}\tresidual_p_j={last[1]:.3e}")
    return 0


def cmd_predict(args):
    train = load_dataset(args.train)
    model, P, hp = load_model(args.model)
    if P.shape != (train.q, train.n) or model.weights.shape != (train.d, train.q):
        raise DataError("model does not match the training dataset")
    queries = _read(args)
    if args.standardize:
        queries = standardize(queries, reference=train)
        train = standardize(train)
    pred = predict_batch(queries.features, train, model, P, min(hp.k_neighbors, train.n))
    text = "".join(f"{int(y) + 1}\n" for y in pred)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if queries.ground_truth is not None:
        print(f"accuracy={np.mean(pred == queries.ground_truth):.4f}", file=sys.stderr)
    return 0


def cmd_eval(args):
    ds = _read(args)
    hp = _hp(args)
    grid = parse_grid(args.grid_alpha) if args.grid_alpha else None
    methods = ["hera"] + ([args.baseline] if args.baseline else [])
    for method in methods:
        res = cross_validate(ds, hp, args.folds, args.seed, method, args.standardize,
                             alpha_grid=grid)
        folds = " ".join(f"{a:.4f}" for a in res.per_fold_accuracy)
        print(f"{method}\t{res.row()}\t{folds}")
        if args.out:
            _append_record(args.out, {
                "dataset": _name(args), "protocol": None, "value": None,
                "method": method, "mean": res.mean, "std": res.std,
                "folds": args.folds, "seed": args.seed, "timestamp": _timestamp(),
            })
    return 0


def cmd_sweep(args):
    ds = _read(args)
    hp = _hp(args)
    rows = sweep(ds, args.protocol, parse_grid(args.grid), hp, args.folds, args.seed,
                 args.standardize)
    table = format_sweep(args.protocol, rows)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table)
    sys.stdout.write(table)
    if args.records:
        for row in rows:
            for method, res in (("hera", row.hera), ("plknn", row.plknn)):
                _append_record(args.records, {
                    "dataset": _name(args), "protocol": args.protocol, "value": row.value,
                    "method": method, "mean": res.mean, "std": res.std,
                    "folds": args.folds, "seed": args.seed, "timestamp": _timestamp(),
                })
    return 0


def cmd_convert(args):
    ds = load_csv(args.csv[0], args.csv[1], args.truth_csv)
    save_dataset(ds, args.out)
    print(f"n={ds.n}\td={ds.d}\tq={ds.q}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hera", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corrupt", help="generate candidate sets from a labelled dataset")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("train", help="fit a model")
    _add_data(p)
    p.add_argument("--out", required=True)
    p.add_argument("--standardize", action="store_true")
    _add_hp(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict labels with a fitted model")
    p.add_argument("--train", required=True, help="dataset the model was trained on")
    p.add_argument("--model", required=True)
    _add_data(p)
    p.add_argument("--out")
    p.add_argument("--standardize", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="k-fold cross-validated accuracy")
    _add_data(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="append JSON-lines records here")
    p.add_argument("--baseline", choices=["plknn"])
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--grid-alpha", help="alpha candidates, e.g. 0.002,0.02,0.2,2")
    _add_hp(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="accuracy curve over a corruption grid")
    _add_data(p)
    p.add_argument("--protocol", choices=["r1", "r2", "r3", "eps"], required=True)
    p.add_argument("--grid", default="0.1:0.7:0.1")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--records", help="append JSON-lines records here")
    p.add_argument("--standardize", action="store_true")
    _add_hp(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("convert", help="convert CSV input to the native format")
    p.add_argument("--csv", nargs=2, metavar=("FEATURES", "LABELS"), required=True)
    p.add_argument("--truth-csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"hera: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"hera: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError) as exc:
        print(f"hera: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

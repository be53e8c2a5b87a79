"""Cross-validated evaluation, the PL-KNN baseline and corruption sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Hyperparams, KTooLarge, PartialLabelDataset
from .data import (CorruptionSpec, MissingGroundTruth, corrupt, kfold_split,
                   standardize)
from .predict import predict_batch
from .solver import fit

PROTOCOLS = {"r1": 1, "r2": 2, "r3": 3, "eps": None}


@dataclass
class EvalResult:
    per_fold_accuracy: list = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_fold_accuracy))

    @property
    def std(self) -> float:
        # population standard deviation over folds
        return float(np.std(self.per_fold_accuracy))

    def row(self) -> str:
        return f"{self.mean:.3f}±{self.std:.3f}"


def plknn_baseline(ds: PartialLabelDataset, k: int, query) -> int:
    """Majority vote over the candidate sets of the `k` nearest training instances."""
    return int(plknn_predict(ds, k, np.asarray(query, dtype=float).reshape(-1, 1))[0])


def plknn_predict(ds: PartialLabelDataset, k: int, queries) -> np.ndarray:
    if not 1 <= k <= ds.n:
        raise KTooLarge(f"k={k} must lie in 1..{ds.n}")
    queries = np.asarray(queries, dtype=float)
    out = np.empty(queries.shape[1], dtype=np.int64)
    train = ds.features.T
    for j in range(queries.shape[1]):
        d2 = ((train - queries[:, j]) ** 2).sum(axis=1)
        nbrs = np.argsort(d2, kind="stable")[:k]
        out[j] = np.argmax(ds.candidates[:, nbrs].sum(axis=1))
    return out


def accuracy(predicted, truth) -> float:
    return float(np.mean(np.asarray(predicted) == np.asarray(truth)))


def _prepare(train, test, standardize_features):
    if standardize_features:
        return standardize(train), standardize(test, reference=train)
    return train, test


def hera_fold(train: PartialLabelDataset, test: PartialLabelDataset, hp: Hyperparams):
    """Fit on `train` and return predicted labels for `test`."""
    model, state, _ = fit(train, hp)
    return predict_batch(test.features, train, model, state.confidence, min(hp.k_neighbors, train.n))


def plknn_fold(train: PartialLabelDataset, test: PartialLabelDataset, hp: Hyperparams):
    return plknn_predict(train, min(hp.k_neighbors, train.n), test.features)


METHODS = {"hera": hera_fold, "plknn": plknn_fold}


def cross_validate(ds: PartialLabelDataset, hp: Hyperparams | None = None, folds: int = 10,
                   seed: int = 0, method: str = "hera", standardize_features: bool = False,
                   alpha_grid=None) -> EvalResult:
    """k-fold accuracy of `method`; accuracy is scored against the ground truth.

    With `alpha_grid`, HERA's alpha is chosen per outer fold by an inner
    cross-validation on that fold's training split only.
    """
    if ds.ground_truth is None:
        raise MissingGroundTruth("evaluation needs a TRUTH section")
    hp = hp or Hyperparams()
    run = METHODS[method]
    result = EvalResult()
    for train_idx, test_idx in kfold_split(ds.n, folds, seed):
        train, test = _prepare(ds.subset(train_idx), ds.subset(test_idx), standardize_features)
        fold_hp = hp
        if alpha_grid and method == "hera":
            fold_hp = select_alpha(train, hp, alpha_grid, seed=seed)
        # the training split is handed over without its ground truth
        train_blind = PartialLabelDataset(train.features, train.candidates)
        result.per_fold_accuracy.append(accuracy(run(train_blind, test, fold_hp), test.ground_truth))
    return result


def select_alpha(train: PartialLabelDataset, hp: Hyperparams, grid, seed=0, folds=3) -> Hyperparams:
    """Pick alpha by inner cross-validation scored against candidate membership.

    Inner folds only see candidate sets, so the test fold's truth never
    leaks into model selection.
    """
    best, best_score = None, -np.inf
    for alpha in grid:
        trial = hp.replace(alpha=float(alpha))
        hits = []
        for tr, te in kfold_split(train.n, min(folds, train.n), seed):
            inner_train = PartialLabelDataset(train.features[:, tr], train.candidates[:, tr])
            pred = hera_fold(inner_train, train.subset(te), trial)
            hits.append(np.mean(train.candidates[pred, te] == 1))
        score = float(np.mean(hits))
        if score > best_score:
            best, best_score = trial, score
    return best


def parse_grid(text: str):
    """``"start:stop:step"`` (inclusive) or a comma-separated list."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [float(v) for v in text.split(",") if v.strip()]


@dataclass
class SweepRow:
    value: float
    hera: EvalResult
    plknn: EvalResult


def sweep(ds: PartialLabelDataset, protocol: str, grid, hp: Hyperparams | None = None,
          folds: int = 10, seed: int = 0, standardize_features: bool = False):
    """Corrupt `ds` at every grid value and cross-validate HERA and PL-KNN.

    For ``r1``/``r2``/``r3`` the grid values are proportions ``p``; for
    ``eps`` they are coupling probabilities.
    """
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}; choose from {sorted(PROTOCOLS)}")
    rows = []
    for value in grid:
        if protocol == "eps":
            spec = CorruptionSpec(p=1.0, r=1, epsilon=value, seed=seed)
        else:
            spec = CorruptionSpec(p=value, r=PROTOCOLS[protocol], seed=seed)
        noisy = corrupt(ds, spec)
        rows.append(SweepRow(
            value,
            cross_validate(noisy, hp, folds, seed, "hera", standardize_features),
            cross_validate(noisy, hp, folds, seed, "plknn", standardize_features),
        ))
    return rows


def format_sweep(protocol: str, rows) -> str:
    head = "p" if protocol != "eps" else "epsilon"
    lines = [f"{head}\tHERA\tPL-KNN"]
    lines += [f"{r.value:g}\t{r.hera.row()}\t{r.plknn.row()}" for r in rows]
    return "\n".join(lines) + "\n"

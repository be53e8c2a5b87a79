"""Dataset files, synthetic data and the candidate-set corruption protocols.

Every random choice goes through ``numpy.random.Generator(PCG64(seed))``, so
outputs are reproducible for a given seed and numpy's PCG64 stream.

Native text format (UTF-8)::

    PLL 1
    n d q
    <n lines: d reals, one instance per line>
    <n lines: 1-indexed candidate labels, space separated>
    TRUTH                      (optional section)
    <n lines: one 1-indexed true label>
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DataError, PartialLabelDataset, validate_dataset

MAGIC = "PLL 1"


class ParseError(DataError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class IoError(DataError):
    pass


class MissingGroundTruth(DataError):
    pass


class RTooLarge(DataError):
    pass


class BadFoldCount(DataError):
    pass


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class CorruptionSpec:
    """Controls for synthetic candidate sets.

    ``p`` is the fraction of instances that receive ``r`` false candidates.
    When ``epsilon`` is set the coupling protocol runs instead: every
    instance gets exactly one false candidate, which is its class's coupling
    label with probability ``epsilon``.
    """

    p: float = 0.0
    r: int = 1
    epsilon: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DataError(f"p must lie in [0, 1], got {self.p!r}")
        if self.r < 1:
            raise DataError(f"r must be at least 1, got {self.r!r}")
        if self.epsilon is not None and not 0.0 <= self.epsilon <= 1.0:
            raise DataError(f"epsilon must lie in [0, 1], got {self.epsilon!r}")
        if self.seed < 0 or self.seed >= 2**64:
            raise DataError("seed must be an unsigned 64-bit integer")


def coupling_label(y, q):
    """Designated co-occurring label of class ``y``."""
    return (np.asarray(y) + 1) % q


def corrupt(ds: PartialLabelDataset, spec: CorruptionSpec) -> PartialLabelDataset:
    """Replace the candidate sets of a fully labelled dataset with noisy ones."""
    if ds.ground_truth is None:
        raise MissingGroundTruth("corruption needs ground-truth labels")
    validate_dataset(ds)
    n, q = ds.n, ds.q
    truth = ds.ground_truth
    rng = make_rng(spec.seed)
    Y = np.zeros((q, n), dtype=np.uint8)
    Y[truth, np.arange(n)] = 1

    if spec.epsilon is not None:
        if q < 3:
            raise RTooLarge("the coupling protocol needs at least three labels")
        couple = coupling_label(truth, q)
        use_couple = rng.random(n) < spec.epsilon
        # uniform over the q - 2 labels that are neither the truth nor the coupling label
        offset = rng.integers(0, q - 2, size=n)
        other = (truth + 2 + offset) % q
        Y[np.where(use_couple, couple, other), np.arange(n)] = 1
    else:
        if spec.r > q - 1:
            raise RTooLarge(f"cannot add {spec.r} false labels with only {q} labels")
        count = round(spec.p * n)
        chosen = np.sort(rng.choice(n, size=count, replace=False))
        for j in chosen:
            others = np.delete(np.arange(q), truth[j])
            Y[rng.choice(others, size=spec.r, replace=False), j] = 1
    return PartialLabelDataset(ds.features.copy(), Y, truth.copy())


def gaussian_blobs(n: int, d: int, q: int, separation: float = 6.0, seed=0) -> PartialLabelDataset:
    """Isotropic unit-variance blobs with pairwise mean distance ``separation``.

    Class ``c`` is centred at ``separation / sqrt(2) * e_c``, so the classes
    are linearly separable through the origin. Candidates are singletons.
    """
    if q > d:
        raise DataError("gaussian_blobs needs q <= d")
    rng = make_rng(seed)
    truth = rng.permutation(np.arange(n) % q)
    means = np.zeros((q, d))
    means[np.arange(q), np.arange(q)] = separation / np.sqrt(2.0)
    X = means[truth] + rng.standard_normal((n, d))
    Y = np.zeros((q, n), dtype=np.uint8)
    Y[truth, np.arange(n)] = 1
    return PartialLabelDataset.from_rows(X, Y, truth)


def standardize(ds: PartialLabelDataset, reference: Optional[PartialLabelDataset] = None):
    """Per-feature zero mean / unit variance using `reference` statistics."""
    ref = ds if reference is None else reference
    mean = ref.features.mean(axis=1, keepdims=True)
    std = ref.features.std(axis=1, keepdims=True)
    std[std == 0] = 1.0
    return PartialLabelDataset((ds.features - mean) / std, ds.candidates, ds.ground_truth)


def kfold_split(n: int, folds: int, seed=0):
    """Seeded permutation cut into `folds` contiguous blocks.

    Returns a list of ``(train_idx, test_idx)`` pairs, both sorted.
    """
    if folds < 2 or folds > n:
        raise BadFoldCount(f"need 2 <= folds <= n, got folds={folds}, n={n}")
    perm = make_rng(seed).permutation(n)
    blocks = np.array_split(perm, folds)
    out = []
    for b, test in enumerate(blocks):
        train = np.concatenate([blk for i, blk in enumerate(blocks) if i != b])
        out.append((np.sort(train), np.sort(test)))
    return out


def _fmt(x) -> str:
    return repr(float(x))


def dumps(ds: PartialLabelDataset) -> str:
    lines = [MAGIC, f"{ds.n} {ds.d} {ds.q}"]
    lines += [" ".join(_fmt(v) for v in row) for row in ds.features.T]
    lines += [" ".join(str(i + 1) for i in np.flatnonzero(col)) for col in ds.candidates.T]
    if ds.ground_truth is not None:
        lines.append("TRUTH")
        lines += [str(int(t) + 1) for t in ds.ground_truth]
    return "\n".join(lines) + "\n"


def _ints(text, lineno, q, what):
    try:
        vals = [int(tok) for tok in text.split()]
    except ValueError:
        raise ParseError(lineno, f"{what} must be integers") from None
    if not vals:
        raise ParseError(lineno, f"empty {what} list")
    bad = [v for v in vals if not 1 <= v <= q]
    if bad:
        raise ParseError(lineno, f"{what} {bad[0]} outside 1..{q}")
    return vals


def loads(text: str) -> PartialLabelDataset:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or lines[0].strip() != MAGIC:
        raise ParseError(1, f"expected header {MAGIC!r}")
    if len(lines) < 2:
        raise ParseError(2, "missing 'n d q' line")
    try:
        n, d, q = (int(tok) for tok in lines[1].split())
    except ValueError:
        raise ParseError(2, "expected three integers 'n d q'") from None
    if n < 1 or d < 1 or q < 2:
        raise ParseError(2, f"invalid dimensions n={n} d={d} q={q}")
    if len(lines) < 2 + 2 * n:
        raise ParseError(len(lines) + 1, f"expected {2 * n} data lines after the header")

    X = np.empty((n, d))
    for i in range(n):
        lineno = 3 + i
        toks = lines[2 + i].split()
        if len(toks) != d:
            raise ParseError(lineno, f"expected {d} feature values, found {len(toks)}")
        try:
            X[i] = [float(t) for t in toks]
        except ValueError:
            raise ParseError(lineno, "non-numeric feature value") from None

    Y = np.zeros((q, n), dtype=np.uint8)
    for i in range(n):
        lineno = 3 + n + i
        labels = _ints(lines[2 + n + i], lineno, q, "candidate label")
        Y[np.asarray(labels) - 1, i] = 1

    truth = None
    rest = lines[2 + 2 * n:]
    if rest:
        start = 3 + 2 * n
        if rest[0].strip() != "TRUTH":
            raise ParseError(start, "unexpected content after candidate lines")
        if len(rest) - 1 != n:
            raise ParseError(start, f"TRUTH section must have exactly {n} lines")
        truth = np.empty(n, dtype=np.int64)
        for i, line in enumerate(rest[1:]):
            vals = _ints(line, start + 1 + i, q, "true label")
            if len(vals) != 1:
                raise ParseError(start + 1 + i, "one true label per line")
            truth[i] = vals[0] - 1

    ds = PartialLabelDataset.from_rows(X, Y, truth)
    validate_dataset(ds)
    return ds


def save_dataset(ds: PartialLabelDataset, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(ds))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_dataset(path) -> PartialLabelDataset:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def load_csv(features_path, labels_path, truth_path=None) -> PartialLabelDataset:
    """Read row-per-instance CSV features and 1-indexed candidate lists.

    ``labels_path`` holds one candidate list per row (comma or space
    separated); the optional ``truth_path`` holds one true label per row.
    The number of labels is the largest label seen.
    """
    def rows(path):
        try:
            with open(path, newline="", encoding="utf-8") as fh:
                return [r for r in csv.reader(fh) if any(c.strip() for c in r)]
        except OSError as exc:
            raise IoError(f"cannot read {path}: {exc}") from exc

    try:
        X = np.array([[float(v) for v in r] for r in rows(features_path)])
    except ValueError as exc:
        raise DataError(f"{features_path}: {exc}") from None
    cand_rows = rows(labels_path)
    labels = []
    for i, r in enumerate(cand_rows, start=1):
        try:
            labels.append([int(tok) for cell in r for tok in cell.split()])
        except ValueError:
            raise ParseError(i, f"{labels_path}: candidate labels must be integers") from None
        if not labels[-1] or min(labels[-1]) < 1:
            raise ParseError(i, f"{labels_path}: need at least one label >= 1")
    truth = None
    if truth_path is not None:
        truth = np.array([int(r[0]) for r in rows(truth_path)]) - 1
    if X.ndim != 2 or len(labels) != X.shape[0]:
        raise DataError("features and labels CSV files disagree in row count")
    q = max(max(lab) for lab in labels)
    if truth is not None:
        q = max(q, int(truth.max()) + 1)
    Y = np.zeros((q, len(labels)), dtype=np.uint8)
    for j, lab in enumerate(labels):
        Y[np.asarray(lab) - 1, j] = 1
    ds = PartialLabelDataset.from_rows(X, Y, truth)
    validate_dataset(ds)
    return ds

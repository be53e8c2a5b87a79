"""Domain types shared by every part of the package.

Conventions: features are stored column-major, ``d x n`` (one column per
instance); candidate and confidence matrices are ``q x n``. Labels are
0-indexed everywhere in memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np


class HeraError(Exception):
    """Base class for all package errors."""


class DataError(HeraError, ValueError):
    """Malformed, inconsistent or unusable input data."""


class ShapeMismatch(DataError):
    pass


class EmptyCandidateSet(DataError):
    def __init__(self, column: int):
        super().__init__(f"instance {column} has an empty candidate set")
        self.column = column


class TruthNotInCandidates(DataError):
    def __init__(self, column: int):
        super().__init__(f"ground truth of instance {column} is not among its candidates")
        self.column = column


class KTooLarge(DataError):
    pass


class NumericalError(HeraError, ArithmeticError):
    """Raised when an iterate or a decomposition stops being usable.

    ``iteration`` is filled in by the solver when the failure happens inside
    an outer iteration.
    """

    def __init__(self, message: str, iteration: Optional[int] = None):
        super().__init__(message)
        self.iteration = iteration

    def __str__(self):
        msg = super().__str__()
        if self.iteration is not None:
            return f"{msg} (outer iteration {self.iteration})"
        return msg


class SvdFailure(NumericalError):
    pass


class NonFiniteIterate(NumericalError):
    pass


@dataclass(frozen=True, eq=False)
class PartialLabelDataset:
    """Instances plus their candidate label sets.

    Attributes
    ----------
    features : ndarray, shape (d, n)
        One column per instance.
    candidates : ndarray of uint8, shape (q, n)
        ``candidates[i, j] == 1`` iff label ``i`` is a candidate of instance ``j``.
    ground_truth : ndarray of int, shape (n,), optional
        True labels; used for corruption and scoring only, never for training.
    """

    features: np.ndarray
    candidates: np.ndarray
    ground_truth: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=float))
        object.__setattr__(self, "candidates", np.asarray(self.candidates).astype(np.uint8))
        if self.ground_truth is not None:
            object.__setattr__(self, "ground_truth", np.asarray(self.ground_truth, dtype=np.int64))

    @classmethod
    def from_rows(cls, X_rows, candidates, ground_truth=None):
        """Build from row-per-instance features (``n x d``)."""
        return cls(np.asarray(X_rows, dtype=float).T, candidates, ground_truth)

    @property
    def n(self) -> int:
        return self.features.shape[1]

    @property
    def d(self) -> int:
        return self.features.shape[0]

    @property
    def q(self) -> int:
        return self.candidates.shape[0]

    @property
    def Y(self) -> np.ndarray:
        """Candidate matrix as floats."""
        return self.candidates.astype(float)

    def subset(self, idx) -> "PartialLabelDataset":
        idx = np.asarray(idx, dtype=np.int64)
        truth = None if self.ground_truth is None else self.ground_truth[idx]
        return PartialLabelDataset(self.features[:, idx], self.candidates[:, idx], truth)

    def __eq__(self, other):
        if not isinstance(other, PartialLabelDataset):
            return NotImplemented
        if (self.ground_truth is None) != (other.ground_truth is None):
            return False
        same_truth = self.ground_truth is None or np.array_equal(
            self.ground_truth, other.ground_truth)
        return (np.array_equal(self.features, other.features)
                and np.array_equal(self.candidates, other.candidates)
                and same_truth)


@dataclass
class ModelState:
    """Linear scorer; column ``j`` of ``weights`` scores label ``j``."""

    weights: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.weights)):
            raise NonFiniteIterate("model weights contain non-finite entries")


@dataclass
class ConfidenceState:
    """Working set of the augmented Lagrangian solver.

    ``confidence`` (P) and ``noise`` (E) split the candidate matrix,
    ``auxiliary`` (J) is the l1 copy of P, ``multiplier_m`` and
    ``multiplier_n`` are the Lagrange multipliers of ``Y = P + E`` and
    ``P = J``.
    """

    confidence: np.ndarray
    noise: np.ndarray
    auxiliary: np.ndarray
    multiplier_m: np.ndarray
    multiplier_n: np.ndarray

    def __post_init__(self):
        shapes = {np.shape(getattr(self, f.name)) for f in fields(self)}
        if len(shapes) != 1:
            raise ShapeMismatch(f"confidence state matrices disagree in shape: {sorted(shapes)}")

    @property
    def P(self):
        return self.confidence

    @property
    def E(self):
        return self.noise

    @property
    def J(self):
        return self.auxiliary

    @property
    def M(self):
        return self.multiplier_m

    @property
    def N(self):
        return self.multiplier_n

    def copy(self) -> "ConfidenceState":
        return ConfidenceState(*(getattr(self, f.name).copy() for f in fields(self)))

    def reported_confidence(self) -> np.ndarray:
        """P clamped to [0, 1]; the optimisation itself only enforces P >= 0."""
        return np.clip(self.confidence, 0.0, 1.0)


@dataclass(frozen=True)
class Hyperparams:
    alpha: float = 0.02
    beta: float = 1e-3
    mu: float = 0.1
    nu: float = 1.0
    lambda0: float = 1e-6
    rho0: float = 1e-6
    lambda_max: float = 1e6
    rho_max: float = 1e6
    tau: float = 1.05
    eta_w: float = 1e-2
    eta_p: float = 1e-2
    inner_steps: int = 5
    iter_max: int = 1000
    loss_tol: float = 1e-6
    k_neighbors: int = 10
    max_halvings: int = 30

    def __post_init__(self):
        positive = ("alpha", "beta", "mu", "nu", "lambda0", "rho0", "lambda_max",
                    "rho_max", "eta_w", "eta_p", "loss_tol")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.tau > 1:
            raise ValueError(f"tau must exceed 1, got {self.tau!r}")
        if self.lambda0 > self.lambda_max or self.rho0 > self.rho_max:
            raise ValueError("initial penalties must not exceed their caps")
        if self.inner_steps < 1 or self.k_neighbors < 1:
            raise ValueError("inner_steps and k_neighbors must be positive")
        if self.iter_max < 0 or self.max_halvings < 0:
            raise ValueError("iter_max and max_halvings must be non-negative")

    def replace(self, **changes) -> "Hyperparams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def validate_dataset(ds: PartialLabelDataset) -> None:
    """Raise a :class:`DataError` unless every dataset invariant holds."""
    X, Y = ds.features, ds.candidates
    if X.ndim != 2 or Y.ndim != 2:
        raise ShapeMismatch("features and candidates must be matrices")
    d, n = X.shape
    q = Y.shape[0]
    if Y.shape[1] != n:
        raise ShapeMismatch(f"features have {n} instances but candidates have {Y.shape[1]}")
    if d < 1 or n < 1:
        raise ShapeMismatch(f"need d >= 1 and n >= 1, got d={d}, n={n}")
    if q < 2:
        raise ShapeMismatch(f"need at least two labels, got q={q}")
    if not np.all(np.isfinite(X)):
        raise DataError("features contain non-finite values")
    if not np.all((Y == 0) | (Y == 1)):
        raise DataError("candidate matrix must be binary")
    empty = np.flatnonzero(Y.sum(axis=0) == 0)
    if empty.size:
        raise EmptyCandidateSet(int(empty[0]))
    if ds.ground_truth is not None:
        truth = ds.ground_truth
        if truth.shape != (n,):
            raise ShapeMismatch(f"ground truth must have length {n}, got shape {truth.shape}")
        out_of_range = np.flatnonzero((truth < 0) | (truth >= q))
        if out_of_range.size:
            raise TruthNotInCandidates(int(out_of_range[0]))
        missing = np.flatnonzero(Y[truth, np.arange(n)] != 1)
        if missing.size:
            raise TruthNotInCandidates(int(missing[0]))


def init_state(ds: PartialLabelDataset) -> tuple[ModelState, ConfidenceState]:
    """Feasible starting point: W = 0, P uniform over candidates, E = Y - P, J = P."""
    validate_dataset(ds)
    Y = ds.Y
    P = Y / Y.sum(axis=0, keepdims=True)
    state = ConfidenceState(
        confidence=P,
        noise=Y - P,
        auxiliary=P.copy(),
        multiplier_m=np.zeros_like(Y),
        multiplier_n=np.zeros_like(Y),
    )
    return ModelState(np.zeros((ds.d, ds.q))), state

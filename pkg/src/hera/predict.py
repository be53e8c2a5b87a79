"""k-nearest-neighbour label propagation for unseen instances.

The query and its ``k`` nearest training instances form a group of ``k + 1``
points with Gaussian similarities ``S``. Neighbours contribute their
confidence columns and the query contributes the linear model output; the
prediction is the argmax of the query's row of ``S @ [P_nbrs; (W^T x)^T]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataError, KTooLarge, ModelState


class DegenerateNeighborhood(DataError):
    pass


@dataclass(frozen=True)
class NeighborContext:
    neighbor_indices: np.ndarray
    similarity: np.ndarray
    stacked_labels: np.ndarray


def build_similarity(points):
    """Gaussian similarity of a group of points given as rows.

    The bandwidth is the mean, over the group, of each point's distance to
    its nearest other member of the group.

    Raises
    ------
    DegenerateNeighborhood
        If every point coincides, leaving a zero bandwidth.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 2:
        raise DataError("need at least two points of equal dimension")
    diff = points[:, None, :] - points[None, :, :]
    D2 = np.einsum("ijk,ijk->ij", diff, diff)
    nearest = np.sqrt(D2 + np.diag(np.full(len(points), np.inf))).min(axis=1)
    sigma = nearest.mean()
    if sigma == 0:
        raise DegenerateNeighborhood("all points of the neighbourhood coincide")
    S = np.exp(-D2 / sigma**2)
    np.fill_diagonal(S, 1.0)
    return S


def _neighbors(query, train_rows, k):
    d2 = ((train_rows - query) ** 2).sum(axis=1)
    return np.argsort(d2, kind="stable")[:k]


def neighbor_context(query, ds, W, P, k: int) -> NeighborContext:
    weights = W.weights if isinstance(W, ModelState) else np.asarray(W, dtype=float)
    if not 1 <= k <= ds.n:
        raise KTooLarge(f"k={k} must lie in 1..{ds.n}")
    query = np.asarray(query, dtype=float).ravel()
    train_rows = ds.features.T
    idx = _neighbors(query, train_rows, k)
    try:
        S = build_similarity(np.vstack([train_rows[idx], query]))
    except DegenerateNeighborhood:
        S = np.ones((k + 1, k + 1))
    stacked = np.vstack([np.asarray(P)[:, idx].T, weights.T @ query])
    return NeighborContext(idx, S, stacked)


def predict_one(query, ds, W, P, k: int) -> int:
    """Predicted 0-indexed label of one feature vector; ties go to the lowest label."""
    ctx = neighbor_context(query, ds, W, P, k)
    scores = ctx.similarity[-1] @ ctx.stacked_labels
    return int(np.argmax(scores))


def predict_batch(queries, ds, W, P, k: int) -> np.ndarray:
    """Predict every column of `queries` (``d x m``)."""
    queries = np.asarray(queries, dtype=float)
    if queries.size == 0:
        return np.empty(0, dtype=np.int64)
    if queries.ndim == 1:
        queries = queries[:, None]
    return np.array([predict_one(queries[:, j], ds, W, P, k) for j in range(queries.shape[1])],
                    dtype=np.int64)

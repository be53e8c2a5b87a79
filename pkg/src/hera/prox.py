"""Proximal and projection operators on dense matrices."""

import numpy as np

from .core import DataError, SvdFailure


class NegativeThreshold(DataError):
    pass


def shrink(G, epsilon):
    r"""Elementwise soft-thresholding, the prox of :math:`\varepsilon\|\cdot\|_1`.

    Entries above ``epsilon`` move down by ``epsilon``, entries below
    ``-epsilon`` move up by ``epsilon``, everything else becomes zero.
    """
    if epsilon < 0:
        raise NegativeThreshold(f"threshold must be non-negative, got {epsilon!r}")
    G = np.asarray(G, dtype=float)
    return np.sign(G) * np.maximum(np.abs(G) - epsilon, 0.0)


def singular_values(G):
    try:
        return np.linalg.svd(np.asarray(G, dtype=float), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(f"singular value decomposition did not converge: {exc}") from exc


def nuclear_norm(G):
    return float(np.sum(singular_values(G)))


def svt(G, epsilon):
    r"""Singular value thresholding, the prox of :math:`\varepsilon\|\cdot\|_*`.

    Parameters
    ----------
    G : array_like, shape (m, n)
    epsilon : float
        Non-negative threshold applied to the singular values.

    Returns
    -------
    ndarray, shape (m, n)
        ``U diag(shrink(s, epsilon)) V^T`` from the thin SVD of `G`.
    """
    if epsilon < 0:
        raise NegativeThreshold(f"threshold must be non-negative, got {epsilon!r}")
    G = np.asarray(G, dtype=float)
    if not np.all(np.isfinite(G)):
        raise SvdFailure("cannot decompose a matrix with non-finite entries")
    try:
        U, s, Vt = np.linalg.svd(G, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(f"singular value decomposition did not converge: {exc}") from exc
    s = np.maximum(s - epsilon, 0.0)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep]


def project_nonneg(G):
    """Euclidean projection onto the non-negative orthant."""
    return np.maximum(np.asarray(G, dtype=float), 0.0)

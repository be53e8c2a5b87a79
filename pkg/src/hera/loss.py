"""Heterogeneous loss, augmented Lagrangian objective and their gradients.

The ranking part sums over every instance ``i`` and every *ordered* label
pair ``(j, k)``::

    (1 / q**2) * (P[j, i] - P[k, i])**2 * log(1 + exp(-m**2)),
    m = (w_j - w_k) . x_i

with the natural logarithm. All routines are vectorised over label pairs and
processed in chunks of instances so memory stays bounded for large ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfidenceState, ModelState, ShapeMismatch
from .prox import nuclear_norm

# upper bound on q * q * chunk_size floats held per temporary
_CHUNK_BUDGET = 2_000_000


@dataclass(frozen=True)
class LossBreakdown:
    ranking: float
    reconstruction: float
    model_complexity: float
    sparsity: float
    nuclear: float
    lagrangian_extras: float
    total: float


def rank_loss_scalar(x):
    """``log(1 + exp(-x))`` without overflow for large negative ``x``."""
    out = np.logaddexp(0.0, -np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def _weights(W):
    return W.weights if isinstance(W, ModelState) else np.asarray(W, dtype=float)


def _check(X, W, P):
    d, n = X.shape
    if W.shape[0] != d:
        raise ShapeMismatch(f"weights have {W.shape[0]} rows, features have {d}")
    if P.shape != (W.shape[1], n):
        raise ShapeMismatch(f"confidence shape {P.shape} != ({W.shape[1]}, {n})")


def _chunks(n, q):
    size = max(1, _CHUNK_BUDGET // (q * q))
    for start in range(0, n, size):
        yield slice(start, min(start + size, n))


def _pair_terms(Z, P):
    """Margins and confidence gaps for every ordered pair, shape (q, q, c)."""
    margin = Z[:, None, :] - Z[None, :, :]
    gap = P[:, None, :] - P[None, :, :]
    return margin, gap


def ranking_loss(X, W, P) -> float:
    W = _weights(W)
    _check(X, W, P)
    q = W.shape[1]
    Z = W.T @ X
    total = 0.0
    for sl in _chunks(X.shape[1], q):
        margin, gap = _pair_terms(Z[:, sl], P[:, sl])
        total += float(np.sum(gap**2 * np.logaddexp(0.0, -(margin**2))))
    return total / q**2


def reconstruction_loss(X, W, P, alpha) -> float:
    W = _weights(W)
    R = P - W.T @ X
    return 0.5 * alpha * float(np.sum(R * R))


def heterogeneous_loss(ds, W, P, alpha) -> float:
    """Pairwise ranking loss plus ``(alpha/2) ||P - W^T X||_F^2``."""
    W = _weights(W)
    P = np.asarray(P, dtype=float)
    return ranking_loss(ds.features, W, P) + reconstruction_loss(ds.features, W, P, alpha)


def constraint_terms(Y, cs: ConfidenceState, lam, rho, P=None, E=None, J=None) -> float:
    """Trace and quadratic penalty terms of the augmented Lagrangian."""
    P = cs.confidence if P is None else P
    E = cs.noise if E is None else E
    J = cs.auxiliary if J is None else J
    R1 = Y - P - E
    R2 = P - J
    return float(np.sum(cs.multiplier_m * R1) + np.sum(cs.multiplier_n * R2)
                 + 0.5 * lam * np.sum(R1 * R1) + 0.5 * rho * np.sum(R2 * R2))


def augmented_objective(ds, W, cs: ConfidenceState, hp, lam, rho) -> LossBreakdown:
    """Every term of the augmented Lagrangian at the given point."""
    W = _weights(W)
    X, P = ds.features, cs.confidence
    ranking = ranking_loss(X, W, P)
    recon = reconstruction_loss(X, W, P, hp.alpha)
    complexity = hp.beta * float(np.sum(W * W))
    sparsity = hp.mu * float(np.sum(np.abs(cs.auxiliary)))
    nuclear = hp.nu * nuclear_norm(cs.noise)
    extras = constraint_terms(ds.Y, cs, lam, rho)
    total = ranking + recon + complexity + sparsity + nuclear + extras
    return LossBreakdown(ranking, recon, complexity, sparsity, nuclear, extras, total)


def w_objective(ds, W, P, hp) -> float:
    """Objective of the W-subproblem: heterogeneous loss plus ``beta ||W||_F^2``."""
    W = _weights(W)
    return heterogeneous_loss(ds, W, P, hp.alpha) + hp.beta * float(np.sum(W * W))


def p_objective(ds, W, P, cs: ConfidenceState, hp, lam, rho) -> float:
    """Objective of the P-subproblem with W, J, E, M, N frozen (P taken from `P`)."""
    return heterogeneous_loss(ds, W, P, hp.alpha) + constraint_terms(ds.Y, cs, lam, rho, P=P)


def grad_w(ds, W, P, hp):
    """Gradient of :func:`w_objective` with respect to the ``d x q`` weights."""
    W = _weights(W)
    X = ds.features
    P = np.asarray(P, dtype=float)
    _check(X, W, P)
    q = W.shape[1]
    Z = W.T @ X
    A = np.empty_like(Z)
    for sl in _chunks(X.shape[1], q):
        margin, gap = _pair_terms(Z[:, sl], P[:, sl])
        sq = margin**2
        # d/dm log(1 + exp(-m^2)) = -2 m sigmoid(-m^2)
        coef = gap**2 * (-2.0 * margin) * np.exp(-np.logaddexp(0.0, sq))
        # coef is antisymmetric in (j, k): column j receives +coef, column k -coef
        A[:, sl] = 2.0 * coef.sum(axis=1)
    G = X @ A.T / q**2
    G -= hp.alpha * X @ (P.T - X.T @ W)
    G += 2.0 * hp.beta * W
    return G


def grad_p(ds, W, cs: ConfidenceState, hp, lam, rho, P=None):
    """Gradient of the P-subproblem objective (ascent direction).

    `P` overrides ``cs.confidence`` so inner iterations can reuse the frozen
    state.
    """
    W = _weights(W)
    X, Y = ds.features, ds.Y
    P = cs.confidence if P is None else np.asarray(P, dtype=float)
    _check(X, W, P)
    q = W.shape[1]
    Z = W.T @ X
    G = np.empty_like(P)
    for sl in _chunks(X.shape[1], q):
        margin, gap = _pair_terms(Z[:, sl], P[:, sl])
        G[:, sl] = 4.0 * np.sum(gap * np.logaddexp(0.0, -(margin**2)), axis=1)
    G /= q**2
    G += hp.alpha * (P - Z)
    G -= cs.multiplier_m
    G += cs.multiplier_n
    G -= lam * (Y - P - cs.noise)
    G += rho * (P - cs.auxiliary)
    return G

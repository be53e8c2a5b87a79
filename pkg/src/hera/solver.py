"""Alternating augmented-Lagrangian solver.

Each outer iteration updates, in order, the weights W (gradient descent),
the confidences P (gradient descent, then projection onto P >= 0), the l1
copy J (soft-thresholding), the noise E (singular value thresholding, then
projection onto E >= 0), and finally the multipliers and penalties.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, TextIO

import numpy as np

from .core import (ConfidenceState, Hyperparams, ModelState, NonFiniteIterate,
                   NumericalError, PartialLabelDataset, init_state)
from .loss import augmented_objective, grad_p, grad_w, p_objective, w_objective
from .prox import project_nonneg, shrink, svt

LOG_COLUMNS = ("iteration", "objective", "residual_y_pe", "residual_p_j", "lambda", "rho")


@dataclass
class SolveReport:
    iterations: int = 0
    loss_trace: list = field(default_factory=list)
    feasibility_trace: list = field(default_factory=list)
    converged: bool = False


def descend(x, objective: Callable, gradient: Callable, eta0: float, steps: int,
             max_halvings: int):
    """Gradient descent with halving backtracking; never accepts an increase."""
    fx = objective(x)
    if not np.isfinite(fx):
        raise NonFiniteIterate("objective is not finite at the starting point")
    for _ in range(steps):
        g = gradient(x)
        if not np.all(np.isfinite(g)):
            raise NonFiniteIterate("gradient has non-finite entries")
        if not np.any(g):
            break
        eta = eta0
        for _ in range(max_halvings + 1):
            cand = x - eta * g
            fc = objective(cand)
            if np.isfinite(fc) and fc <= fx:
                x, fx = cand, fc
                break
            eta *= 0.5
        else:
            # no acceptable step down to eta0 / 2**max_halvings: numerically stationary
            break
    return x


def step_w(ds: PartialLabelDataset, W, P, hp: Hyperparams) -> ModelState:
    """Inner gradient steps on the W-subproblem (P frozen)."""
    W0 = W.weights if isinstance(W, ModelState) else np.asarray(W, dtype=float)
    W1 = descend(W0,
                  lambda w: w_objective(ds, w, P, hp),
                  lambda w: grad_w(ds, w, P, hp),
                  hp.eta_w, hp.inner_steps, hp.max_halvings)
    return ModelState(W1)


def step_p(ds: PartialLabelDataset, W, cs: ConfidenceState, hp: Hyperparams, lam, rho):
    """Inner gradient steps on the P-subproblem, then projection onto P >= 0."""
    P1 = descend(cs.confidence,
                  lambda p: p_objective(ds, W, p, cs, hp, lam, rho),
                  lambda p: grad_p(ds, W, cs, hp, lam, rho, P=p),
                  hp.eta_p, hp.inner_steps, hp.max_halvings)
    return project_nonneg(P1)


def step_j(cs: ConfidenceState, mu, rho):
    """Exact minimiser of ``mu |J|_1 + <N, P - J> + (rho/2) |P - J|^2``.

    Completing the square puts the centre at ``P + N / rho``.
    """
    return shrink(cs.confidence + cs.multiplier_n / rho, mu / rho)


def step_e(ds: PartialLabelDataset, cs: ConfidenceState, nu, lam):
    """Singular value thresholding of ``Y - P + M/lambda``, then E >= 0."""
    return project_nonneg(svt(ds.Y - cs.confidence + cs.multiplier_m / lam, nu / lam))


def residuals(ds: PartialLabelDataset, cs: ConfidenceState):
    """Frobenius norms of ``Y - P - E`` and ``P - J``."""
    return (float(np.linalg.norm(ds.Y - cs.confidence - cs.noise)),
            float(np.linalg.norm(cs.confidence - cs.auxiliary)))


def update_duals(cs: ConfidenceState, ds: PartialLabelDataset, lam, rho, hp: Hyperparams):
    """Multiplier ascent plus geometric penalty growth capped at the maxima."""
    new = ConfidenceState(
        confidence=cs.confidence,
        noise=cs.noise,
        auxiliary=cs.auxiliary,
        multiplier_m=cs.multiplier_m + lam * (ds.Y - cs.confidence - cs.noise),
        multiplier_n=cs.multiplier_n + rho * (cs.confidence - cs.auxiliary),
    )
    return new, min(hp.lambda_max, hp.tau * lam), min(hp.rho_max, hp.tau * rho)


def fit(ds: PartialLabelDataset, hp: Optional[Hyperparams] = None,
        log: Optional[TextIO] = None):
    """Train W and estimate the labeling confidences.

    Parameters
    ----------
    ds : PartialLabelDataset
        Training data; ``ground_truth`` is ignored.
    hp : Hyperparams, optional
    log : file-like, optional
        Receives one tab-separated line per outer iteration with the
        columns of ``LOG_COLUMNS``.

    Returns
    -------
    model : ModelState
    state : ConfidenceState
    report : SolveReport
    """
    hp = hp or Hyperparams()
    model, cs = init_state(ds)
    lam, rho = hp.lambda0, hp.rho0
    report = SolveReport()
    prev = augmented_objective(ds, model, cs, hp, lam, rho).total
    if log is not None:
        log.write("\t".join(LOG_COLUMNS) + "\n")

    for t in range(hp.iter_max):
        try:
            model = step_w(ds, model, cs.confidence, hp)
            cs.confidence = step_p(ds, model, cs, hp, lam, rho)
            cs.auxiliary = step_j(cs, hp.mu, rho)
            cs.noise = step_e(ds, cs, hp.nu, lam)
            cs, lam, rho = update_duals(cs, ds, lam, rho, hp)
            loss = augmented_objective(ds, model, cs, hp, lam, rho).total
            if not np.isfinite(loss):
                raise NonFiniteIterate("objective became non-finite")
        except NumericalError as exc:
            exc.iteration = t
            raise
        assert cs.confidence.min() >= 0 and cs.noise.min() >= 0

        res = residuals(ds, cs)
        report.iterations = t + 1
        report.loss_trace.append(loss)
        report.feasibility_trace.append(res)
        if log is not None:
            log.write(f"{t + 1}\t{loss!r}\t{res[0]!r}\t{res[1]!r}\t{lam!r}\t{rho!r}\n")
        if abs(loss - prev) <= hp.loss_tol:
            report.converged = True
            break
        prev = loss
    return model, cs, report

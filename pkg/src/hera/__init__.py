"""Partial label learning with a heterogeneous ranking/reconstruction loss and
sparse plus low-rank decomposition of the candidate label matrix."""

from .core import (ConfidenceState, DataError, EmptyCandidateSet, HeraError,
                   Hyperparams, KTooLarge, ModelState, NonFiniteIterate,
                   NumericalError, PartialLabelDataset, ShapeMismatch,
                   SvdFailure, TruthNotInCandidates, init_state,
                   validate_dataset)
from .data import (CorruptionSpec, corrupt, gaussian_blobs, kfold_split,
                   load_csv, load_dataset, save_dataset)
from .harness import EvalResult, cross_validate, plknn_baseline, sweep
from .loss import (LossBreakdown, augmented_objective, grad_p, grad_w,
                   heterogeneous_loss, rank_loss_scalar)
from .predict import build_similarity, predict_batch, predict_one
from .prox import project_nonneg, shrink, svt
from .solver import SolveReport, fit

__version__ = "0.1.0"

"""
Fitting and predicting with ambiguous labels
============================================

Three well separated clusters, where half of the training instances carry
one extra wrong candidate label.
"""

import numpy as np

from hera import Hyperparams, PartialLabelDataset, fit, predict_batch
from hera.data import CorruptionSpec, corrupt, gaussian_blobs, kfold_split

clean = gaussian_blobs(150, 5, 3, seed=0)
noisy = corrupt(clean, CorruptionSpec(p=0.5, r=1, seed=0))
print("mean candidate set size:", noisy.candidates.sum(axis=0).mean())

###############################################################################
# Hold out one fold, fit on the rest. The solver never sees the truth.

train_idx, test_idx = kfold_split(noisy.n, 5, seed=0)[0]
train = noisy.subset(train_idx)
train = PartialLabelDataset(train.features, train.candidates)
test = noisy.subset(test_idx)

model, state, report = fit(train, Hyperparams())
print("outer iterations:", report.iterations, "converged:", report.converged)

###############################################################################
# How well were the training candidates disambiguated?

recovered = state.confidence.argmax(axis=0) == clean.ground_truth[train_idx]
print("training labels recovered: %.3f" % recovered.mean())

# and how well do unseen instances do
pred = predict_batch(test.features, train, model, state.confidence, k=10)
print("held-out accuracy: %.3f" % np.mean(pred == test.ground_truth))

"""
Accuracy against corruption level
=================================

Ten-fold accuracy of HERA and the PL-KNN baseline as the fraction of
ambiguous instances grows. Takes a couple of minutes.
"""

from hera import Hyperparams
from hera.data import gaussian_blobs
from hera.harness import format_sweep, sweep

ds = gaussian_blobs(150, 5, 3, seed=0)
rows = sweep(ds, "r1", [0.1, 0.3, 0.5, 0.7], Hyperparams(), folds=10, seed=0)
print(format_sweep("r1", rows), end="")

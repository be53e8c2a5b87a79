"""
Watching the solver
===================

The objective and the two constraint residuals, ``|Y - P - E|`` and
``|P - J|``, over the outer iterations. The penalties start tiny and grow
geometrically, so the residuals only drop once they become large.
"""

import numpy as np

from hera import Hyperparams, PartialLabelDataset, fit
from hera.data import CorruptionSpec, corrupt, gaussian_blobs

clean = gaussian_blobs(150, 5, 3, seed=0)
noisy = corrupt(clean, CorruptionSpec(p=0.5, r=1, seed=0))
ds = PartialLabelDataset(noisy.features, noisy.candidates)

_, state, report = fit(ds, Hyperparams())
scale = np.linalg.norm(ds.Y)
res = np.array(report.feasibility_trace) / scale

print("iter   objective   |Y-P-E|/|Y|   |P-J|/|Y|")
for t in list(range(0, report.iterations, 50)) + [report.iterations - 1]:
    print("%4d  %10.4f   %.2e      %.2e" % (t + 1, report.loss_trace[t], res[t, 0], res[t, 1]))

first = np.flatnonzero((res < 1e-2).all(axis=1))
if first.size:
    print("both residuals under 1%% of |Y| from iteration %d" % (first[0] + 1))

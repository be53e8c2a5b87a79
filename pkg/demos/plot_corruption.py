"""
Generating candidate sets
=========================

The two corruption protocols: ``r`` random false labels on a fraction ``p``
of instances, and a single false label that favours a fixed coupling label
with probability ``epsilon``.
"""

import numpy as np

from hera.data import CorruptionSpec, corrupt, coupling_label, gaussian_blobs

base = gaussian_blobs(10000, 5, 5, seed=0)

for p, r in [(0.1, 1), (0.3, 2), (0.7, 3)]:
    sizes = corrupt(base, CorruptionSpec(p=p, r=r, seed=0)).candidates.sum(axis=0)
    print("p=%.1f r=%d  corrupted=%5d  sizes=%s" % (p, r, (sizes > 1).sum(), np.unique(sizes)))

###############################################################################
# With epsilon the coupled label shows up at about the requested rate.

truth = base.ground_truth
for eps in [0.1, 0.4, 0.7]:
    out = corrupt(base, CorruptionSpec(epsilon=eps, seed=0))
    freq = out.candidates[coupling_label(truth, base.q), np.arange(base.n)].mean()
    print("epsilon=%.1f  coupling frequency %.4f" % (eps, freq))

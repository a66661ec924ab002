"""Checking the analytic gradient and the convex regime.

The training objective sums, per sample, a loss of (soft similar distance -
soft dissimilar distance)/gamma plus a distance regularizer. Its gradient is
a weighted sum of pair outer products. This script verifies the analytic
gradient against central finite differences and demonstrates that the
objective is convex in the metric whenever alpha < 0 (midpoint inequality on
random PSD pairs).

Run: python demos/gradient_and_convexity.py
"""

import numpy as np

from adaptnn import (HyperParams, IdentityLoss, ann_gradient, ann_objective,
                     build_neighbor_sets, Dataset)

rng = np.random.default_rng(0)

# a small two-class cloud
X = rng.normal(size=(18, 4))
y = 1 + np.arange(18) % 2
data = Dataset(X, y)
nbrs = build_neighbor_sets(data)
hp = HyperParams(alpha=-2.0, gamma=1.0, lam=1.0 / 18 ** 2, loss=IdentityLoss())

a = rng.normal(size=(4, 4))
m = a @ a.T + 0.5 * np.eye(4)

print("finite-difference check of the analytic gradient (step 1e-5):")
analytic = ann_gradient(m, data, nbrs, hp)
h = 1e-5
worst = 0.0
for p in range(4):
    for q in range(4):
        e = np.zeros((4, 4))
        e[p, q] = h
        fd = (ann_objective(m + e, data, nbrs, hp)
              - ann_objective(m - e, data, nbrs, hp)) / (2 * h)
        worst = max(worst, abs(fd - analytic[p, q]) / max(1.0, abs(fd)))
print("  worst relative entry error: %.2e" % worst)
print("  gradient is exactly symmetric:", bool(np.array_equal(analytic, analytic.T)))

print("\nmidpoint convexity for alpha < 0 (20 random PSD pairs):")
worst_gap = -np.inf
for _ in range(20):
    a1 = rng.normal(size=(4, 4))
    a2 = rng.normal(size=(4, 4))
    m1, m2 = a1 @ a1.T, a2 @ a2.T
    j1 = ann_objective(m1, data, nbrs, hp)
    j2 = ann_objective(m2, data, nbrs, hp)
    jm = ann_objective((m1 + m2) / 2, data, nbrs, hp)
    worst_gap = max(worst_gap, jm - (j1 + j2) / 2)
print("  max of J(midpoint) - average(endpoints): %.3e  (<= 0 up to rounding)"
      % worst_gap)

print("\nthe same check with alpha > 0 usually finds violations (non-convex):")
hp_pos = HyperParams(alpha=2.0, gamma=1.0, lam=0.0, loss=IdentityLoss())
gaps = []
for _ in range(200):
    a1 = rng.normal(size=(4, 4))
    a2 = rng.normal(size=(4, 4))
    m1, m2 = a1 @ a1.T, a2 @ a2.T
    j1 = ann_objective(m1, data, nbrs, hp_pos)
    j2 = ann_objective(m2, data, nbrs, hp_pos)
    jm = ann_objective((m1 + m2) / 2, data, nbrs, hp_pos)
    gaps.append(jm - (j1 + j2) / 2)
print("  positive midpoint gaps found: %d / 200 (max %.3e)"
      % (int(np.sum(np.array(gaps) > 0)), max(gaps)))

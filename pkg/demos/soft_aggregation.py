"""Tour of the soft top-K aggregate.

b(gamma) = -(1/gamma) ln( (1/n) sum exp(-gamma a_i) ) sweeps continuously
from the maximum of a list (gamma -> -inf) through the mean (gamma -> 0) to
the minimum (gamma -> +inf). For every K there is a gamma* where it equals
the plain average of the K smallest (or largest) values -- that is what lets
a K-NN risk become differentiable.

Run: python demos/soft_aggregation.py
"""

import numpy as np

from adaptnn import soft_agg, solve_gamma_star, topk_avg_largest, topk_avg_smallest

values = [0.8, 1.1, 2.5, 4.0, 7.3]
print("values:", values)
print("mean = %.4f, min = %.1f, max = %.1f" % (np.mean(values), min(values), max(values)))

print("\nsweep of b(gamma):")
for gamma in (-50, -5, -1, -0.1, 0.1, 1, 5, 50):
    print("  gamma = %6.1f   b = %.5f" % (gamma, soft_agg(values, gamma)))
print("(monotone decreasing in gamma, always inside [min, max])")

print("\nmatching exact top-K averages:")
for k in (1, 2, 3):
    target = topk_avg_smallest(values, k)
    g = solve_gamma_star(values, k, "smallest")
    print("  K=%d smallest: target %.5f  gamma* = %10.4f  b(gamma*) = %.5f"
          % (k, target, g, soft_agg(values, g)))
for k in (1, 2):
    target = topk_avg_largest(values, k)
    g = solve_gamma_star(values, k, "largest")
    print("  K=%d largest:  target %.5f  gamma* = %10.4f  b(gamma*) = %.5f"
          % (k, target, g, soft_agg(values, g)))

print("\nedge cases:")
print("  constant list -> gamma* sentinel 0 (use the mean):",
      solve_gamma_star([3.0, 3.0, 3.0], 2, "smallest"))
print("  K=n -> sentinel 0 as well:", solve_gamma_star(values, 5, "smallest"))

# the approach to the extremes is slow: the ln(n)/gamma bias
print("\nbias toward the minimum decays like ln(n)/gamma:")
for gamma in (1e2, 1e4, 1e6, 1e8):
    b = soft_agg(values, gamma)
    print("  gamma = %8.0e   b - min = %.3e   ln(n)/gamma = %.3e"
          % (gamma, b - min(values), np.log(len(values)) / gamma))

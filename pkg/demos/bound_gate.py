"""Why 8x20 Gaussian matrices never pass the error-bound gate, and a shape that does.

The gate delta_2t < thm2_threshold(p, r, t) is achievable by rescaling A
exactly when the restricted condition number kappa_2t = hi/lo of A is below
(t/r)^(2/p - 1).

Run: python demos/bound_gate.py
"""

import math

import numpy as np

from schattenp import guarantees, harness, rip

rng = np.random.default_rng(0)
for shape in ((8, 20), (40, 10)):
    A = rng.standard_normal(shape) / math.sqrt(shape[0])
    for p, r, t in ((0.5, 1, 2), (0.8, 1, 2), (0.5, 2, 3)):
        theta = guarantees.thm2_threshold(p, r, t)
        hi, lo, _ = rip.restricted_eigenvalue_range(A, 2 * t)
        print(f"{shape[0]}x{shape[1]} p={p} r={r} t={t}: kappa={hi / lo:9.2f} "
              f"needs < {(1 + theta) / (1 - theta):6.3f}")

res = harness.run(harness.ExperimentConfig(kind="verify-bounds", n_v=40, m_v=10, trials=5))
s = res.summary
print(f"\n40x10 run: {s['accepted_trials']} accepted trials, {s['certified']} certified, "
      f"{s['violations']} violations, exact recovery {s['exact_recovery']}")
print("slack (bound / error):", s["slack_euclidean"])

"""A 2x2 pair on which the spectral alignment transform breaks for p < 1.

The transform replaces X0 by X1 = -U diag(sigma(X0)) V^T, with U, V the
singular vectors of W. For p = 1 the implication
||X0 + W||_p <= ||X0||_p  =>  ||X1 + W||_p <= ||X1||_p
holds; at p = 0.5 this pair satisfies the premise and violates the conclusion.

Run: python demos/transform_counterexample.py
"""

import mpmath
import numpy as np

from schattenp import nsp

X0 = np.array([[0.00696779, -1.42683138], [0.00741645, -1.51871835]])
W = np.array([[-0.21387769, 1.10590531], [-0.99333364, -0.05079934]])

mpmath.mp.dps = 50


def spectrum(M):
    return sorted((abs(v) for v in mpmath.svd_r(mpmath.matrix(M.tolist()), compute_uv=False)),
                  reverse=True)


for p in (mpmath.mpf("0.5"), mpmath.mpf(1)):
    q = lambda s: sum(v ** p for v in s)
    s0, sw = spectrum(X0), spectrum(W)
    premise = q(spectrum(X0 + W)) - q(s0)
    # X1 + W has singular values |sigma_i(W) - sigma_i(X0)|
    conclusion = q([abs(a - b) for a, b in zip(sw, s0)]) - q(s0)
    _, ok = nsp.lemma5_transform(X0, W, float(p))
    print(f"p={float(p)}: premise margin {mpmath.nstr(premise, 8)}, "
          f"conclusion margin {mpmath.nstr(conclusion, 8)}, implication holds: {ok}")

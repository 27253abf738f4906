"""Print both RIP threshold curves for r=5, t=6 and where they cross.

Run: python demos/threshold_curves.py
"""

import numpy as np

from schattenp import guarantees

r, t = 5, 6
curve = guarantees.threshold_curve(r, t, np.round(np.linspace(0.05, 1.0, 20), 4))
print(f"{'p':>6} {'prop2':>10} {'thm2':>10}")
for p, a, b in curve.samples:
    print(f"{p:6.3f} {a:10.6f} {b:10.6f}")

p_star = guarantees.crossing_point(r, t)
print(f"\ncrossing point p* = {p_star:.6f} (closed form {guarantees.crossing_point_closed_form(r, t):.6f})")
print(f"uniform threshold at t=r: {guarantees.COROLLARY_THRESHOLD:.6f}")
for delta in (0.5, 0.9, 0.99):
    print(f"largest p0 with prop2(p, {r}, {r + 1}) > {delta}: {guarantees.corollary_small_p(r, delta):.6f}")

"""A small phase transition: rank-1 10x10 matrices, 10 trials per cell.

Run: python demos/phase_small.py  (about a minute)
"""

from schattenp import harness

cfg = harness.ExperimentConfig(kind="phase", n1=10, n2=10, ranks=(1,),
                               measurements=(25, 30, 35, 40, 45, 50), p_grid=(0.5,), trials=10)
res = harness.run(cfg)
for c in res.summary["cells"]:
    print(f"m={c.m:3d} {c.solver:5s} p={c.p:.1f}: {c.successes}/{c.trials}")

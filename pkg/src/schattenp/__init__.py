"""Low-rank matrix recovery by Schatten-p quasi-norm minimization."""

from . import guarantees, harness, linalg, nsp, operators, rip, solvers

__version__ = "0.1.0"

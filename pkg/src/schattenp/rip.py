"""Restricted isometry constants.

The vector constant ``delta_k(A)`` is computed exactly by enumerating all
``k``-column supports. For operators on matrices only lower bounds are
available: random rank-``r`` probes combined with multi-start local search
over the unit-Frobenius rank-``r`` set.
"""

import itertools
import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .operators import vec

__all__ = [
    "ENUMERATION_BUDGET",
    "EnumerationBudgetExceeded",
    "RicEstimate",
    "gram_deviation",
    "restricted_eigenvalue_range",
    "vector_ric_exact",
    "operator_ric_estimate",
]

ENUMERATION_BUDGET = 2_000_000
_CHUNK = 8192


class EnumerationBudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class RicEstimate:
    """A restricted isometry constant of order ``order``.

    ``exact`` is only set by support enumeration; every other method yields
    a lower bound on the true constant. ``gram_max``/``gram_min`` are the
    extreme values of ``||A x||^2 / ||x||^2`` that were observed.
    """

    order: int
    value: float
    exact: bool
    method: str
    probes: int
    seed: int | None = None
    gram_max: float = float("nan")
    gram_min: float = float("nan")

    def to_dict(self):
        d = asdict(self)
        return {k: d[k] for k in ("order", "value", "exact", "method", "probes", "seed")}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def gram_deviation(A_S):
    """``max(lambda_max - 1, 1 - lambda_min)`` of ``A_S^T A_S``."""
    A_S = np.asarray(A_S, dtype=float)
    if A_S.ndim != 2 or A_S.shape[1] == 0:
        raise ValueError("need a non-empty column submatrix")
    ev = np.linalg.eigvalsh(A_S.T @ A_S)
    return float(max(ev[-1] - 1.0, 1.0 - ev[0]))


def _supports(n_cols, k):
    it = itertools.combinations(range(n_cols), k)
    while True:
        chunk = list(itertools.islice(it, _CHUNK))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.intp)


def restricted_eigenvalue_range(A, k, budget=ENUMERATION_BUDGET, stop_ratio=None):
    """Extreme eigenvalues of ``A_S^T A_S`` over all supports with ``|S| = k``.

    Returns ``(hi, lo, supports_checked)``. With ``stop_ratio`` the scan ends
    as soon as ``hi / lo`` exceeds it, so the result is then only partial.
    """
    A = np.asarray(A, dtype=float)
    n_cols = A.shape[1]
    if not 1 <= k <= n_cols:
        raise ValueError(f"order k={k} outside [1, {n_cols}]")
    count = math.comb(n_cols, k)
    if count > budget:
        raise EnumerationBudgetExceeded(
            f"C({n_cols}, {k}) = {count} supports exceeds the enumeration budget "
            f"{budget}; use a sampling estimate instead"
        )
    gram = A.T @ A
    hi, lo = -np.inf, np.inf
    checked = 0
    for idx in _supports(n_cols, k):
        sub = gram[idx[:, :, None], idx[:, None, :]]
        ev = np.linalg.eigvalsh(sub)
        hi = max(hi, float(ev[:, -1].max()))
        lo = min(lo, float(ev[:, 0].min()))
        checked += idx.shape[0]
        if stop_ratio is not None and hi > stop_ratio * lo:
            break
    return hi, lo, checked


def vector_ric_exact(A, k, budget=ENUMERATION_BUDGET):
    """Exact ``delta_k(A)`` by enumerating every ``k``-column support.

    No column normalization is applied. Supports of size exactly ``k``
    suffice since eigenvalue ranges of principal submatrices are nested.
    """
    hi, lo, count = restricted_eigenvalue_range(A, k, budget)
    value = max(hi - 1.0, 1.0 - lo)
    return RicEstimate(int(k), float(value), True, "enumeration", count,
                       gram_max=hi, gram_min=lo)


def _rayleigh(M, X):
    # ||A(X)||^2 / ||X||_F^2 for a batch or a single matrix
    if X.ndim == 2:
        return float(np.sum((M @ vec(X)) ** 2) / np.sum(X * X))
    flat = X.transpose(0, 2, 1).reshape(X.shape[0], -1)
    return np.sum((flat @ M.T) ** 2, axis=1) / np.sum(flat * flat, axis=1)


def _local_search(op, G, H, sign, iterations):
    """Projected gradient ascent (sign=+1) or descent (sign=-1) of the Rayleigh
    quotient over factor pairs, with backtracking and renormalization."""
    M = op.matrix

    def normalize(G, H):
        scale = math.sqrt(np.linalg.norm(G @ H.T))
        return G / scale, H / scale

    G, H = normalize(G, H)
    X = G @ H.T
    f = _rayleigh(M, X)
    step = 1.0
    for _ in range(iterations):
        AX = M @ vec(X)
        grad = 2.0 * (op.adjoint(AX) - f * X)
        dG, dH = sign * grad @ H, sign * grad.T @ G
        slope = float(np.sum(dG * dG) + np.sum(dH * dH))
        if slope < 1e-24:
            break
        while step > 1e-12:
            Gn, Hn = normalize(G + step * dG, H + step * dH)
            Xn = Gn @ Hn.T
            fn = _rayleigh(M, Xn)
            if sign * (fn - f) >= 1e-4 * step * slope:
                G, H, X, f = Gn, Hn, Xn, fn
                step *= 2.0
                break
            step *= 0.5
        else:
            break
    return f


def operator_ric_estimate(op, r, probes=2000, restarts=20, iterations=200, seed=0):
    """Lower bound on the rank-``r`` RIC of a measurement operator.

    Evaluates ``probes`` random rank-``r`` matrices ``G H^T`` and then runs
    ``restarts`` local searches in each direction, returning the largest
    deviation of ``||A(X)||^2`` from 1 over unit-Frobenius ``X`` seen.
    """
    n = min(op.n1, op.n2)
    if not 1 <= r <= n:
        raise ValueError(f"rank r={r} outside [1, {n}]")
    # separate streams so that adding probes only extends the probe sequence
    probe_rng, search_rng = (np.random.default_rng(s)
                             for s in np.random.SeedSequence(seed).spawn(2))
    hi, lo = -np.inf, np.inf
    for start in range(0, probes, _CHUNK):
        F = probe_rng.standard_normal((min(_CHUNK, probes - start), op.n1 + op.n2, r))
        vals = _rayleigh(op.matrix, F[:, :op.n1] @ F[:, op.n1:].transpose(0, 2, 1))
        hi, lo = max(hi, float(vals.max())), min(lo, float(vals.min()))
    rng = search_rng
    for _ in range(restarts):
        G = rng.standard_normal((op.n1, r))
        H = rng.standard_normal((op.n2, r))
        hi = max(hi, _local_search(op, G, H, +1.0, iterations))
        lo = min(lo, _local_search(op, G, H, -1.0, iterations))
    value = max(hi - 1.0, 1.0 - lo, 0.0)
    method = "multistart" if restarts > 0 else "sampling"
    return RicEstimate(int(r), float(value), False, method, int(probes), seed,
                       gram_max=hi, gram_min=lo)

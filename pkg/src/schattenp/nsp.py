"""Null space property predicates and the spectral inequalities behind them.

A matrix of rank at most ``r`` is the unique minimizer of ``||X||_p^p``
subject to ``A(X) = b`` whenever every nonzero ``W`` in the kernel of ``A``
has ``sum_{i<=r} sigma_i(W)^p < sum_{i>r} sigma_i(W)^p``. The checks here work
on a single spectrum; :func:`nsp_falsify` samples the kernel of an operator
looking for a violating direction.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import check_p
from .operators import null_space_basis, unvec

__all__ = [
    "SUBADDITIVITY_RTOL",
    "NspVerdict",
    "FalsifyReport",
    "nsp_check",
    "nsp_check_2r",
    "nsp_monotone_in_p",
    "subadditivity_check",
    "lemma5_transform",
    "nsp_falsify",
]

SUBADDITIVITY_RTOL = 1e-9


@dataclass(frozen=True)
class NspVerdict:
    holds: bool
    lhs: float
    rhs: float

    @property
    def margin(self):
        return self.rhs - self.lhs


def _spectrum(values):
    s = np.asarray(values, dtype=float).ravel()
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise ValueError("a spectrum must be finite and non-negative")
    return np.sort(s)[::-1]


def _split_verdict(s, head, p):
    sp = s ** p
    lhs = float(np.sum(sp[:head]))
    rhs = float(np.sum(sp[head:]))
    # strict inequality: a tie does not hold
    return NspVerdict(rhs - lhs > 0.0, lhs, rhs)


def nsp_check(spectrum, r, p):
    """Head of ``r`` singular values against the tail, each raised to ``p``."""
    p = check_p(p)
    s = _spectrum(spectrum)
    if not 0 <= r < s.size:
        raise ValueError(f"need 0 <= r < n={s.size}, got r={r}")
    return _split_verdict(s, int(r), p)


def nsp_check_2r(spectrum, r, p):
    """The more restrictive variant splitting after ``2r`` singular values."""
    p = check_p(p)
    s = _spectrum(spectrum)
    if not 0 <= 2 * r < s.size:
        raise ValueError(f"need 2r < n={s.size}, got r={r}")
    return _split_verdict(s, 2 * int(r), p)


def nsp_monotone_in_p(spectrum, r, p_list):
    """True unless the check passes at ``p = 1`` yet fails for some ``p`` in ``p_list``."""
    if not nsp_check(spectrum, r, 1.0).holds:
        return True
    return all(nsp_check(spectrum, r, p).holds for p in p_list)


def subadditivity_check(A, B, p):
    """Check ``sum sigma_i(A-B)^p >= sum |sigma_i(A)^p - sigma_i(B)^p|``.

    Returns ``(holds, slack)`` with ``slack = lhs - rhs``; a relative floor of
    ``SUBADDITIVITY_RTOL`` absorbs SVD rounding.
    """
    p = check_p(p)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    lhs = float(np.sum(linalg.singular_values(A - B) ** p))
    sa = linalg.singular_values(A) ** p
    sb = linalg.singular_values(B) ** p
    rhs = float(np.sum(np.abs(sa - sb)))
    slack = lhs - rhs
    return slack >= -SUBADDITIVITY_RTOL * max(1.0, lhs), slack


def lemma5_transform(X0, W, p=1.0, rtol=1e-9):
    """Align ``X0``'s spectrum with the singular vectors of ``W``.

    Builds ``X1 = -U diag(sigma(X0)) V^T`` where ``W = U diag(sigma(W)) V^T``,
    and reports whether ``||X0 + W||_p <= ||X0||_p`` implies
    ``||X1 + W||_p <= ||X1||_p`` on this pair (vacuously true when the
    premise fails). ``rtol`` loosens the conclusion for rounding only.

    Returns ``(X1, implication_holds)``.
    """
    p = check_p(p)
    X0 = np.asarray(X0, dtype=float)
    W = np.asarray(W, dtype=float)
    if X0.shape != W.shape:
        raise ValueError(f"shape mismatch: {X0.shape} vs {W.shape}")
    U, _, Vt = linalg.svd(W)
    X1 = -(U * linalg.singular_values(X0)) @ Vt
    norm_x0 = linalg.schatten_pp(X0, p)
    if not linalg.schatten_pp(X0 + W, p) <= norm_x0:
        return X1, True
    lhs = linalg.schatten_pp(X1 + W, p)
    rhs = linalg.schatten_pp(X1, p)
    return X1, lhs <= rhs + rtol * max(1.0, rhs)


@dataclass
class FalsifyReport:
    """Outcome of a kernel search for an NSP violation.

    Finding no witness does not prove the property, except when the kernel
    is one-dimensional (``exact``): then every kernel element is a multiple of
    one direction and the verdict is scale invariant.
    """

    checked: int
    witness_found: bool
    witness: np.ndarray | None
    witness_spectrum: list | None
    margin: float
    exact: bool

    def to_dict(self):
        return {
            "checked": self.checked,
            "witness_found": self.witness_found,
            "witness_spectrum": self.witness_spectrum,
            "margin": self.margin,
            "exact": self.exact,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def nsp_falsify(op, r, p, trials, seed):
    """Sample the kernel of ``op`` for a ``W`` violating the rank-``r`` NSP.

    Returns the first violating sample, or the smallest margin seen. The
    search is a falsifier only.
    """
    p = check_p(p)
    basis = null_space_basis(op)
    if basis.shape[1] == 1:
        directions = basis
        exact = True
    else:
        rng = np.random.default_rng(seed)
        coeffs = rng.standard_normal((basis.shape[1], int(trials)))
        directions = basis @ coeffs
        exact = False

    worst = np.inf
    for k in range(directions.shape[1]):
        W = unvec(directions[:, k], op.n1, op.n2)
        W /= linalg.frobenius(W)
        s = linalg.singular_values(W)
        verdict = nsp_check(s, r, p)
        worst = min(worst, verdict.margin)
        if not verdict.holds:
            return FalsifyReport(k + 1, True, W, s.tolist(), verdict.margin, exact)
    return FalsifyReport(directions.shape[1], False, None, None, float(worst), exact)

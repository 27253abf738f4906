"""Dense spectral utilities: SVD, Schatten and l_p quasi-norms, truncation.

All functions are pure and operate on ``numpy`` arrays of real floats.
Singular values are always returned sorted in descending order.
"""

from typing import NamedTuple

import numpy as np
import scipy.linalg

__all__ = [
    "SvdError",
    "SvdFactors",
    "svd",
    "singular_values",
    "schatten_quasi_norm",
    "schatten_pp",
    "frobenius",
    "best_rank_r",
    "numerical_rank",
    "vector_lp",
    "sorted_desc_abs",
    "top_k",
    "check_p",
]

# singular values below RANK_RTOL * sigma_1 count as zero
RANK_RTOL = 1e-12


class SvdError(np.linalg.LinAlgError):
    """Raised when no LAPACK driver manages to factor a matrix."""


class SvdFactors(NamedTuple):
    U: np.ndarray
    s: np.ndarray
    Vt: np.ndarray

    @property
    def V(self):
        return self.Vt.T

    def reconstruct(self):
        return (self.U * self.s) @ self.Vt


def check_p(p):
    """Validate a quasi-norm exponent, returning it as a float."""
    p = float(p)
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return p


def _as_finite_matrix(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains NaN or Inf entries")
    return M


def svd(M):
    """Thin SVD ``M = U diag(s) V^T`` with ``s`` descending.

    The divide-and-conquer driver is tried first; on failure the slower but
    more robust ``gesvd`` driver is used. If both fail, :class:`SvdError` is
    raised with the diagnostics reported by each driver.
    """
    M = _as_finite_matrix(M)
    errors = []
    for driver in ("gesdd", "gesvd"):
        try:
            U, s, Vt = scipy.linalg.svd(
                M, full_matrices=False, lapack_driver=driver, check_finite=False
            )
        except np.linalg.LinAlgError as exc:
            errors.append(f"{driver}: {exc}")
            continue
        return SvdFactors(U, s, Vt)
    raise SvdError(
        f"SVD of {M.shape[0]}x{M.shape[1]} matrix did not converge "
        f"({'; '.join(errors)})"
    )


def singular_values(M):
    M = _as_finite_matrix(M)
    try:
        return scipy.linalg.svdvals(M, check_finite=False)
    except np.linalg.LinAlgError:
        return svd(M).s


def schatten_pp(M, p):
    """Sum of ``sigma_i(M) ** p``, i.e. the p-th power of the quasi-norm."""
    p = check_p(p)
    return float(np.sum(singular_values(M) ** p))


def schatten_quasi_norm(M, p):
    """Schatten-p quasi-norm ``(sum_i sigma_i^p)^(1/p)``; nuclear norm at p=1."""
    p = check_p(p)
    return schatten_pp(M, p) ** (1.0 / p)


def frobenius(M):
    M = _as_finite_matrix(M)
    return float(np.sqrt(np.sum(M * M)))


def numerical_rank(M, rtol=RANK_RTOL):
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def best_rank_r(M, r):
    """Best rank-``r`` approximation in Frobenius norm (Eckart-Young).

    Keeps the ``r`` largest singular values and zeroes the rest.
    """
    M = _as_finite_matrix(M)
    n = min(M.shape)
    r = int(r)
    if r < 0 or r > n:
        raise ValueError(f"rank r={r} outside [0, {n}]")
    if r == n:
        return M.copy()
    U, s, Vt = svd(M)
    return (U[:, :r] * s[:r]) @ Vt[:r]


def vector_lp(x, p):
    """l_p quasi-norm ``(sum_i |x_i|^p)^(1/p)`` of a real sequence."""
    p = check_p(p)
    x = np.abs(np.asarray(x, dtype=float).ravel())
    return float(np.sum(x ** p) ** (1.0 / p))


def sorted_desc_abs(x):
    x = np.abs(np.asarray(x, dtype=float).ravel())
    return np.sort(x, kind="stable")[::-1]


def top_k(x, k):
    """Keep the ``k`` largest-magnitude entries of ``x`` in place, zero the rest.

    Ties are broken by first occurrence.
    """
    x = np.asarray(x, dtype=float).ravel()
    k = int(k)
    if k < 0 or k > x.size:
        raise ValueError(f"k={k} outside [0, {x.size}]")
    keep = np.argsort(-np.abs(x), kind="stable")[:k]
    out = np.zeros_like(x)
    out[keep] = x[keep]
    return out

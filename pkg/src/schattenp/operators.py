"""Linear measurement operators ``A: R^{n1 x n2} -> R^m``.

Every operator is stored densely as an ``m x (n1*n2)`` array acting on the
column-major (Fortran order) vectorization of its argument, so that
``A(X) = matrix @ X.ravel(order="F")``.
"""

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "MAX_ENTRIES",
    "EmptyNullSpaceError",
    "MeasurementOperator",
    "MeasurementModel",
    "gaussian_operator",
    "entry_mask_operator",
    "from_matrix",
    "apply",
    "adjoint",
    "null_space_basis",
    "null_space_sample",
    "vec",
    "unvec",
]

# refuse to allocate representations larger than this many float64 entries
MAX_ENTRIES = 1 << 25


class EmptyNullSpaceError(ValueError):
    """The operator is injective, so N(A) contains no nonzero matrix."""


def vec(X):
    return np.asarray(X, dtype=float).ravel(order="F")


def unvec(x, n1, n2):
    return np.asarray(x, dtype=float).reshape((n1, n2), order="F")


@dataclass(frozen=True, eq=False)
class MeasurementOperator:
    """Dense linear map from ``n1 x n2`` matrices to ``m``-vectors.

    ``kind`` is one of ``"gaussian"``, ``"entry-mask"`` or ``"custom"``. The
    seed (gaussian) or index list (entry-mask) is kept so the operator can be
    serialized without its entries.
    """

    matrix: np.ndarray
    n1: int
    n2: int
    kind: str = "custom"
    seed: int | None = None
    indices: tuple | None = None

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[1] != self.n1 * self.n2:
            raise ValueError(
                f"representation shape {M.shape} incompatible with "
                f"{self.n1}x{self.n2} inputs"
            )
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def m(self):
        return self.matrix.shape[0]

    @property
    def shape(self):
        return (self.n1, self.n2)

    def __call__(self, X):
        return apply(self, X)

    def adjoint(self, y):
        return adjoint(self, y)

    def as_tensor(self):
        """Measurement matrices ``A_i`` stacked as an ``(m, n1, n2)`` array,
        so that ``A(X)_i = <A_i, X>_F``."""
        return self.matrix.reshape((self.m, self.n2, self.n1)).transpose(0, 2, 1)

    def to_dict(self):
        doc = {"kind": self.kind, "m": self.m, "n1": self.n1, "n2": self.n2}
        if self.kind == "gaussian":
            doc["seed"] = self.seed
        elif self.kind == "entry-mask":
            doc["indices"] = [list(ij) for ij in self.indices]
        else:
            doc["entries"] = self.matrix.tolist()
        return doc

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc):
        kind = doc["kind"]
        n1, n2 = int(doc["n1"]), int(doc["n2"])
        if kind == "gaussian":
            return gaussian_operator(int(doc["m"]), n1, n2, int(doc["seed"]))
        if kind == "entry-mask":
            return entry_mask_operator([tuple(ij) for ij in doc["indices"]], n1, n2)
        if kind == "custom":
            return from_matrix(np.asarray(doc["entries"], dtype=float), n1, n2)
        raise ValueError(f"unknown operator kind {kind!r}")

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class MeasurementModel:
    """Measurements ``b = A(X) + e`` with noise budget ``epsilon >= ||e||_2``."""

    operator: MeasurementOperator
    b: np.ndarray
    epsilon: float = 0.0

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).ravel()
        if b.shape != (self.operator.m,):
            raise ValueError(f"b has length {b.size}, operator has m={self.operator.m}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    def residual(self, X):
        return float(np.linalg.norm(apply(self.operator, X) - self.b))


def _check_budget(m, n1, n2):
    if m * n1 * n2 > MAX_ENTRIES:
        raise MemoryError(
            f"operator with m={m}, n1={n1}, n2={n2} needs {m * n1 * n2} entries, "
            f"over the budget of {MAX_ENTRIES}"
        )


def gaussian_operator(m, n1, n2, seed):
    """Operator with i.i.d. ``N(0, 1/m)`` entries, so ``E||A(X)||^2 = ||X||_F^2``."""
    m, n1, n2 = int(m), int(n1), int(n2)
    if m < 1 or n1 < 1 or n2 < 1:
        raise ValueError("m, n1 and n2 must be positive")
    _check_budget(m, n1, n2)
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((m, n1 * n2)) / np.sqrt(m)
    return MeasurementOperator(G, n1, n2, kind="gaussian", seed=int(seed))


def entry_mask_operator(indices, n1, n2):
    """Sampling operator returning the listed entries of ``X``.

    Measurements come in row-major order of the sorted index set, i.e.
    ``A(X) = [X[i, j] for (i, j) in sorted(indices)]``.
    """
    pairs = [(int(i), int(j)) for i, j in indices]
    if len(set(pairs)) != len(pairs):
        raise ValueError("duplicate indices in entry mask")
    for i, j in pairs:
        if not (0 <= i < n1 and 0 <= j < n2):
            raise ValueError(f"index {(i, j)} out of range for {n1}x{n2}")
    pairs = sorted(pairs)
    _check_budget(len(pairs), n1, n2)
    M = np.zeros((len(pairs), n1 * n2))
    for row, (i, j) in enumerate(pairs):
        M[row, i + j * n1] = 1.0
    return MeasurementOperator(M, n1, n2, kind="entry-mask", indices=tuple(pairs))


def from_matrix(matrix, n1, n2):
    return MeasurementOperator(np.array(matrix, dtype=float), int(n1), int(n2))


def apply(op, X):
    X = np.asarray(X, dtype=float)
    if X.shape != op.shape:
        raise ValueError(f"expected a {op.n1}x{op.n2} matrix, got shape {X.shape}")
    return op.matrix @ vec(X)


def adjoint(op, y):
    y = np.asarray(y, dtype=float).ravel()
    if y.shape != (op.m,):
        raise ValueError(f"expected a vector of length {op.m}, got {y.shape}")
    return unvec(op.matrix.T @ y, op.n1, op.n2)


def null_space_basis(op):
    """Orthonormal basis (as columns) of the kernel of the representation."""
    basis = scipy.linalg.null_space(op.matrix)
    if basis.shape[1] == 0:
        raise EmptyNullSpaceError(
            f"operator with m={op.m} on {op.n1}x{op.n2} matrices is injective"
        )
    return basis


def null_space_sample(op, seed, count):
    """Random nonzero matrices ``W`` with ``A(W) = 0``.

    Each sample is a Gaussian combination of an orthonormal kernel basis,
    normalized to unit Frobenius norm.
    """
    basis = null_space_basis(op)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((basis.shape[1], int(count)))
    coeffs /= np.linalg.norm(coeffs, axis=0)
    W = basis @ coeffs
    return [unvec(W[:, k], op.n1, op.n2) for k in range(W.shape[1])]

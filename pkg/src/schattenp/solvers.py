"""Recovery programs.

* :func:`nnm_solve` -- nuclear norm minimization, ``min ||X||_*`` subject to
  ``||A(X) - b||_2 <= eps``, by Douglas-Rachford splitting between singular
  value soft-thresholding and projection onto the residual ball.
* :func:`psnm_solve` -- Schatten-p quasi-norm minimization by smoothed
  iteratively reweighted least squares (IRLS).
* :func:`lp_vector_solve` -- the l_p analogue for sparse vectors.

The quasi-norm programs are nonconvex and no solver here claims global
optimality. :func:`certify_candidate` checks the two properties that the
error bounds actually need from a candidate: feasibility and an objective no
larger than the ground truth's.
"""

import json
import logging
from dataclasses import dataclass, asdict

import numpy as np
from scipy.optimize import brentq

from . import linalg
from .linalg import check_p
from .operators import MeasurementModel, unvec, vec

__all__ = [
    "FEASIBILITY_ATOL",
    "SolverConfig",
    "RecoveryReport",
    "VectorModel",
    "nnm_solve",
    "psnm_solve",
    "lp_vector_solve",
    "certify_candidate",
    "weighted_least_norm",
]

log = logging.getLogger(__name__)

FEASIBILITY_ATOL = 1e-8
OBJECTIVE_ATOL = 1e-10
# log-normal spread of the random initial weights used by restarts
_RESTART_SPREAD = 4.0


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    The smoothing parameter ``gamma`` starts at ``gamma0`` (default
    ``0.1 * sigma_1(A^*(b))``), is multiplied by ``decay`` after each stage
    and is never taken below ``gamma_floor``. A stage ends after
    ``stage_iterations`` IRLS steps or once the relative change of the
    iterate drops below ``stage_tolerance``. ``max_iterations`` caps the
    total IRLS (or splitting) steps of one start.
    """

    p: float = 0.5
    max_iterations: int = 3000
    tolerance: float = 1e-8
    gamma0: float | None = None
    decay: float = 0.5
    gamma_floor: float = 1e-10
    stage_iterations: int = 50
    stage_tolerance: float = 1e-4
    restarts: int = 5
    seed: int = 0
    # Douglas-Rachford step for nnm_solve, relative to ||A^+ b||_F
    dr_step: float = 0.2
    polish: bool = True

    def __post_init__(self):
        check_p(self.p)
        if not 0.0 < self.decay < 1.0:
            raise ValueError(f"decay must lie in (0, 1), got {self.decay}")
        if not self.gamma_floor > 0.0:
            raise ValueError("gamma_floor must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def replace(self, **changes):
        return SolverConfig(**{**asdict(self), **changes})


@dataclass
class RecoveryReport:
    estimate: np.ndarray
    objective: float
    residual: float
    feasible: bool
    quasi_norm_le_truth: bool | None
    iterations: int
    restarts_used: int
    converged: bool

    def to_dict(self):
        return {
            "estimate": np.asarray(self.estimate).tolist(),
            "objective": self.objective,
            "residual": self.residual,
            "feasible": self.feasible,
            "quasi_norm_le_truth": self.quasi_norm_le_truth,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class VectorModel:
    """Sparse-vector measurements ``b = A x + e`` with ``||e||_2 <= epsilon``."""

    A: np.ndarray
    b: np.ndarray
    epsilon: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] != b.size:
            raise ValueError(f"A of shape {A.shape} does not match b of length {b.size}")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    def residual(self, x):
        return float(np.linalg.norm(self.A @ np.asarray(x, dtype=float).ravel() - self.b))


def _objective(x, p):
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        return linalg.schatten_pp(x, p)
    return float(np.sum(np.abs(x) ** p))


def _is_feasible(residual, epsilon):
    return residual <= epsilon + FEASIBILITY_ATOL


def certify_candidate(truth, estimate, model, p):
    """Return ``(feasible, objective_le_truth)`` for a candidate solution.

    Works for matrices with a :class:`MeasurementModel` and for vectors with
    a :class:`VectorModel`.
    """
    p = check_p(p)
    feasible = _is_feasible(model.residual(estimate), model.epsilon)
    le = _objective(estimate, p) <= _objective(truth, p) + OBJECTIVE_ATOL
    return bool(feasible), bool(le)


# ---------------------------------------------------------------------------
# weighted least-norm step shared by both IRLS solvers


def weighted_least_norm(M, QinvMt, b, epsilon):
    """Minimize ``x^T Q x`` subject to ``||M x - b||_2 <= epsilon``.

    ``QinvMt`` is ``Q^{-1} M^T``. The minimizer is ``x = Q^{-1} M^T y`` with
    ``y = (K + lam I)^{-1} b``, ``K = M Q^{-1} M^T``, where ``lam >= 0`` solves
    the secular equation ``||lam (K + lam I)^{-1} b|| = epsilon`` (``lam = 0``
    for exact constraints). When the constraint set is empty the least-squares
    point is returned.
    """
    b_norm = float(np.linalg.norm(b))
    if epsilon > 0 and b_norm <= epsilon:
        return np.zeros(QinvMt.shape[0])
    K = M @ QinvMt
    K = 0.5 * (K + K.T)
    kappa, V = np.linalg.eigh(K)
    kappa = np.maximum(kappa, 0.0)
    c = V.T @ b
    pos = kappa > kappa[-1] * 1e-13
    kappa = np.where(pos, kappa, 0.0)
    res0 = float(np.sqrt(np.sum(c[~pos] ** 2)))
    if epsilon == 0 or res0 >= epsilon:
        y = V[:, pos] @ (c[pos] / kappa[pos])
        return QinvMt @ y

    def gap(lam):
        if lam == 0.0:
            return res0 - epsilon
        return float(np.linalg.norm(lam * c / (kappa + lam))) - epsilon

    hi = 2.0 * epsilon * kappa[-1] / (b_norm - epsilon) + 1e-300
    while gap(hi) < 0:
        hi *= 2.0
    lam = brentq(gap, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    y = V @ (c / (kappa + lam))
    return QinvMt @ y


# ---------------------------------------------------------------------------
# smoothed IRLS


class _MatrixProblem:
    """Schatten-p surrogate ``sum_i (sigma_i^2 + gamma)^(p/2)`` on matrices."""

    def __init__(self, model):
        self.op = model.operator
        self.M = self.op.matrix
        self.T = self.op.as_tensor()
        self.b = model.b
        self.epsilon = model.epsilon
        # weight the Gram matrix of the smaller side
        self.right = self.op.n2 <= self.op.n1

    def start(self, rng):
        side = self.op.n2 if self.right else self.op.n1
        if rng is None:
            return self._solve(np.eye(side))
        Q, _ = np.linalg.qr(rng.standard_normal((side, side)))
        w = np.exp(_RESTART_SPREAD * rng.standard_normal(side))
        return self._solve((Q * w) @ Q.T)

    def _gram(self, X):
        return X.T @ X if self.right else X @ X.T

    def _solve(self, Winv):
        if self.right:
            rows = self.T @ Winv
        else:
            rows = Winv @ self.T
        QinvMt = rows.transpose(0, 2, 1).reshape(rows.shape[0], -1).T
        x = weighted_least_norm(self.M, QinvMt, self.b, self.epsilon)
        return unvec(x, self.op.n1, self.op.n2)

    def step(self, X, gamma, p):
        ev, U = np.linalg.eigh(self._gram(X))
        ev = np.maximum(ev, 0.0)
        Winv = (U * (ev + gamma) ** (1.0 - 0.5 * p)) @ U.T
        return self._solve(0.5 * (Winv + Winv.T))

    def surrogate(self, X, gamma, p):
        ev = np.maximum(np.linalg.eigvalsh(self._gram(X)), 0.0)
        return float(np.sum((ev + gamma) ** (0.5 * p)))

    def residual(self, X):
        return float(np.linalg.norm(self.M @ vec(X) - self.b))

    def scale(self):
        return float(linalg.singular_values(self.op.adjoint(self.b))[0])


class _VectorProblem:
    """l_p surrogate ``sum_i (x_i^2 + gamma)^(p/2)`` on vectors."""

    def __init__(self, model):
        self.M = model.A
        self.b = model.b
        self.epsilon = model.epsilon

    def start(self, rng):
        n = self.M.shape[1]
        if rng is None:
            return self._solve(np.ones(n))
        return self._solve(np.exp(_RESTART_SPREAD * rng.standard_normal(n)))

    def _solve(self, winv):
        return weighted_least_norm(self.M, winv[:, None] * self.M.T, self.b, self.epsilon)

    def step(self, x, gamma, p):
        return self._solve((x * x + gamma) ** (1.0 - 0.5 * p))

    def surrogate(self, x, gamma, p):
        return float(np.sum((x * x + gamma) ** (0.5 * p)))

    def residual(self, x):
        return float(np.linalg.norm(self.M @ x - self.b))

    def scale(self):
        return float(np.max(np.abs(self.M.T @ self.b)))


def _initial_gamma(problem, config, restart):
    gamma = config.gamma0 if config.gamma0 is not None else 0.1 * problem.scale()
    if restart > 0:
        # random starts begin closer to the nonsmooth problem so that their
        # initial weights still matter
        gamma *= 10.0 ** -(1 + (restart - 1) % 3)
    return max(gamma, config.gamma_floor)


def _irls(problem, config, rng, restart=0, trace=None):
    """One smoothed IRLS run. Returns ``(x, iterations, converged)``.

    ``rng=None`` starts from the least-norm feasible point, otherwise from a
    randomly weighted one. With ``trace`` given, ``(gamma, surrogate)`` pairs
    are appended after every step so that per-stage descent can be inspected.
    """
    p = config.p
    gamma = _initial_gamma(problem, config, restart)
    x = problem.start(rng)
    if trace is not None:
        trace.append((gamma, problem.surrogate(x, gamma, p)))
    stage_steps = 0
    for it in range(1, config.max_iterations + 1):
        x_new = problem.step(x, gamma, p)
        change = np.linalg.norm(x_new - x) / max(np.linalg.norm(x_new), 1e-300)
        x = x_new
        stage_steps += 1
        if trace is not None:
            trace.append((gamma, problem.surrogate(x, gamma, p)))
        at_floor = gamma <= config.gamma_floor
        if at_floor:
            if change < config.tolerance:
                return x, it, True
        elif change < config.stage_tolerance or stage_steps >= config.stage_iterations:
            gamma = max(gamma * config.decay, config.gamma_floor)
            stage_steps = 0
    return x, config.max_iterations, False


def _polish_vector(model, x, config):
    """Re-solve on the numerical support so off-support entries are exactly 0."""
    mag = np.abs(x)
    if mag.max() == 0:
        return x
    support = np.flatnonzero(mag > 1e-6 * mag.max())
    if support.size == x.size:
        return x
    sub = VectorModel(model.A[:, support], model.b, model.epsilon)
    x_sub, _, _ = _irls(_VectorProblem(sub), config.replace(gamma0=None), None)
    # _irls starts from the unweighted least-norm point on the support
    out = np.zeros_like(x)
    out[support] = x_sub
    candidates = [out]
    if model.epsilon == 0.0:
        # noiseless minimizers sit on basic solutions; try the top-k supports
        order = np.argsort(-mag, kind="stable")
        for k in range(1, min(model.A.shape) + 1):
            cols = order[:k]
            z = np.zeros_like(x)
            z[cols] = np.linalg.lstsq(model.A[:, cols], model.b, rcond=None)[0]
            candidates.append(z)
    best = x
    for z in candidates:
        if _is_feasible(model.residual(z), model.epsilon) and _objective(z, config.p) <= _objective(best, config.p):
            best = z
    return best


def _multistart(problem, model, config, truth, polish=None):
    rng = np.random.default_rng(config.seed)
    best = None
    total_iterations = 0
    used = 0
    all_converged = True
    for k in range(config.restarts):
        used += 1
        x, its, converged = _irls(problem, config, None if k == 0 else rng, restart=k)
        total_iterations += its
        all_converged &= converged
        if polish is not None:
            x = polish(model, x, config)
        res = model.residual(x)
        feas = _is_feasible(res, model.epsilon)
        obj = _objective(x, config.p)
        key = (not feas, obj)
        if best is None or key < best[0]:
            best = (key, res, x)
    (infeasible, obj), res, x = best
    le = None if truth is None else _objective(x, config.p) <= _objective(truth, config.p) + OBJECTIVE_ATOL
    return RecoveryReport(
        estimate=x,
        objective=obj,
        residual=res,
        feasible=not infeasible,
        quasi_norm_le_truth=le,
        iterations=total_iterations,
        restarts_used=used,
        converged=all_converged,
    )


def psnm_solve(model, config=SolverConfig(), truth=None):
    """Schatten-p quasi-norm minimization by smoothed IRLS.

    Each step minimizes ``tr(W X^T X)`` (weights on the smaller Gram side)
    with ``W = (X_k^T X_k + gamma I)^(p/2 - 1)`` subject to the residual
    ball, which majorizes the smoothed surrogate. The first start is the
    least Frobenius norm feasible point; further starts use random weights.
    Returns the feasible candidate with the smallest ``||X||_p^p``.
    """
    if not isinstance(model, MeasurementModel):
        raise TypeError("psnm_solve expects a MeasurementModel")
    return _multistart(_MatrixProblem(model), model, config, truth)


def lp_vector_solve(A, b_v, config=SolverConfig(), epsilon=0.0, truth=None):
    """``min ||x||_p^p`` subject to ``||A x - b_v||_2 <= epsilon`` by smoothed IRLS.

    With ``config.polish`` the result is re-solved on its numerical support
    so that it is exactly sparse.
    """
    model = VectorModel(A, b_v, epsilon)
    polish = _polish_vector if config.polish else None
    return _multistart(_VectorProblem(model), model, config, truth, polish)


# ---------------------------------------------------------------------------
# nuclear norm minimization


class _ResidualBall:
    """Euclidean projection onto ``{x : ||M x - b||_2 <= eps}``."""

    def __init__(self, M, b, epsilon):
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        keep = s > s[0] * 1e-12 if s.size else s > 0
        self.s, self.Vt = s[keep], Vt[keep]
        U = U[:, keep]
        self.beta = U.T @ b
        # part of b no x can reach
        self.unreachable = float(np.linalg.norm(b - U @ self.beta))
        self.epsilon = epsilon
        if self.unreachable > epsilon + FEASIBILITY_ATOL:
            log.warning("residual ball is empty: ||b_perp||=%.3g > eps=%.3g",
                        self.unreachable, epsilon)

    def __call__(self, z):
        c = self.Vt @ z
        r = self.s * c - self.beta
        budget2 = self.epsilon ** 2 - self.unreachable ** 2
        if budget2 >= 0 and r @ r <= budget2:
            return z
        if self.epsilon == 0 or budget2 <= 0:
            return z - self.Vt.T @ (r / self.s)
        s2 = self.s ** 2
        budget = np.sqrt(budget2)

        def gap(mu):
            return float(np.linalg.norm(r / (1.0 + mu * s2))) - budget

        hi = 1.0 / s2.min()
        while gap(hi) > 0:
            hi *= 2.0
        mu = brentq(gap, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
        # x = z - mu M^T (M x - b) solved in row-space coordinates
        return z - self.Vt.T @ (mu * self.s * r / (1.0 + mu * s2))


def _svt(Z, tau):
    U, s, Vt = linalg.svd(Z)
    s = np.maximum(s - tau, 0.0)
    keep = s > 0
    return (U[:, keep] * s[keep]) @ Vt[keep]


def nnm_solve(model, config=SolverConfig(p=1.0), truth=None):
    """Nuclear norm minimization by Douglas-Rachford splitting.

    Alternates projection onto the residual ball with singular value
    soft-thresholding. The returned iterate is the projected one, so it is
    feasible whenever the ball is nonempty. Stops when the two half-steps
    agree to ``tolerance`` and the nuclear norm has changed by less than
    ``tolerance`` (relative) over the last 10 iterations.
    """
    if not isinstance(model, MeasurementModel):
        raise TypeError("nnm_solve expects a MeasurementModel")
    op, b, eps = model.operator, model.b, model.epsilon
    n1, n2 = op.shape
    project = _ResidualBall(op.matrix, b, eps)
    Z = project(np.zeros(n1 * n2))
    x_scale = np.linalg.norm(Z)
    tau = config.dr_step * max(x_scale, 1e-300)
    history = []
    converged = False
    it = 0
    Xc = Z
    for it in range(1, config.max_iterations + 1):
        Xc = project(Z)
        Xs = vec(_svt(unvec(2.0 * Xc - Z, n1, n2), tau))
        gap = np.linalg.norm(Xs - Xc)
        Z = Z + Xs - Xc
        history.append(linalg.schatten_pp(unvec(Xc, n1, n2), 1.0))
        if it > 10 and gap <= config.tolerance * max(np.linalg.norm(Xc), 1e-300):
            old = history[-11]
            if abs(history[-1] - old) <= config.tolerance * max(abs(old), 1e-300):
                converged = True
                break
    X = unvec(Xc, n1, n2)
    res = model.residual(X)
    obj = linalg.schatten_pp(X, 1.0)
    le = None if truth is None else obj <= linalg.schatten_pp(truth, 1.0) + OBJECTIVE_ATOL
    return RecoveryReport(
        estimate=X,
        objective=obj,
        residual=res,
        feasible=_is_feasible(res, eps),
        quasi_norm_le_truth=le,
        iterations=it,
        restarts_used=1,
        converged=converged,
    )

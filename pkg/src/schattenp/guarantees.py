"""RIP-based recovery thresholds and error-bound constants.

Two sufficient conditions on the restricted isometry constant ``delta_2t``
are implemented, both for some block size ``t >= r``:

* the uniform condition inherited from l_p sparse recovery,
  ``delta_2t < c a / (c a + 1)`` with ``c = 2 (sqrt 2 - 1)`` and
  ``a = (t/r)^(1/p - 1/2)``;
* the sharper small-``p`` condition ``delta_2t < (b - 1) / (b + 1)`` with
  ``b = (t/r)^(2/p - 1)``, which also comes with explicit constants for the
  stability bounds.

The same formulas apply to sparse vectors (with ``r`` the sparsity) and to
low-rank matrices (with ``r`` the rank). Powers of ``t/r`` are evaluated in
log space because exponents reach the hundreds for small ``p``.
"""

import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .linalg import check_p

__all__ = [
    "UNIFORM_CONSTANT",
    "COROLLARY_THRESHOLD",
    "GuaranteeParams",
    "BoundConstants",
    "ConditionViolated",
    "NoCrossingError",
    "ThresholdCurve",
    "prop2_threshold",
    "thm2_threshold",
    "smallp2_threshold",
    "thm2_constants",
    "thm2_condition_holds",
    "corollary_small_p",
    "corollary_small_p_thm2",
    "crossing_point",
    "crossing_point_closed_form",
    "threshold_curve",
    "error_bound_rhs",
]

UNIFORM_CONSTANT = 2.0 * (math.sqrt(2.0) - 1.0)
# value of the uniform threshold at t = r, independent of p
COROLLARY_THRESHOLD = UNIFORM_CONSTANT / (UNIFORM_CONSTANT + 1.0)

_ROOT_XTOL = 1e-12
_P_FLOOR = 1e-9


class ConditionViolated(ValueError):
    """``mu^p >= 1``: the small-p RIP condition fails, constants undefined."""

    def __init__(self, mu, p):
        self.mu = mu
        self.p = p
        super().__init__(f"recovery condition violated: mu={mu:.6g}, mu^p={mu**p:.6g} >= 1")


class NoCrossingError(ValueError):
    """The two threshold curves do not cross inside (0, 1)."""


def _check_rt(r, t):
    if int(r) != r or int(t) != t:
        raise ValueError(f"r and t must be integers, got r={r}, t={t}")
    r, t = int(r), int(t)
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if t < r:
        raise ValueError(f"t must be >= r, got t={t} < r={r}")
    return r, t


@dataclass(frozen=True)
class GuaranteeParams:
    p: float
    r: int
    t: int
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p", check_p(self.p))
        r, t = _check_rt(self.r, self.t)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)
        if not (0.0 <= self.delta < 1.0):
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")
        object.__setattr__(self, "delta", float(self.delta))


@dataclass(frozen=True)
class BoundConstants:
    lam: float
    mu: float
    c1: float
    d1: float
    c2: float
    d2: float

    def as_dict(self):
        return {
            "lambda": self.lam, "mu": self.mu,
            "c1": self.c1, "d1": self.d1, "c2": self.c2, "d2": self.d2,
        }


def _log_ratio(r, t):
    return math.log(t) - math.log(r)


def prop2_threshold(p, r, t):
    """Uniform sufficient bound on ``delta_2t``: ``c a / (c a + 1)``."""
    p = check_p(p)
    r, t = _check_rt(r, t)
    log_a = (1.0 / p - 0.5) * _log_ratio(r, t)
    return float(expit(math.log(UNIFORM_CONSTANT) + log_a))


def thm2_threshold(p, r, t):
    """Small-p sufficient bound on ``delta_2t``: ``(b - 1) / (b + 1)``.

    Vanishes at ``t = r``.
    """
    p = check_p(p)
    r, t = _check_rt(r, t)
    log_b = (2.0 / p - 1.0) * _log_ratio(r, t)
    return math.tanh(0.5 * log_b)


def smallp2_threshold(p, r):
    """:func:`thm2_threshold` with ``t = r + 1``, i.e. a bound on ``delta_{2r+2}``."""
    return thm2_threshold(p, r, int(r) + 1)


def _mu(params):
    p, r, t, delta = params.p, params.r, params.t, params.delta
    scale = math.exp(-(1.0 / p - 0.5) * _log_ratio(r, t))
    return math.sqrt((1.0 + delta) / (1.0 - delta)) * scale


def thm2_condition_holds(params):
    return _mu(params) ** params.p < 1.0


def thm2_constants(params):
    """Constants of the small-p stability bounds.

    Returns ``lambda = 2 / sqrt(1 - delta)``,
    ``mu = sqrt((1 + delta) / (1 - delta)) (r/t)^(1/p - 1/2)`` and the four
    bound constants. Raises :class:`ConditionViolated` when ``mu^p >= 1``.
    """
    p, delta = params.p, params.delta
    lam = 2.0 / math.sqrt(1.0 - delta)
    mu = _mu(params)
    mp = mu ** p
    if not mp < 1.0:
        raise ConditionViolated(mu, p)
    denom = (1.0 - mp) ** (1.0 / p)
    two_pow = 2.0 ** (2.0 / p - 1.0)
    kappa = 1.0 + 2.0 * math.sqrt((1.0 + delta) / (1.0 - delta))
    c1 = two_pow * (1.0 + mp) ** (1.0 / p) / denom
    d1 = two_pow * lam / denom
    c2 = kappa * two_pow / denom
    d2 = 2.0 * lam + kappa * 2.0 ** (1.0 / p - 1.0) * lam / denom
    return BoundConstants(lam=lam, mu=mu, c1=c1, d1=d1, c2=c2, d2=d2)


def error_bound_rhs(kind, constants, params, tail_p, epsilon):
    """Right-hand side of a stability bound.

    ``kind="quasi-norm"`` bounds ``||x0 - x*||_p`` by
    ``c1 * tail_p + d1 * r^(1/p - 1/2) * epsilon``; ``kind="frobenius"``
    bounds ``||x0 - x*||_2`` (or the Frobenius error) by
    ``c2 * t^(1/2 - 1/p) * tail_p + d2 * epsilon``. Here ``tail_p`` is the
    quasi-norm of ``x0`` minus its best ``r``-term (rank-``r``) approximation.
    """
    if tail_p < 0 or epsilon < 0:
        raise ValueError("tail and epsilon must be non-negative")
    p, r, t = params.p, params.r, params.t
    if kind == "quasi-norm":
        return constants.c1 * tail_p + constants.d1 * r ** (1.0 / p - 0.5) * epsilon
    if kind == "frobenius":
        return constants.c2 * t ** (0.5 - 1.0 / p) * tail_p + constants.d2 * epsilon
    raise ValueError(f"unknown bound kind {kind!r}")


def _largest_p_below(threshold, delta):
    # thresholds decrease in p for t > r, so the admissible set is (0, p0)
    if threshold(1.0) > delta:
        return 1.0
    return brentq(lambda p: threshold(p) - delta, _P_FLOOR, 1.0, xtol=_ROOT_XTOL)


def corollary_small_p(r, delta):
    """Largest ``p0`` with the uniform condition (``t = r + 1``) holding on ``(0, p0)``."""
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    r = int(r)
    return _largest_p_below(lambda p: prop2_threshold(p, r, r + 1), delta)


def corollary_small_p_thm2(r, delta):
    """Same as :func:`corollary_small_p` for the small-p condition."""
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    r = int(r)
    return _largest_p_below(lambda p: smallp2_threshold(p, r), delta)


def _log_gap(p, r, t):
    # log(1 - prop2) - log(1 - thm2); positive exactly where thm2 > prop2
    lr = _log_ratio(r, t)
    log_a = (1.0 / p - 0.5) * lr
    log_b = (2.0 / p - 1.0) * lr
    return np.logaddexp(log_b, 0.0) - math.log(2.0) - np.logaddexp(
        math.log(UNIFORM_CONSTANT) + log_a, 0.0
    )


def crossing_point_closed_form(r, t):
    """Crossing from the quadratic ``a^2 - 2 c a - 1 = 0`` in ``a = (t/r)^(1/p-1/2)``."""
    r, t = _check_rt(r, t)
    if t == r:
        raise NoCrossingError("curves never cross when t == r")
    c = UNIFORM_CONSTANT
    a_star = c + math.sqrt(c * c + 1.0)
    p_star = 1.0 / (math.log(a_star) / _log_ratio(r, t) + 0.5)
    if not (0.0 < p_star < 1.0):
        raise NoCrossingError(f"no crossing in (0, 1) for t/r={t / r:.6g}")
    return p_star


def crossing_point(r, t):
    """``p*`` in (0, 1) where both thresholds coincide, by root finding.

    The small-p threshold is the larger one for ``p < p*``.
    """
    r, t = _check_rt(r, t)
    if t == r:
        raise NoCrossingError("curves never cross when t == r")
    lo, hi = _P_FLOOR, 1.0
    if _log_gap(hi, r, t) >= 0.0 or _log_gap(lo, r, t) <= 0.0:
        raise NoCrossingError(f"no crossing in (0, 1) for t/r={t / r:.6g}")
    return brentq(_log_gap, lo, hi, args=(r, t), xtol=_ROOT_XTOL)


@dataclass(frozen=True)
class ThresholdCurve:
    r: int
    t: int
    p: np.ndarray
    delta_prop2: np.ndarray
    delta_thm2: np.ndarray

    @property
    def samples(self):
        return list(zip(self.p.tolist(), self.delta_prop2.tolist(), self.delta_thm2.tolist()))

    def to_csv(self):
        buf = io.StringIO()
        buf.write("p,delta_prop2,delta_thm2\n")
        for row in self.samples:
            buf.write(",".join(f"{v:.12g}" for v in row) + "\n")
        return buf.getvalue()

    def to_dict(self):
        return {
            "r": self.r,
            "t": self.t,
            "samples": [
                {"p": float(f"{p:.12g}"), "delta_prop2": float(f"{a:.12g}"),
                 "delta_thm2": float(f"{b:.12g}")}
                for p, a, b in self.samples
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def threshold_curve(r, t, p_grid):
    """Evaluate both thresholds on a strictly increasing grid in (0, 1]."""
    r, t = _check_rt(r, t)
    grid = np.asarray(p_grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty p grid")
    for p in grid:
        check_p(p)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("p grid must be strictly increasing")
    prop2 = np.array([prop2_threshold(p, r, t) for p in grid])
    thm2 = np.array([thm2_threshold(p, r, t) for p in grid])
    return ThresholdCurve(r, t, grid, prop2, thm2)

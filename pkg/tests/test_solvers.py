import itertools
import json

import cvxpy as cp
import numpy as np
import pytest
from scipy.optimize import linprog

from schattenp import linalg, solvers
from schattenp.operators import MeasurementModel, from_matrix, gaussian_operator, vec
from schattenp.solvers import SolverConfig


def planted_matrix(seed, n1=10, n2=10, r=1, m=60, eps=0.0):
    rng = np.random.default_rng(seed)
    op = gaussian_operator(m, n1, n2, seed=seed)
    X0 = rng.standard_normal((n1, r)) @ rng.standard_normal((n2, r)).T
    X0 /= linalg.frobenius(X0)
    b = op(X0)
    if eps > 0:
        e = rng.standard_normal(m)
        b = b + 0.5 * eps * e / np.linalg.norm(e)
    return MeasurementModel(op, b, eps), X0


def planted_vector(seed, n_rows=8, n=20, k=2):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n_rows, n)) / np.sqrt(n_rows)
    x = np.zeros(n)
    x[rng.choice(n, k, replace=False)] = rng.standard_normal(k)
    return A, x


def rel_err(est, truth):
    return np.linalg.norm(est - truth) / np.linalg.norm(truth)


# -- config and reports -------------------------------------------------------------


@pytest.mark.parametrize(
    "changes",
    [{"p": 0.0}, {"p": 1.5}, {"decay": 1.0}, {"decay": 0.0}, {"gamma_floor": 0.0},
     {"restarts": 0}, {"max_iterations": 0}],
)
def test_config_validation(changes):
    with pytest.raises(ValueError):
        SolverConfig(**changes)


def test_config_replace_keeps_other_fields():
    cfg = SolverConfig(restarts=3).replace(p=0.7)
    assert (cfg.p, cfg.restarts) == (0.7, 3)


def test_report_json():
    model, X0 = planted_matrix(0)
    rep = solvers.nnm_solve(model, truth=X0)
    doc = json.loads(rep.to_json())
    assert {"estimate", "objective", "residual", "feasible", "quasi_norm_le_truth",
            "iterations", "restarts_used", "converged"} <= set(doc)


# -- certification ---------------------------------------------------------------------


def test_certify_truth_and_infeasible():
    model, X0 = planted_matrix(1)
    assert solvers.certify_candidate(X0, X0, model, 0.5) == (True, True)
    feasible, _ = solvers.certify_candidate(X0, X0 + 1.0, model, 0.5)
    assert not feasible
    A, x = planted_vector(0)
    vm = solvers.VectorModel(A, A @ x)
    assert solvers.certify_candidate(x, x, vm, 0.5) == (True, True)
    assert solvers.certify_candidate(x, 2 * x, vm, 0.5) == (False, False)


def test_certify_feasibility_tolerance():
    A = np.eye(2)
    vm = solvers.VectorModel(A, [1.0, 0.0], epsilon=0.1)
    assert solvers.certify_candidate([1, 0], [1, 0.1 + 5e-9], vm, 1.0)[0]
    assert not solvers.certify_candidate([1, 0], [1, 0.1 + 2e-8], vm, 1.0)[0]


# -- weighted least-norm step ---------------------------------------------------------


def cvx_weighted_least_norm(M, Q, b, eps):
    x = cp.Variable(M.shape[1])
    cons = [cp.norm(M @ x - b) <= eps] if eps > 0 else [M @ x == b]
    cp.Problem(cp.Minimize(cp.quad_form(x, Q)), cons).solve(solver=cp.CLARABEL)
    return x.value


@pytest.mark.parametrize("eps", [0.0, 0.05, 0.5])
def test_weighted_least_norm_matches_convex_solver(eps):
    rng = np.random.default_rng(4)
    M = rng.standard_normal((4, 7))
    B = rng.standard_normal((7, 7))
    Q = B @ B.T + 0.5 * np.eye(7)
    b = rng.standard_normal(4)
    x = solvers.weighted_least_norm(M, np.linalg.solve(Q, M.T), b, eps)
    ref = cvx_weighted_least_norm(M, Q, b, eps)
    # the interior-point reference is accurate to about 1e-5
    np.testing.assert_allclose(x, ref, atol=1e-4)
    assert x @ Q @ x <= ref @ Q @ ref + 1e-6
    assert np.linalg.norm(M @ x - b) <= eps + 1e-9


def test_weighted_least_norm_zero_when_ball_contains_origin():
    M = np.random.default_rng(0).standard_normal((3, 5))
    b = np.array([0.1, 0.0, 0.0])
    np.testing.assert_array_equal(solvers.weighted_least_norm(M, M.T, b, 0.2), 0.0)


def test_weighted_least_norm_overdetermined_with_noise():
    # tall, rank-deficient K: the zero modes must not produce NaNs
    rng = np.random.default_rng(1)
    M = rng.standard_normal((12, 4))
    b = M @ rng.standard_normal(4) + 0.01 * rng.standard_normal(12)
    x = solvers.weighted_least_norm(M, M.T, b, 0.5)
    assert np.all(np.isfinite(x))
    assert np.linalg.norm(M @ x - b) == pytest.approx(0.5, rel=1e-8)
    ref = cvx_weighted_least_norm(M, np.eye(4), b, 0.5)
    np.testing.assert_allclose(x, ref, atol=1e-4)


# -- nuclear norm minimization ------------------------------------------------------------


@pytest.mark.parametrize("seed", range(5))
def test_nnm_recovers_planted_rank_one(seed):
    model, X0 = planted_matrix(seed, m=60)
    rep = solvers.nnm_solve(model, truth=X0)
    assert rep.converged and rep.feasible
    assert rel_err(rep.estimate, X0) <= 1e-3


@pytest.mark.parametrize("eps", [0.0, 1.0])
def test_nnm_zero_solution_cases(eps):
    op = gaussian_operator(20, 4, 4, seed=0)
    b = np.zeros(20) if eps == 0 else 0.5 * np.ones(20) / np.sqrt(20)
    rep = solvers.nnm_solve(MeasurementModel(op, b, eps))
    np.testing.assert_allclose(rep.estimate, 0.0, atol=1e-12)
    assert rep.feasible


def cvx_nnm(model):
    op = model.operator
    X = cp.Variable(op.shape)
    resid = op.matrix @ cp.vec(X, order="F") - model.b
    cons = [cp.norm(resid) <= model.epsilon] if model.epsilon > 0 else [resid == 0]
    prob = cp.Problem(cp.Minimize(cp.normNuc(X)), cons)
    prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200_000)
    return prob.value


@pytest.mark.parametrize("seed, eps", [(0, 0.0), (1, 0.0), (2, 0.1), (3, 0.3)])
def test_nnm_matches_convex_solver_objective(seed, eps):
    # underdetermined: the optimum is not the planted matrix
    model, X0 = planted_matrix(seed, n1=5, n2=4, r=2, m=9, eps=eps)
    rep = solvers.nnm_solve(model, SolverConfig(p=1.0, max_iterations=20_000, tolerance=1e-10))
    ref = cvx_nnm(model)
    assert rep.feasible
    assert rep.objective == pytest.approx(ref, rel=1e-4)


def test_nnm_reports_infeasible_instead_of_raising():
    M = np.zeros((2, 4))
    M[0, 0] = 1.0
    model = MeasurementModel(from_matrix(M, 2, 2), np.array([1.0, 1.0]), 0.1)
    rep = solvers.nnm_solve(model)
    assert not rep.feasible
    assert rep.residual > 0.1 + solvers.FEASIBILITY_ATOL


# -- Schatten-p -------------------------------------------------------------------


def test_psnm_planted_rank_one_success_rate():
    wins = 0
    for seed in range(20):
        model, X0 = planted_matrix(seed, m=40)
        rep = solvers.psnm_solve(model, SolverConfig(p=0.5), truth=X0)
        assert rep.feasible
        wins += rel_err(rep.estimate, X0) <= 1e-3
    assert wins >= 18


def test_psnm_zero_data():
    op = gaussian_operator(20, 4, 4, seed=0)
    rep = solvers.psnm_solve(MeasurementModel(op, np.zeros(20)), SolverConfig(restarts=1))
    np.testing.assert_array_equal(rep.estimate, 0.0)


def test_psnm_rejects_vector_model():
    with pytest.raises(TypeError):
        solvers.psnm_solve(solvers.VectorModel(np.eye(2), [1.0, 2.0]))


def test_psnm_noisy_is_feasible_and_certified():
    model, X0 = planted_matrix(3, m=60, eps=0.05)
    rep = solvers.psnm_solve(model, SolverConfig(p=0.5), truth=X0)
    assert rep.feasible and rep.residual <= 0.05 + solvers.FEASIBILITY_ATOL
    assert rep.quasi_norm_le_truth
    assert rel_err(rep.estimate, X0) <= 0.1


def test_psnm_convex_limit_matches_nnm():
    for seed in range(20):
        model, _ = planted_matrix(seed, n1=6, n2=5, r=2, m=14)
        nnm = solvers.nnm_solve(model, SolverConfig(p=1.0, max_iterations=20_000, tolerance=1e-10))
        ps = solvers.psnm_solve(model, SolverConfig(p=1.0, restarts=1))
        assert ps.objective == pytest.approx(nnm.objective, rel=0.01)


@pytest.mark.parametrize("p", [0.5, 0.8])
def test_psnm_stage_descent(p):
    model, _ = planted_matrix(5, n1=6, n2=8, r=2, m=30, eps=0.01)
    cfg = SolverConfig(p=p, max_iterations=400)
    trace = []
    solvers._irls(solvers._MatrixProblem(model), cfg, None, trace=trace)
    for (g0, f0), (g1, f1) in zip(trace, trace[1:]):
        if g0 == g1:
            assert f1 <= f0 + 1e-12 * max(1.0, abs(f0))


def test_psnm_rotational_covariance():
    rng = np.random.default_rng(7)
    n1, n2, m = 5, 4, 10
    op = gaussian_operator(m, n1, n2, seed=11)
    Q1, _ = np.linalg.qr(rng.standard_normal((n1, n1)))
    Q2, _ = np.linalg.qr(rng.standard_normal((n2, n2)))
    X0 = rng.standard_normal((n1, 2)) @ rng.standard_normal((n2, 2)).T
    b = op(X0)
    # A'(Y) = A(Q1^T Y Q2), so Y = Q1 X Q2^T solves the rotated problem
    rotated = np.array([vec(Q1 @ Ai @ Q2.T) for Ai in op.as_tensor()])
    op_rot = from_matrix(rotated, n1, n2)
    cfg = SolverConfig(p=0.5, restarts=1)
    X = solvers.psnm_solve(MeasurementModel(op, b), cfg).estimate
    Y = solvers.psnm_solve(MeasurementModel(op_rot, b), cfg).estimate
    np.testing.assert_allclose(Y, Q1 @ X @ Q2.T, atol=1e-6 * linalg.frobenius(X))


# -- vector l_p --------------------------------------------------------------------------


def test_vector_planted_two_sparse_success_rate():
    wins = 0
    for seed in range(100):
        A, x = planted_vector(seed)
        rep = solvers.lp_vector_solve(A, A @ x, SolverConfig(p=0.5), truth=x)
        assert rep.feasible
        ok = np.linalg.norm(rep.estimate - x) <= 1e-6
        wins += ok
        if ok:
            np.testing.assert_array_equal(rep.estimate != 0, x != 0)
    assert wins >= 90


def test_vector_zero_data():
    A, _ = planted_vector(0)
    rep = solvers.lp_vector_solve(A, np.zeros(8), SolverConfig(restarts=1))
    np.testing.assert_array_equal(rep.estimate, 0.0)


def l1_linprog(A, b):
    n = A.shape[1]
    res = linprog(np.ones(2 * n), A_eq=np.hstack([A, -A]), b_eq=b, bounds=(0, None), method="highs")
    return res.fun


def test_vector_convex_limit_matches_linprog():
    for seed in range(20):
        A, x = planted_vector(seed, k=4)
        rep = solvers.lp_vector_solve(A, A @ x, SolverConfig(p=1.0, restarts=1))
        assert rep.objective == pytest.approx(l1_linprog(A, A @ x), rel=0.01)


def test_vector_convex_limit_is_exact_when_l1_recovers():
    # the smoothed iteration alone stalls near 1e-4; the vertex polish makes it exact
    hits = 0
    for seed in range(20):
        A, x = planted_vector(seed)
        res = linprog(np.ones(40), A_eq=np.hstack([A, -A]), b_eq=A @ x, bounds=(0, None),
                      method="highs")
        if np.linalg.norm(res.x[:20] - res.x[20:] - x) > 1e-9:
            continue
        hits += 1
        rep = solvers.lp_vector_solve(A, A @ x, SolverConfig(p=1.0, restarts=1))
        assert np.linalg.norm(rep.estimate - x) <= 1e-9
    assert hits >= 10


def basic_solution_minimum(A, b, p):
    """Global min of sum |x_i|^p over A x = b by enumerating basic solutions.

    The objective is concave on each orthant, so a minimizer sits at a vertex
    of some orthant piece, i.e. at a solution supported on linearly
    independent columns.
    """
    n_rows, n = A.shape
    supports = np.array(list(itertools.combinations(range(n), n_rows)))
    subs = A[:, supports].transpose(1, 0, 2)
    regular = np.abs(np.linalg.det(subs)) > 1e-12
    z = np.abs(np.linalg.solve(subs[regular], np.broadcast_to(b, (regular.sum(), n_rows))[..., None]))[..., 0]
    # degenerate vertices carry round-off zeros that |.|^p would inflate
    z[z < 1e-12 * z.max(axis=1, keepdims=True)] = 0.0
    return np.min(np.sum(z ** p, axis=1))


@pytest.mark.parametrize("seed, recovered", [(0, True), (1, True), (3, False), (18, False)])
def test_vector_candidates_against_global_oracle(seed, recovered):
    A, x = planted_vector(seed)
    b = A @ x
    global_min = basic_solution_minimum(A, b, 0.5)
    truth_obj = np.sum(np.abs(x) ** 0.5)
    # the planted 2-sparse vector is the global minimizer on these instances
    assert global_min == pytest.approx(truth_obj, rel=1e-9)
    rep = solvers.lp_vector_solve(A, b, SolverConfig(p=0.5), truth=x)
    assert rep.objective >= global_min - 1e-9
    # a miss is a local minimum that certification rejects
    assert bool(rep.quasi_norm_le_truth) == recovered
    assert bool(np.linalg.norm(rep.estimate - x) <= 1e-6) == recovered


def test_vector_stage_descent():
    A, x = planted_vector(2)
    model = solvers.VectorModel(A, A @ x + 0.01, 0.05)
    trace = []
    solvers._irls(solvers._VectorProblem(model), SolverConfig(p=0.5), None, trace=trace)
    for (g0, f0), (g1, f1) in zip(trace, trace[1:]):
        if g0 == g1:
            assert f1 <= f0 + 1e-12 * max(1.0, abs(f0))


@pytest.mark.parametrize("seed", range(10))
def test_feasibility_flag_is_honest(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((6, 10))
    b = rng.standard_normal(6)
    eps = float(rng.uniform(0, 1))
    rep = solvers.lp_vector_solve(A, b, SolverConfig(p=0.6, restarts=2, max_iterations=50), eps)
    assert rep.residual == pytest.approx(np.linalg.norm(A @ rep.estimate - b), rel=1e-12)
    assert rep.feasible == (rep.residual <= eps + solvers.FEASIBILITY_ATOL)

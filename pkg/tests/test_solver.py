import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from mclab.errors import InvalidArgument
from mclab.linalg import nuclear_norm
from mclab.model import make_random_low_rank
from mclab.sampling import ObservationSet, sample
from mclab.solver import SolverParams, recovery_verdict, solve_nuclear_min, sv_soft_threshold


def test_soft_threshold_examples(rng):
    Z = rng.standard_normal((4, 6))
    np.testing.assert_array_equal(sv_soft_threshold(Z, 0), Z)
    assert not np.any(sv_soft_threshold(Z, np.linalg.norm(Z, 2)))
    np.testing.assert_allclose(sv_soft_threshold(np.diag([3.0, 1.0]), 2.0), np.diag([1.0, 0.0]))
    with pytest.raises(InvalidArgument):
        sv_soft_threshold(Z, -1)


def free_entry_oracle():
    res = minimize_scalar(lambda x: nuclear_norm(np.array([[1.0, 1.0], [1.0, x]])),
                          bounds=(-5, 5), method="bounded", options={"xatol": 1e-10})
    return res.x, res.fun


def test_two_by_two_example():
    x_star, obj_star = free_entry_oracle()
    assert x_star == pytest.approx(1, abs=1e-6) and obj_star == pytest.approx(2, abs=1e-9)
    obs = ObservationSet(2, 2, [(0, 0), (0, 1), (1, 0)]).with_values(np.ones((2, 2)))
    res = solve_nuclear_min(obs, 2, 2)
    assert res.converged
    assert abs(res.X[1, 1] - x_star) <= 1e-6
    assert abs(res.objective - obj_star) <= 1e-6
    assert recovery_verdict(res.X, np.ones((2, 2)), tol=1e-6)


def test_full_observation_is_exact(instance):
    f, ts = instance
    cells = [(a, b) for a in range(8) for b in range(11)]
    obs = ObservationSet(8, 11, cells * 2).with_values(f.M)
    res = solve_nuclear_min(obs)
    assert res.iterations == 1 and res.converged
    np.testing.assert_array_equal(res.X, f.M)


def test_feasibility_and_objective():
    for s in range(5):
        f = make_random_low_rank(15, 18, 2, "haar", seed=s)
        obs = sample(15, 18, 150, "with-replace", seed=50 + s).with_values(f.M)
        res = solve_nuclear_min(obs)
        assert np.array_equal(res.X[obs.rows, obs.cols], f.M[obs.rows, obs.cols])
        if res.converged:
            assert res.objective <= nuclear_norm(f.M) * (1 + 1e-6)


def test_iteration_cap_returns_best_iterate():
    f = make_random_low_rank(15, 18, 2, "haar", seed=1)
    obs = sample(15, 18, 120, "uniform-no-replace", seed=2).with_values(f.M)
    res = solve_nuclear_min(obs, params=SolverParams(maxiter=3))
    assert not res.converged and res.iterations == 3
    assert np.array_equal(res.X[obs.rows, obs.cols], f.M[obs.rows, obs.cols])


def test_medium_instance_recovers():
    f = make_random_low_rank(40, 40, 2, "haar", seed=11)
    obs = sample(40, 40, 800, "uniform-no-replace", seed=12).with_values(f.M)
    res = solve_nuclear_min(obs, 40, 40)
    assert np.linalg.norm(res.X - f.M) / np.linalg.norm(f.M) <= 1e-3


def test_superset_does_not_break_recovery():
    f = make_random_low_rank(30, 30, 2, "haar", seed=21)
    small = sample(30, 30, 500, "uniform-no-replace", seed=22)
    big = sample(30, 30, 700, "uniform-no-replace", seed=22)
    assert np.all(big.mask[small.mask])
    if recovery_verdict(solve_nuclear_min(small.with_values(f.M)).X, f):
        assert recovery_verdict(solve_nuclear_min(big.with_values(f.M)).X, f)


def test_solver_input_errors(instance):
    f, ts = instance
    with pytest.raises(InvalidArgument):
        solve_nuclear_min(ObservationSet(8, 11, [(0, 0)]).with_values(f.M), 9, 11)
    with pytest.raises(InvalidArgument):
        recovery_verdict(np.zeros((2, 2)), f)

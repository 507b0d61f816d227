import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mclab.errors import InvalidArgument, PreconditionViolation
from mclab.linalg import sym_operator_norm
from mclab.rng import stream
from mclab.sampling import (
    ObservationSet, apply_R_omega, duplicate_bound, max_multiplicity, partition,
    sample_bernoulli, sample_size_threshold, sample_uniform, sample_with_replacement,
)


def test_single_cell_with_replacement():
    obs = sample_with_replacement(1, 1, 5, seed=3)
    assert list(obs.counts) == [5] and (obs.rows[0], obs.cols[0]) == (0, 0)


def test_with_replacement_frequencies():
    obs = sample_with_replacement(2, 2, 4000, seed=1)
    assert np.all(np.abs(obs.count_matrix / 4000 - 0.25) <= 0.05)
    assert obs.counts.sum() == obs.m == 4000


def test_with_replacement_deterministic():
    a = sample_with_replacement(5, 7, 30, seed=9)
    b = sample_with_replacement(5, 7, 30, seed=9)
    np.testing.assert_array_equal(a.draws, b.draws)
    with pytest.raises(InvalidArgument):
        sample_with_replacement(3, 3, 0, seed=0)


def test_uniform_exhaustive_and_errors():
    obs = sample_uniform(2, 2, 4, seed=0)
    np.testing.assert_array_equal(obs.count_matrix, np.ones((2, 2)))
    with pytest.raises(InvalidArgument):
        sample_uniform(2, 2, 5, seed=0)


def test_bernoulli_full_and_mean():
    assert sample_bernoulli(3, 4, 1.0, seed=0).m == 12
    counts = [sample_bernoulli(10, 10, 0.3, seed=s).m for s in range(10000)]
    assert abs(np.mean(counts) - 30) <= 1
    with pytest.raises(InvalidArgument):
        sample_bernoulli(3, 3, 0.0, seed=0)


def test_R_omega_examples():
    obs = ObservationSet(2, 3, [(0, 0), (0, 0)])
    Z = np.arange(1.0, 7.0).reshape(2, 3)
    out = apply_R_omega(obs, Z)
    assert out[0, 0] == 2 * Z[0, 0] and np.count_nonzero(out) == 1
    full = ObservationSet(2, 3, [(a, b) for a in range(2) for b in range(3)])
    np.testing.assert_array_equal(apply_R_omega(full, Z), Z)
    with pytest.raises(InvalidArgument):
        apply_R_omega(obs, np.zeros((3, 2)))


def test_R_omega_kernel_characterization(rng):
    obs = sample_with_replacement(4, 5, 8, seed=2)
    Z = rng.standard_normal((4, 5))
    Z[obs.mask] = 0
    assert not np.any(apply_R_omega(obs, Z))
    Z[tuple(obs.draws[0])] = 1.0
    assert np.any(apply_R_omega(obs, Z))


def test_R_omega_operator_norm_is_max_multiplicity():
    for s in range(5):
        obs = sample_with_replacement(6, 7, 80, seed=s)
        est = sym_operator_norm(lambda Z: apply_R_omega(obs, Z), obs.shape,
                                x0=np.ones(obs.shape))
        assert abs(est - max_multiplicity(obs)) <= 1e-8


def test_R_omega_mean_is_scaled_identity(rng):
    n1, n2, m, trials = 3, 4, 6, 10000
    Z = rng.standard_normal((n1, n2))
    outs = np.array([apply_R_omega(sample_with_replacement(n1, n2, m, stream(5, t)), Z)
                     for t in range(trials)])
    mean = outs.mean(axis=0)
    se = outs.std(axis=0, ddof=1) / math.sqrt(trials)
    assert np.all(np.abs(mean - m / (n1 * n2) * Z) <= 5 * se)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 40), st.integers(0, 10 ** 6))
def test_R_omega_self_adjoint_psd(n1, n2, m, seed):
    obs = sample_with_replacement(n1, n2, m, seed)
    g = np.random.default_rng(seed)
    Y, Z = g.standard_normal((2, n1, n2))
    assert abs(np.sum(apply_R_omega(obs, Y) * Z) - np.sum(Y * apply_R_omega(obs, Z))) <= 1e-12 * (1 + m)
    assert np.sum(Z * apply_R_omega(obs, Z)) >= 0
    assert obs.counts.sum() == m


def test_sample_size_threshold():
    assert sample_size_threshold(100, 100, 2, 1.0, 1.0, 1 + 1e-12) == 359324
    t1 = sample_size_threshold(50, 60, 3, 2.0, 1.0, 2.0)
    t2 = sample_size_threshold(50, 60, 3, 2.0, 1.0, 4.0)
    assert abs(t2 - 2 * t1) <= 1
    assert t1 == sample_size_threshold(50, 60, 3, 2.0, 1.2, 2.0)  # mu1^2 <= mu0
    with pytest.raises(InvalidArgument):
        sample_size_threshold(10, 10, 1, 1, 1, 1.0)


def test_duplicate_bound_and_max_multiplicity():
    level, tail = duplicate_bound(9, 2.0)
    assert level == pytest.approx(11.718531079126503, rel=1e-14)
    assert tail == pytest.approx(0.012345679012345678, rel=1e-14)
    assert max_multiplicity(sample_uniform(5, 5, 20, seed=0)) == 1
    with pytest.raises(PreconditionViolation):
        duplicate_bound(8, 2.0)


def test_partition_policy():
    obs = sample_with_replacement(4, 4, 10, seed=1)
    two = partition(obs, 2)
    assert [b.m for b in two] == [5, 5]
    np.testing.assert_array_equal(np.vstack([b.draws for b in two]), obs.draws)
    assert partition(obs, 1)[0] is obs
    three = partition(obs, 3)
    assert [b.m for b in three] == [4, 3, 3]
    np.testing.assert_array_equal(np.vstack([b.draws for b in three]), obs.draws)
    with pytest.raises(InvalidArgument):
        partition(obs, 11)
    with pytest.raises(InvalidArgument):
        partition(sample_uniform(4, 4, 10, seed=1), 2)


def test_inconsistent_duplicate_values():
    obs = ObservationSet(2, 2, [(0, 0), (0, 0)], values=[1.0, 2.0])
    with pytest.raises(InvalidArgument):
        obs.cell_values()
    ok = ObservationSet(2, 2, [(0, 0), (1, 1), (0, 0)], values=[1.0, 3.0, 1.0])
    np.testing.assert_array_equal(ok.cell_values(), [1.0, 3.0])


def test_index_range_checked():
    with pytest.raises(InvalidArgument):
        ObservationSet(2, 2, [(2, 0)])

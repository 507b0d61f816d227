import numpy as np
import pytest

from mclab import io
from mclab.errors import InvalidArgument
from mclab.sampling import ObservationSet, sample


def test_matrix_round_trip(tmp_path, rng):
    X = rng.standard_normal((3, 5))
    path = tmp_path / "m.txt"
    io.write_matrix(path, X)
    np.testing.assert_array_equal(io.read_matrix(path), X)


def test_factorization_round_trip(tmp_path, instance):
    f, ts = instance
    path = tmp_path / "f.txt"
    io.write_factorization(path, f)
    g = io.read_factorization(path)
    for a, b in ((f.U, g.U), (f.S, g.S), (f.V, g.V)):
        np.testing.assert_array_equal(a, b)


def test_observation_round_trip_preserves_cells(tmp_path, instance):
    f, ts = instance
    obs = sample(8, 11, 150, "with-replace", seed=9).with_values(f.M)
    path = tmp_path / "o.txt"
    io.write_observations(path, obs)
    back = io.read_observations(path)
    assert (back.m, back.model, back.seed) == (150, "with-replace", 9)
    np.testing.assert_array_equal(back.count_matrix, obs.count_matrix)
    np.testing.assert_array_equal(back.cell_values(), obs.cell_values())
    assert io.format_observations(back) == io.format_observations(obs)


def test_observation_without_values_or_seed():
    obs = ObservationSet(2, 3, [(0, 1), (0, 1), (1, 2)])
    text = io.format_observations(obs)
    assert text.splitlines()[0] == "# 2 3 3 with-replace none"
    back = io.parse_observations(text)
    assert back.values is None and back.seed is None


@pytest.mark.parametrize("parse,text", [
    (io.parse_matrix, "2 2\n1 2\n3 4\n"),
    (io.parse_matrix, "# 2 2\n1 2\n3\n"),
    (io.parse_observations, "# 2 3 5 with-replace 1\n0 0 1\n"),
    (io.parse_observations, "# 2 3 1 with-replace 1\n0 0 0\n"),
    (io.parse_observations, "# 2 3 2 with-replace 1\n0 0 1 1.0\n0 1 1\n"),
])
def test_malformed_files(parse, text):
    with pytest.raises(InvalidArgument):
        parse(text)

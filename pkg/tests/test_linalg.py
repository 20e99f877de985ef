import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kppmap.linalg import (SingularSystemError, TridiagSystem, apply_second_difference,
                           second_difference_matrix, solve_tridiagonal)

from oracles import dense_gauss


def random_dominant(rng, n):
    sub, sup = rng.uniform(-2, 2, size=2)
    margin = rng.uniform(0.05, 3.0, size=n)
    sign = rng.choice([-1.0, 1.0], size=n)
    diag = sign * (abs(sub) + abs(sup) + margin)
    return TridiagSystem(n, sub, sup, diag, rng.normal(size=n))


def test_identity_system():
    s = TridiagSystem(3, 0.0, 0.0, [1, 1, 1], [4, 5, 6])
    np.testing.assert_array_equal(solve_tridiagonal(s), [4, 5, 6])


def test_k25_matrix_against_dense():
    s = TridiagSystem(3, -1.25, -1.25, [3.5, 3.5, 3.5], [1, 0, 0])
    x = solve_tridiagonal(s)
    np.testing.assert_allclose(x, dense_gauss(s.to_dense(), s.rhs), rtol=0, atol=1e-12)


def test_n50_random_against_dense():
    rng = np.random.default_rng(50)
    s = random_dominant(rng, 50)
    x = solve_tridiagonal(s)
    assert np.max(np.abs(x - dense_gauss(s.to_dense(), s.rhs))) <= 1e-12


def test_single_row_is_division():
    s = TridiagSystem(1, 7.0, -3.0, [4.0], [2.0])
    assert solve_tridiagonal(s)[0] == 0.5


def test_singular_pivot_raises():
    with pytest.raises(SingularSystemError):
        solve_tridiagonal(TridiagSystem(2, 1.0, 1.0, [1.0, 1.0], [1.0, 1.0]))
    with pytest.raises(SingularSystemError):
        solve_tridiagonal(TridiagSystem(1, 0.0, 0.0, [0.0], [1.0]))


def test_shape_validation():
    with pytest.raises(ValueError):
        TridiagSystem(3, 0.0, 0.0, [1, 1], [1, 1, 1])
    with pytest.raises(ValueError):
        TridiagSystem(0, 0.0, 0.0, [], [])


def test_dominance_check():
    with pytest.raises(ValueError, match="row 1"):
        TridiagSystem(3, -1.0, -1.0, [3.0, 2.0, 3.0], [0, 0, 0], check_dominance=True)
    TridiagSystem(3, -1.0, -1.0, [3.0, 2.5, 3.0], [0, 0, 0], check_dominance=True)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 200), seed=st.integers(0, 2**32 - 1))
def test_residual_property(n, seed):
    s = random_dominant(np.random.default_rng(seed), n)
    x = solve_tridiagonal(s)
    res = s.to_dense() @ x - s.rhs
    assert np.max(np.abs(res)) <= 1e-10 * np.max(np.abs(s.rhs))


@pytest.mark.parametrize("u, expected", [
    ([0, 0, 0], [0, 0, 0]),
    ([1, 1, 1], [-1, 0, -1]),
    ([1, 2, 3, 4], [0, 0, 0, -5]),
    ([2.0], [-4.0]),
])
def test_second_difference_examples(u, expected):
    np.testing.assert_array_equal(apply_second_difference(u), expected)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40))
def test_second_difference_commutes_with_reflection(half):
    u = np.array(half + half[::-1])
    out = apply_second_difference(u)
    np.testing.assert_array_equal(out, out[::-1])


def test_matrix_row_sums_and_agreement():
    n = 7
    a = second_difference_matrix(n)
    sums = a.sum(axis=1)
    assert sums[0] == -1 and sums[-1] == -1
    assert np.all(sums[1:-1] == 0)
    u = np.random.default_rng(3).normal(size=n)
    np.testing.assert_allclose(a @ u, apply_second_difference(u), atol=1e-15)

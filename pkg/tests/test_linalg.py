import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import dsmflow as d
from dsmflow.errors import LinearSolveError
from oracles import inverse_2x2


def test_inner_orthogonal_axes():
    assert d.inner([1.0, 0.0], [0.0, 1.0]) == 0.0


def test_inner_scalar_product():
    assert d.inner([2.0], [3.0]) == 6.0


def test_inner_with_self_is_norm_squared():
    assert d.inner([3.0, 4.0], [3.0, 4.0]) == 25.0


def test_inner_dimension_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        d.inner([1.0, 2.0], [1.0])


def test_inner_rejects_nan():
    with pytest.raises(ValueError, match="non-finite"):
        d.inner([np.nan, 0.0], [1.0, 1.0])


def test_vectors_must_be_one_dimensional():
    with pytest.raises(ValueError, match="1-D"):
        d.norm(np.ones((2, 2)))
    with pytest.raises(ValueError, match="1-D"):
        d.inner(3.0, 4.0)


def test_norm_examples():
    assert d.norm([0.0, 0.0, 0.0]) == 0.0
    assert d.norm([3.0, 4.0]) == 5.0
    assert d.norm([1.0, 1.0, 1.0, 1.0]) == 2.0


def test_solve_shifted_zero_jacobian_is_scalar_shift():
    x = d.solve_shifted(np.zeros((2, 2)), 2.0, [4.0, 6.0])
    np.testing.assert_allclose(x, [2.0, 3.0], rtol=1e-14)


def test_solve_shifted_identity_jacobian():
    x = d.solve_shifted(np.eye(1), 1.0, [4.0])
    np.testing.assert_allclose(x, [2.0], rtol=1e-14)


def test_solve_shifted_skew_case_against_2x2_inverse():
    # Independent oracle: invert I + J by the adjugate formula first.
    skew = np.array([[0.0, 1.0], [-1.0, 0.0]])
    rhs = np.array([1.0, 1.0])
    expected = inverse_2x2(np.eye(2) + skew) @ rhs
    np.testing.assert_allclose(expected, [0.0, 1.0], atol=1e-15)
    x = d.solve_shifted(skew, 1.0, rhs)
    np.testing.assert_allclose(x, expected, atol=1e-14)


def test_solve_shifted_rank_deficient_with_moderate_shift():
    x = d.solve_shifted(np.diag([1.0, 0.0]), 0.5, [1.5, 1.0])
    np.testing.assert_allclose(x, [1.0, 2.0], rtol=1e-12)


def test_solve_shifted_requires_positive_shift():
    with pytest.raises(ValueError, match="positive"):
        d.solve_shifted(np.eye(2), 0.0, [1.0, 1.0])


def test_solve_shifted_exactly_singular_reports_violation():
    # J = -I with a = 1 makes J + aI the zero matrix.
    with pytest.raises(LinearSolveError):
        d.solve_shifted(-np.eye(2), 1.0, [1.0, 1.0])


@given(st.integers(0, 10_000))
def test_cauchy_schwarz(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(1, 30)
    u = rng.uniform(-1e6, 1e6, n)
    v = rng.uniform(-1e6, 1e6, n)
    assert abs(d.inner(u, v)) <= d.norm(u) * d.norm(v) * (1.0 + 1e-12)


@given(st.integers(0, 10_000))
def test_solve_shifted_multiply_back(seed):
    # PSD symmetric part (spectrum in [0.05, 4]) plus a skew perturbation.
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 25))
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    sym = (q * rng.uniform(0.05, 4.0, n)) @ q.T
    m = rng.standard_normal((n, n))
    j = sym + 0.5 * (m - m.T)
    a = 10.0 ** rng.uniform(-6, 1)
    rhs = rng.standard_normal(n)
    x = d.solve_shifted(j, a, rhs)
    back = (j + a * np.eye(n)) @ x
    assert np.linalg.norm(back - rhs) <= 10.0 * d.EPS_LIN * (np.linalg.norm(rhs) + 1.0)

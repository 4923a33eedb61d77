import numpy as np
import pytest

import dsmflow as d
from dsmflow.operators import diag_cubic, identity, non_monotone_fixture, psd_rank_deficient


def test_gallery_has_six_members(stock_problems):
    assert [p.name for p in stock_problems] == list(d.GALLERY_NAMES)
    assert len(stock_problems) == 6


def test_identity_eval():
    p = d.make_problem("identity", dim=2)
    np.testing.assert_array_equal(p.fun(np.array([5.0, -3.0])), [5.0, -3.0])


def test_diag_cubic_eval():
    p = d.make_problem("diag_cubic", dim=1)
    np.testing.assert_allclose(p.fun(np.array([2.0])), [8.0])


def test_diag_cubic_custom_rhs_solution():
    p = diag_cubic(dim=1, rhs=[8.0])
    np.testing.assert_allclose(p.minimal_norm_solution, [2.0], rtol=1e-15)


def test_manual_rank_deficient_semantics():
    # A = diag(1, 0), f = [1, 0]: solution [1, 0], null direction [0, 1].
    a_mat = np.diag([1.0, 0.0])
    y = np.array([1.0, 0.0])
    np.testing.assert_allclose(a_mat @ y, [1.0, 0.0])
    assert d.inner(y, [0.0, 1.0]) == 0.0


def test_psd_rank_deficient_structure():
    p = psd_rank_deficient(dim=20, seed=0)
    assert len(p.null_space_basis) == 5
    lam = np.linalg.eigvalsh(p.jac(np.zeros(20)))
    assert lam.min() > -1e-12
    assert np.sum(lam > 1e-8) == 15
    # f lies in the range: the stored solution reproduces it exactly.
    np.testing.assert_allclose(p.jac(np.zeros(20)) @ p.minimal_norm_solution, p.rhs, atol=1e-12)
    for z in p.null_space_basis:
        assert abs(d.inner(p.minimal_norm_solution, z)) < 1e-12


def test_fredholm_matrix_is_spd_and_solvable():
    p = d.make_problem("fredholm_first_kind", dim=40)
    a_mat = p.jac(np.zeros(40))
    np.testing.assert_allclose(a_mat, a_mat.T)
    lam = np.linalg.eigvalsh(a_mat)
    assert lam.min() > 0.0
    assert lam.max() / lam.min() > 1e3  # genuinely ill-conditioned
    np.testing.assert_allclose(a_mat @ p.minimal_norm_solution, p.rhs, atol=1e-15)


def test_skew_perturbed_pairing_ignores_skew_part():
    p = d.make_problem("skew_perturbed")
    j = p.jac(np.zeros(p.dim))
    assert not np.allclose(j, j.T)
    sym = 0.5 * (j + j.T)
    rng = np.random.default_rng(3)
    for _ in range(10):
        u = rng.standard_normal(p.dim)
        assert d.inner(p.fun(u), u) == pytest.approx(d.inner(u, sym @ u), rel=1e-12)
        assert d.inner(p.fun(u), u) >= 0.0


def test_convex_gradient_jacobian_symmetric():
    p = d.make_problem("convex_gradient")
    u = np.linspace(-1.0, 1.0, p.dim)
    j = p.jac(u)
    np.testing.assert_allclose(j, j.T)


@pytest.mark.parametrize("name", d.GALLERY_NAMES)
def test_gallery_monotone(name):
    p = d.make_problem(name)
    report = d.check_monotone(p, samples=100, radius=5.0, seed=1)
    assert report.passed, f"min pairing {report.min_pairing}"


def test_identity_monotone_pairing_is_distance_squared():
    report = d.check_monotone(d.make_problem("identity", dim=3), samples=50, seed=0)
    assert report.passed
    assert report.min_pairing >= 0.0


def test_non_monotone_fixture_fails():
    report = d.check_monotone(non_monotone_fixture(), samples=50, seed=0)
    assert not report.passed
    assert report.min_pairing < 0.0


@pytest.mark.parametrize("name", d.GALLERY_NAMES)
def test_gallery_jacobians_match_finite_differences(name):
    p = d.make_problem(name)
    rng = np.random.default_rng(11)
    for _ in range(3):
        report = d.check_jacobian(p, rng.uniform(-2.0, 2.0, p.dim))
        assert report.passed, f"entry error {report.max_entry_error}"


def test_cubic_jacobian_fd_error_is_step_squared():
    # ((1+h)^3 - (1-h)^3) / 2h = 3 + h^2, so the defect at step 1e-5 is 1e-10.
    p = d.make_problem("diag_cubic", dim=1)
    report = d.check_jacobian(p, np.array([1.0]), step=1e-5)
    assert report.passed
    assert 5e-11 < report.max_entry_error < 2e-10


def test_identity_jacobian_exact():
    report = d.check_jacobian(d.make_problem("identity", dim=4), np.array([1.0, -2.0, 0.5, 3.0]))
    assert report.passed
    assert report.max_entry_error < 1e-10


def test_make_problem_unknown_name():
    with pytest.raises(ValueError, match="unknown problem"):
        d.make_problem("does_not_exist")


def test_make_problem_dim_bounds():
    with pytest.raises(ValueError, match="dim"):
        d.make_problem("identity", dim=0)
    with pytest.raises(ValueError, match="dim"):
        d.make_problem("identity", dim=10_000)


def test_seed_changes_psd_instance():
    p0 = d.make_problem("psd_rank_deficient", seed=0)
    p1 = d.make_problem("psd_rank_deficient", seed=1)
    assert not np.allclose(p0.rhs, p1.rhs)


def test_identity_custom_rhs():
    p = identity(dim=2, rhs=[1.0, 2.0])
    np.testing.assert_array_equal(p.minimal_norm_solution, [1.0, 2.0])

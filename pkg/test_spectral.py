"""
Test script for the SVD substrate and Tikhonov solves
"""

import numpy as np
import pytest

from core.spectral import (
    solution_norms, spectral_norm, svd_decompose, tikhonov_path, tikhonov_solve, tikhonov_solve_dense,
)
from utils.error_handler import ValidationError


def test_svd_solve_matches_normal_equations():
    alphas = np.geomspace(1e-8, 1.0, 50)
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 21))
        m = n + 10
        a = rng.standard_normal((m, n))
        y = rng.standard_normal(m)
        svd = svd_decompose(a)
        for alpha in alphas:
            x_svd = tikhonov_solve(svd, y, alpha)
            x_dense = tikhonov_solve_dense(a, y, alpha)
            assert np.linalg.norm(x_svd - x_dense) <= 1e-8 * np.linalg.norm(x_dense)


def test_identity_solution_is_halved_at_alpha_one():
    svd = svd_decompose(np.eye(4))
    y = np.array([1.0, -2.0, 3.0, 0.5])
    np.testing.assert_allclose(tikhonov_solve(svd, y, 1.0), y / 2, rtol=1e-14)


def test_rank_deficient_operator_keeps_complement():
    a = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
    svd = svd_decompose(a)
    assert svd.rank == 1
    assert svd.complement_dim == 2
    assert svd.lambda_min == 0.0

    c, rho = svd.coefficients(np.array([0.0, 3.0, 4.0]))
    assert np.allclose(c, 0.0)
    assert rho == pytest.approx(5.0)


def test_truncation_drops_tiny_singular_values():
    a = np.diag([1.0, 1e-3, 1e-16])
    svd = svd_decompose(a)
    assert svd.rank == 2
    assert svd.norm == pytest.approx(1.0)


def test_spectral_norm():
    assert spectral_norm(np.diag([3.0, 2.0])) == pytest.approx(3.0)
    assert spectral_norm(np.zeros((3, 2))) == 0.0


def test_path_and_norms_agree_with_single_solves(rng):
    a = rng.standard_normal((12, 8))
    y = rng.standard_normal(12)
    svd = svd_decompose(a)
    alphas = np.geomspace(1e-4, 1.0, 7)
    path = tikhonov_path(svd, y, alphas)
    norms = solution_norms(svd, y, alphas)
    for k, alpha in enumerate(alphas):
        x = tikhonov_solve(svd, y, alpha)
        np.testing.assert_allclose(path[:, k], x, rtol=1e-12, atol=1e-14)
        assert norms[k] == pytest.approx(np.linalg.norm(x), rel=1e-12)


@pytest.mark.parametrize('alpha', [0.0, -1.0, np.nan, np.inf])
def test_invalid_alpha_rejected(alpha):
    svd = svd_decompose(np.eye(2))
    with pytest.raises(ValidationError):
        tikhonov_solve(svd, np.ones(2), alpha)


def test_invalid_inputs_rejected():
    with pytest.raises(ValidationError):
        svd_decompose(np.array([[1.0, np.nan]]))
    with pytest.raises(ValidationError):
        svd_decompose(np.ones(3))
    with pytest.raises(ValidationError):
        tikhonov_solve(svd_decompose(np.eye(2)), np.ones(3), 1.0)


def test_factorization_is_read_only():
    svd = svd_decompose(np.eye(3))
    with pytest.raises(ValueError):
        svd.singular_values[0] = 2.0


def test_factorization_reconstructs_operator():
    a = np.random.default_rng(20).standard_normal((20, 20))
    svd = svd_decompose(a)
    rebuilt = (svd.left_vectors * svd.singular_values) @ svd.right_vectors.T
    assert np.linalg.norm(rebuilt - a, 2) <= 1e-10 * svd.singular_values[0]


def power_iteration_norm(a, iterations=2000):
    v = np.ones(a.shape[1]) / np.sqrt(a.shape[1])
    for _ in range(iterations):
        w = a.T @ (a @ v)
        v = w / np.linalg.norm(w)
    return float(np.linalg.norm(a @ v))


def test_spectral_norm_matches_power_iteration():
    for seed in range(5):
        a = np.random.default_rng(seed).standard_normal((15, 10))
        assert spectral_norm(a) == pytest.approx(power_iteration_norm(a), rel=1e-8)


def test_truncation_tolerance_sets_complement():
    svd = svd_decompose(np.diag([2.0, 0.0]), truncation_tol=1e-12)
    assert svd.rank == 1
    assert svd.complement_dim == 1
    assert svd.norm == pytest.approx(2.0)


def test_residual_grows_and_norm_shrinks_with_alpha(rng):
    a = rng.standard_normal((15, 10))
    y = rng.standard_normal(15)
    svd = svd_decompose(a)
    alphas = np.geomspace(1e-6, 10.0, 40)
    residuals = np.linalg.norm(a @ tikhonov_path(svd, y, alphas) - y[:, None], axis=0)
    norms = solution_norms(svd, y, alphas)
    assert np.all(np.diff(residuals) >= -1e-12 * residuals[1:])
    assert np.all(np.diff(norms) <= 1e-12 * norms[:-1])


def test_small_alpha_approaches_inverse():
    rng = np.random.default_rng(8)
    q1, _ = np.linalg.qr(rng.standard_normal((10, 10)))
    q2, _ = np.linalg.qr(rng.standard_normal((10, 10)))
    a = (q1 * np.geomspace(1.0, 1e-3, 10)) @ q2.T
    assert np.linalg.cond(a) <= 1e3 * (1 + 1e-8)
    y = rng.standard_normal(10)
    x = tikhonov_solve(svd_decompose(a), y, 1e-12)
    exact = np.linalg.solve(a, y)
    assert np.linalg.norm(x - exact) <= 1e-6 * np.linalg.norm(exact)

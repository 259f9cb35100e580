"""
Dense linear algebra substrate: SVD, spectral norms and Tikhonov solves
"""

import logging

import numpy as np
import scipy.linalg

from config import Config
from models.spectral import SvdFactorization
from utils.error_handler import NumericError, ValidationError
from utils.validators import validate_alpha, validate_matrix, validate_vector

logger = logging.getLogger(__name__)


def _svd(a, compute_uv=True):
    try:
        return scipy.linalg.svd(a, full_matrices=False, compute_uv=compute_uv, lapack_driver='gesdd')
    except np.linalg.LinAlgError:
        logger.warning("gesdd did not converge, retrying with gesvd")
    try:
        return scipy.linalg.svd(a, full_matrices=False, compute_uv=compute_uv, lapack_driver='gesvd')
    except np.linalg.LinAlgError as e:
        raise NumericError(f"SVD did not converge: {e}", {'shape': list(a.shape)})


def svd_decompose(a, truncation_tol=Config.SVD_TRUNCATION_TOL):
    """Factorise `a`, dropping singular values <= truncation_tol * sigma_1"""
    a = validate_matrix(a, 'operator')
    if not truncation_tol >= 0:
        raise ValidationError("truncation_tol must be nonnegative", {'truncation_tol': truncation_tol})
    m, n = a.shape

    u, s, vt = _svd(a)
    if s.size == 0 or s[0] == 0:
        keep = 0
    else:
        keep = int(np.count_nonzero(s > truncation_tol * s[0]))
    if keep < s.size:
        logger.debug(f"Truncated {s.size - keep} of {s.size} singular values (tol {truncation_tol:g})")

    return SvdFactorization(
        left_vectors=u[:, :keep],
        singular_values=s[:keep],
        right_vectors=vt[:keep].T,
        complement_dim=m - keep,
        shape=(m, n),
    )


def spectral_norm(a):
    """Largest singular value of `a` (0 for the zero matrix)"""
    a = validate_matrix(a)
    if a.size == 0:
        return 0.0
    s = _svd(a, compute_uv=False)
    return float(s[0]) if s.size else 0.0


def tikhonov_filter(singular_values, alpha):
    """Filter factors sigma / (sigma^2 + alpha)"""
    return singular_values / (singular_values ** 2 + alpha)


def tikhonov_solve(svd, y, alpha):
    """x_alpha = V diag(sigma/(sigma^2+alpha)) U^T y"""
    alpha = validate_alpha(alpha)
    y = validate_vector(y, 'data', length=svd.shape[0])
    c = svd.left_vectors.T @ y
    return svd.right_vectors @ (tikhonov_filter(svd.singular_values, alpha) * c)


def tikhonov_path(svd, y, alphas):
    """Solutions for every alpha as columns of an (n, len(alphas)) array"""
    y = validate_vector(y, 'data', length=svd.shape[0])
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 0):
        raise ValidationError("alpha must be positive")
    c = svd.left_vectors.T @ y
    s = svd.singular_values[:, None]
    return svd.right_vectors @ (s / (s ** 2 + alphas[None, :]) * c[:, None])


def solution_norms(svd, y, alphas):
    """||x_alpha|| for every alpha, from the filter coefficients alone"""
    c = svd.left_vectors.T @ y
    s = svd.singular_values[:, None]
    coeffs = s / (s ** 2 + np.asarray(alphas, dtype=float)[None, :]) * c[:, None]
    return np.sqrt(np.sum(coeffs ** 2, axis=0))


def tikhonov_solve_dense(a, y, alpha):
    """Solve (A^T A + alpha I) x = A^T y by Cholesky on the assembled normal matrix"""
    a = validate_matrix(a, 'operator')
    alpha = validate_alpha(alpha)
    y = validate_vector(y, 'data', length=a.shape[0])
    normal = a.T @ a + alpha * np.eye(a.shape[1])
    try:
        return scipy.linalg.solve(normal, a.T @ y, assume_a='pos')
    except np.linalg.LinAlgError as e:
        raise NumericError(f"Normal equations are singular: {e}")

"""
Heuristic and semi-heuristic parameter choice rules.

All functionals are evaluated through the filter-function representation
psi(alpha, A, y) = ||Psi(alpha, A) y|| on a precomputed SVD, using whichever
operator the factorisation was built from (the perturbed one in experiments).
With c = U^T y and rho the norm of the part of y outside the retained range:

    HD: sqrt( sum (sqrt(a)/(s^2+a))^2 c^2 + rho^2/a )
    HR: sqrt( sum (a/(s^2+a)^(3/2))^2 c^2 + rho^2/a )
    QO: sqrt( sum (a s/(s^2+a)^2)^2 c^2 )
"""

import logging
import math

import numpy as np

from config import Config
from core.spectral import solution_norms, tikhonov_path, tikhonov_solve
from models.rule import AlphaGrid, CompensatorKind, FunctionalKind, SelectionOutcome
from utils.error_handler import NumericError, ValidationError
from utils.helpers import interior_local_minima
from utils.validators import validate_alpha, validate_vector

logger = logging.getLogger(__name__)


def psi_values(kind, svd, y, alphas):
    """psi(alpha, A, y) for an array of alphas"""
    kind = FunctionalKind(kind)
    y = validate_vector(y, 'data', length=svd.shape[0])
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 0):
        raise ValidationError("alpha must be positive")

    c, rho = svd.coefficients(y)
    s2 = (svd.singular_values ** 2)[:, None]
    a = alphas[None, :]
    c2 = (c ** 2)[:, None]

    if kind is FunctionalKind.HD:
        squares = np.sum(a / (s2 + a) ** 2 * c2, axis=0) + rho ** 2 / alphas
    elif kind is FunctionalKind.HR:
        squares = np.sum(a ** 2 / (s2 + a) ** 3 * c2, axis=0) + rho ** 2 / alphas
    else:
        squares = np.sum(a ** 2 * s2 / (s2 + a) ** 4 * c2, axis=0)
    return np.sqrt(squares)


def psi_eval(kind, svd, y, alpha):
    """||Psi(alpha, A) y|| for one of HD, HR, QO"""
    alpha = validate_alpha(alpha)
    return float(psi_values(kind, svd, y, [alpha])[0])


def compensator_eval(spec, eta, alpha, x_alpha_norm, d_constant=None):
    """R = 0, D eta^s ||x_alpha|| (SH1) or D eta^s / sqrt(alpha) (SH2)"""
    if eta < 0 or x_alpha_norm < 0:
        raise ValidationError("eta and ||x_alpha|| must be nonnegative",
                              {'eta': eta, 'x_alpha_norm': x_alpha_norm})
    alpha = validate_alpha(alpha)
    d = spec.d_constant if d_constant is None else d_constant

    if spec.compensator is CompensatorKind.NONE:
        return 0.0
    if spec.compensator is CompensatorKind.SH1:
        return d * eta ** spec.s_exponent * x_alpha_norm
    return d * eta ** spec.s_exponent / math.sqrt(alpha)


def psi_profile(spec, svd, y, eta, alphas):
    """psi_bar = psi - R over an array of alphas (signed, never clipped)"""
    alphas = np.asarray(alphas, dtype=float)
    values = psi_values(spec.functional, svd, y, alphas)
    if spec.compensator is CompensatorKind.NONE:
        return values

    d = spec.effective_d(svd.norm, float(np.linalg.norm(y)))
    scale = d * eta ** spec.s_exponent
    if spec.compensator is CompensatorKind.SH1:
        return values - scale * solution_norms(svd, y, alphas)
    return values - scale / np.sqrt(alphas)


def psi_bar_eval(spec, svd_noisy, y_noisy, eta, alpha):
    """psi(alpha, A_eta, y_delta) - R(alpha, A_eta, y_delta, eta)"""
    psi = psi_eval(spec.functional, svd_noisy, y_noisy, alpha)
    if spec.compensator is CompensatorKind.NONE:
        return psi
    x_norm = 0.0
    if spec.compensator is CompensatorKind.SH1:
        x_norm = float(np.linalg.norm(tikhonov_solve(svd_noisy, y_noisy, alpha)))
    d = spec.effective_d(svd_noisy.norm, float(np.linalg.norm(y_noisy)))
    return psi - compensator_eval(spec, eta, alpha, x_norm, d_constant=d)


def rule_grid(spec, svd_noisy, eta, count=Config.GRID_COUNT, alpha_floor=Config.ALPHA_FLOOR):
    """Search grid of a rule: [max(lambda_min, floor), ||A||^2] or [gamma, ||A||^2]"""
    alpha_max = svd_noisy.norm ** 2
    if spec.is_standard:
        alpha_min = max(svd_noisy.lambda_min, alpha_floor)
    else:
        if not eta > 0:
            raise ValidationError("Semi-heuristic rules need eta > 0", {'eta': eta})
        alpha_min = spec.gamma(eta)
    return AlphaGrid(alpha_min, alpha_max, count)


def select_from_values(alphas, values):
    """Grid argmin with the interior-minimum fallback.

    Returns (index, fallback_used). When the global minimiser is the right
    endpoint, the interior local minimum with the smallest alpha is taken; if
    there is none the endpoint is kept. Both cases set the fallback flag.
    """
    values = np.asarray(values, dtype=float)
    if values.size != len(alphas):
        raise ValidationError("alphas and values differ in length")
    if values.size == 0 or np.all(np.isnan(values)):
        raise NumericError("Functional is NaN on the whole grid")

    cleaned = np.where(np.isnan(values), np.inf, values)
    index = int(np.argmin(cleaned))
    if index != cleaned.size - 1:
        return index, False

    minima = interior_local_minima(cleaned)
    if minima.size:
        logger.debug(f"Right-endpoint minimum; falling back to interior minimum at index {minima[0]}")
        return int(minima[0]), True
    logger.debug("Right-endpoint minimum without interior local minimum")
    return index, True


def _select(spec, svd_noisy, y_noisy, eta, grid):
    if not spec.is_standard:
        gamma = spec.gamma(eta)
        if not math.isclose(grid.alpha_min, gamma, rel_tol=1e-12):
            raise ValidationError("Semi-heuristic grids must start at gamma",
                                  {'alpha_min': grid.alpha_min, 'gamma': gamma})
    alphas = grid.points
    values = psi_profile(spec, svd_noisy, y_noisy, eta, alphas)
    index, fallback = select_from_values(alphas, values)
    return float(alphas[index]), fallback, float(values[index])


def select_alpha(spec, svd_noisy, y_noisy, eta, grid):
    """alpha_* = argmin of psi_bar over the grid, with the endpoint fallback"""
    alpha_star, fallback, _ = _select(spec, svd_noisy, y_noisy, eta, grid)
    return alpha_star, fallback


def optimal_alpha(svd_noisy, y_noisy, x_true, grid):
    """Brute-force minimiser of ||x_alpha - x_true|| / ||x_true|| over the grid"""
    x_true = validate_vector(x_true, 'x_true', length=svd_noisy.shape[1])
    reference = float(np.linalg.norm(x_true))
    if reference == 0:
        raise ValidationError("x_true must be nonzero")

    alphas = grid.points
    solutions = tikhonov_path(svd_noisy, y_noisy, alphas)
    errors = np.linalg.norm(solutions - x_true[:, None], axis=0) / reference
    index = int(np.argmin(errors))
    return float(alphas[index]), float(errors[index])


def error_metrics(alpha_star, alpha_opt, svd_noisy, y_noisy, x_true):
    """(e_rel, e_opt, e_per) with e_per = e_rel / e_opt"""
    x_true = validate_vector(x_true, 'x_true', length=svd_noisy.shape[1])
    reference = float(np.linalg.norm(x_true))
    if reference == 0:
        raise ValidationError("x_true must be nonzero")

    e_rel = float(np.linalg.norm(tikhonov_solve(svd_noisy, y_noisy, alpha_star) - x_true) / reference)
    e_opt = float(np.linalg.norm(tikhonov_solve(svd_noisy, y_noisy, alpha_opt) - x_true) / reference)
    return e_rel, e_opt, error_ratio(e_rel, e_opt)


def error_ratio(e_rel, e_opt):
    if e_opt == 0:
        return math.inf if e_rel > 0 else 1.0
    return e_rel / e_opt


def theta(e_per_standard, e_per_modified):
    """(e_per - e_per_bar) * 100; positive when the semi-heuristic rule wins"""
    if not (math.isfinite(e_per_standard) and math.isfinite(e_per_modified)):
        raise ValidationError("theta needs finite error ratios",
                              {'standard': e_per_standard, 'modified': e_per_modified})
    return (e_per_standard - e_per_modified) * 100


def evaluate_rule(spec, svd_noisy, y_noisy, eta, x_true, grid=None, optimum=None, count=Config.GRID_COUNT):
    """Select alpha for one rule and compute its error metrics.

    `optimum` is an (alpha_opt, e_opt) pair shared between the rules of one
    realization; it is computed on the rule's own grid when omitted.
    """
    grid = grid or rule_grid(spec, svd_noisy, eta, count)
    alpha_star, fallback, psi_star = _select(spec, svd_noisy, y_noisy, eta, grid)
    if optimum is None:
        optimum = optimal_alpha(svd_noisy, y_noisy, x_true, grid)
    alpha_opt, _ = optimum
    e_rel, e_opt, e_per = error_metrics(alpha_star, alpha_opt, svd_noisy, y_noisy, x_true)
    return SelectionOutcome(alpha_star, psi_star, fallback, alpha_opt, e_rel, e_opt, e_per)

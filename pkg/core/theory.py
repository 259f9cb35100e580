"""
Numerical verification of the operator-error estimates, the noise condition,
the lower bounds of the functionals and convergence of the selected parameters.
"""

import itertools
import logging

import numpy as np
import scipy.linalg

from config import Config
from core.choice_rules import psi_values, rule_grid, select_alpha
from core.gallery import build_instance
from core.spectral import solution_norms, spectral_norm, svd_decompose, tikhonov_solve
from extensions import make_rng, spawn_seeds
from models.problem import PerturbationKind, PerturbationSpec
from models.report import (
    ConvergenceLevel, ConvergenceSweepReport, NoiseConditionReport, OperatorBoundReport,
)
from models.rule import FunctionalKind
from utils.error_handler import PreconditionError, ValidationError
from utils.validators import validate_matrix, validate_vector

logger = logging.getLogger(__name__)

P_VALUES = (0.0, 0.5, 1.0)
Q_VALUES = (-1.0, -1.5, -2.0)

# (p, q) of the operator estimate that controls each functional
FUNCTIONAL_PQ = {
    FunctionalKind.HD: (0.5, -1.0),
    FunctionalKind.HR: (0.5, -1.5),
    FunctionalKind.QO: (1.0, -2.0),
}

DEFAULT_PERTURBATION = {
    'baart': PerturbationKind.HEAT,
    'tomo': PerturbationKind.GAUSSIAN,
    'blur': PerturbationKind.TOMO,
}

RELATIVE_SLACK = 1e-9


class _ShiftedPower:
    """f(M) = (M + alpha I)^q for a symmetric positive semidefinite M, via one eigh"""

    def __init__(self, matrix):
        w, q = scipy.linalg.eigh(matrix)
        self.w = np.clip(w, 0.0, None)
        self.q = q

    def __call__(self, alpha, power):
        return (self.q * (self.w + alpha) ** power) @ self.q.T


def _lemma1_operands(a, p):
    """(Gram of A^T A, B_p, Gram of A A^T, B-hat_p) for the estimate and its adjoint twin"""
    gram = a.T @ a
    gram_hat = a @ a.T
    if p == 0:
        return gram, np.eye(a.shape[1]), gram_hat, np.eye(a.shape[0])
    if p == 0.5:
        return gram, a.T, gram_hat, a
    return gram, gram, gram_hat, gram_hat


def _check_pq(p, q):
    if p not in P_VALUES or q not in Q_VALUES:
        raise ValidationError("(p, q) must lie in {0, 1/2, 1} x {-1, -3/2, -2}", {'p': p, 'q': q})


def _lemma1_ratios(a, a_noisy, p, q, alphas, eta):
    g, b, g_hat, b_hat = _lemma1_operands(a, p)
    gn, bn, gn_hat, bn_hat = _lemma1_operands(a_noisy, p)
    f, f_hat = _ShiftedPower(g), _ShiftedPower(g_hat)
    fn, fn_hat = _ShiftedPower(gn), _ShiftedPower(gn_hat)

    ratios = np.empty(alphas.size)
    for i, alpha in enumerate(alphas):
        primary = fn(alpha, q) @ bn - f(alpha, q) @ b
        twin = fn_hat(alpha, q) @ bn_hat - f_hat(alpha, q) @ b_hat
        difference = max(spectral_norm(primary), spectral_norm(twin))
        ratios[i] = difference * alpha ** (0.5 - p - q) / eta
    return ratios


def lemma1_ratio(a, a_noisy, p, q, grid):
    """Largest normalised operator-error ratio of one (p, q) over the grid"""
    _check_pq(p, q)
    a = validate_matrix(a, 'operator')
    a_noisy = validate_matrix(a_noisy, 'perturbed operator')
    if a.shape != a_noisy.shape:
        raise ValidationError("Operators differ in shape", {'a': list(a.shape), 'a_noisy': list(a_noisy.shape)})

    eta = spectral_norm(a_noisy - a)
    if eta == 0:
        logger.warning("eta = 0: operator-error ratio undefined, reporting 0")
        return OperatorBoundReport(p, q, 0.0, grid, 1, eta_zero=True, ratios=(0.0,))

    worst = float(np.max(_lemma1_ratios(a, a_noisy, p, q, grid.points, eta)))
    return OperatorBoundReport(p, q, worst, grid, 1, ratios=(worst,))


def random_operator_pair(n, seed, eta_range=(0.01, 0.5)):
    """Gaussian A with ||A|| = 1 and A + Delta A with ||Delta A|| drawn from eta_range"""
    a_seed, d_seed = spawn_seeds(seed, n)
    a = make_rng(a_seed).standard_normal((n, n))
    a /= spectral_norm(a)
    rng = make_rng(d_seed)
    direction = rng.standard_normal((n, n))
    eta = rng.uniform(*eta_range)
    return a, a + direction * (eta / spectral_norm(direction))


def lemma1_trials(p, q, grid, trials=50, n=30, seed=0):
    """lemma1_ratio maximised over seeded Gaussian trials"""
    _check_pq(p, q)
    maxima = []
    for trial in range(trials):
        a, a_noisy = random_operator_pair(n, spawn_seeds(seed, trial, count=1)[0])
        maxima.append(lemma1_ratio(a, a_noisy, p, q, grid).max_ratio)
    logger.info(f"Operator-error ratio (p={p}, q={q}): max {max(maxima):.6g} over {trials} trials")
    return OperatorBoundReport(p, q, float(max(maxima)), grid, trials, ratios=tuple(maxima))


def lemma1_table(grid, trials=50, n=30, seed=0):
    """Reports for every (p, q) pair"""
    return [lemma1_trials(p, q, grid, trials, n, seed) for p, q in itertools.product(P_VALUES, Q_VALUES)]


def _noise_ratios(svd, noise, functional, alphas):
    propagated = solution_norms(svd, noise, alphas)
    psi = psi_values(functional, svd, noise, alphas)
    with np.errstate(divide='ignore', invalid='ignore'):
        ratios = np.where(psi > 0, propagated / psi, np.where(propagated > 0, np.inf, 0.0))
    return propagated, psi, ratios


def noise_condition_constant(a, noise, functional, grid):
    """C_nc = max over the grid of ||(A^T A + alpha)^-1 A^T e|| / psi(alpha, A, e)"""
    noise = validate_vector(noise, 'noise')
    if not np.any(noise):
        raise ValidationError("noise must be nonzero")
    svd = svd_decompose(a)
    functional = FunctionalKind(functional)
    _, _, ratios = _noise_ratios(svd, noise, functional, grid.points)
    return NoiseConditionReport(functional, float(np.max(ratios)), grid, ratios)


def noise_condition_holds(a, noise, functional, grid, c_nc):
    """Whether the noise condition holds with constant c_nc on every grid point"""
    svd = svd_decompose(a)
    propagated, psi, _ = _noise_ratios(svd, validate_vector(noise, 'noise'), FunctionalKind(functional),
                                       grid.points)
    return bool(np.all(propagated <= c_nc * psi * (1 + RELATIVE_SLACK)))


def measured_constant(problem, instance, functional, grid):
    """Empirical C_{p,q} of the (p, q) pair matching a functional, on one instance"""
    p, q = FUNCTIONAL_PQ[FunctionalKind(functional)]
    return lemma1_ratio(problem.a_clean, instance.a_noisy, p, q, grid).max_ratio


def lemma2_bounds_check(problem, instance, functional, grid, c_pq):
    """Check psi(A_eta, A_eta x) <= C eta ||x|| / sqrt(a) + psi(A, A x) and the upper bound
    psi(A_eta, y_delta) <= delta / sqrt(a) + (1 + C) eta ||x|| / sqrt(a) + psi(A, A x)."""
    functional = FunctionalKind(functional)
    alphas = grid.points
    x = np.asarray(problem.x_true)
    x_norm = float(np.linalg.norm(x))
    svd_clean = svd_decompose(problem.a_clean)
    svd_noisy = svd_decompose(instance.a_noisy)

    exact = psi_values(functional, svd_clean, problem.a_clean @ x, alphas)
    perturbed_exact = psi_values(functional, svd_noisy, instance.a_noisy @ x, alphas)
    noisy = psi_values(functional, svd_noisy, instance.y_noisy, alphas)
    root = np.sqrt(alphas)

    first_bound = c_pq * instance.eta * x_norm / root + exact
    upper_bound = instance.delta / root + (1 + c_pq) * instance.eta * x_norm / root + exact

    first = perturbed_exact <= first_bound + RELATIVE_SLACK * np.maximum(1.0, first_bound)
    upper = noisy <= upper_bound + RELATIVE_SLACK * np.maximum(1.0, upper_bound)
    if not first.all() or not upper.all():
        logger.debug(f"{functional.value}: bound fails at {np.count_nonzero(~(first & upper))} grid points "
                     f"with C = {c_pq:.6g}")
    return bool(first.all() and upper.all())


def sharpest_constant(problem, instance, functional, grid, c_start, iterations=40):
    """Bisection for the smallest C that still passes lemma2_bounds_check (diagnostic)"""
    if not lemma2_bounds_check(problem, instance, functional, grid, c_start):
        raise PreconditionError("The starting constant does not satisfy the bound", {'c_start': c_start})
    low, high = 0.0, c_start
    for _ in range(iterations):
        middle = 0.5 * (low + high)
        if lemma2_bounds_check(problem, instance, functional, grid, middle):
            high = middle
        else:
            low = middle
    return high


def lower_bound_check(svd_noisy, y_noisy, grid, c0=None, functionals=tuple(FunctionalKind)):
    """psi_HD >= (c0/c1) sqrt(a), psi_HR >= (c0/c1^1.5) a, psi_QO >= (c0/c1^2) a on the grid,
    with c1 = ||A_eta A_eta^T + alpha_max I||.

    Raises PreconditionError when ||y|| < c0 (or ||A^T y|| < c0 for QO), so a
    violated hypothesis is never confused with a violated bound.
    """
    functionals = [FunctionalKind(f) for f in functionals]
    y_noisy = validate_vector(y_noisy, 'data', length=svd_noisy.shape[0])
    c, _ = svd_noisy.coefficients(y_noisy)
    y_norm = float(np.linalg.norm(y_noisy))
    adjoint_norm = float(np.linalg.norm(svd_noisy.singular_values * c))
    needs_adjoint = FunctionalKind.QO in functionals

    if c0 is None:
        c0 = min(y_norm, adjoint_norm) if needs_adjoint else y_norm
    if not c0 > 0:
        raise PreconditionError("c0 must be positive (is A^T y zero?)",
                                {'norm_y': y_norm, 'norm_adjoint_y': adjoint_norm})
    if y_norm < c0:
        raise PreconditionError("||y|| is below c0", {'norm_y': y_norm, 'c0': c0})
    if needs_adjoint and adjoint_norm < c0:
        raise PreconditionError("||A^T y|| is below c0", {'norm_adjoint_y': adjoint_norm, 'c0': c0})

    alphas = grid.points
    c1 = svd_noisy.norm ** 2 + grid.alpha_max
    bounds = {
        FunctionalKind.HD: c0 / c1 * np.sqrt(alphas),
        FunctionalKind.HR: c0 / c1 ** 1.5 * alphas,
        FunctionalKind.QO: c0 / c1 ** 2 * alphas,
    }
    holds = True
    for functional in functionals:
        values = psi_values(functional, svd_noisy, y_noisy, alphas)
        ok = values >= bounds[functional] * (1 - 1e-12)
        if not ok.all():
            logger.warning(f"Lower bound for {functional.value} fails at {np.count_nonzero(~ok)} grid points")
            holds = False
    return holds


def convergence_sweep(problem, rule, levels, seeds, perturbation_kind=None, grid_count=Config.GRID_COUNT):
    """Run a rule along decreasing (delta_rel, eta_rel) levels and record alpha_* and e_rel"""
    levels = [(float(d), float(e)) for d, e in levels]
    if not levels or not seeds:
        raise ValidationError("convergence_sweep needs levels and seeds")
    sizes = [max(level) for level in levels]
    if any(later >= earlier for earlier, later in zip(sizes, sizes[1:])):
        raise ValidationError("levels must decrease strictly in max(delta, eta)", {'levels': levels})
    if any(eta <= 0 for _, eta in levels):
        raise ValidationError("eta must be positive at every level")

    kind = PerturbationKind(perturbation_kind or DEFAULT_PERTURBATION.get(problem.name, 'Gaussian'))
    x_true = np.asarray(problem.x_true)
    results = []
    for index, (delta_rel, eta_rel) in enumerate(levels):
        alpha_stars, e_rels = [], []
        for seed in seeds:
            op_seed, data_seed = spawn_seeds(seed, index)
            instance = build_instance(problem, PerturbationSpec(kind, eta_rel, op_seed), delta_rel, data_seed)
            svd = svd_decompose(instance.a_noisy)
            grid = rule_grid(rule, svd, instance.eta, grid_count)
            alpha_star, _ = select_alpha(rule, svd, instance.y_noisy, instance.eta, grid)
            x = tikhonov_solve(svd, instance.y_noisy, alpha_star)
            alpha_stars.append(alpha_star)
            e_rels.append(float(np.linalg.norm(x - x_true) / np.linalg.norm(x_true)))
        level = ConvergenceLevel(delta_rel, eta_rel, tuple(alpha_stars), tuple(e_rels))
        logger.info(f"{rule.rule_id} level ({delta_rel:g}, {eta_rel:g}): "
                    f"alpha* {level.median_alpha_star:.3e}, e_rel {level.median_e_rel:.4f}")
        results.append(level)
    return ConvergenceSweepReport(rule.rule_id, rule.gamma_factor, tuple(results))


def count_violations(values, increasing=False):
    """Number of adjacent steps breaking a nonincreasing (or nondecreasing) trend"""
    values = list(values)
    steps = zip(values, values[1:])
    if increasing:
        return sum(1 for a, b in steps if b < a)
    return sum(1 for a, b in steps if b > a)


__all__ = [
    'FUNCTIONAL_PQ', 'P_VALUES', 'Q_VALUES', 'lemma1_ratio', 'lemma1_trials', 'lemma1_table',
    'noise_condition_constant', 'noise_condition_holds', 'measured_constant', 'lemma2_bounds_check',
    'sharpest_constant', 'lower_bound_check', 'convergence_sweep', 'count_violations', 'random_operator_pair',
]


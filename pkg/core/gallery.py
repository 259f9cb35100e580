"""
Discretised test operators, phantoms, perturbations and the ||A|| = ||x|| = 1 normalisation
"""

import logging
import math

import numpy as np

from core.spectral import spectral_norm
from extensions import make_rng, spawn_seeds
from models.problem import NoisyInstance, PerturbationKind, TestProblem
from utils.error_handler import ValidationError
from utils.validators import validate_matrix, validate_vector

logger = logging.getLogger(__name__)

# Problem id -> kind of operator perturbation used in the experiments
PROBLEM_PERTURBATIONS = {
    'tomo-gauss': PerturbationKind.GAUSSIAN,
    'baart-heat': PerturbationKind.HEAT,
    'blur-tomo': PerturbationKind.TOMO,
}


def _require(condition, message, **details):
    if not condition:
        raise ValidationError(message, details)


def _midpoints(lower, upper, n):
    return lower + (np.arange(n) + 0.5) * (upper - lower) / n


def normalize_problem(a, x, name='custom', grid_n=0):
    """Scale so that ||A||_2 = 1 and ||x|| = 1, then set y = A x"""
    a = validate_matrix(a, 'operator')
    x = validate_vector(x, 'solution', length=a.shape[1])
    a_norm = spectral_norm(a)
    x_norm = float(np.linalg.norm(x))
    _require(a_norm > 0, "Cannot normalise the zero operator")
    _require(x_norm > 0, "Cannot normalise the zero solution")

    a = a / a_norm
    x = x / x_norm
    return TestProblem(name=name, a_clean=a, x_true=x, y_clean=a @ x, grid_n=grid_n)


# Fredholm operator with kernel exp(s cos t)

def baart_matrix(n):
    """Midpoint collocation of exp(s cos t), s in [0, pi/2], t in [0, pi]"""
    _require(n >= 2, "baart needs n >= 2", n=n)
    s = _midpoints(0.0, math.pi / 2, n)
    t = _midpoints(0.0, math.pi, n)
    return (math.pi / n) * np.exp(np.outer(s, np.cos(t)))


def gen_baart(n):
    """Normalised baart problem with exact solution sin(t)"""
    t = _midpoints(0.0, math.pi, n)
    return normalize_problem(baart_matrix(n), np.sin(t), name='baart')


# Volterra heat operator

def heat_kernel(t):
    """k(t) = t^(-3/2) / (2 sqrt(pi)) exp(-1/(4t)); zero for t <= 0 and on underflow"""
    t = np.asarray(t, dtype=float)
    values = np.zeros_like(t)
    positive = t > 0
    with np.errstate(over='ignore', under='ignore'):
        tp = t[positive]
        values[positive] = np.exp(-1.0 / (4.0 * tp)) * tp ** -1.5 / (2.0 * math.sqrt(math.pi))
    return np.nan_to_num(values, nan=0.0, posinf=0.0)


def gen_heat(n):
    """Lower-triangular midpoint quadrature of the heat kernel on [0, 1]"""
    _require(n >= 2, "heat needs n >= 2", n=n)
    h = 1.0 / n
    offsets = np.subtract.outer(np.arange(n), np.arange(n))
    matrix = h * heat_kernel((offsets + 0.5) * h)
    matrix[offsets < 0] = 0.0
    return matrix


# Gaussian blur

def blur_matrix(grid_n, band, sigma):
    """(1/(2 pi sigma^2)) T kron T with banded Gaussian Toeplitz T"""
    _require(grid_n >= band >= 1, "blur needs grid_n >= band >= 1", grid_n=grid_n, band=band)
    _require(sigma > 0, "sigma must be positive", sigma=sigma)
    offsets = np.subtract.outer(np.arange(grid_n), np.arange(grid_n))
    toeplitz = np.exp(-(offsets ** 2) / (2.0 * sigma ** 2))
    toeplitz[np.abs(offsets) >= band] = 0.0
    return np.kron(toeplitz, toeplitz) / (2.0 * math.pi * sigma ** 2)


def gen_blur(grid_n, band=8, sigma=0.9, seed=0):
    """Normalised blur problem acting on a grid_n x grid_n image flattened row-major"""
    return normalize_problem(blur_matrix(grid_n, band, sigma), gen_phantom(grid_n, seed),
                             name='blur', grid_n=grid_n)


# Tomography by random rays

def chord(point, direction):
    """Parameter interval (t_lo, t_hi) where point + t*direction lies in the unit square"""
    t_lo, t_hi = -math.inf, math.inf
    for p, d in zip(point, direction):
        if abs(d) < 1e-15:
            if p < 0 or p > 1:
                return 0.0, 0.0
            continue
        t1, t2 = (0.0 - p) / d, (1.0 - p) / d
        t_lo, t_hi = max(t_lo, min(t1, t2)), min(t_hi, max(t1, t2))
    if t_hi <= t_lo:
        return 0.0, 0.0
    return t_lo, t_hi


def ray_pixel_lengths(point, direction, grid_n):
    """Pixel indices and intersection lengths of a line with the pixel grid.

    Pixel (row r, column c) covers x in [c/N, (c+1)/N], y in [r/N, (r+1)/N]
    and has flat index r*N + c. `direction` is normalised internally.
    """
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    t_lo, t_hi = chord(point, direction)
    if t_hi - t_lo <= 0:
        return np.array([], dtype=int), np.array([], dtype=float)

    crossings = [np.array([t_lo, t_hi])]
    lines = np.arange(grid_n + 1) / grid_n
    for p, d in zip(point, direction):
        if abs(d) >= 1e-15:
            t = (lines - p) / d
            crossings.append(t[(t > t_lo) & (t < t_hi)])
    ts = np.unique(np.concatenate(crossings))

    lengths = np.diff(ts)
    mids = 0.5 * (ts[:-1] + ts[1:])
    keep = lengths > 1e-15
    lengths, mids = lengths[keep], mids[keep]
    xs = point[0] + mids * direction[0]
    ys = point[1] + mids * direction[1]
    cols = np.clip(np.floor(xs * grid_n).astype(int), 0, grid_n - 1)
    rows = np.clip(np.floor(ys * grid_n).astype(int), 0, grid_n - 1)
    return rows * grid_n + cols, lengths


def random_ray(rng):
    """Entry point uniform on the square boundary, angle uniform in [0, 2 pi)"""
    u = rng.uniform(0.0, 4.0)
    side = min(int(u), 3)
    f = u - side
    point = [(f, 0.0), (1.0, f), (1.0 - f, 1.0), (0.0, 1.0 - f)][side]
    angle = rng.uniform(0.0, 2.0 * math.pi)
    return np.array(point), np.array([math.cos(angle), math.sin(angle)])


def tomo_matrix_from_rays(rays, grid_n):
    """One row of intersection lengths per (point, direction) ray"""
    matrix = np.zeros((len(rays), grid_n * grid_n))
    for row, (point, direction) in enumerate(rays):
        indices, lengths = ray_pixel_lengths(point, direction, grid_n)
        np.add.at(matrix[row], indices, lengths)
    return matrix


def tomo_matrix(grid_n, oversampling_f, seed):
    """round(f * grid_n^2) random rays through a grid_n x grid_n image"""
    _require(grid_n >= 2, "tomo needs grid_n >= 2", grid_n=grid_n)
    _require(oversampling_f > 0, "oversampling factor must be positive", f=oversampling_f)
    rng = make_rng(seed)
    count = max(1, int(round(oversampling_f * grid_n * grid_n)))
    rays = []
    while len(rays) < count:
        point, direction = random_ray(rng)
        t_lo, t_hi = chord(point, direction)
        if t_hi - t_lo > 1e-9:
            rays.append((point, direction))
        else:
            logger.debug("Resampling degenerate ray")
    return tomo_matrix_from_rays(rays, grid_n)


def gen_tomo(grid_n, oversampling_f=1.0, seed=0):
    """Normalised tomography problem with a seeded phantom"""
    ray_seed, phantom_seed = spawn_seeds(seed, 0)
    return normalize_problem(tomo_matrix(grid_n, oversampling_f, ray_seed),
                             gen_phantom(grid_n, phantom_seed), name='tomo', grid_n=grid_n)


def gen_phantom(grid_n, seed=0):
    """Nonnegative image of a few seeded rectangles and discs, flattened and unit-normalised"""
    _require(grid_n >= 2, "phantom needs grid_n >= 2", grid_n=grid_n)
    rng = make_rng(seed)
    centres = (np.arange(grid_n) + 0.5) / grid_n
    xs, ys = np.meshgrid(centres, centres)  # ys varies along rows
    image = np.zeros((grid_n, grid_n))

    for _ in range(int(rng.integers(3, 6))):
        intensity = rng.uniform(0.2, 1.0)
        if rng.uniform() < 0.5:
            x0, x1 = np.sort(rng.uniform(0.1, 0.9, size=2))
            y0, y1 = np.sort(rng.uniform(0.1, 0.9, size=2))
            mask = (xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1)
        else:
            cx, cy = rng.uniform(0.2, 0.8, size=2)
            radius = rng.uniform(0.1, 0.3)
            mask = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius ** 2
        image[mask] += intensity

    if not image.any():
        image[grid_n // 2, grid_n // 2] = 1.0
    flat = image.ravel()
    return flat / np.linalg.norm(flat)


# Perturbations

def perturbation_direction(problem, kind, seed):
    """Unscaled Delta A of the requested kind, shaped like the clean operator"""
    m, n = problem.shape
    kind = PerturbationKind(kind)
    if kind is PerturbationKind.GAUSSIAN:
        return make_rng(seed).standard_normal((m, n))
    if kind is PerturbationKind.HEAT:
        _require(m == n, "heat perturbation needs a square operator", shape=[m, n])
        return gen_heat(n)
    grid_n = problem.grid_n
    _require(grid_n and grid_n * grid_n == n, "tomo perturbation needs an image operator",
             grid_n=grid_n, cols=n)
    return tomo_matrix(grid_n, m / n, seed)


def perturb_operator(problem, spec):
    """A_eta = A + C Delta A with ||C Delta A||_2 = eta_rel ||A||_2; returns (A_eta, eta)"""
    direction = perturbation_direction(problem, spec.kind, spec.seed)
    direction_norm = spectral_norm(direction)
    _require(direction_norm > 0, "Perturbation direction is zero", kind=spec.kind.value)

    target = spec.eta_rel * spectral_norm(problem.a_clean)
    a_noisy = problem.a_clean + (target / direction_norm) * direction
    eta = spectral_norm(a_noisy - problem.a_clean)
    return a_noisy, eta


def perturb_data(problem, delta_rel, seed):
    """y_delta = y + e with Gaussian e, ||e|| = delta_rel ||y||; returns (y_delta, delta)"""
    _require(delta_rel >= 0, "delta_rel must be nonnegative", delta_rel=delta_rel)
    y_clean = np.array(problem.y_clean)
    if delta_rel == 0:
        return y_clean, 0.0

    noise = make_rng(seed).standard_normal(y_clean.size)
    noise *= delta_rel * np.linalg.norm(y_clean) / np.linalg.norm(noise)
    y_noisy = y_clean + noise
    return y_noisy, float(np.linalg.norm(y_noisy - y_clean))


def build_instance(problem, spec, delta_rel, data_seed):
    """Perturb operator and data of a problem"""
    a_noisy, eta = perturb_operator(problem, spec)
    y_noisy, delta = perturb_data(problem, delta_rel, data_seed)
    return NoisyInstance(a_noisy=a_noisy, y_noisy=y_noisy, eta=eta, delta=delta,
                         data_seed=int(data_seed), op_seed=spec.seed)

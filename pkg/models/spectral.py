"""
Spectral representation of a dense operator
"""

from dataclasses import dataclass

import numpy as np


def _frozen(array):
    array = np.ascontiguousarray(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SvdFactorization:
    """Thin SVD A = U diag(s) V^T restricted to singular values above the truncation threshold.

    ``complement_dim`` counts the data-space dimensions orthogonal to the retained
    range (m - r), which the heuristic functionals need and a thin SVD would lose.
    """

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray
    complement_dim: int
    shape: tuple

    def __post_init__(self):
        object.__setattr__(self, 'left_vectors', _frozen(self.left_vectors))
        object.__setattr__(self, 'singular_values', _frozen(self.singular_values))
        object.__setattr__(self, 'right_vectors', _frozen(self.right_vectors))
        object.__setattr__(self, 'shape', tuple(int(d) for d in self.shape))

    @property
    def rank(self):
        return int(self.singular_values.size)

    @property
    def norm(self):
        """Spectral norm of the retained operator"""
        return float(self.singular_values[0]) if self.rank else 0.0

    @property
    def lambda_min(self):
        """Smallest eigenvalue of A^T A (zero when A has a nontrivial null space)"""
        if self.rank < self.shape[1] or self.rank == 0:
            return 0.0
        return float(self.singular_values[-1] ** 2)

    def coefficients(self, y):
        """Return (U^T y, norm of the part of y orthogonal to the retained range)"""
        c = self.left_vectors.T @ y
        rho = float(np.linalg.norm(y - self.left_vectors @ c))
        return c, rho

    def to_dict(self):
        """Summary without the singular vectors"""
        return {
            'shape': list(self.shape),
            'rank': self.rank,
            'complement_dim': self.complement_dim,
            'sigma_max': self.norm,
            'sigma_min': float(self.singular_values[-1]) if self.rank else 0.0,
        }

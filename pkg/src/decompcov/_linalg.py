"""Small dense symmetric-matrix kernels used throughout the package."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NotPositiveDefinite

# Scaled-pivot threshold below which an SPD factorization is treated as
# singular instead of being silently regularized.
PIVOT_TOL = 1e-12


def sym(a: np.ndarray) -> np.ndarray:
    """Exactly symmetric copy of ``a``."""
    return (a + a.T) / 2.0


def spd_cholesky(a: np.ndarray, exc=NotPositiveDefinite, what: str = "matrix"):
    """Lower Cholesky factor of ``a``, raising ``exc`` when not SPD.

    A factorization whose smallest squared pivot falls below
    ``PIVOT_TOL`` relative to the largest diagonal entry is rejected too.
    """
    a = np.asarray(a, dtype=float)
    if a.size and not np.all(np.isfinite(a)):
        raise exc(f"{what} has non-finite entries")
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise exc(f"{what} is not positive definite") from None
    scale = float(np.max(np.diagonal(a))) if a.size else 0.0
    if a.size and float(np.min(np.diagonal(lower))) ** 2 < PIVOT_TOL * scale:
        raise exc(f"{what} is numerically singular")
    return lower


def inv_spd(a: np.ndarray, exc=NotPositiveDefinite, what: str = "matrix"):
    """Inverse of an SPD matrix via Cholesky; output exactly symmetric."""
    lower = spd_cholesky(a, exc=exc, what=what)
    eye = np.eye(a.shape[0])
    half = solve_triangular(lower, eye, lower=True)
    return sym(half.T @ half)


def logdet_spd(a: np.ndarray, exc=NotPositiveDefinite, what: str = "matrix") -> float:
    lower = spd_cholesky(a, exc=exc, what=what)
    return 2.0 * float(np.sum(np.log(np.diagonal(lower))))


def min_eigval(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(a)[0])


def frob2(a: np.ndarray) -> float:
    """Squared Frobenius norm."""
    return float(np.sum(a * a))

"""Dense symmetric linear algebra used by the statistics.

Thin, contract-checked wrappers around LAPACK (via numpy). The wrappers fix
the conventions the rest of the package relies on: eigenvalues in
descending order, a deterministic eigenvector sign, and PSD repair by
eigenvalue clipping.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import DimensionError, DomainError, NotPSDError

SYMMETRY_TOL = 1e-10


class SymEigen(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


class CholeskyResult(NamedTuple):
    factor: np.ndarray
    repaired: bool
    # spectral-norm size of the perturbation applied by the repair
    perturbation: float


def as_matrix(m, name="matrix"):
    """Validate a 2-D finite float array and return it as ``float64``."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} contains NaN or infinite entries")
    return a


def _as_symmetric(m):
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    scale = 1.0 + np.max(np.abs(a))
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL * scale:
        raise DomainError("matrix is not symmetric")
    return 0.5 * (a + a.T)


def _fix_signs(vectors):
    # first nonzero coordinate of each column made positive
    v = vectors.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size and col[nz[0]] < 0:
            v[:, j] = -col
    return v


def sym_eigen(m):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending."""
    a = _as_symmetric(m)
    values, vectors = np.linalg.eigh(a)
    order = np.argsort(values, kind="stable")[::-1]
    return SymEigen(values[order], _fix_signs(vectors[:, order]))


def cholesky_psd(m, clip_floor=1e-10):
    """Lower Cholesky factor, repairing the matrix if it is not positive definite.

    The plain factorization is used when the smallest eigenvalue is already
    at least ``clip_floor``. Otherwise eigenvalues below ``clip_floor`` are
    raised to it and the repaired matrix is factorized; ``repaired`` is set.
    """
    if clip_floor < 0:
        raise DomainError("clip_floor must be non-negative")
    a = _as_symmetric(m)
    if np.linalg.eigvalsh(a)[0] >= clip_floor:
        try:
            return CholeskyResult(np.linalg.cholesky(a), False, 0.0)
        except np.linalg.LinAlgError:
            pass
    values, vectors = np.linalg.eigh(a)
    clipped = np.maximum(values, clip_floor)
    repaired = (vectors * clipped) @ vectors.T
    repaired = 0.5 * (repaired + repaired.T)
    perturbation = float(np.max(clipped - values))
    try:
        low = np.linalg.cholesky(repaired)
    except np.linalg.LinAlgError:
        # clip_floor == 0 leaves a singular matrix; use the symmetric root's QR
        root = vectors * np.sqrt(clipped)
        r = np.linalg.qr(root.T, mode="r")
        low = r.T
        low = low * np.where(np.diag(low) < 0, -1.0, 1.0)
    return CholeskyResult(low, True, perturbation)


def sym_sqrt(m):
    """Symmetric PSD square root. Eigenvalues in [-1e-6, 0) are treated as 0."""
    a = _as_symmetric(m)
    values, vectors = np.linalg.eigh(a)
    if values.size and values.min() < -1e-6:
        raise NotPSDError(f"matrix has eigenvalue {values.min():.3g} < -1e-6")
    root = (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T
    return 0.5 * (root + root.T)

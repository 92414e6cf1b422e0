"""Input validation shared by the functional API and the estimators."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import DimensionError, DomainError, InsufficientSampleError


def check_sample(x, name="x", min_samples=1):
    """Return ``x`` as a finite float64 ``(n, p)`` array, rows = observations."""
    try:
        arr = check_array(
            x,
            dtype=np.float64,
            ensure_2d=True,
            ensure_min_samples=1,
            ensure_min_features=1,
            ensure_all_finite=True,
        )
    except ValueError as exc:
        msg = str(exc)
        if "NaN" in msg or "infinity" in msg or "finite" in msg:
            raise DomainError(f"{name}: {msg}") from None
        raise DimensionError(f"{name}: {msg}") from None
    if arr.shape[0] < min_samples:
        raise InsufficientSampleError(
            f"{name} needs at least {min_samples} observations, got {arr.shape[0]}"
        )
    return arr


def check_pair(x1, x2, min_samples=1):
    """Validate two samples of identical shape ``(n, p)``."""
    a = check_sample(x1, "x1", min_samples)
    b = check_sample(x2, "x2", min_samples)
    if a.shape != b.shape:
        raise DimensionError(
            f"samples must have equal (n, p); got {a.shape} and {b.shape}"
        )
    return a, b


def check_probability(value, name="alpha"):
    if not (0.0 < value < 1.0):
        raise DomainError(f"{name} must lie in (0, 1), got {value}")
    return float(value)

"""Frobenius-norm detector built from unbiased U-statistics.

``B(x)`` estimates tr(Sigma^2) of one sample and ``C(x1, x2)`` estimates
tr(Sigma1 Sigma2); ``B1 + B2 - 2C`` then estimates the squared Frobenius
distance between the two covariance matrices. Every sum runs over
mutually distinct indices *within* a sample. Each sum is evaluated from
the (cross-)Gram matrix by inclusion-exclusion, so the cost is O(n^2 p);
the literal enumerations are kept as ``*_naive`` reference versions.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .distributions import std_normal_sf
from .exceptions import DegenerateVarianceError, DomainError, InsufficientSampleError
from .validation import check_pair, check_sample


@dataclass(frozen=True)
class FrobeniusStat:
    b1: float
    b2: float
    c: float
    sigma1_hat: float
    t1: float
    p1: float


def _check_b(x):
    x = check_sample(x)
    if x.shape[0] < 4:
        raise InsufficientSampleError(f"B statistic needs n >= 4, got n={x.shape[0]}")
    return x


def _check_c(x1, x2):
    x1, x2 = check_pair(x1, x2)
    if x1.shape[0] < 3:
        raise InsufficientSampleError(f"C statistic needs n >= 3, got n={x1.shape[0]}")
    return x1, x2


def b_stat_naive(x):
    """Reference evaluation of B by enumerating ordered distinct index tuples."""
    x = _check_b(x)
    n = x.shape[0]
    g = x @ x.T
    idx = range(n)
    t1 = sum(g[j, k] ** 2 for j, k in permutations(idx, 2))
    t2 = sum(g[j, k] * g[k, l] for j, k, l in permutations(idx, 3))
    t3 = sum(g[j, k] * g[l, m] for j, k, l, m in permutations(idx, 4))
    return (
        t1 / (n * (n - 1))
        - 2.0 * t2 / (n * (n - 1) * (n - 2))
        + t3 / (n * (n - 1) * (n - 2) * (n - 3))
    )


def b_stat_fast(x):
    x = _check_b(x)
    n = x.shape[0]
    g = x @ x.T
    d = np.diag(g)
    offdiag = g - np.diag(d)
    sq_off = np.sum(offdiag * offdiag)  # sum_{j!=k} g_jk^2
    row = offdiag.sum(axis=1)  # sum_{k!=j} g_jk
    total = row.sum()
    pairs = sq_off
    triples = np.dot(row, row) - sq_off
    quads = total * total - 4.0 * np.dot(row, row) + 2.0 * sq_off
    return float(
        pairs / (n * (n - 1))
        - 2.0 * triples / (n * (n - 1) * (n - 2))
        + quads / (n * (n - 1) * (n - 2) * (n - 3))
    )


def c_stat_naive(x1, x2):
    """Reference evaluation of C by explicit enumeration."""
    x1, x2 = _check_c(x1, x2)
    n = x1.shape[0]
    gc = x1 @ x2.T  # gc[j, k] = x1_j . x2_k
    idx = range(n)
    t1 = sum(gc[j, k] ** 2 for j in idx for k in idx)
    t2 = 0.0
    for j, l in permutations(idx, 2):
        for k in idx:
            t2 += gc[j, k] * gc[l, k] + gc[k, j] * gc[k, l]
    t3 = 0.0
    for j, l in permutations(idx, 2):
        for k, m in permutations(idx, 2):
            t3 += gc[j, k] * gc[l, m]
    return (
        t1 / n**2
        - t2 / (n**2 * (n - 1))
        + t3 / (n**2 * (n - 1) ** 2)
    )


def c_stat_fast(x1, x2):
    x1, x2 = _check_c(x1, x2)
    n = x1.shape[0]
    gc = x1 @ x2.T
    sq = np.sum(gc * gc)
    col = gc.sum(axis=0)  # per observation of sample 2
    row = gc.sum(axis=1)  # per observation of sample 1
    total = row.sum()
    mixed = (np.dot(col, col) - sq) + (np.dot(row, row) - sq)
    # j != l in sample 1 and k != m in sample 2
    quads = total * total - np.dot(row, row) - np.dot(col, col) + sq
    return float(
        sq / n**2 - mixed / (n**2 * (n - 1)) + quads / (n**2 * (n - 1) ** 2)
    )


def sigma1_hat(b1, b2, n):
    """Null standard deviation estimate of ``B1 + B2 - 2C``: ``(2/n)(B1 + B2)``."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    s = b1 + b2
    if not s > 0:
        raise DegenerateVarianceError(
            f"B1 + B2 = {s:.6g} is not positive; the variance estimate is undefined"
        )
    return 2.0 * s / n


def frobenius_test(x1, x2):
    """Standardized Frobenius statistic and its one-sided p-value."""
    x1, x2 = check_pair(x1, x2)
    if x1.shape[0] < 4:
        raise InsufficientSampleError(f"need n >= 4, got n={x1.shape[0]}")
    n = x1.shape[0]
    b1 = b_stat_fast(x1)
    b2 = b_stat_fast(x2)
    c = c_stat_fast(x1, x2)
    s = sigma1_hat(b1, b2, n)
    t1 = (b1 + b2 - 2.0 * c) / s
    return FrobeniusStat(b1, b2, c, s, float(t1), float(std_normal_sf(t1)))

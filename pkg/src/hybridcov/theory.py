"""Population-side quantities for known spectra.

The spike map psi and its derivative for the bulk families used in the
simulation models, the supercriticality criterion, and the population
variances that the plug-in estimators target. Used for validation and for
designing experiments; the test itself never needs them.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, DomainError
from .linalg import as_matrix, sym_sqrt

SUPPORT_GAP = 1e-8

KINDS = ("point_mass", "two_point", "uniform", "empirical")


@dataclass(frozen=True)
class BulkSpectrum:
    """Limiting (or finite) spectral distribution of the non-spike eigenvalues.

    ``params`` holds ``(c,)`` for a point mass, ``(a, b)`` for the
    half/half two-point law, ``(lo, hi)`` for the uniform law and the
    eigenvalue list for an empirical bulk. ``y`` is the aspect ratio p/n.
    """

    kind: str
    params: tuple
    y: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown bulk kind {self.kind!r}")
        if not self.y > 0:
            raise DomainError(f"aspect ratio must be positive, got {self.y}")
        params = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", params)
        if self.kind == "point_mass" and (len(params) != 1 or params[0] <= 0):
            raise DomainError("point_mass needs one positive location")
        if self.kind in ("two_point", "uniform"):
            if len(params) != 2 or min(params) <= 0:
                raise DomainError(f"{self.kind} needs two positive parameters")
            if self.kind == "uniform" and not params[0] < params[1]:
                raise DomainError("uniform needs lo < hi")
        if self.kind == "empirical" and any(v < 0 for v in params):
            raise DomainError("empirical bulk eigenvalues must be non-negative")

    @classmethod
    def point_mass(cls, c, y):
        return cls("point_mass", (c,), y)

    @classmethod
    def two_point(cls, a, b, y):
        return cls("two_point", (a, b), y)

    @classmethod
    def uniform(cls, lo, hi, y):
        return cls("uniform", (lo, hi), y)

    @classmethod
    def empirical(cls, eigenvalues, y):
        return cls("empirical", tuple(sorted(eigenvalues, reverse=True)), y)

    def check_outside(self, alpha):
        if self.kind == "uniform":
            lo, hi = self.params
            inside = lo - SUPPORT_GAP < alpha < hi + SUPPORT_GAP
        else:
            pts = np.asarray(self.params)
            inside = pts.size > 0 and np.min(np.abs(alpha - pts)) < SUPPORT_GAP
        if inside:
            raise DomainError(f"alpha={alpha} lies within {SUPPORT_GAP:g} of the bulk support")


def _atoms(bulk):
    if bulk.kind == "point_mass":
        return np.array(bulk.params), np.array([1.0])
    if bulk.kind == "two_point":
        return np.array(bulk.params), np.array([0.5, 0.5])
    pts = np.array(bulk.params)
    if pts.size == 0:
        return pts, pts
    return pts, np.full(pts.size, 1.0 / pts.size)


def psi(bulk, alpha):
    """Spike map ``alpha + y alpha int t / (alpha - t) dH(t)``."""
    bulk.check_outside(alpha)
    y = bulk.y
    if bulk.kind == "uniform":
        lo, hi = bulk.params
        w = hi - lo
        return alpha * (1.0 - y) - y * alpha**2 / w * math.log((alpha - hi) / (alpha - lo))
    t, wts = _atoms(bulk)
    return float(alpha + y * alpha * np.sum(wts * t / (alpha - t)))


def psi_prime(bulk, alpha):
    """Derivative ``1 - y int t^2 / (alpha - t)^2 dH(t)``."""
    bulk.check_outside(alpha)
    y = bulk.y
    if bulk.kind == "uniform":
        lo, hi = bulk.params
        w = hi - lo
        integral = (
            alpha**2 * (1.0 / (alpha - hi) - 1.0 / (alpha - lo))
            + 2.0 * alpha * math.log((alpha - hi) / (alpha - lo))
            + w
        )
        return 1.0 - y * integral / w
    t, wts = _atoms(bulk)
    return float(1.0 - y * np.sum(wts * t**2 / (alpha - t) ** 2))


def is_supercritical(bulk, alpha):
    return psi_prime(bulk, alpha) > 0


def theta_finite(bulk, alpha):
    """Finite-sample spike location: ``psi`` over an empirical bulk."""
    if bulk.kind != "empirical":
        raise DomainError("theta_finite needs an empirical bulk")
    return psi(bulk, alpha)


def _require_supercritical(bulk, *alphas):
    for a in alphas:
        d = psi_prime(bulk, a)
        if not d > 0:
            raise DomainError(f"alpha={a} is not supercritical (psi'={d:.4g})")


def population_spike_var(bulk, alpha_k, gamma4, u4_sum):
    """Asymptotic variance of ``sqrt(n)`` times a supercritical sample eigenvalue."""
    if not 0.0 <= u4_sum <= 1.0:
        raise DomainError(f"u4_sum must lie in [0, 1], got {u4_sum}")
    _require_supercritical(bulk, alpha_k)
    d = psi_prime(bulk, alpha_k)
    return (gamma4 - 3.0) * alpha_k**2 * d**2 * u4_sum + 2.0 * alpha_k**2 * d


def population_spike_cov(bulk, alpha_k, alpha_l, gamma4, u22_sum):
    _require_supercritical(bulk, alpha_k, alpha_l)
    return (
        (gamma4 - 3.0)
        * alpha_k
        * alpha_l
        * psi_prime(bulk, alpha_k)
        * psi_prime(bulk, alpha_l)
        * u22_sum
    )


def population_sigma1_sq(sigma1, sigma2, gamma4_1, gamma4_2, n):
    """Variance of ``B1 + B2 - 2C`` for known covariance matrices.

    The leading term of each sample's contribution is ``4 tr^2(Sigma_i^2) / n^2``
    (squared trace); with it the null variance is ``16 tr^2(Sigma^2) / n^2``,
    which is what ``(2/n)(B1 + B2)`` estimates.
    """
    s1 = as_matrix(sigma1, "sigma1")
    s2 = as_matrix(sigma2, "sigma2")
    if s1.shape != s2.shape or s1.shape[0] != s1.shape[1]:
        raise DimensionError(f"need two p x p matrices, got {s1.shape} and {s2.shape}")
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    diff = s1 - s2
    cross = s1 @ s2
    total = 8.0 / n**2 * np.trace(cross) ** 2
    for s, g4 in ((s1, gamma4_1), (s2, gamma4_2)):
        sq = s @ s
        total += 4.0 / n**2 * np.trace(sq) ** 2
        m = sq - cross
        total += 8.0 / n * np.trace(m @ m)
        root = sym_sqrt(s)
        h = root @ diff @ root
        # trace of the Hadamard square: sum of squared diagonal entries
        total += 4.0 * (g4 - 3.0) / n * np.sum(np.diag(h) ** 2)
    return float(total)

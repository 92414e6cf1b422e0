"""Population covariance models for the simulation study and data generation."""

from dataclasses import dataclass

import numpy as np

from .distributions import canonical_dist, sample_entries
from .exceptions import ConfigError, DomainError

MODELS = ("m1", "m2", "m3", "m4", "m5")


@dataclass(frozen=True)
class CovModelSpec:
    model: str
    delta: float
    p: int
    n: int
    dist: str = "gaussian"
    which: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.delta < 0:
            raise ConfigError(f"delta must be non-negative, got {self.delta}")
        if self.which not in (1, 2):
            raise ConfigError(f"which must be 1 or 2, got {self.which}")
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        object.__setattr__(self, "dist", canonical_dist(self.dist))
        minimum = {"m1": 11, "m2": 5, "m3": 11, "m4": 6, "m5": 11}[self.model]
        if self.p < minimum:
            raise ConfigError(f"model {self.model} needs p >= {minimum}, got {self.p}")
        if self.model == "m2" and (self.p - 4) % 2:
            raise ConfigError(f"model m2 needs p - 4 even, got p={self.p}")
        if self.model == "m2" and self.delta >= 20:
            raise ConfigError(f"model m2 needs delta < 20, got {self.delta}")

    def with_sample(self, which):
        return CovModelSpec(self.model, self.delta, self.p, self.n, self.dist, which)


def model_diagonal(spec):
    """Diagonal of the population covariance for ``spec``."""
    p, d = spec.p, spec.delta if spec.which == 2 else 0.0
    if spec.model == "m1":
        head = [10.0 + d] + [7.0] * 10
        return np.array(head + [1.0] * (p - 11))
    if spec.model == "m2":
        half = (p - 4) // 2
        return np.array([11.0, 7.0, 7.0, 7.0] + [1.0 + d / 20] * half + [1.0 - d / 20] * half)
    if spec.model == "m3":
        head = [10.0 + d, 8.0 + d, 7.0 + d] + [6.0] * 8
        return np.array(head + [1.0] * (p - 11))
    if spec.model == "m4":
        i = np.arange(5, p + 1)
        tail = 3.0 - 2.5 / (p - 5) * (i - 5)
        return np.concatenate(([20.0 + d, 15.0 + d, 13.0 + d, 12.0], tail))
    head = [10.0 + d, 7.0 + d, 7.0 + d] + [7.0] * 8
    return np.array(head + [1.0] * (p - 11))


def model_sigma(spec):
    return np.diag(model_diagonal(spec))


def generate_sample(sigma, n, dist, rng):
    """``n`` rows of ``Sigma^{1/2} z`` for a diagonal ``Sigma``.

    ``sigma`` may be the diagonal vector or the diagonal matrix; ``rng`` is
    a numpy ``Generator``.
    """
    sigma = np.asarray(sigma, dtype=float)
    diag = np.diag(sigma) if sigma.ndim == 2 else sigma
    if sigma.ndim == 2 and np.any(sigma - np.diag(diag)):
        raise DomainError("generate_sample needs a diagonal covariance")
    if np.any(diag < 0) or not np.all(np.isfinite(diag)):
        raise DomainError("covariance diagonal must be finite and non-negative")
    z = sample_entries(dist, rng, (n, diag.size))
    return z * np.sqrt(diag)

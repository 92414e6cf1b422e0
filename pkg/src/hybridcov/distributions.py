"""Normal and chi-square(4) distribution functions, and the entry samplers."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainccinv, gammaincinv, ndtr

from .exceptions import ConfigError, DomainError

DISTRIBUTIONS = ("gaussian", "student_t7_standardized", "laplace_standardized")

_ALIASES = {
    "gaussian": "gaussian",
    "normal": "gaussian",
    "t7": "student_t7_standardized",
    "student_t7_standardized": "student_t7_standardized",
    "laplace": "laplace_standardized",
    "laplace_standardized": "laplace_standardized",
}

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by ``(seed, stream)``.

    Backed by the counter-based Philox generator: the 128-bit key is the
    seed in the low word and the stream id in the high word, so every pair
    gives its own independent sequence regardless of which thread or process
    draws from it.
    """

    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= v <= _MASK64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v}")

    def generator(self):
        key = (self.seed & _MASK64) | ((self.stream & _MASK64) << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index):
        """Derived stream for worker-level chunking (stream id mixed with index)."""
        mixed = (self.stream * 0x9E3779B97F4A7C15 + index + 1) & _MASK64
        return RngStream(self.seed, mixed)


def canonical_dist(tag):
    try:
        return _ALIASES[tag]
    except KeyError:
        raise ConfigError(
            f"unknown distribution {tag!r}; expected one of {sorted(_ALIASES)}"
        ) from None


def std_normal_cdf(x):
    return ndtr(x)


def std_normal_sf(x):
    """``1 - Phi(x)`` without cancellation in the upper tail."""
    return ndtr(-np.asarray(x, dtype=float))


def chi2_4_cdf(x):
    x = np.asarray(x, dtype=float)
    h = np.clip(x, 0.0, None) / 2.0
    return -np.expm1(-h) - h * np.exp(-h)


def chi2_4_quantile(prob):
    """Quantile of the chi-square distribution with 4 degrees of freedom."""
    if not (0.0 < prob < 1.0) or not math.isfinite(prob):
        raise DomainError(f"probability must lie in (0, 1), got {prob}")
    # chi2_4 is Gamma(2, scale 2); pick the tail that keeps full precision
    if prob <= 0.5:
        return 2.0 * float(gammaincinv(2.0, prob))
    return 2.0 * float(gammainccinv(2.0, 1.0 - prob))


def sample_entries(dist, rng, size):
    """I.i.d. mean-zero, unit-variance entries from one of the three laws."""
    dist = canonical_dist(dist)
    if dist == "gaussian":
        return rng.standard_normal(size)
    if dist == "student_t7_standardized":
        return rng.standard_t(7, size) / math.sqrt(7.0 / 5.0)
    return rng.laplace(0.0, 1.0 / math.sqrt(2.0), size)


def sample_entry(dist, rng):
    return float(sample_entries(dist, rng, None))

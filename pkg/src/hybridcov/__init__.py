"""Hybrid two-sample test for high-dimensional covariance matrices.

Combines a Frobenius-norm U-statistic with leading sample eigenvalues via
Fisher's method.
"""

__version__ = "0.1.0"

from .distributions import RngStream
from .estimators import HybridCovarianceTest, SpikeEstimator
from .exceptions import CovTestError
from .fisher import TestOutcome, run_test

__all__ = [
    "CovTestError",
    "HybridCovarianceTest",
    "RngStream",
    "SpikeEstimator",
    "TestOutcome",
    "run_test",
    "__version__",
]

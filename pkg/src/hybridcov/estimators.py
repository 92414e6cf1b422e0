"""scikit-learn style front ends.

``SpikeEstimator`` is fitted on one sample and exposes the spike estimates
as fitted attributes. ``HybridCovarianceTest`` is fitted on a pair of
samples and exposes the test outcome. Both support ``get_params`` /
``set_params`` and ``clone``.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .distributions import RngStream
from .fisher import run_test
from .spike import estimate_spikes, spectrum
from .validation import check_pair, check_sample


class SpikeEstimator(BaseEstimator):
    """Estimate the leading spikes of a population covariance from one sample.

    Parameters
    ----------
    n_spikes : int, default=1
        Number of leading eigenvalues treated as spikes.

    Attributes
    ----------
    eigenvalues_ : ndarray of shape (n_features,)
        Sample covariance eigenvalues, descending.
    alpha_ : ndarray of shape (n_spikes,)
        Estimated population spikes.
    xi_ : ndarray of shape (n_spikes,)
        Estimated derivative of the spike map at each spike.
    kurtosis_ : float
        Estimated fourth moment of the standardized entries.
    kappa_ : ndarray of shape (n_spikes, n_spikes)
        Estimated ``sum_j u_jk^2 u_jl^2`` of the population eigenvectors.
    theta_ : ndarray of shape (n_features,)
        Roots used by the eigenvector functional.
    """

    def __init__(self, n_spikes=1):
        self.n_spikes = n_spikes

    def fit(self, X, y=None):
        X = check_sample(X, "X", min_samples=2)
        spec = spectrum(X)
        est = estimate_spikes(X, self.n_spikes, spec)
        self.n_features_in_ = X.shape[1]
        self.eigenvalues_ = spec.eigenvalues
        self.spectrum_ = spec
        self.estimates_ = est
        self.alpha_ = est.alpha_hat
        self.xi_ = est.xi_hat
        self.kurtosis_ = est.gamma4_hat
        self.kappa_ = est.kappa_hat
        self.theta_ = est.theta_roots
        return self

    def transform(self, X):
        """Project ``X`` (after centering) on the leading sample eigenvectors."""
        check_is_fitted(self, "spectrum_")
        X = check_sample(X, "X")
        vecs = self.spectrum_.eigenvectors[:, : self.n_spikes]
        return (X - X.mean(axis=0)) @ vecs


class HybridCovarianceTest(BaseEstimator):
    """Two-sample test of equal covariance matrices.

    Parameters
    ----------
    m : int, default=1
        Number of leading eigenvalues compared.
    alpha : float, default=0.05
        Nominal level.
    mc_draws : int, default=10000
        Monte-Carlo draws for the p-value when ``m > 1``.
    random_state : int, default=0
        Seed of the Monte-Carlo stream.
    stream : int, default=0
        Stream id of the Monte-Carlo stream.
    """

    def __init__(self, m=1, alpha=0.05, mc_draws=10000, random_state=0, stream=0):
        self.m = m
        self.alpha = alpha
        self.mc_draws = mc_draws
        self.random_state = random_state
        self.stream = stream

    def fit(self, X, Y):
        X, Y = check_pair(X, Y)
        outcome = run_test(
            X, Y, self.m, self.alpha, self.mc_draws, RngStream(self.random_state, self.stream)
        )
        self.n_features_in_ = X.shape[1]
        self.outcome_ = outcome
        self.statistic_ = outcome.t_fc
        self.critical_value_ = outcome.q
        self.pvalues_ = np.array([outcome.frob.p1, outcome.eigen.p2])
        self.reject_ = outcome.reject
        return self

    def test(self, X, Y):
        """Fit on ``(X, Y)`` and return the ``TestOutcome``."""
        return self.fit(X, Y).outcome_

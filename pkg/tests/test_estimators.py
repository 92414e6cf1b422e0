import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hybridcov import HybridCovarianceTest, SpikeEstimator
from hybridcov.exceptions import DimensionError, DomainError


@pytest.fixture
def spiked(rng):
    return rng.standard_normal((80, 40)) * np.sqrt(np.r_[25.0, np.ones(39)])


def test_spike_estimator_fit(spiked):
    est = SpikeEstimator().fit(spiked)
    assert est.n_features_in_ == 40
    assert est.alpha_.shape == (1,)
    assert 15 < est.alpha_[0] < 40
    assert 0 < est.xi_[0] < 1.05
    assert est.kurtosis_ >= 1
    assert est.transform(spiked).shape == (80, 1)


def test_params_and_clone():
    est = SpikeEstimator(n_spikes=2)
    assert est.get_params() == {"n_spikes": 2}
    assert clone(est).set_params(n_spikes=3).n_spikes == 3
    t = HybridCovarianceTest(m=3, alpha=0.1)
    assert clone(t).get_params()["alpha"] == 0.1


def test_not_fitted(spiked):
    with pytest.raises(NotFittedError):
        SpikeEstimator().transform(spiked)


def test_hybrid_test(spiked, rng):
    other = rng.standard_normal((80, 40)) * np.sqrt(np.r_[25.0, np.ones(39)])
    t = HybridCovarianceTest().fit(spiked, other)
    assert t.pvalues_.shape == (2,)
    assert t.reject_ == (t.statistic_ > t.critical_value_)
    assert t.test(spiked, other).t_fc == t.statistic_


def test_input_validation(spiked):
    with pytest.raises(DimensionError):
        HybridCovarianceTest().fit(spiked, spiked[:, :10])
    bad = spiked.copy()
    bad[0, 0] = np.nan
    with pytest.raises(DomainError):
        SpikeEstimator().fit(bad)

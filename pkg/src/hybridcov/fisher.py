"""Fisher combination of the Frobenius and leading-eigenvalue detectors."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .distributions import RngStream, chi2_4_quantile
from .exceptions import CovTestError, DomainError, InsufficientSampleError
from .spike import (
    EigenStat,
    eigen_stat_multi,
    eigen_stat_single,
    estimate_spikes,
    spectrum,
    spike_sigma_hat,
)
from .ustat import FrobeniusStat, frobenius_test
from .validation import check_pair, check_probability

P_FLOOR = 1e-300


@dataclass(frozen=True)
class TestOutcome:
    frob: FrobeniusStat
    eigen: EigenStat
    t_fc: float
    alpha: float
    q: float
    reject: bool
    m: int
    diagnostics: list = field(default_factory=list)

    __test__ = False  # not a pytest class


def fisher_statistic(p1, p2):
    """``-2 log p1 - 2 log p2``; chi-square with 4 degrees of freedom under the null."""
    for name, p in (("p1", p1), ("p2", p2)):
        if not (0.0 < p <= 1.0):
            raise DomainError(f"{name} must lie in (0, 1], got {p}")
    return -2.0 * math.log(p1) - 2.0 * math.log(p2)


def decide(t_fc, alpha):
    """Chi-square(4) critical value and the strict rejection decision."""
    alpha = check_probability(alpha)
    q = chi2_4_quantile(1.0 - alpha)
    return q, bool(t_fc > q)


def _floored(p, name, diagnostics):
    if p < P_FLOOR:
        diagnostics.append(f"warning: {name}={p:.3g} floored at {P_FLOOR:g} before taking logs")
        return P_FLOOR
    return p


def eigen_detector(x1, x2, m=1, draws=10000, rng=None, n_spikes=None):
    """Leading-eigenvalue statistic for one value of ``m``.

    ``m == 1`` uses the closed-form normal p-value; larger ``m`` uses the
    Monte-Carlo p-value of the L1 statistic.
    """
    spec1, spec2 = spectrum(x1), spectrum(x2)
    k = max(m, n_spikes or m)
    est1 = estimate_spikes(x1, k, spec1)
    est2 = estimate_spikes(x2, k, spec2)
    cov = spike_sigma_hat(est1, est2, k)
    if m == 1:
        stat = eigen_stat_single(spec1, spec2, cov)
    else:
        stat = eigen_stat_multi(spec1, spec2, cov, m, draws, rng)
    notes = [
        f"warning: sample {i} spike {j + 1} estimate is {a:.4g}; "
        "leading eigenvalues are poorly separated"
        for i, est in ((1, est1), (2, est2))
        for j, a in enumerate(est.alpha_hat[:m])
        if a <= 0
    ]
    if notes:
        stat = replace(stat, diagnostics=list(stat.diagnostics) + notes)
    return stat


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, CovTestError) and exc.args:
            msg = str(exc.args[0])
            if not msg.startswith("["):
                exc.args = (f"[{self.name}] {msg}",) + exc.args[1:]
        return False


def combine(frob, eigen, alpha, m):
    diagnostics = list(eigen.diagnostics)
    p1 = _floored(frob.p1, "p1", diagnostics)
    p2 = _floored(eigen.p2, "p2", diagnostics)
    t_fc = fisher_statistic(p1, p2)
    q, reject = decide(t_fc, alpha)
    return TestOutcome(frob, eigen, t_fc, alpha, q, reject, m, diagnostics)


def run_test(x1, x2, m=1, alpha=0.05, draws=10000, rng=None):
    """Hybrid two-sample covariance test, end to end."""
    with _Stage("input"):
        x1, x2 = check_pair(x1, x2)
        alpha = check_probability(alpha)
        if m < 1:
            raise DomainError(f"m must be >= 1, got {m}")
        if x1.shape[0] < 4:
            raise InsufficientSampleError(f"need n >= 4 observations, got {x1.shape[0]}")
    with _Stage("frobenius"):
        frob = frobenius_test(x1, x2)
    with _Stage("spike"):
        eigen = eigen_detector(x1, x2, m, draws, rng if rng is not None else RngStream())
    with _Stage("fisher"):
        return combine(frob, eigen, alpha, m)

"""Leading-eigenvalue detector.

Spectra of the sample covariance matrices, plug-in estimators of the spike
parameters (population spike, derivative of the spike map, kurtosis of the
entries, eigenvector fourth-moment functional), the resulting asymptotic
covariance of the leading sample eigenvalues, and the statistics built on
their differences.
"""

from dataclasses import dataclass, field

import numpy as np

from .distributions import RngStream, std_normal_sf
from .exceptions import (
    DegenerateDataError,
    DegenerateSpectrumError,
    DegenerateVarianceError,
    DimensionError,
    DomainError,
    InsufficientSampleError,
    RootFindingError,
)
from .linalg import cholesky_psd, sym_eigen
from .validation import check_sample

# eigenvalues below ZERO_TOL * lambda_1 are exact zeros (rank deficiency)
ZERO_TOL = 1e-10
# eigenvalues closer than TIE_TOL * lambda_1 are the same pole
TIE_TOL = 1e-10
SPIKE_GAP = 1e-8
BISECTION_ITERS = 200
REPAIR_BUDGET = 1e-3


@dataclass(frozen=True)
class SpectrumSummary:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    n: int
    p: int

    @property
    def y(self):
        return self.p / self.n


@dataclass(frozen=True)
class SpikeEstimates:
    alpha_hat: np.ndarray
    xi_hat: np.ndarray
    gamma4_hat: float
    kappa_hat: np.ndarray
    theta_roots: np.ndarray

    @property
    def n_spikes(self):
        return self.alpha_hat.shape[0]


@dataclass(frozen=True)
class SpikeCovariance:
    sigma2_hat: float
    sigma_E_hat: np.ndarray


@dataclass(frozen=True)
class EigenStat:
    statistic: float
    p2: float
    m: int
    mc_draws: int = 0
    mc_stream: tuple = None
    diagnostics: list = field(default_factory=list)


def sample_covariance(x):
    """Covariance with divisor ``n`` about the sample mean."""
    x = check_sample(x)
    n = x.shape[0]
    if n < 2:
        raise InsufficientSampleError(f"sample covariance needs n >= 2, got n={n}")
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / n
    return 0.5 * (s + s.T)


def spectrum(x):
    """Eigen-summary of the sample covariance of ``x``."""
    x = check_sample(x)
    s = sample_covariance(x)
    values, vectors = sym_eigen(s)
    top = max(values[0], 0.0)
    values = np.where(values <= ZERO_TOL * top, 0.0, values)
    return SpectrumSummary(values, vectors, x.shape[0], x.shape[1])


def _others(spec, k):
    lam = spec.eigenvalues
    if not 0 <= k < spec.p:
        raise DomainError(f"spike index {k} out of range for p={spec.p}")
    lk = lam[k]
    if lk <= 0:
        raise DegenerateSpectrumError(f"eigenvalue {k} is zero")
    gaps = lk - np.delete(lam, k)
    if np.min(np.abs(gaps)) < SPIKE_GAP * max(lk, 1.0):
        raise DegenerateSpectrumError(
            f"eigenvalue {k} ({lk:.6g}) is not separated from its neighbours"
        )
    return lk, gaps


def alpha_hat(spec, k):
    """Estimate of the population spike behind the ``k``-th sample eigenvalue (0-based)."""
    lk, gaps = _others(spec, k)
    denom = (1.0 - spec.y) / lk + np.sum(1.0 / gaps) / spec.n
    if not np.isfinite(denom) or abs(denom) < 1e-12 / lk:
        raise DegenerateSpectrumError(f"alpha estimate for spike {k} has a vanishing denominator")
    # may come out negative when sample spikes crowd each other; callers flag it
    return float(1.0 / denom)


def xi_hat(spec, alpha_hat_k, k):
    """Estimate of the derivative of the spike map at the ``k``-th spike."""
    lk, gaps = _others(spec, k)
    inner = (1.0 - spec.y) / lk**2 + np.sum(1.0 / gaps**2) / spec.n
    v = alpha_hat_k**2 * inner
    if not np.isfinite(v) or v <= 0:
        raise DegenerateSpectrumError(f"xi estimate for spike {k} is undefined")
    return float(1.0 / v)


def kurtosis_hat(x):
    """Kurtosis of the i.i.d. entries, floored at 1."""
    x = check_sample(x)
    n = x.shape[0]
    if n < 2:
        raise InsufficientSampleError(f"kurtosis estimate needs n >= 2, got n={n}")
    xc = x - x.mean(axis=0)
    norms = np.einsum("ij,ij->i", xc, xc)
    if x.shape[1] <= n:
        s = xc.T @ xc / n
        tr_s2 = np.sum(s * s)
    else:
        g = xc @ xc.T / n
        tr_s2 = np.sum(g * g)
    tr_s = norms.sum() / n
    tau = tr_s2 - tr_s**2 / n
    nu = np.var(norms, ddof=1)
    omega = np.sum(np.mean(xc * xc, axis=0) ** 2)
    if omega <= 0:
        raise DegenerateDataError("all coordinates have zero variance")
    return float(max(3.0 + (nu - 2.0 * tau) / omega, 1.0))


def _poles(spec):
    lam = spec.eigenvalues
    pos = lam[lam > 0]
    if pos.size == 0:
        return pos, pos
    tol = TIE_TOL * pos[0]
    starts = np.concatenate(([True], np.diff(pos) < -tol))
    group = np.cumsum(starts) - 1
    values = np.array([pos[group == g].mean() for g in range(group[-1] + 1)])
    weights = np.bincount(group).astype(float)
    return values, weights


def _theta_gap(x, poles, weights, n):
    # p * (lhs - rhs) of the defining equation; increasing between poles
    return np.sum(weights * poles / (poles - x[..., None]), axis=-1) - n


def theta_roots(spec):
    """Real solutions of ``(1/p) sum_j lam_j / (lam_j - x) = n / p``, descending.

    There is exactly one root between consecutive distinct positive
    eigenvalues and one below the smallest positive eigenvalue. Positions
    without a root (zero eigenvalues, tied eigenvalues) are filled with 0.
    """
    poles, weights = _poles(spec)
    theta = np.zeros(spec.p)
    r = poles.size
    if r == 0:
        return theta
    n = float(spec.n)
    lower_edge = -2.0 * np.sum(weights * poles) / n - 1.0
    lo = np.concatenate((poles[1:], [lower_edge]))
    hi = poles.copy()
    if _theta_gap(np.array([lower_edge]), poles, weights, n)[0] >= 0:
        raise RootFindingError(
            "no sign change below the smallest eigenvalue", interval=(lower_edge, poles[-1])
        )
    a, b = lo.copy(), hi.copy()
    for _ in range(BISECTION_ITERS):
        mid = 0.5 * (a + b)
        if np.all((mid == a) | (mid == b)):
            break
        g = _theta_gap(mid, poles, weights, n)
        neg = g < 0
        a = np.where(neg, mid, a)
        b = np.where(neg, b, mid)
    roots = 0.5 * (a + b)
    bad = ~((roots > lo) & (roots < hi)) | ~np.isfinite(roots)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise RootFindingError(
            f"bisection left bracket {i}", interval=(float(lo[i]), float(hi[i]))
        )
    # one root below each distinct pole, assigned to that pole's first position
    first_pos = np.concatenate(([0], np.cumsum(weights)[:-1])).astype(int)
    theta[first_pos] = roots
    return theta


def theta_residual(spec, x):
    lam = spec.eigenvalues
    return np.sum(lam / (lam - x)) / spec.p - 1.0 / spec.y


def _safe_div(num, den):
    num, den = np.broadcast_arrays(np.asarray(num, float), np.asarray(den, float))
    out = np.zeros(num.shape)
    both_zero = (num == 0) & (den == 0)
    ok = ~both_zero
    with np.errstate(divide="ignore", invalid="ignore"):
        out[ok] = num[ok] / den[ok]
    if not np.all(np.isfinite(out)):
        raise DegenerateSpectrumError("division by zero in eigenvector functional")
    return out


def _rho(spec, theta, k):
    lam = spec.eigenvalues
    lk, tk = lam[k], theta[k]
    others = np.arange(spec.p) != k
    rho = np.empty(spec.p)
    rho[others] = -(
        _safe_div(lk, lam[others] - lk) - _safe_div(tk, lam[others] - tk)
    )
    eta = np.sum(
        _safe_div(lam[others], lk - lam[others]) - _safe_div(theta[others], lk - theta[others])
    )
    rho[k] = 1.0 + eta
    return rho


def _squared_coordinate_profile(spec, theta, k):
    # estimate of (u_{j,k}^2)_j
    return (spec.eigenvectors**2) @ _rho(spec, theta, k)


def kappa_hat(spec, theta, k, l):
    """Estimate of ``sum_j u_{j,k}^2 u_{j,l}^2`` for population eigenvectors."""
    vk = _squared_coordinate_profile(spec, theta, k)
    vl = vk if l == k else _squared_coordinate_profile(spec, theta, l)
    return float(vk @ vl)


def kappa_matrix(spec, theta, n_spikes):
    v = np.column_stack(
        [_squared_coordinate_profile(spec, theta, k) for k in range(n_spikes)]
    )
    out = v.T @ v
    # the target sum_j u_jk^2 u_jl^2 lies in [0, 1]
    return np.clip(0.5 * (out + out.T), 0.0, 1.0)


def estimate_spikes(x, n_spikes=1, spec=None):
    """All per-sample spike estimates for the leading ``n_spikes`` eigenvalues."""
    x = check_sample(x)
    if spec is None:
        spec = spectrum(x)
    if not 1 <= n_spikes <= spec.p:
        raise DomainError(f"n_spikes must lie in [1, p={spec.p}], got {n_spikes}")
    alphas = np.array([alpha_hat(spec, k) for k in range(n_spikes)])
    xis = np.array([xi_hat(spec, alphas[k], k) for k in range(n_spikes)])
    theta = theta_roots(spec)
    return SpikeEstimates(
        alpha_hat=alphas,
        xi_hat=xis,
        gamma4_hat=kurtosis_hat(x),
        kappa_hat=kappa_matrix(spec, theta, n_spikes),
        theta_roots=theta,
    )


def _sample_contribution(est, m):
    a = est.alpha_hat[:m]
    xi = est.xi_hat[:m]
    excess = est.gamma4_hat - 3.0
    ax = a * xi
    cov = excess * np.outer(ax, ax) * est.kappa_hat[:m, :m]
    # diagonal: the fourth-moment functional enters once, plus the Gaussian part
    np.fill_diagonal(cov, excess * ax**2 * np.diag(est.kappa_hat)[:m] + 2.0 * a**2 * xi)
    return cov


def spike_sigma_hat(est1, est2, m):
    """Estimated covariance of ``sqrt(n)`` times the leading eigenvalue differences."""
    if m < 1 or m > est1.n_spikes or m > est2.n_spikes:
        raise DomainError(
            f"m={m} exceeds the estimated spikes ({est1.n_spikes}, {est2.n_spikes})"
        )
    sigma = _sample_contribution(est1, m) + _sample_contribution(est2, m)
    sigma = 0.5 * (sigma + sigma.T)
    diag = np.diag(sigma)
    if np.any(~np.isfinite(sigma)) or np.any(diag <= 0):
        raise DegenerateVarianceError(
            f"spike covariance has non-positive diagonal {diag.tolist()}"
        )
    return SpikeCovariance(float(sigma[0, 0]), sigma)


def _check_spectra(spec1, spec2):
    if (spec1.n, spec1.p) != (spec2.n, spec2.p):
        raise DimensionError(
            f"spectra from different shapes: {(spec1.n, spec1.p)} vs {(spec2.n, spec2.p)}"
        )


def eigen_stat_single(spec1, spec2, cov):
    _check_spectra(spec1, spec2)
    if not cov.sigma2_hat > 0:
        raise DegenerateVarianceError("sigma2_hat must be positive")
    t2 = np.sqrt(spec1.n) * (spec1.eigenvalues[0] - spec2.eigenvalues[0]) / np.sqrt(
        cov.sigma2_hat
    )
    p2 = min(1.0, 2.0 * float(std_normal_sf(abs(t2))))
    return EigenStat(float(t2), p2, 1)


def eigen_stat_multi(spec1, spec2, cov, m, draws=10000, rng=None, chunk=200_000):
    """Sum of absolute leading-eigenvalue differences with a Monte-Carlo p-value.

    The p-value is ``(1 + #{||W||_1 >= T}) / (draws + 1)`` for
    ``W ~ N(0, Sigma_E)``, so it is never 0.
    """
    _check_spectra(spec1, spec2)
    if m < 1 or m > cov.sigma_E_hat.shape[0]:
        raise DomainError(f"m={m} out of range for a {cov.sigma_E_hat.shape[0]}-spike covariance")
    if draws < 1000:
        raise DomainError(f"need at least 1000 Monte-Carlo draws, got {draws}")
    rng = rng if rng is not None else RngStream()
    diffs = spec1.eigenvalues[:m] - spec2.eigenvalues[:m]
    t2m = float(np.sqrt(spec1.n) * np.sum(np.abs(diffs)))
    sigma = cov.sigma_E_hat[:m, :m]
    chol = cholesky_psd(sigma)
    diagnostics = []
    if chol.repaired:
        budget = REPAIR_BUDGET * np.linalg.norm(sigma, 2)
        level = "warning" if chol.perturbation > budget else "info"
        diagnostics.append(
            f"{level}: spike covariance repaired to PSD "
            f"(eigenvalue shift {chol.perturbation:.3g})"
        )
    gen = rng.generator()
    hits = 0
    remaining = draws
    while remaining:
        size = min(chunk, remaining)
        w = gen.standard_normal((size, m)) @ chol.factor.T
        hits += int(np.count_nonzero(np.abs(w).sum(axis=1) >= t2m))
        remaining -= size
    p2 = (1.0 + hits) / (draws + 1.0)
    return EigenStat(t2m, p2, m, draws, (rng.seed, rng.stream), diagnostics)

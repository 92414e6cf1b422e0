"""Oracle and invariant suites bundled with the package (``hybridcov validate``).

Set ``HYBRIDCOV_INJECT_FAULT=<suite>`` to corrupt one suite on purpose;
this exists only to test that failures are reported.
"""

import os

import numpy as np

from .distributions import chi2_4_cdf, chi2_4_quantile, std_normal_cdf
from .linalg import sym_eigen
from .spike import SpectrumSummary, theta_residual, theta_roots
from .theory import BulkSpectrum, psi, psi_prime
from .ustat import b_stat_fast, b_stat_naive, c_stat_fast, c_stat_naive

FAULT_ENV = "HYBRIDCOV_INJECT_FAULT"


def _fault(name):
    return os.environ.get(FAULT_ENV) == name


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def suite_ustat(instances=60, seed=20240601):
    rng = np.random.default_rng(seed)
    bump = 1e-6 if _fault("ustat") else 0.0
    worst = 0.0
    for _ in range(instances):
        n, p = int(rng.integers(4, 8)), int(rng.integers(1, 6))
        x1, x2 = rng.standard_normal((n, p)), rng.standard_normal((n, p)) + 0.5
        worst = max(
            worst,
            _rel(b_stat_fast(x1) + bump, b_stat_naive(x1)),
            _rel(c_stat_fast(x1, x2), c_stat_naive(x1, x2)),
        )
    return worst < 1e-10, f"fast vs naive U-statistics: max relative error {worst:.2e}"


def suite_theta(spectra=40, seed=20240602):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(spectra):
        n, p = int(rng.integers(5, 60)), int(rng.integers(2, 50))
        lam = np.sort(rng.gamma(2.0, 1.0, size=p))[::-1]
        spec = SpectrumSummary(lam, np.eye(p), n, p)
        theta = theta_roots(spec)
        if _fault("theta"):
            theta = theta * (1.0 + 1e-3)
        for t in theta[theta != 0]:
            # near a pole the terms are huge, so scale by their magnitude
            scale = np.sum(np.abs(lam / (lam - t))) / p + n / p
            worst = max(worst, abs(theta_residual(spec, t)) / scale)
    return worst < 1e-10, f"theta root relative residuals: max {worst:.2e}"


def suite_psi(points=50):
    bulks = [
        (BulkSpectrum.point_mass(1.0, 2.0), 2.5, 30.0),
        (BulkSpectrum.two_point(1.5, 0.5, 2.0), 2.5, 30.0),
        (BulkSpectrum.uniform(0.5, 3.0, 10.0), 3.5, 40.0),
        (BulkSpectrum.empirical([7.0] * 10 + [1.0] * 189, 2.0), 7.5, 40.0),
    ]
    h = 1e-5
    worst = 0.0
    for bulk, lo, hi in bulks:
        for a in np.linspace(lo, hi, points):
            fd = (psi(bulk, a + h) - psi(bulk, a - h)) / (2 * h)
            exact = psi_prime(bulk, a) + (1e-3 if _fault("psi") else 0.0)
            worst = max(worst, _rel(exact, fd))
    return worst < 1e-6, f"psi' vs central differences: max relative error {worst:.2e}"


def suite_dist():
    grid = np.linspace(0.01, 0.99, 99)
    rt = max(abs(float(chi2_4_cdf(chi2_4_quantile(q))) - q) for q in grid)
    if _fault("dist"):
        rt += 1.0
    xs = np.linspace(-8, 8, 161)
    sym = float(np.max(np.abs(std_normal_cdf(xs) + std_normal_cdf(-xs) - 1.0)))
    ok = rt < 1e-10 and sym < 1e-12
    return ok, f"chi2_4 quantile round-trip {rt:.2e}; Phi symmetry {sym:.2e}"


def suite_linalg(seed=20240603):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in (1, 2, 5, 20, 60):
        a = rng.standard_normal((p, p))
        a = a + a.T
        values, vectors = sym_eigen(a)
        if _fault("linalg"):
            values = values + 1e-4
        recon = (vectors * values) @ vectors.T
        worst = max(
            worst,
            np.max(np.abs(vectors.T @ vectors - np.eye(p))),
            np.max(np.abs(recon - a)) / (1 + np.max(np.abs(a))),
        )
        if np.any(np.diff(values) > 0):
            return False, "eigenvalues not sorted descending"
    return worst < 1e-8, f"eigendecomposition orthonormality/reconstruction {worst:.2e}"


SUITES = {
    "ustat": suite_ustat,
    "theta": suite_theta,
    "psi": suite_psi,
    "dist": suite_dist,
    "linalg": suite_linalg,
}


def run_suites(names=None):
    """Run the named suites (all by default); yields ``(name, passed, message)``."""
    for name in names or SUITES:
        passed, message = SUITES[name]()
        yield name, bool(passed), message

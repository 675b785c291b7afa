"""Moment-based fitting of the location-scale NML law.

The estimator matches the first, second, and fourth sample moments.  With
h(k) = Gamma(k+1)^2 / Gamma(2k+1), which decreases strictly from 1 to 1/2 on
(0, 1], the solution is closed-form up to the monotone inversion of h:

    mu_hat     = M1
    omega      = (M4 - 6 M1^2 M2 + 5 M1^4) / (6 (M2 - M1^2)^2)
    kappa_hat  = h^{-1}(omega)
    sigma2_hat = (M2 - M1^2) * Gamma(kappa_hat + 1)

Standard errors come from the delta method: sqrt(n) * (estimates - truth) is
asymptotically normal with covariance grad_g Sigma grad_g^T, where Sigma is
the covariance of (Y, Y^2, Y^4) and g maps population moments to parameters.

Samples whose kurtosis statistic falls outside [1/2, 1) cannot be matched by
any interior kappa; the fit clamps to the nearest boundary and flags it, and
the kappa standard error is reported as unavailable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, psi

from .distributions import NmlLaw
from .errors import DomainError, EstimationError

__all__ = [
    "BoundaryFlag",
    "MomentSummary",
    "FitResult",
    "FittedCumulants",
    "h",
    "h_prime",
    "h_inverse",
    "mm_fit",
    "population_moments",
    "moment_covariance",
    "moment_map_gradient",
    "asymptotic_covariance",
    "fitted_cumulants",
]

KAPPA_FLOOR = 1e-6


class BoundaryFlag(str, enum.Enum):
    INTERIOR = "interior"
    CLAMPED_LOW = "clamped_low"
    CLAMPED_HIGH = "clamped_high"


@dataclass(frozen=True)
class MomentSummary:
    """Sample size and raw sample moments M1, M2, M4."""

    n: int
    m1: float
    m2: float
    m4: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("sample size must be >= 1")
        if self.m2 < self.m1**2:
            raise DomainError("m2 < m1^2 is impossible for real data")
        if self.m4 < self.m2**2:
            raise DomainError("m4 < m2^2 violates Cauchy-Schwarz")

    @classmethod
    def from_sample(cls, values) -> "MomentSummary":
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise DomainError("sample must be a nonempty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample contains non-finite values")
        return cls(
            n=arr.size,
            m1=float(arr.mean()),
            m2=float((arr**2).mean()),
            m4=float((arr**4).mean()),
        )


@dataclass(frozen=True)
class FitResult:
    """Moment-matching estimates with delta-method uncertainty.

    ``cov`` is the asymptotic covariance of sqrt(n)*(mu_hat, sigma2_hat,
    kappa_hat); ``se`` divides out the sample size.  A clamped kappa_hat
    carries se[kappa] = nan.
    """

    mu_hat: float
    sigma2_hat: float
    kappa_hat: float
    cov: np.ndarray
    se: np.ndarray
    kurtosis_statistic: float
    boundary_flag: BoundaryFlag
    n: int


@dataclass(frozen=True)
class FittedCumulants:
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not 0.0 < kappa <= 1.0:
        raise DomainError(f"kappa must lie in (0, 1], got {kappa}")
    return kappa


def h(kappa):
    """h(k) = Gamma(k+1)^2 / Gamma(2k+1), strictly decreasing on (0, 1]."""
    arr = np.asarray(kappa, dtype=float)
    if np.any(arr <= 0) or np.any(arr > 1):
        raise DomainError("h requires kappa in (0, 1]")
    out = np.exp(2.0 * gammaln(arr + 1.0) - gammaln(2.0 * arr + 1.0))
    return float(out) if arr.ndim == 0 else out


def h_prime(kappa):
    """Derivative of h, equal to 2 h(k) [psi(k+1) - psi(2k+1)]; negative."""
    arr = np.asarray(kappa, dtype=float)
    if np.any(arr <= 0) or np.any(arr > 1):
        raise DomainError("h_prime requires kappa in (0, 1]")
    out = h(arr) * 2.0 * (psi(arr + 1.0) - psi(2.0 * arr + 1.0))
    return float(out) if arr.ndim == 0 else out


def h_inverse(omega: float, kappa_floor: float = KAPPA_FLOOR) -> tuple[float, BoundaryFlag]:
    """Invert h by bisection plus Newton polish.

    omega in [1/2, 1) has an interior solution; values outside are clamped to
    the nearest kappa boundary and flagged, never silently.
    """
    omega = float(omega)
    if not np.isfinite(omega):
        raise DomainError("omega must be finite")
    if omega == 0.5:
        return 1.0, BoundaryFlag.INTERIOR
    if omega < 0.5:
        return 1.0, BoundaryFlag.CLAMPED_HIGH
    if omega >= 1.0:
        return kappa_floor, BoundaryFlag.CLAMPED_LOW
    lo, hi = kappa_floor, 1.0
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if h(mid) > omega:
            lo = mid
        else:
            hi = mid
    kappa = 0.5 * (lo + hi)
    for _ in range(100):
        resid = h(kappa) - omega
        if abs(resid) <= 1e-12:
            break
        step = resid / h_prime(kappa)
        nxt = kappa - step
        if not kappa_floor <= nxt <= 1.0:
            break
        kappa = nxt
    return min(max(kappa, kappa_floor), 1.0), BoundaryFlag.INTERIOR


def population_moments(mu: float, sigma2: float, kappa: float) -> tuple[float, float, float]:
    """Exact (E Y, E Y^2, E Y^4) of the location-scale law."""
    kappa = _check_kappa(kappa)
    a = math.exp(-gammaln(kappa + 1.0))
    b = 6.0 * math.exp(-gammaln(2.0 * kappa + 1.0))
    m1 = mu
    m2 = mu**2 + sigma2 * a
    m4 = mu**4 + 6.0 * mu**2 * sigma2 * a + sigma2**2 * b
    return m1, m2, m4


def moment_covariance(mu: float, sigma2: float, kappa: float) -> np.ndarray:
    """Covariance matrix of (Y, Y^2, Y^4), entrywise closed forms."""
    kappa = _check_kappa(kappa)
    if not sigma2 > 0:
        raise DomainError("sigma2 must be positive")
    g1 = math.exp(gammaln(kappa + 1.0))
    g2 = math.exp(gammaln(2.0 * kappa + 1.0))
    g3 = math.exp(gammaln(3.0 * kappa + 1.0))
    g4 = math.exp(gammaln(4.0 * kappa + 1.0))
    s2 = sigma2
    cov = np.empty((3, 3))
    cov[0, 0] = s2 / g1
    cov[0, 1] = cov[1, 0] = 2.0 * mu * s2 / g1
    cov[0, 2] = cov[2, 0] = 24.0 * mu * s2**2 / g2 + 4.0 * mu**3 * s2 / g1
    cov[1, 1] = 6.0 * s2**2 / g2 + 4.0 * mu**2 * s2 / g1 - s2**2 / g1**2
    cov[1, 2] = cov[2, 1] = (
        90.0 * s2**3 / g3
        - 6.0 * s2**3 / (g2 * g1)
        + 84.0 * mu**2 * s2**2 / g2
        - 6.0 * mu**2 * s2**2 / g1**2
        + 8.0 * mu**4 * s2 / g1
    )
    cov[2, 2] = (
        16.0 * mu**6 * s2 / g1
        + 408.0 * mu**4 * s2**2 / g2
        - 36.0 * mu**4 * s2**2 / g1**2
        - 72.0 * mu**2 * s2**3 / (g1 * g2)
        + 2520.0 * mu**2 * s2**3 / g3
        + 2520.0 * s2**4 / g4
        - 36.0 * s2**4 / g2**2
    )
    return cov


def moment_map_gradient(x: float, y: float, z: float) -> np.ndarray:
    """Jacobian of (M1, M2, M4) -> (mu, sigma2, kappa) at the moment point.

    Uses Gamma'(t) = Gamma(t) psi(t) and d/dw h^{-1}(w) = 1 / h'(h^{-1}(w)).
    """
    d = y - x**2
    if d <= 0:
        raise EstimationError("degenerate moment point: m2 <= m1^2")
    omega = (z - 6.0 * x**2 * y + 5.0 * x**4) / (6.0 * d**2)
    kappa, _ = h_inverse(omega)
    gk = math.exp(gammaln(kappa + 1.0))
    gk_prime = gk * psi(kappa + 1.0)
    hp = h_prime(kappa)
    dom_dx = (4.0 * x**3 * y - 6.0 * x * y**2 + 2.0 * x * z) / (3.0 * d**3)
    dom_dy = (-2.0 * x**4 + 3.0 * x**2 * y - z) / (3.0 * d**3)
    dom_dz = 1.0 / (6.0 * d**2)
    dk_dx, dk_dy, dk_dz = dom_dx / hp, dom_dy / hp, dom_dz / hp
    grad = np.zeros((3, 3))
    grad[0, 0] = 1.0
    grad[1, 0] = -2.0 * x * gk + d * gk_prime * dk_dx
    grad[1, 1] = gk + d * gk_prime * dk_dy
    grad[1, 2] = d * gk_prime * dk_dz
    grad[2, 0] = dk_dx
    grad[2, 1] = dk_dy
    grad[2, 2] = dk_dz
    return grad


def asymptotic_covariance(mu: float, sigma2: float, kappa: float) -> np.ndarray:
    """Asymptotic covariance of sqrt(n)-scaled estimates: grad_g Sigma grad_g^T."""
    x, y, z = population_moments(mu, sigma2, kappa)
    grad = moment_map_gradient(x, y, z)
    sigma = moment_covariance(mu, sigma2, kappa)
    out = grad @ sigma @ grad.T
    if not np.all(np.isfinite(out)):
        raise DomainError("asymptotic covariance has non-finite entries")
    return 0.5 * (out + out.T)


def mm_fit(summary: MomentSummary) -> FitResult:
    """Fit (mu, sigma2, kappa) from a moment summary.

    Raises EstimationError on degenerate samples (zero variance).  A clamped
    kappa_hat propagates its boundary flag and suppresses se(kappa).
    """
    m1, m2, m4 = summary.m1, summary.m2, summary.m4
    d = m2 - m1**2
    if d <= 0:
        raise EstimationError("degenerate sample: second moment equals mean squared")
    omega = (m4 - 6.0 * m1**2 * m2 + 5.0 * m1**4) / (6.0 * d**2)
    kappa_hat, flag = h_inverse(omega)
    sigma2_hat = d * math.exp(gammaln(kappa_hat + 1.0))
    cov = asymptotic_covariance(m1, sigma2_hat, kappa_hat)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0) / summary.n)
    if flag is not BoundaryFlag.INTERIOR:
        se = se.copy()
        se[2] = np.nan
    return FitResult(
        mu_hat=m1,
        sigma2_hat=sigma2_hat,
        kappa_hat=kappa_hat,
        cov=cov,
        se=se,
        kurtosis_statistic=omega,
        boundary_flag=flag,
        n=summary.n,
    )


def fitted_cumulants(fit: FitResult) -> FittedCumulants:
    """Cumulants of the law at the fitted parameters."""
    law = NmlLaw(fit.mu_hat, fit.sigma2_hat, fit.kappa_hat)
    mean, variance, skew, excess = law.cumulants()
    return FittedCumulants(mean, variance, skew, excess)

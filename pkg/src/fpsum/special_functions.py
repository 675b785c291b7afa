"""Mittag-Leffler function on the real line plus gamma-family helpers.

The one-parameter Mittag-Leffler function ``E_k(z) = sum_m z^m / Gamma(k*m + 1)``
is entire, but its power series is useless in double precision for large
negative arguments: the terms grow to roughly ``exp(|z|**(1/k))`` before the
alternating sum collapses to an algebraically small value.  Evaluation is
therefore split into three branches:

* power series, where the largest term stays small enough that cancellation
  costs at most a few digits;
* a spectral integral on the cut, ``E_k(-x) = (1/(pi*k)) * int exp(-(x*u)**(1/k))``
  over a finite angular interval, which is smooth, positive, and valid for all
  ``x`` bounded away from zero and ``0 < k < 1``;
* the algebraic asymptotic expansion
  ``E_k(-x) ~ sum_m (-1)**(m-1) x**-m / Gamma(1 - k*m)`` with optimal
  truncation, for large ``x``.

``k = 1`` dispatches to ``exp`` exactly, which also removes the poles of
``Gamma(1 - m)`` from the asymptotic branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betaln, gammaln, psi, rgamma, roots_legendre

from .errors import DomainError, EvaluationError

__all__ = [
    "MlEvalConfig",
    "DEFAULT_ML_CONFIG",
    "mittag_leffler",
    "beta",
    "digamma",
    "log_gamma",
]

# Largest value of |z|**(1/k) for which the power series is trusted: the
# cancellation error is ~eps * exp(|z|**(1/k)), so 4.6 keeps it near 1e-14
# of the largest term while E_k(-x) itself stays >= ~exp(-4.6).
_SERIES_EXPONENT_BUDGET = 4.6

# Smallest |z| for which the cached spectral nodes resolve the integrand.
_SPECTRAL_X_MIN = 0.25

_ASYMPTOTIC_MAX_TERMS = 12


@dataclass(frozen=True)
class MlEvalConfig:
    """Evaluation controls for the Mittag-Leffler function.

    series_tol is relative to the running partial sum, with an absolute
    floor of 1e-300 so that convergence is never declared against a partial
    sum that happens to pass through zero.
    """

    series_tol: float = 1e-14
    max_terms: int = 500
    asymptotic_threshold: float = 50.0

    def __post_init__(self) -> None:
        if not self.series_tol > 0:
            raise DomainError(f"series_tol must be positive, got {self.series_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if not self.asymptotic_threshold > 0:
            raise DomainError(
                f"asymptotic_threshold must be positive, got {self.asymptotic_threshold}"
            )


DEFAULT_ML_CONFIG = MlEvalConfig()


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not 0.0 < kappa <= 1.0:
        raise DomainError(f"kappa must lie in (0, 1], got {kappa}")
    return kappa


def _series_many(
    kappa: float, z: np.ndarray, cfg: MlEvalConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Power series for an array of arguments; returns (values, failed mask).

    Terms are formed in log space, so large intermediate terms overflow to
    inf (propagated to the result) rather than poisoning neighbours.
    """
    out = np.ones_like(z)
    floor = 1e-300
    small_runs = np.zeros(z.shape, dtype=int)
    active = np.ones(z.shape, dtype=bool)
    logabs = np.log(np.abs(z), out=np.full_like(z, -np.inf), where=z != 0)
    sign = np.sign(z)
    for m in range(1, cfg.max_terms + 1):
        if not active.any():
            break
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            term = sign[active] ** m * np.exp(
                m * logabs[active] - gammaln(kappa * m + 1.0)
            )
        out[active] = out[active] + term
        small = np.abs(term) <= cfg.series_tol * np.maximum(np.abs(out[active]), floor)
        runs = small_runs[active]
        runs = np.where(small, runs + 1, 0)
        small_runs[active] = runs
        done = (runs >= 2) | ~np.isfinite(out[active])
        if done.any():
            idx = np.flatnonzero(active)
            active[idx[done]] = False
    if active.any():
        # a still-growing sum with a positive argument is headed past the
        # double-precision range; report it as overflow rather than failure
        overflow = active & (z > 0) & (out > 1e280)
        out[overflow] = np.inf
        active &= ~overflow
    return out, active


@lru_cache(maxsize=64)
def _spectral_nodes(kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes for the cut integral, reusable for every x >= _SPECTRAL_X_MIN.

    The integrand exp(-(x*u(theta))**(1/k)) rises from 0 at theta0 = pi/2 - k*pi
    with a Hoelder-continuous derivative, so panels are geometrically graded
    toward theta0; the right end is cut where the exponent exceeds ~46 for the
    smallest supported x.
    """
    theta0 = np.pi / 2 - kappa * np.pi
    u_hi = 46.0**kappa / _SPECTRAL_X_MIN
    theta_hi = np.arctan2(u_hi + np.cos(kappa * np.pi), np.sin(kappa * np.pi))
    span = theta_hi - theta0
    graded = theta0 + span * 0.5 ** np.arange(54, 0, -1)
    uniform = np.linspace(theta0 + span * 0.5, theta_hi, 25)
    edges = np.concatenate(([theta0], graded[:-1], uniform))
    xg, wg = roots_legendre(16)
    lo, hi = edges[:-1], edges[1:]
    mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
    theta = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    # u(theta) = sin(kappa*pi)*tan(theta) - cos(kappa*pi), written without
    # cancellation near its zero at theta0
    u = np.sin(theta - theta0) / np.cos(theta)
    return u, weights


_LOG_STEP_LEFT = -30.0


@lru_cache(maxsize=8)
def _log_step_nodes() -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on s in [-30, 4.2] for the small-kappa branch."""
    edges = np.concatenate(
        (np.linspace(_LOG_STEP_LEFT, -4.0, 14), np.linspace(-4.0, 4.2, 42)[1:])
    )
    xg, wg = roots_legendre(16)
    lo, hi = edges[:-1], edges[1:]
    mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
    s = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return s, weights


# below this kappa the cut integral runs in the log variable: D(u) is
# monotone there (no Lorentzian spike), while the theta form's panels stop
# resolving the increasingly sharp step of exp(-(x*u)**(1/k))
_SMALL_KAPPA_SWITCH = 0.35


def _spectral_small_kappa(kappa: float, x: np.ndarray) -> np.ndarray:
    """Cut integral written in the log variable, for small kappa.

    In u the integrand is 1/D(u) times a smoothed step at u = 1/x whose
    relative width is kappa; substituting u = exp(kappa*s)/x makes the step
    shape exp(-exp(s)) independent of both kappa and x.  The region left of
    the step integrates in closed form (arctan antiderivative of 1/D).
    """
    s, w = _log_step_nodes()
    cosk, sink = np.cos(kappa * np.pi), np.sin(kappa * np.pi)
    theta0 = np.pi / 2 - kappa * np.pi
    u = np.exp(kappa * s)[None, :] / x[:, None]
    d = u * u + 2.0 * cosk * u + 1.0
    with np.errstate(under="ignore"):
        middle = (np.exp(-np.exp(s)) * (sink / np.pi))[None, :] * u / d @ w
    u_a = np.exp(kappa * _LOG_STEP_LEFT) / x
    left = (np.arctan2(u_a + cosk, sink) - theta0) / (np.pi * kappa)
    return left + middle


def _spectral_many(kappa: float, x: np.ndarray) -> np.ndarray:
    """E_k(-x) for x >= _SPECTRAL_X_MIN via the cut integral, 0 < k < 1."""
    if kappa <= _SMALL_KAPPA_SWITCH:
        return _spectral_small_kappa(kappa, x)
    u, w = _spectral_nodes(kappa)
    with np.errstate(over="ignore", under="ignore"):
        expo = (x[:, None] * u[None, :]) ** (1.0 / kappa)
        vals = np.exp(-expo) @ w
    return vals / (np.pi * kappa)


def _asymptotic_many(kappa: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Optimally truncated algebraic expansion of E_k(-x); returns (value, bound).

    The remainder estimate spans the next two terms: a single omitted term can
    vanish at a pole of Gamma(1 - kappa*m) without the remainder being small.
    """
    m = np.arange(1, _ASYMPTOTIC_MAX_TERMS + 3, dtype=float)
    coef = (-1.0) ** (m - 1) * rgamma(1.0 - kappa * m)
    with np.errstate(over="ignore", under="ignore"):
        terms = coef[None, :] * x[:, None] ** (-m[None, :])
    partial = np.cumsum(terms, axis=1)
    bounds = np.abs(terms[:, 1:-1]) + np.abs(terms[:, 2:])
    cut = np.argmin(bounds, axis=1)
    rows = np.arange(x.size)
    return partial[rows, cut], bounds[rows, cut]


def _positive_asymptotic(kappa: float, x: np.ndarray) -> np.ndarray:
    """E_k(x) for large positive x: exponential term plus algebraic correction.

    Relative accuracy is ~exp(-2*x**(1/k)); callers require x**(1/k) >= 15.
    Arguments whose exponential exceeds the double range come back as inf.
    """
    m = np.arange(1, _ASYMPTOTIC_MAX_TERMS + 1, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        lead = np.exp(x ** (1.0 / kappa)) / kappa
        correction = (x[:, None] ** (-m[None, :])) @ rgamma(1.0 - kappa * m)
    return lead - correction


def _kanter_log(kappa: float, theta: np.ndarray) -> np.ndarray:
    """log of the Kanter function A(theta) on (0, pi).

    A(theta) = sin(k*theta)**(k/(1-k)) * sin((1-k)*theta) / sin(theta)**(1/(1-k))
    is increasing from A(0+) = (1-k) * k**(k/(1-k)) to infinity; it drives both
    the positive-stable sampler and the integral form of the mixing density.
    """
    return (
        kappa / (1.0 - kappa) * np.log(np.sin(kappa * theta))
        + np.log(np.sin((1.0 - kappa) * theta))
        - np.log(np.sin(theta)) / (1.0 - kappa)
    )


@lru_cache(maxsize=64)
def _kanter_nodes(kappa: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Graded Gauss-Legendre nodes on (0, pi) with log A precomputed."""
    half = np.pi / 2
    left = half * 0.5 ** np.arange(40, 0, -1)
    right = np.pi - half * 0.5 ** np.arange(1, 41)
    edges = np.concatenate(([half * 0.5**40 * 0.5], left, right))
    xg, wg = roots_legendre(16)
    lo, hi = edges[:-1], edges[1:]
    mid, hw = (lo + hi) / 2.0, (hi - lo) / 2.0
    theta = (mid[:, None] + hw[:, None] * xg[None, :]).ravel()
    weights = (hw[:, None] * wg[None, :]).ravel()
    return theta, weights, _kanter_log(kappa, theta)


def _mixing_density_log(kappa: float, u: np.ndarray) -> np.ndarray:
    """log density of the positive law with moment generating function E_k.

    Change of variables through the one-sided stable density:
    f(u) = u**(k/(1-k)) / (pi*(1-k)) * int_0^pi A(t) exp(-u**(1/(1-k)) A(t)) dt.
    Stable for every u > 0 (kappa < 1); returned in log form so callers can
    weigh it against large exponential factors.
    """
    _, w, log_a = _kanter_nodes(kappa)
    log_y = np.log(u) / (1.0 - kappa)
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        # y*A formed as exp(log y + log A): overflow saturates to inf (the
        # node contributes nothing) without ever producing inf*0
        expo = log_a[None, :] - np.exp(log_y[:, None] + log_a[None, :])
        shift = expo.max(axis=1)
        dead = ~np.isfinite(shift)
        shift = np.where(dead, 0.0, shift)
        inner = np.exp(expo - shift[:, None]) @ w
        out = (
            kappa / (1.0 - kappa) * np.log(u)
            - np.log(np.pi * (1.0 - kappa))
            + shift
            + np.log(inner)
        )
    return np.where(dead, -np.inf, out)


def _positive_mgf_integral(kappa: float, x: np.ndarray) -> np.ndarray:
    """E_k(x) for positive x too slow for the series, too small for the
    exponential expansion (only reached for small kappa).

    Integrates exp(x*u) against the mixing density.  The integrand peaks at
    u* = x**((1-k)/k)/k with log-height x**(1/k), by the Laplace method.
    """
    out = np.empty_like(x)
    xg, wg = roots_legendre(12)
    for i, xi in enumerate(x):
        u_star = xi ** ((1.0 - kappa) / kappa) / kappa
        probe = u_star * np.geomspace(1e-3, 60.0, 400)
        a0 = (1.0 - kappa) * kappa ** (kappa / (1.0 - kappa))
        log_g = xi * probe - a0 * probe ** (1.0 / (1.0 - kappa))
        keep = log_g >= log_g.max() - 46.0
        u_hi = probe[keep].max() * 1.2
        edges = np.linspace(0.0, u_hi, 121)
        lo, hi = edges[:-1], edges[1:]
        mid, hw = (lo + hi) / 2.0, (hi - lo) / 2.0
        un = (mid[:, None] + hw[:, None] * xg[None, :]).ravel()
        wn = (hw[:, None] * wg[None, :]).ravel()
        log_terms = xi * un + _mixing_density_log(kappa, un)
        shift = log_terms.max()
        with np.errstate(over="ignore", under="ignore"):
            out[i] = np.exp(shift + np.log(np.exp(log_terms - shift) @ wn))
    return out


def mittag_leffler(kappa, z, cfg: MlEvalConfig = DEFAULT_ML_CONFIG):
    """Evaluate E_kappa(z) for real z, elementwise over array input.

    Parameters
    ----------
    kappa : float in (0, 1]
    z : float or array_like
    cfg : MlEvalConfig, optional

    Returns
    -------
    float or ndarray matching the shape of ``z``.

    Raises
    ------
    DomainError
        If kappa is outside (0, 1] or z is not finite.
    EvaluationError
        If the power series branch fails to converge within ``cfg.max_terms``
        and no other branch covers the argument.
    """
    kappa = _check_kappa(kappa)
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if not np.all(np.isfinite(z_arr)):
        raise DomainError("z must be finite")

    if kappa == 1.0:
        out = np.exp(z_arr)
        return float(out[0]) if scalar else out

    out = np.empty_like(z_arr)
    x = np.abs(z_arr)
    with np.errstate(over="ignore"):
        exponent = x ** (1.0 / kappa)

    pos_big = (z_arr > 0) & (exponent >= 15.0)
    if pos_big.any():
        out[pos_big] = _positive_asymptotic(kappa, x[pos_big])

    series_mask = ~pos_big & ((z_arr >= 0) | (exponent <= _SERIES_EXPONENT_BUDGET))
    if series_mask.any():
        sub = z_arr[series_mask]
        vals, failed = _series_many(kappa, sub, cfg)
        if failed.any():
            # slow convergence (small kappa): cover stragglers with the cut
            # integral (negative axis) or the mixing-density transform (positive)
            if not np.all((sub[failed] < -_SPECTRAL_X_MIN) | (sub[failed] > 0)):
                raise EvaluationError(
                    "Mittag-Leffler power series branch did not converge "
                    f"within max_terms={cfg.max_terms}"
                )
            neg = failed & (sub < 0)
            pos = failed & (sub > 0)
            if neg.any():
                vals[neg] = _spectral_many(kappa, -sub[neg])
            if pos.any():
                vals[pos] = _positive_mgf_integral(kappa, sub[pos])
        out[series_mask] = vals

    rest = ~series_mask & ~pos_big
    if rest.any():
        xr = x[rest]
        vals = np.empty_like(xr)
        accepted = np.zeros(xr.shape, dtype=bool)
        candidates = xr >= cfg.asymptotic_threshold
        if candidates.any():
            av, bound = _asymptotic_many(kappa, xr[candidates])
            good = bound <= 1e-15 * np.abs(av)
            idx = np.flatnonzero(candidates)[good]
            vals[idx] = av[good]
            accepted[idx] = True
        if (~accepted).any():
            vals[~accepted] = _spectral_many(kappa, xr[~accepted])
        out[rest] = vals

    return float(out[0]) if scalar else out


def digamma(x):
    """Digamma function Gamma'(x)/Gamma(x) for x > 0, elementwise."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("digamma requires x > 0")
    out = psi(x_arr)
    return float(out) if x_arr.ndim == 0 else out


def log_gamma(x):
    """log Gamma(x) for x > 0, elementwise."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("log_gamma requires x > 0")
    out = gammaln(x_arr)
    return float(out) if x_arr.ndim == 0 else out


def beta(a, b):
    """Beta function Gamma(a)Gamma(b)/Gamma(a+b) for a, b > 0."""
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if np.any(a_arr <= 0) or np.any(b_arr <= 0):
        raise DomainError("beta requires positive arguments")
    out = np.exp(betaln(a_arr, b_arr))
    return float(out) if a_arr.ndim == 0 and b_arr.ndim == 0 else out

"""Random-sum simulators, weak-limit distance sweeps, and the Monte Carlo
table harness.

A random sum is sum_{j=1}^{N} W_j with integer count N independent of the
i.i.d. summands W_j (zero when N = 0).  Normalized fractional-Poisson sums
approach the NML law as the rate grows; normalized COMP sums approach the
standard normal.  Both are exercised here with Kolmogorov-Smirnov distances
against quadrature-built target cdfs.

Partial sums conditional on the counts are drawn from their exact
conditional law whenever one is available in closed form (normal and
rademacher summands); other summand families are summed directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

from .distributions import CompLaw, FractionalPoissonLaw, NmlLaw, RngStream
from .errors import DomainError
from .estimation import BoundaryFlag, MomentSummary, asymptotic_covariance, mm_fit

__all__ = [
    "SummandSpec",
    "ConvergenceReport",
    "McExperimentConfig",
    "McCell",
    "sum_given_counts",
    "fp_random_sum",
    "comp_random_sum",
    "ks_distance",
    "nml_cdf",
    "convergence_sweep",
    "run_mc_tables",
]

_FAMILIES = ("standard_normal", "rademacher", "centered_uniform", "custom_table")


@dataclass(frozen=True)
class SummandSpec:
    """Zero-mean unit-variance summand family.

    custom_table takes explicit support points and probabilities; the first
    two moments are checked at construction.
    """

    family: str = "standard_normal"
    values: tuple[float, ...] | None = None
    probs: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown summand family {self.family!r}")
        if self.family == "custom_table":
            if not self.values or not self.probs or len(self.values) != len(self.probs):
                raise DomainError("custom_table needs matching values and probs")
            v = np.asarray(self.values, dtype=float)
            p = np.asarray(self.probs, dtype=float)
            if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
                raise DomainError("probs must be a probability vector")
            mean = v @ p
            var = (v - mean) ** 2 @ p
            if abs(mean) > 1e-12 or abs(var - 1.0) > 1e-12:
                raise DomainError("custom table must have mean 0 and variance 1")
        elif self.values is not None or self.probs is not None:
            raise DomainError("values/probs are only valid with custom_table")


def sum_given_counts(spec: SummandSpec, counts: np.ndarray, rng: RngStream) -> np.ndarray:
    """Draw sum_{j<=N_i} W_j for each count N_i.

    Normal and rademacher summands use the exact conditional laws
    Normal(0, N) and 2*Binomial(N, 1/2) - N; the other families sum freshly
    drawn variates.
    """
    gen = rng.generator
    counts = np.asarray(counts)
    if spec.family == "standard_normal":
        return np.sqrt(counts.astype(float)) * gen.standard_normal(counts.shape)
    if spec.family == "rademacher":
        return 2.0 * gen.binomial(counts, 0.5) - counts
    total = int(counts.sum())
    if spec.family == "centered_uniform":
        draws = gen.uniform(-math.sqrt(3.0), math.sqrt(3.0), total)
    else:
        draws = gen.choice(np.asarray(spec.values), size=total, p=np.asarray(spec.probs))
    out = np.zeros(counts.shape, dtype=float)
    nonzero = counts > 0
    if total and nonzero.any():
        starts = np.concatenate(([0], np.cumsum(counts)))[:-1][nonzero]
        out[nonzero] = np.add.reduceat(draws, starts)
    return out


def fp_random_sum(
    nu: float,
    kappa: float,
    summands: SummandSpec,
    rng: RngStream,
    size=None,
) -> np.ndarray:
    """Normalized fractional-Poisson sum: nu^(-1/2) * sum_{j<=N} W_j."""
    n = size if size is not None else 1
    counts = FractionalPoissonLaw(nu, kappa).sample(rng, n)
    out = sum_given_counts(summands, counts, rng) / math.sqrt(nu)
    return float(out[0]) if size is None else out


def comp_random_sum(
    lam: float,
    eta: float,
    summands: SummandSpec,
    rng: RngStream,
    size=None,
) -> np.ndarray:
    """Normalized COMP sum: lam^(-1/(2 eta)) * sum_{j<=K} W_j."""
    n = size if size is not None else 1
    counts = CompLaw(lam, eta).sample(rng, n)
    out = sum_given_counts(summands, counts, rng) * lam ** (-1.0 / (2.0 * eta))
    return float(out[0]) if size is None else out


# ---------------------------------------------------------------------------
# target cdfs and KS distance
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _nml_cdf_grid(kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid cdf of the standard law on +-12 standard deviations."""
    law = NmlLaw(0.0, 1.0, kappa)
    sd = math.sqrt(law.cumulants()[1])
    span = 12.0 * sd
    x = np.linspace(-span, span, 9001)
    f = law.density(x)
    cdf = np.concatenate(([0.0], np.cumsum((f[1:] + f[:-1]) * 0.5 * np.diff(x))))
    # symmetrize and pin the median, then normalize the tiny tail remainder
    half = cdf[-1] / 2.0
    cdf = np.clip((cdf - half) / cdf[-1] + 0.5, 0.0, 1.0)
    return x, cdf


def nml_cdf(kappa: float, x) -> np.ndarray:
    """Cdf of the standard law, interpolated from a cached quadrature grid."""
    grid, cdf = _nml_cdf_grid(kappa)
    return np.interp(np.asarray(x, dtype=float), grid, cdf, left=0.0, right=1.0)


def ks_distance(samples: np.ndarray, cdf_values_sorted: np.ndarray) -> float:
    """Kolmogorov-Smirnov statistic given cdf values at the sorted sample."""
    n = cdf_values_sorted.size
    upper = np.arange(1, n + 1) / n - cdf_values_sorted
    lower = cdf_values_sorted - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


@dataclass(frozen=True)
class ConvergenceReport:
    kind: str
    target: str
    parameter_grid: tuple[float, ...]
    distances: tuple[float, ...]
    draws_per_point: int
    metric: str = "ks"


def convergence_sweep(
    kind: str,
    grid,
    summands: SummandSpec,
    draws_per_point: int,
    rng: RngStream,
    *,
    kappa: float | None = None,
    eta: float | None = None,
) -> ConvergenceReport:
    """KS distance to the weak limit along an increasing rate grid.

    kind="fp" targets the standard NML law with tail parameter ``kappa``;
    kind="comp" targets the standard normal and needs ``eta``.
    """
    grid = tuple(float(g) for g in grid)
    if not grid:
        raise DomainError("parameter grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("parameter grid must be strictly increasing")
    if kind == "fp":
        if kappa is None:
            raise DomainError("fp sweep needs kappa")
        target = f"nml(kappa={kappa:g})"
    elif kind == "comp":
        if eta is None:
            raise DomainError("comp sweep needs eta")
        target = "std_normal"
    else:
        raise DomainError(f"unknown sweep kind {kind!r}")

    distances = []
    for i, rate in enumerate(grid):
        stream = rng.child(rng.stream_id + 1 + i)
        if kind == "fp":
            draws = fp_random_sum(rate, kappa, summands, stream, draws_per_point)
            cdf = nml_cdf(kappa, np.sort(draws))
        else:
            draws = comp_random_sum(rate, eta, summands, stream, draws_per_point)
            cdf = ndtr(np.sort(draws))
        distances.append(ks_distance(draws, cdf))
    return ConvergenceReport(
        kind=kind,
        target=target,
        parameter_grid=grid,
        distances=tuple(distances),
        draws_per_point=draws_per_point,
    )


# ---------------------------------------------------------------------------
# Monte Carlo table harness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class McExperimentConfig:
    """Replicated sample-fit experiment over a (kappa, n) grid."""

    mu: float = 0.5
    sigma2: float = 1.0
    kappa_grid: tuple[float, ...] = (0.2, 0.3, 0.5, 0.6, 0.8)
    sample_sizes: tuple[int, ...] = (200, 500, 1000, 2000)
    replications: int = 5000
    base_seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if any(n < 2 for n in self.sample_sizes):
            raise DomainError("sample sizes must be >= 2")
        if any(not 0 < k <= 1 for k in self.kappa_grid):
            raise DomainError("kappa grid must lie in (0, 1]")


@dataclass(frozen=True)
class McCell:
    """Aggregates for one (kappa, n) cell.

    Cells aggregate over interior (non-clamped) fits; clamped replications
    are counted separately.  ``se_theoretical`` averages the per-replication
    plug-in standard errors.
    """

    kappa: float
    n: int
    replications: int
    clamped_low: int
    clamped_high: int
    mean_est: dict
    rmse: dict
    se_empirical: dict
    se_theoretical: dict


def _run_cell(config: McExperimentConfig, cell_index: int, kappa: float, n: int) -> McCell:
    law = NmlLaw(config.mu, config.sigma2, kappa)
    reps = config.replications
    est = np.empty((reps, 3))
    se_k = np.empty(reps)
    flags = np.empty(reps, dtype=object)
    for r in range(reps):
        stream = RngStream(config.base_seed, cell_index * 1_000_003 + r)
        sample = law.sample(stream, n)
        fit = mm_fit(MomentSummary.from_sample(sample))
        est[r] = (fit.mu_hat, fit.sigma2_hat, fit.kappa_hat)
        se_k[r] = fit.se[2]
        flags[r] = fit.boundary_flag
    interior = np.array([f is BoundaryFlag.INTERIOR for f in flags])
    kept = est[interior]
    if kept.size == 0:
        raise DomainError(f"every replication clamped in cell kappa={kappa}, n={n}")
    truth = np.array([config.mu, config.sigma2, kappa])
    names = ("mu", "sigma2", "kappa")
    mean_est = dict(zip(names, kept.mean(axis=0)))
    rmse = dict(zip(names, np.sqrt(((kept - truth) ** 2).mean(axis=0))))
    se_emp = dict(zip(names, kept.std(axis=0, ddof=1)))
    theo = np.empty((int(interior.sum()), 3))
    for i, r in enumerate(np.flatnonzero(interior)):
        theo[i] = np.sqrt(np.maximum(np.diag(
            asymptotic_covariance(est[r, 0], est[r, 1], est[r, 2])), 0.0) / n)
    se_theo = dict(zip(names, theo.mean(axis=0)))
    return McCell(
        kappa=kappa,
        n=n,
        replications=reps,
        clamped_low=int(sum(f is BoundaryFlag.CLAMPED_LOW for f in flags)),
        clamped_high=int(sum(f is BoundaryFlag.CLAMPED_HIGH for f in flags)),
        mean_est=mean_est,
        rmse=rmse,
        se_empirical=se_emp,
        se_theoretical=se_theo,
    )


def run_mc_tables(config: McExperimentConfig, threads: int = 0) -> list[McCell]:
    """Run every (kappa, n) cell; deterministic for a given config/base_seed.

    Replication r of cell c owns stream (base_seed, c*1000003 + r), so results
    do not depend on execution order; threads > 1 parallelizes over cells.
    """
    cells = [
        (i, kappa, n)
        for i, (kappa, n) in enumerate(
            (k, n) for k in config.kappa_grid for n in config.sample_sizes
        )
    ]
    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda c: _run_cell(config, *c), cells))
    return [_run_cell(config, *c) for c in cells]

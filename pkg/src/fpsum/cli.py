"""Command-line front end.

Subcommands: ml-eval, density, pmf, sample, returns, fit, mc-tables,
converge.  Every command is deterministic given its seed; JSON output is a
single report object carrying ``"schema": "fpsum-output/v1"`` and validating
against ``schemas/fpsum_output.schema.json``.

Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 data error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .distributions import (
    CompLaw,
    FractionalPoissonLaw,
    MittagLefflerLaw,
    NmlLaw,
    RngStream,
)
from .errors import DataError, DomainError, EstimationError, EvaluationError
from .estimation import MomentSummary, fitted_cumulants, mm_fit
from .random_sums import (
    McExperimentConfig,
    SummandSpec,
    convergence_sweep,
    run_mc_tables,
)
from .special_functions import mittag_leffler

SCHEMA_TAG = "fpsum-output/v1"

# parameters of the bundled synthetic daily-return series (location, squared
# scale, tail parameter, length); used by `fit --demo`
DEMO_MU = 0.00021
DEMO_SIGMA2 = 0.00018
DEMO_KAPPA = 0.49123
DEMO_LENGTH = 2226
DEMO_SEED = 69


@dataclass(frozen=True)
class ReturnsSeries:
    """Dated log-returns, strictly increasing in time."""

    dates: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.dates) != self.values.size:
            raise DataError("dates and values must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise DataError("returns contain non-finite values")
        parsed = [datetime.date.fromisoformat(d) for d in self.dates]
        if any(b <= a for a, b in zip(parsed, parsed[1:])):
            raise DataError("dates must be strictly increasing")


def returns_from_prices(rows) -> ReturnsSeries:
    """log-returns r_t = ln(P_t / P_{t-1}) from (date, close) rows."""
    dates, prices = [], []
    for lineno, (date, close) in rows:
        try:
            price = float(close)
        except ValueError as exc:
            raise DataError(f"line {lineno}: unparseable close {close!r}") from exc
        if not math.isfinite(price) or price <= 0:
            raise DataError(f"line {lineno}: close must be positive, got {close!r}")
        try:
            datetime.date.fromisoformat(date)
        except ValueError as exc:
            raise DataError(f"line {lineno}: bad ISO date {date!r}") from exc
        dates.append(date)
        prices.append(price)
    if len(prices) < 2:
        raise DataError("need at least two prices to form returns")
    values = np.diff(np.log(np.asarray(prices)))
    return ReturnsSeries(dates=tuple(dates[1:]), values=values)


def _read_csv_rows(path: str, expected_headers: tuple[tuple[str, ...], ...]):
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = tuple(h.strip().lower() for h in header)
        if header not in expected_headers:
            raise DataError(
                f"{path}: header {','.join(header)!r} not one of "
                + " / ".join(",".join(h) for h in expected_headers)
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise DataError(f"line {lineno}: expected 2 fields, got {len(row)}")
            rows.append((lineno, (row[0].strip(), row[1].strip())))
    return header, rows


def load_series(path: str) -> ReturnsSeries:
    """Read a returns CSV (date,log_return) or a prices CSV (date,close)."""
    header, rows = _read_csv_rows(path, (("date", "close"), ("date", "log_return")))
    if header == ("date", "close"):
        return returns_from_prices(rows)
    dates, values = [], []
    for lineno, (date, value) in rows:
        try:
            values.append(float(value))
        except ValueError as exc:
            raise DataError(f"line {lineno}: unparseable return {value!r}") from exc
        try:
            datetime.date.fromisoformat(date)
        except ValueError as exc:
            raise DataError(f"line {lineno}: bad ISO date {date!r}") from exc
        dates.append(date)
    return ReturnsSeries(dates=tuple(dates), values=np.asarray(values))


def demo_series(seed: int = DEMO_SEED) -> ReturnsSeries:
    """Synthetic daily log-returns drawn from the bundled NML parameters."""
    law = NmlLaw(DEMO_MU, DEMO_SIGMA2, DEMO_KAPPA)
    values = law.sample(RngStream(seed), DEMO_LENGTH)
    start = datetime.date(2010, 1, 4)
    dates = tuple(
        (start + datetime.timedelta(days=i)).isoformat() for i in range(DEMO_LENGTH)
    )
    return ReturnsSeries(dates=dates, values=values)


# ---------------------------------------------------------------------------
# model fits for the comparison report
# ---------------------------------------------------------------------------


def _empirical_cumulants(values: np.ndarray) -> dict:
    n = values.size
    mean = float(values.mean())
    centered = values - mean
    var = float((centered**2).mean())
    if var == 0.0:
        raise EstimationError("degenerate sample: zero variance")
    skew = float((centered**3).mean() / var**1.5)
    kurt = float((centered**4).mean() / var**2 - 3.0)
    return {
        "mean": mean,
        "variance": var,
        "skewness": skew,
        "excess_kurtosis": kurt,
        "n": n,
    }


def fit_models(series: ReturnsSeries, models: tuple[str, ...]) -> dict:
    """Fit the requested models and assemble the comparison report."""
    values = series.values
    if values.size < 5:
        raise DataError("need at least 5 returns to fit")
    emp = _empirical_cumulants(values)
    n = emp.pop("n")
    report_models = []
    for model in models:
        if model == "nml":
            fit = mm_fit(MomentSummary.from_sample(values))
            cum = fitted_cumulants(fit)
            se_kappa = None if math.isnan(fit.se[2]) else float(fit.se[2])
            report_models.append(
                {
                    "model": "nml",
                    "estimates": {
                        "mu": fit.mu_hat,
                        "sigma2": fit.sigma2_hat,
                        "kappa": fit.kappa_hat,
                    },
                    "se": {
                        "mu": float(fit.se[0]),
                        "sigma2": float(fit.se[1]),
                        "kappa": se_kappa,
                    },
                    "boundary_flag": fit.boundary_flag.value,
                    "fitted_cumulants": {
                        "mean": cum.mean,
                        "variance": cum.variance,
                        "skewness": cum.skewness,
                        "excess_kurtosis": cum.excess_kurtosis,
                    },
                }
            )
        elif model == "normal":
            mu = float(values.mean())
            s2 = float(values.var())
            report_models.append(
                {
                    "model": "normal",
                    "estimates": {"mu": mu, "sigma2": s2, "kappa": 1.0},
                    "se": {
                        "mu": math.sqrt(s2 / n),
                        "sigma2": math.sqrt(2.0 * s2 * s2 / n),
                        "kappa": None,
                    },
                    "fitted_cumulants": {
                        "mean": mu,
                        "variance": s2,
                        "skewness": 0.0,
                        "excess_kurtosis": 0.0,
                    },
                }
            )
        elif model == "laplace":
            mu = float(values.mean())
            b = float(np.abs(values - mu).mean())
            if b == 0.0:
                raise EstimationError("degenerate sample: zero absolute deviation")
            report_models.append(
                {
                    "model": "laplace",
                    "estimates": {"mu": mu, "sigma2": b * b, "kappa": 0.0},
                    "se": {
                        "mu": b / math.sqrt(n),
                        "sigma2": 2.0 * b * b / math.sqrt(n),
                        "kappa": None,
                    },
                    "fitted_cumulants": {
                        "mean": mu,
                        "variance": 2.0 * b * b,
                        "skewness": 0.0,
                        "excess_kurtosis": 3.0,
                    },
                    "note": "sigma2 is the squared scale b^2 of density "
                    "exp(-|x-mu|/b)/(2b); the implied variance is 2*b^2, and "
                    "standard errors are the large-sample likelihood ones",
                }
            )
        else:
            raise DomainError(f"unknown model {model!r}")
    return {
        "schema": SCHEMA_TAG,
        "kind": "fit_report",
        "n": n,
        "empirical": emp,
        "models": report_models,
    }


def _format_fit_table(report: dict) -> str:
    def cell(value, se=None):
        if value is None:
            return "--"
        body = f"{value: .6g}"
        if se is not None:
            body += f" ({se:.3g})" if se is not None else ""
        return body

    lines = []
    lines.append(f"{'model':<9} {'mu (se)':<24} {'sigma2 (se)':<24} {'kappa (se)':<22}")
    for m in report["models"]:
        est, se = m["estimates"], m["se"]
        kappa = est.get("kappa")
        kappa_txt = "--" if kappa is None else (
            f"{kappa: .6g}" + (f" ({se['kappa']:.3g})" if se.get("kappa") is not None else "")
        )
        flag = m.get("boundary_flag", "")
        if flag and flag != "interior":
            kappa_txt += f" [{flag}]"
        lines.append(
            f"{m['model']:<9} {cell(est['mu'], se['mu']):<24} "
            f"{cell(est['sigma2'], se['sigma2']):<24} {kappa_txt:<22}"
        )
    lines.append("")
    lines.append(f"{'':<9} {'mean':>12} {'variance':>12} {'skewness':>10} {'ex.kurt':>10}")
    for m in report["models"]:
        c = m["fitted_cumulants"]
        lines.append(
            f"{m['model']:<9} {c['mean']:>12.6g} {c['variance']:>12.6g} "
            f"{c['skewness']:>10.5g} {c['excess_kurtosis']:>10.5g}"
        )
    c = report["empirical"]
    lines.append(
        f"{'empirical':<9} {c['mean']:>12.6g} {c['variance']:>12.6g} "
        f"{c['skewness']:>10.5g} {c['excess_kurtosis']:>10.5g}"
    )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _clean(obj):
    """JSON-safe copy: numpy scalars to python, NaN to None."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isnan(f):
            return None
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    return obj


_CSV_COLUMNS = {
    "ml_eval": ("z", "value"),
    "density_grid": ("x", "density"),
    "pmf_grid": ("n", "pmf"),
    "samples": ("values",),
    "returns_series": ("dates", "values"),
    "convergence": ("grid", "ks"),
}

_CSV_HEADERS = {
    "ml_eval": ("z", "value"),
    "density_grid": ("x", "density"),
    "pmf_grid": ("n", "pmf"),
    "samples": ("value",),
    "returns_series": ("date", "log_return"),
    "convergence": ("rate", "ks"),
}


def _to_csv(payload: dict) -> str:
    kind = payload["kind"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if kind == "mc_tables":
        names = ("mu", "sigma2", "kappa")
        header = ["kappa", "n", "replications", "clamped_low", "clamped_high"]
        for group in ("mean_est", "rmse", "se_empirical", "se_theoretical"):
            header += [f"{group}_{p}" for p in names]
        writer.writerow(header)
        for cell in payload["cells"]:
            row = [cell["kappa"], cell["n"], cell["replications"],
                   cell["clamped_low"], cell["clamped_high"]]
            for group in ("mean_est", "rmse", "se_empirical", "se_theoretical"):
                row += [_fmt_num(cell[group][p]) for p in names]
            writer.writerow(row)
        return buf.getvalue()
    if kind == "fit_report":
        writer.writerow(["model", "parameter", "estimate", "se"])
        for m in payload["models"]:
            for p, v in m["estimates"].items():
                writer.writerow([m["model"], p, _fmt_num(v), _fmt_num(m["se"].get(p))])
        return buf.getvalue()
    if kind not in _CSV_COLUMNS:
        raise DomainError(f"no CSV form for {kind!r} output")
    cols = _CSV_COLUMNS[kind]
    writer.writerow(_CSV_HEADERS[kind])
    for row in zip(*(payload[c] for c in cols)):
        writer.writerow([_fmt_num(v) for v in row])
    return buf.getvalue()


def _fmt_num(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return "" if math.isnan(f) else repr(f)
    return v


def _emit(payload: dict, args, text: str | None = None) -> None:
    """Write the report (json or csv) to --out or stdout; optional aligned
    text goes to stdout, or stderr when stdout carries the report."""
    body = (
        json.dumps(_clean(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"
        if args.format == "json"
        else _to_csv(payload)
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(body)
        if text:
            print(text)
    else:
        if text:
            print(text, file=sys.stderr)
        sys.stdout.write(body)


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, step = (float(p) for p in spec.split(":"))
    except ValueError:
        raise DomainError(f"grid must be lo:hi:step, got {spec!r}") from None
    if step <= 0 or hi < lo:
        raise DomainError(f"bad grid {spec!r}")
    return np.arange(lo, hi + step / 2.0, step)


def _parse_list(spec: str, kind=float) -> tuple:
    try:
        return tuple(kind(p) for p in spec.split(","))
    except ValueError:
        raise DomainError(f"bad list {spec!r}") from None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_ml_eval(args) -> int:
    z = _parse_grid(args.grid) if args.grid else np.array([args.z], dtype=float)
    with np.errstate(over="ignore"):
        values = np.atleast_1d(mittag_leffler(args.kappa, z))
    _emit(
        {
            "schema": SCHEMA_TAG,
            "kind": "ml_eval",
            "kappa": args.kappa,
            "z": z.tolist(),
            "value": values.tolist(),
        },
        args,
    )
    return 0


def cmd_density(args) -> int:
    x = _parse_grid(args.grid)
    if args.dist == "nml":
        law = NmlLaw(args.mu, args.sigma2, args.kappa)
        params = {"mu": args.mu, "sigma2": args.sigma2, "kappa": args.kappa}
    else:
        law = MittagLefflerLaw(args.kappa)
        params = {"kappa": args.kappa}
    density = np.atleast_1d(law.density(x))
    _emit(
        {
            "schema": SCHEMA_TAG,
            "kind": "density_grid",
            "dist": args.dist,
            "parameters": params,
            "x": x.tolist(),
            "density": density.tolist(),
        },
        args,
    )
    return 0


def _require(args, names):
    missing = [f"--{n}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise DomainError(f"--dist {args.dist} needs {', '.join(missing)}")


def cmd_pmf(args) -> int:
    if args.max < 0:
        raise DomainError("--max must be nonnegative")
    n = np.arange(args.max + 1)
    if args.dist == "fp":
        _require(args, ("nu", "kappa"))
        law = FractionalPoissonLaw(args.nu, args.kappa)
        params = {"nu": args.nu, "kappa": args.kappa}
    else:
        _require(args, ("lam", "eta"))
        law = CompLaw(args.lam, args.eta)
        params = {"lam": args.lam, "eta": args.eta}
    pmf = np.atleast_1d(law.pmf(n))
    _emit(
        {
            "schema": SCHEMA_TAG,
            "kind": "pmf_grid",
            "dist": args.dist,
            "parameters": params,
            "n": n.tolist(),
            "pmf": pmf.tolist(),
        },
        args,
    )
    return 0


def cmd_sample(args) -> int:
    if args.n < 1:
        raise DomainError("--n must be positive")
    rng = RngStream(args.seed if args.seed is not None else 0)
    if args.dist == "nml":
        _require(args, ("kappa",))
        law = NmlLaw(args.mu, args.sigma2, args.kappa)
        params = {"mu": args.mu, "sigma2": args.sigma2, "kappa": args.kappa}
    elif args.dist == "ml":
        _require(args, ("kappa",))
        law = MittagLefflerLaw(args.kappa)
        params = {"kappa": args.kappa}
    elif args.dist == "fp":
        _require(args, ("nu", "kappa"))
        law = FractionalPoissonLaw(args.nu, args.kappa)
        params = {"nu": args.nu, "kappa": args.kappa}
    else:
        _require(args, ("lam", "eta"))
        law = CompLaw(args.lam, args.eta)
        params = {"lam": args.lam, "eta": args.eta}
    values = law.sample(rng, args.n)
    _emit(
        {
            "schema": SCHEMA_TAG,
            "kind": "samples",
            "dist": args.dist,
            "parameters": params,
            "seed": rng.seed,
            "values": np.asarray(values).tolist(),
        },
        args,
    )
    return 0


def cmd_returns(args) -> int:
    header, rows = _read_csv_rows(args.prices, (("date", "close"),))
    series = returns_from_prices(rows)
    _emit(
        {
            "schema": SCHEMA_TAG,
            "kind": "returns_series",
            "dates": list(series.dates),
            "values": series.values.tolist(),
        },
        args,
    )
    return 0


def cmd_fit(args) -> int:
    if args.demo:
        series = demo_series(args.seed if args.seed is not None else DEMO_SEED)
        source = "demo"
    else:
        if not args.returns:
            raise DataError("fit needs a returns/prices CSV or --demo")
        series = load_series(args.returns)
        source = args.returns
    models = _parse_list(args.models, str)
    report = fit_models(series, models)
    report["source"] = source
    _emit(report, args, text=_format_fit_table(report))
    return 0


def cmd_mc_tables(args) -> int:
    config = McExperimentConfig(
        mu=args.mu,
        sigma2=args.sigma2,
        kappa_grid=_parse_list(args.kappa),
        sample_sizes=_parse_list(args.n, int),
        replications=args.reps,
        base_seed=args.seed if args.seed is not None else 0,
    )
    cells = run_mc_tables(config, threads=args.threads)
    payload = {
        "schema": SCHEMA_TAG,
        "kind": "mc_tables",
        "config": {
            "mu": config.mu,
            "sigma2": config.sigma2,
            "kappa_grid": list(config.kappa_grid),
            "sample_sizes": list(config.sample_sizes),
            "replications": config.replications,
            "base_seed": config.base_seed,
        },
        "cells": [
            {
                "kappa": c.kappa,
                "n": c.n,
                "replications": c.replications,
                "clamped_low": c.clamped_low,
                "clamped_high": c.clamped_high,
                "mean_est": c.mean_est,
                "rmse": c.rmse,
                "se_empirical": c.se_empirical,
                "se_theoretical": c.se_theoretical,
            }
            for c in cells
        ],
    }
    _emit(payload, args)
    return 0


def cmd_converge(args) -> int:
    rng = RngStream(args.seed if args.seed is not None else 0)
    report = convergence_sweep(
        args.sweep,
        _parse_list(args.grid),
        SummandSpec(args.summands),
        args.draws,
        rng,
        kappa=args.kappa,
        eta=args.eta,
    )
    _emit(
        {
            "schema": SCHEMA_TAG,
            "kind": "convergence",
            "sweep": report.kind,
            "target": report.target,
            "grid": list(report.parameter_grid),
            "ks": list(report.distances),
            "draws_per_point": report.draws_per_point,
        },
        args,
    )
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpsum",
        description="Fractional-Poisson random sums and the "
        "Normal-Mittag-Leffler law",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit RNG seed")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument(
        "--threads", type=int, default=0, help="worker threads, 0 = auto"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ml-eval", parents=[common], help="evaluate the Mittag-Leffler function")
    p.add_argument("--kappa", type=float, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--z", type=float)
    group.add_argument("--grid", help="lo:hi:step")
    p.set_defaults(handler=cmd_ml_eval)

    p = sub.add_parser("density", parents=[common], help="density on a grid")
    p.add_argument("--dist", choices=("nml", "ml"), required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--grid", required=True, help="lo:hi:step")
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("pmf", parents=[common], help="pmf table for a count law")
    p.add_argument("--dist", choices=("fp", "comp"), required=True)
    p.add_argument("--nu", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--max", type=int, required=True, help="largest count")
    p.set_defaults(handler=cmd_pmf)

    p = sub.add_parser("sample", parents=[common], help="draw random variates")
    p.add_argument("--dist", choices=("nml", "ml", "fp", "comp"), required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--kappa", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("returns", parents=[common], help="log-returns from a prices CSV")
    p.add_argument("prices", help="CSV with header date,close")
    p.set_defaults(handler=cmd_returns)

    p = sub.add_parser("fit", parents=[common], help="fit models to a returns series")
    p.add_argument("returns", nargs="?", help="CSV with header date,log_return or date,close")
    p.add_argument("--demo", action="store_true", help="use the bundled synthetic series")
    p.add_argument("--models", default="nml,normal,laplace")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("mc-tables", parents=[common], help="replicated sample-fit tables")
    p.add_argument("--kappa", required=True, help="comma list")
    p.add_argument("--n", required=True, help="comma list")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.set_defaults(handler=cmd_mc_tables)

    p = sub.add_parser("converge", parents=[common], help="weak-limit KS sweep")
    p.add_argument("sweep", choices=("fp", "comp"))
    p.add_argument("--grid", required=True, help="comma list of rates")
    p.add_argument("--kappa", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--draws", type=int, default=100_000)
    p.add_argument(
        "--summands",
        choices=("standard_normal", "rademacher", "centered_uniform"),
        default="standard_normal",
    )
    p.set_defaults(handler=cmd_converge)
    return parser


def _fold_negative_values(argv):
    """Join value flags with arguments that start with '-', which argparse
    would otherwise read as option names (e.g. --grid -4:4:0.01)."""
    folded = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if (
            token in ("--grid", "--z")
            and i + 1 < len(argv)
            and argv[i + 1].startswith("-")
            and len(argv[i + 1]) > 1
            and (argv[i + 1][1].isdigit() or argv[i + 1][1] == ".")
        ):
            folded.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            folded.append(token)
    return folded


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_fold_negative_values(list(argv)))
    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise DomainError("--seed must be an unsigned 64-bit integer")
        return args.handler(args)
    except DomainError as exc:
        print(f"fpsum: usage error: {exc}", file=sys.stderr)
        return 2
    except (EvaluationError, EstimationError) as exc:
        print(f"fpsum: numeric failure: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"fpsum: data error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

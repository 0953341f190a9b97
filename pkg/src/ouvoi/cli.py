"""Command-line surface for VoI computations, sweeps, figures, and queue analysis.

Subcommands: voi, approx, fig, mm1, sweep.  Machine-readable output (CSV or
JSON) goes to stdout or --out; all diagnostics go to stderr.  Exit codes:
0 success, 2 usage or validation error, 3 numerical failure (non-positive-
definite covariance).  Omitting --seed draws an entropy seed, logs it to
stderr, and embeds it in the output metadata.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import secrets
import sys
from dataclasses import dataclass

import numpy as np

from .approx import voi_high_snr_poisson, voi_high_snr_uniform, voi_low_snr_uniform
from .gauss_markov import OuParams
from .montecarlo import DataTable, ExperimentSpec, FIGURE_DEFAULTS, run_experiment
from .queue_mm1 import Mm1Params, simulate_fcfs
from .voi_exact import (
    NOISELESS,
    NonPositiveDefiniteError,
    SingularCovarianceError,
    correction,
    markov_voi,
    snr_ratio,
    voi_closed_form,
)
from .window import NoiseModel, ObservationWindow, timeline_to_csv

__all__ = ["main", "CliConfig"]


@dataclass(frozen=True)
class CliConfig:
    """Resolved output plumbing shared by every subcommand."""

    subcommand: str
    fmt: str
    out: str | None
    seed: int | None


class UsageError(Exception):
    """Flag validation failure; maps to exit code 2 with a one-line message."""


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    seed = secrets.randbits(32)
    print(f"--seed not supplied; using entropy seed {seed}", file=sys.stderr)
    return seed


def _emit(table: DataTable, args) -> int:
    text = table.to_csv() if args.format == "csv" else table.to_json()
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0


def _table_meta(params: dict, seed=None) -> dict:
    canon = json.dumps(params, sort_keys=True)
    meta = {
        "spec": params,
        "spec_sha256": hashlib.sha256(canon.encode()).hexdigest(),
        "units": "nats",
    }
    if seed is not None:
        meta["seed"] = seed
    return meta


def _add_output_flags(sub) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", default=None, help="output path; '-' or omitted for stdout")
    sub.add_argument("--seed", type=int, default=None)


def _add_model_flags(sub) -> None:
    sub.add_argument("--kappa", type=float, default=0.1)
    sub.add_argument("--theta", type=float, default=0.0)
    sub.add_argument("--sigma", type=float, default=1.0)
    sub.add_argument("--noise-var", type=float, default=1.0, dest="noise_var")


def _validate_model(args) -> tuple[OuParams, NoiseModel]:
    _require(args.kappa > 0, "--kappa must be > 0")
    _require(args.sigma > 0, "--sigma must be > 0")
    _require(args.noise_var >= 0, "--noise-var must be >= 0")
    return OuParams(args.kappa, args.theta, args.sigma), NoiseModel(args.noise_var)


def _uniform_window(dt: float | None, m: int) -> ObservationWindow:
    if m == 1:
        return ObservationWindow(np.array([0.0]))
    return ObservationWindow(dt * np.arange(1, m + 1))


def cmd_voi(args) -> int:
    p, noise = _validate_model(args)
    _require(args.m >= 1, "--m must be >= 1")
    _require(args.lag > 0, "--lag must be > 0")
    _require(args.m == 1 or args.dt is not None, "--dt is required when --m > 1")
    if args.dt is not None:
        _require(args.dt > 0, "--dt must be > 0")
    w = _uniform_window(args.dt, args.m)
    t = w.last_time + args.lag
    gamma = snr_ratio(p, noise)
    columns = ["kappa", "theta", "sigma", "sigma_n2", "dt", "m", "lag", "gamma",
               "voi_nats", "markov_nats", "correction_nats"]
    row = [args.kappa, args.theta, args.sigma, args.noise_var, args.dt, args.m, args.lag,
           None if gamma is NOISELESS else float(gamma),
           voi_closed_form(p, noise, w, t), markov_voi(p, args.lag), correction(p, noise, w, t)]
    if args.approx is not None:
        _require(args.dt is not None, "--dt is required with --approx")
        if args.approx == "high":
            res = voi_high_snr_uniform(p, noise, args.dt, args.lag)
        else:
            _require(args.noise_var > 0, "--noise-var must be > 0 for --approx low")
            res = voi_low_snr_uniform(p, noise, args.dt, args.m, args.lag)
        columns += ["approx_nats", "approx_valid", "gamma_bound"]
        row += [res.value, int(res.in_valid_region), res.region_bound]
    meta = _table_meta({k: getattr(args, k) for k in
                        ("kappa", "theta", "sigma", "noise_var", "dt", "m", "lag", "approx")})
    return _emit(DataTable(columns, [row], meta), args)


def cmd_approx(args) -> int:
    p, noise = _validate_model(args)
    _require(args.lag > 0, "--lag must be > 0")
    _require(args.dt is not None and args.dt > 0, "--dt must be > 0 (sampling interval, "
             "or the most recent realized interval for --policy poisson)")
    if args.regime == "low":
        _require(args.policy == "uniform", "--regime low is only defined for --policy uniform")
        _require(args.noise_var > 0, "--noise-var must be > 0 for --regime low")
        _require(args.m >= 1, "--m must be >= 1")
        res = voi_low_snr_uniform(p, noise, args.dt, args.m, args.lag)
    elif args.policy == "poisson":
        res = voi_high_snr_poisson(p, noise, args.dt, args.lag)
    else:
        res = voi_high_snr_uniform(p, noise, args.dt, args.lag)
    gamma = snr_ratio(p, noise)
    columns = ["kappa", "sigma_n2", "dt", "m", "lag", "gamma",
               "approx_nats", "in_region", "gamma_bound", "markov_nats"]
    row = [args.kappa, args.noise_var, args.dt, args.m, args.lag,
           None if gamma is NOISELESS else float(gamma),
           res.value, int(res.in_valid_region), res.region_bound, markov_voi(p, args.lag)]
    meta = _table_meta({k: getattr(args, k) for k in
                        ("kappa", "theta", "sigma", "noise_var", "dt", "m", "lag",
                         "regime", "policy")})
    return _emit(DataTable(columns, [row], meta), args)


_OVERRIDE_KEYS = {
    "kappa": ("kappa", "kappas"),
    "noise_var": ("noise_var", "noise_vars", "noise_grid"),
    "rate": ("lam", "lam_grid"),
    "mu": ("mu",),
    "dt": ("dt",),
    "m": ("m", "m_max"),
    "t": ("t", "t_max"),
    "sigma": ("sigma",),
    "theta": ("theta",),
    "samples": ("samples",),
}


def _figure_params(figure: int, args) -> dict:
    """Apply provided flags onto the figure's defaults registry entry."""
    params = {}
    defaults = FIGURE_DEFAULTS[figure]
    for flag, keys in _OVERRIDE_KEYS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        for key in keys:
            if key in defaults:
                params[key] = [value] if isinstance(defaults[key], tuple) else value
                break
    return params


def cmd_fig(args) -> int:
    seed = _resolve_seed(args)
    reps = args.replications if args.replications is not None else (30 if args.figure == 6 else 1)
    _require(reps >= 1, "--replications must be >= 1")
    spec = ExperimentSpec(figure=args.figure, params=_figure_params(args.figure, args),
                          replications=reps, seed=seed)
    return _emit(run_experiment(spec), args)


def cmd_mm1(args) -> int:
    _require(args.rate > 0, "--rate must be > 0")
    _require(args.mu > 0, "--mu must be > 0")
    _require(args.rate < args.mu, "unstable queue: --rate must be < --mu")
    _require(args.samples >= 100, "--samples must be >= 100")
    p, noise = _validate_model(args)
    _require(args.noise_var > 0, "--noise-var must be > 0 (the SNR must be finite)")
    seed = _resolve_seed(args)
    spec = ExperimentSpec(
        figure=7,
        params={"kappa": args.kappa, "theta": args.theta, "sigma": args.sigma,
                "noise_var": args.noise_var, "lam": args.rate, "mu": args.mu,
                "samples": args.samples},
        seed=seed,
    )
    if args.timeline_out is not None:
        q = Mm1Params(args.rate, args.mu)
        tl, _ = simulate_fcfs(q, 1000, seed)
        timeline_to_csv(tl, args.timeline_out)
        print(f"wrote 1000-update steady-state trace to {args.timeline_out}", file=sys.stderr)
    return _emit(run_experiment(spec), args)


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_sweep(args) -> int:
    params = {"theta": args.theta, "sigma": args.sigma}
    for flag, key in (("kappa", "kappa"), ("noise_var", "noise_var"),
                      ("dt", "dt"), ("lag", "lag")):
        value = getattr(args, flag)
        if value is not None:
            params[key] = _float_list(value)
    if args.m is not None:
        params["m"] = [int(v) for v in _float_list(args.m)]
    for key in ("kappa", "noise_var", "dt", "lag"):
        if key in params:
            _require(all(v >= 0 for v in params[key]), f"--{key.replace('_', '-')} must be >= 0")
    seed = args.seed if args.seed is not None else 0
    spec = ExperimentSpec(figure=None, params=params, seed=seed)
    return _emit(run_experiment(spec), args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ouvoi",
        description="Value-of-information analysis for noisily sampled OU sources.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    voi = sub.add_parser("voi", help="exact VoI of a uniform window at one query point")
    _add_model_flags(voi)
    voi.add_argument("--dt", type=float, default=None)
    voi.add_argument("--m", type=int, default=1)
    voi.add_argument("--lag", type=float, default=2.0)
    voi.add_argument("--approx", choices=("high", "low"), default=None,
                     help="also emit the regime approximation with its validity flag")
    _add_output_flags(voi)
    voi.set_defaults(func=cmd_voi)

    apx = sub.add_parser("approx", help="regime approximation with validity flag")
    _add_model_flags(apx)
    apx.add_argument("--regime", choices=("high", "low"), required=True)
    apx.add_argument("--policy", choices=("uniform", "poisson"), default="uniform")
    apx.add_argument("--dt", type=float, default=None,
                     help="sampling interval; for --policy poisson, the realized last interval")
    apx.add_argument("--m", type=int, default=1)
    apx.add_argument("--lag", type=float, default=2.0)
    _add_output_flags(apx)
    apx.set_defaults(func=cmd_approx)

    fig = sub.add_parser("fig", help="reproduce a documented figure table (ids 2..8)")
    fig.add_argument("figure", type=int, choices=(2, 3, 4, 5, 6, 7, 8))
    _add_model_flags(fig)
    fig.set_defaults(noise_var=None, kappa=None, theta=None, sigma=None)
    fig.add_argument("--dt", type=float, default=None)
    fig.add_argument("--rate", type=float, default=None)
    fig.add_argument("--mu", type=float, default=None)
    fig.add_argument("--m", type=int, default=None)
    fig.add_argument("--t", type=float, default=None)
    fig.add_argument("--samples", type=int, default=None)
    fig.add_argument("--replications", type=int, default=None)
    _add_output_flags(fig)
    fig.set_defaults(func=cmd_fig)

    mm1 = sub.add_parser("mm1", help="worst-case VoI distribution of the update queue")
    _add_model_flags(mm1)
    mm1.set_defaults(noise_var=0.5)
    mm1.add_argument("--rate", type=float, default=0.5)
    mm1.add_argument("--mu", type=float, default=1.0)
    mm1.add_argument("--samples", type=int, default=1_000_000)
    mm1.add_argument("--timeline-out", default=None, dest="timeline_out",
                     help="also write a simulated update trace as CSV")
    _add_output_flags(mm1)
    mm1.set_defaults(func=cmd_mm1)

    swp = sub.add_parser("sweep", help="cartesian sweep; flags accept comma-separated lists")
    swp.add_argument("--kappa", default="0.1")
    swp.add_argument("--theta", type=float, default=0.0)
    swp.add_argument("--sigma", type=float, default=1.0)
    swp.add_argument("--noise-var", default="1.0", dest="noise_var")
    swp.add_argument("--dt", default="2.0")
    swp.add_argument("--m", default="1")
    swp.add_argument("--lag", default="2.0")
    _add_output_flags(swp)
    swp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (NonPositiveDefiniteError, SingularCovarianceError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Experiment harness: empirical MI, distribution comparators, figure tables.

Experiments are declared as an ExperimentSpec (a figure id or a custom
sweep, a parameter dict, replications, seed) and produce a DataTable whose
metadata embeds the full spec and a hash of it; the same spec and seed
reproduce the table byte for byte.  Figure ids refer to the repository's
documented reproduction set; plotting is left to external tooling fed by
the CSV/JSON output.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .approx import (
    voi_high_snr_poisson,
    voi_high_snr_uniform,
    voi_low_snr_uniform,
    turning_noise_var_uniform,
)
from .gauss_markov import OuParams, sample_path
from .queue_mm1 import (
    Mm1Params,
    fcfs_receptions,
    sample_worst_case,
    voi_support_max,
    worst_case_cdf,
    worst_case_pdf,
)
from .voi_exact import correction, gaussian_mi_oracle, markov_voi, snr_ratio, voi_closed_form, NOISELESS
from .window import (
    NoiseModel,
    ObservationWindow,
    Timeline,
    age_of_information,
    observe,
    poisson_timeline,
    uniform_timeline,
    window_at,
)

__all__ = [
    "ExperimentSpec",
    "DataTable",
    "FIGURE_DEFAULTS",
    "run_experiment",
    "empirical_gaussian_mi",
    "sample_windows",
    "ks_distance",
]

_KNOWN_FIGURES = (2, 3, 4, 5, 6, 7, 8)


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run: a known figure id (2..8) or None for a custom sweep."""

    figure: int | None
    params: dict = field(default_factory=dict)
    replications: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.figure is not None and self.figure not in _KNOWN_FIGURES:
            raise ValueError(f"figure must be one of {_KNOWN_FIGURES} or None, got {self.figure}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")

    def canonical(self) -> dict:
        return {
            "figure": self.figure,
            "params": _jsonable(self.params),
            "replications": self.replications,
            "seed": self.seed,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items())}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


@dataclass
class DataTable:
    """Rectangular numeric results plus reproducibility metadata."""

    columns: list
    rows: list
    meta: dict

    def __post_init__(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, expected {width}")

    @staticmethod
    def _cell_str(x) -> str:
        if x is None:
            return ""
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return str(int(x))
        return repr(float(x))

    def to_csv(self, path=None):
        """Serialize with RFC-4180-style quoting; metadata as '#' preamble lines.

        Float cells use shortest round-trip repr, so equal tables serialize
        byte-identically.
        """
        buf = io.StringIO()
        for key in sorted(self.meta):
            buf.write(f"# {key}={json.dumps(_jsonable(self.meta[key]), sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(self._cell_str(x) for x in row)
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="") as fh:
            fh.write(text)
        return None

    def to_json(self, path=None):
        """Serialize as {"meta": ..., "rows": [record, ...]}; NaN becomes null."""

        def clean(x):
            if x is None:
                return None
            if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
                return int(x)
            x = float(x)
            return None if math.isnan(x) else x

        payload = {
            "meta": _jsonable(self.meta),
            "rows": [
                {col: clean(val) for col, val in zip(self.columns, row)} for row in self.rows
            ],
        }
        text = json.dumps(payload, indent=2)
        if path is None:
            return text
        with open(path, "w") as fh:
            fh.write(text)
        return None


def _spec_meta(spec: ExperimentSpec, **extra) -> dict:
    canon = spec.canonical()
    digest = hashlib.sha256(json.dumps(canon, sort_keys=True).encode()).hexdigest()
    meta = {"spec": canon, "spec_sha256": digest, "seed": spec.seed, "units": "nats"}
    meta.update(extra)
    return meta


def empirical_gaussian_mi(y_samples, x_samples) -> float:
    """Plug-in Gaussian MI estimate from paired (Y-window, x) draws.

    Forms the (m+1)-dimensional sample covariance and applies the Gaussian
    MI formula.  The plug-in bias is of order (m+1)^2/N and is documented,
    not corrected.  Requires more than 10*(m+1) samples; a rank-deficient
    sample covariance raises through the MI oracle.
    """
    y = np.asarray(y_samples, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    x = np.asarray(x_samples, dtype=float)
    n, m = y.shape
    if x.shape != (n,):
        raise ValueError(f"x_samples shape {x.shape} does not pair with y_samples {y.shape}")
    if n <= 10 * (m + 1):
        raise ValueError(f"need more than {10 * (m + 1)} samples for m={m}, got {n}")
    joint = np.column_stack([y, x])
    cov = np.cov(joint, rowvar=False, ddof=1)
    return gaussian_mi_oracle(cov[:m, :m], cov[:m, m], float(cov[m, m]))


def sample_windows(
    p: OuParams, noise: NoiseModel, w: ObservationWindow, t: float, n: int, seed
) -> tuple[np.ndarray, np.ndarray]:
    """Draw n joint realizations of (noisy window, source at t).

    Returns (y, x) with y of shape (n, m) and x of shape (n,): exact
    stationary sampling of the source at the window instants and t, with
    observation noise applied to the window block.
    """
    if t <= w.last_time:
        raise ValueError(f"t must be strictly after the last sample {w.last_time}")
    rng = np.random.default_rng(seed)
    times = np.concatenate([np.asarray(w.gen_times, dtype=float), [t]])
    paths = sample_path(p, times, rng, size=n)
    y = observe(paths[:, :-1], noise, rng)
    return y, paths[:, -1]


def ks_distance(samples, cdf) -> float:
    """Sup-norm distance between the empirical CDF of samples and `cdf`."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    if n == 0:
        raise ValueError("samples must be nonempty")
    f = np.asarray(cdf(s), dtype=float)
    i = np.arange(1, n + 1)
    return float(max((i / n - f).max(), (f - (i - 1) / n).max()))


def _grid(start: float, stop: float, step: float) -> tuple:
    return tuple(round(start + k * step, 10) for k in range(int(round((stop - start) / step)) + 1))


FIGURE_DEFAULTS: dict = {
    2: {
        "kappa": 0.1, "theta": 0.0, "sigma": 1.0, "noise_var": 1.0, "dt": 2.0,
        "mu": 1.0, "n_updates": 25, "t_max": 52.0, "grid_step": 0.25,
    },
    3: {
        "kappa": 0.05, "theta": 0.0, "sigma": 1.0,
        "noise_vars": (0.1, 2.0, 5.0, 10.0), "dt": 2.0, "t": 100.0, "m_max": 49,
    },
    4: {
        "kappas": (0.05, 0.1, 0.2), "theta": 0.0, "sigma": 1.0, "dt": 2.0,
        "m": 5, "t": 100.0, "noise_grid": _grid(0.05, 2.0, 0.05),
    },
    5: {
        "kappas": (0.05, 0.1, 0.2), "theta": 0.0, "sigma": 1.0, "lam": 0.5,
        "m": 5, "t": 100.0, "noise_grid": _grid(0.05, 2.0, 0.05),
    },
    6: {
        "kappas": (0.05, 0.1, 0.2), "theta": 0.0, "sigma": 1.0, "noise_var": 0.5,
        "m": 2, "t": 100.0, "mu": 1.0, "lam_grid": _grid(0.05, 0.95, 0.05),
    },
    7: {
        "kappa": 0.1, "theta": 0.0, "sigma": 1.0, "noise_var": 0.5,
        "lam": 0.5, "mu": 1.0, "samples": 1_000_000, "bins": 100,
    },
    8: {
        "kappas": (0.05, 0.1, 0.2, 0.3), "noise_vars": (0.5, 1.0), "theta": 0.0,
        "sigma": 1.0, "lam": 0.5, "mu": 1.0, "grid": 160,
    },
}


def run_experiment(spec: ExperimentSpec) -> DataTable:
    """Produce the DataTable for a figure id or a custom sweep (figure=None)."""
    if spec.figure is None:
        params = dict(spec.params)
        columns, rows, extra = _custom_sweep(params)
    else:
        params = {**FIGURE_DEFAULTS[spec.figure], **spec.params}
        builder = _FIGURE_BUILDERS[spec.figure]
        columns, rows, extra = builder(params, spec.replications, spec.seed)
    return DataTable(columns, rows, _spec_meta(spec, **extra))


def _listify(x) -> list:
    if isinstance(x, (list, tuple, np.ndarray)):
        return list(x)
    return [x]


def _uniform_tail_window(dt: float, m: int, t: float) -> ObservationWindow:
    """Last m regular sampling instants k*dt that lie strictly before t."""
    last = math.floor((t - 1e-12) / dt)
    if last < m:
        raise ValueError(f"fewer than m={m} sampling instants before t={t}")
    return ObservationWindow(dt * np.arange(last - m + 1, last + 1))


def _fig2(params: dict, reps: int, seed) -> tuple:
    p = OuParams(params["kappa"], params["theta"], params["sigma"])
    noise = NoiseModel(params["noise_var"])
    rng = np.random.default_rng(seed)
    gens = uniform_timeline(params["dt"], params["n_updates"])
    recv = fcfs_receptions(gens, params["mu"], rng)
    tl = Timeline(gens, recv)
    t_max = params["t_max"]
    grid = set(np.arange(0.0, t_max + 1e-9, params["grid_step"]).tolist())
    for r in recv:
        if r <= t_max:
            grid.update((r - 1e-6, r + 1e-6))
    rows = []
    first = recv[0]
    for t in sorted(grid):
        if t < first:
            rows.append([float(t), 0, None, None, None, None])
            continue
        w_all = window_at(tl, t)
        w_one = window_at(tl, t, m=1)
        lag = t - w_one.last_time
        rows.append([
            float(t),
            1,
            float(age_of_information(tl, t)),
            float(markov_voi(p, lag)),
            float(voi_closed_form(p, noise, w_one, t)),
            float(voi_closed_form(p, noise, w_all, t)),
        ])
    cols = ["t", "feasible", "aoi", "markov_nats", "voi_m1_nats", "voi_all_nats"]
    return cols, rows, {"reception_times": [float(r) for r in recv]}


def _fig3(params: dict, reps: int, seed) -> tuple:
    p = OuParams(params["kappa"], params["theta"], params["sigma"])
    dt, t = params["dt"], params["t"]
    m_max = int(params["m_max"])
    bound = markov_voi(p, t - _uniform_tail_window(dt, 1, t).last_time)
    rows = []
    for sigma_n2 in _listify(params["noise_vars"]):
        noise = NoiseModel(sigma_n2)
        for m in range(1, m_max + 1):
            w = _uniform_tail_window(dt, m, t)
            v = voi_closed_form(p, noise, w, t)
            rows.append([float(sigma_n2), m, float(v), float(bound), float(v / bound)])
    cols = ["sigma_n2", "m", "voi_nats", "markov_nats", "normalized"]
    return cols, rows, {}


def _fig4(params: dict, reps: int, seed) -> tuple:
    dt, m, t = params["dt"], int(params["m"]), params["t"]
    rows = []
    for kappa in _listify(params["kappas"]):
        p = OuParams(kappa, params["theta"], params["sigma"])
        w = _uniform_tail_window(dt, m, t)
        lag = t - w.last_time
        turn = turning_noise_var_uniform(p, dt)
        for sigma_n2 in _listify(params["noise_grid"]):
            noise = NoiseModel(sigma_n2)
            res = voi_high_snr_uniform(p, noise, dt, lag)
            rows.append([
                float(kappa), float(sigma_n2), float(snr_ratio(p, noise)),
                float(voi_closed_form(p, noise, w, t)), float(res.value),
                int(res.in_valid_region), float(turn),
            ])
    cols = ["kappa", "sigma_n2", "gamma", "voi_nats", "approx_nats", "in_region", "turning_sigma_n2"]
    return cols, rows, {}


def _fig5(params: dict, reps: int, seed) -> tuple:
    m, t, lam = int(params["m"]), params["t"], params["lam"]
    n_arrivals = int(lam * t + 10.0 * math.sqrt(lam * t) + 10)
    gens = poisson_timeline(lam, n_arrivals, seed)
    gens = gens[gens < t]
    rows = []
    feasible = gens.size >= m
    for kappa in _listify(params["kappas"]):
        p = OuParams(kappa, params["theta"], params["sigma"])
        for sigma_n2 in _listify(params["noise_grid"]):
            noise = NoiseModel(sigma_n2)
            if not feasible:
                rows.append([float(kappa), float(sigma_n2), float(snr_ratio(p, noise)),
                             None, None, 0, None, None, 0])
                continue
            w = ObservationWindow(gens[-m:])
            lag = t - w.last_time
            # interval ending at the newest arrival; falls back to the first
            # arrival time when only one arrival exists
            last_iv = float(gens[-1] - gens[-2]) if gens.size >= 2 else float(gens[-1])
            res = voi_high_snr_poisson(p, noise, last_iv, lag)
            rows.append([
                float(kappa), float(sigma_n2), float(snr_ratio(p, noise)),
                float(voi_closed_form(p, noise, w, t)), float(res.value),
                int(res.in_valid_region), last_iv, float(lag), 1,
            ])
    cols = ["kappa", "sigma_n2", "gamma", "voi_nats", "approx_nats", "in_region",
            "last_interval", "lag", "feasible"]
    return cols, rows, {}


def _fig6(params: dict, reps: int, seed) -> tuple:
    t, mu, m = params["t"], params["mu"], int(params["m"])
    noise = NoiseModel(params["noise_var"])
    kappas = _listify(params["kappas"])
    lam_grid = _listify(params["lam_grid"])
    seeds = np.random.SeedSequence(seed).spawn(reps)
    rows = []
    for lam in lam_grid:
        n_arrivals = int(lam * t + 10.0 * math.sqrt(lam * t) + 10)
        per_kappa = {k: [] for k in kappas}
        for child in seeds:
            rng = np.random.default_rng(child)
            gens = poisson_timeline(lam, n_arrivals, rng)
            recv = fcfs_receptions(gens, mu, rng)
            keep = gens < t
            if not np.any(recv[keep] <= t):
                continue
            tl = Timeline(gens[keep], recv[keep])
            w = window_at(tl, t, m=m)
            for kappa in kappas:
                p = OuParams(kappa, params["theta"], params["sigma"])
                per_kappa[kappa].append(voi_closed_form(p, noise, w, t))
        for kappa in kappas:
            vals = np.asarray(per_kappa[kappa])
            if vals.size == 0:
                rows.append([float(lam), float(kappa), None, None, 0])
                continue
            sem = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
            rows.append([float(lam), float(kappa), float(vals.mean()), sem, int(vals.size)])
    cols = ["lam", "kappa", "voi_mean_nats", "voi_sem_nats", "n_valid"]
    return cols, rows, {}


def _fig7(params: dict, reps: int, seed) -> tuple:
    p = OuParams(params["kappa"], params["theta"], params["sigma"])
    q = Mm1Params(params["lam"], params["mu"])
    gamma = float(snr_ratio(p, NoiseModel(params["noise_var"])))
    n = int(params["samples"])
    bins = int(params["bins"])
    samples = sample_worst_case(q, p, gamma, n, seed)
    vmax = voi_support_max(gamma)
    edges = np.linspace(0.0, vmax, bins + 1)
    counts, _ = np.histogram(samples, bins=edges)
    width = edges[1] - edges[0]
    mids = 0.5 * (edges[:-1] + edges[1:])
    cdf_edges = worst_case_cdf(edges[1:-1], q, p, gamma)
    probs = np.diff(np.concatenate([[0.0], cdf_edges, [1.0]]))
    pdf_emp = counts / (n * width)
    se = np.sqrt(probs * (1.0 - probs) / n) / width
    ecdf = np.searchsorted(np.sort(samples), mids, side="right") / n
    rows = [
        [float(mids[i]), float(worst_case_pdf(mids[i], q, p, gamma)), float(pdf_emp[i]),
         float(se[i]), float(worst_case_cdf(mids[i], q, p, gamma)), float(ecdf[i])]
        for i in range(bins)
    ]
    ks = ks_distance(samples, lambda v: worst_case_cdf(v, q, p, gamma))
    cols = ["v_nats", "pdf_analytic", "pdf_empirical", "pdf_se", "cdf_analytic", "cdf_empirical"]
    return cols, rows, {"ks_distance": ks, "gamma": gamma, "support_max_nats": float(vmax)}


def _fig8(params: dict, reps: int, seed) -> tuple:
    q = Mm1Params(params["lam"], params["mu"])
    npts = int(params["grid"])
    rows = []
    for kappa in _listify(params["kappas"]):
        p = OuParams(kappa, params["theta"], params["sigma"])
        for sigma_n2 in _listify(params["noise_vars"]):
            gamma = float(snr_ratio(p, NoiseModel(sigma_n2)))
            vmax = voi_support_max(gamma)
            grid = np.linspace(1e-3 * vmax, (1.0 - 1e-6) * vmax, npts)
            cdf = worst_case_cdf(grid, q, p, gamma)
            rows.extend(
                [float(kappa), float(sigma_n2), gamma, float(v), float(c)]
                for v, c in zip(grid, cdf)
            )
    cols = ["kappa", "sigma_n2", "gamma", "v_nats", "cdf"]
    return cols, rows, {}


def _custom_sweep(params: dict) -> tuple:
    """Cartesian sweep over kappa, noise_var, dt, m, lag for a uniform window."""
    theta = params.get("theta", 0.0)
    sigma = params.get("sigma", 1.0)
    kappas = _listify(params.get("kappa", 0.1))
    noise_vars = _listify(params.get("noise_var", 1.0))
    dts = _listify(params.get("dt", 2.0))
    ms = [int(m) for m in _listify(params.get("m", 1))]
    lags = _listify(params.get("lag", 2.0))
    rows = []
    for kappa, sigma_n2, dt, m, lag in product(kappas, noise_vars, dts, ms, lags):
        p = OuParams(kappa, theta, sigma)
        noise = NoiseModel(sigma_n2)
        w = ObservationWindow(dt * np.arange(1, m + 1))
        t = w.last_time + lag
        gamma = snr_ratio(p, noise)
        high = voi_high_snr_uniform(p, noise, dt, lag)
        row = [
            float(kappa), float(sigma_n2), float(dt), m, float(lag),
            None if gamma is NOISELESS else float(gamma),
            float(voi_closed_form(p, noise, w, t)),
            float(markov_voi(p, lag)),
            float(correction(p, noise, w, t)),
            float(high.value), int(high.in_valid_region),
        ]
        if gamma is NOISELESS:
            row.extend([None, 0])
        else:
            low = voi_low_snr_uniform(p, noise, dt, m, lag)
            row.extend([float(low.value), int(low.in_valid_region)])
        rows.append(row)
    cols = ["kappa", "sigma_n2", "dt", "m", "lag", "gamma", "voi_nats", "markov_nats",
            "correction_nats", "approx_high_nats", "approx_high_valid",
            "approx_low_nats", "approx_low_valid"]
    return cols, rows, {}


_FIGURE_BUILDERS = {2: _fig2, 3: _fig3, 4: _fig4, 5: _fig5, 6: _fig6, 7: _fig7, 8: _fig8}

"""FCFS M/M/1 status updating and the worst-case VoI distribution.

Updates of the source are generated as a rate-lam Poisson process and served
by a single exponential(mu) server in arrival order.  Right before update
n+1 is received, the age of the freshest received update peaks at
Z = S_{n+1} + T_{n+1} (system time plus generation gap), and the VoI of a
single noisy sample dips to its per-cycle worst value V = g(Z).  This module
simulates the queue, maps ages to VoI, and evaluates the analytic joint,
age, and worst-case-VoI densities and distribution.

All VoI values are in nats; m = 1 (only the freshest received sample is
used) throughout the worst-case analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gauss_markov import OuParams
from .window import Timeline

__all__ = [
    "Mm1Params",
    "simulate_fcfs",
    "fcfs_receptions",
    "interval_system_pdf",
    "peak_age_pdf",
    "peak_age_sf",
    "voi_support_max",
    "voi_at_peak_age",
    "peak_age_at_voi",
    "worst_case_pdf",
    "worst_case_cdf",
    "sample_worst_case",
]


@dataclass(frozen=True)
class Mm1Params:
    """Arrival and service rates of the status-update queue.

    Stability (lam < mu) is required at construction; an unstable queue has
    no steady state to sample.
    """

    lam: float
    mu: float

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be a positive finite rate, got {self.lam}")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be a positive finite rate, got {self.mu}")
        if self.lam >= self.mu:
            raise ValueError(
                f"unstable queue: arrival rate {self.lam} must be < service rate {self.mu}"
            )

    @property
    def utilization(self) -> float:
        return self.lam / self.mu

    @property
    def mean_system_time(self) -> float:
        """Steady-state mean time an update spends in the system, 1/(mu - lam)."""
        return 1.0 / (self.mu - self.lam)


def fcfs_receptions(gen_times, mu: float, seed) -> np.ndarray:
    """Reception times of given generation instants under FCFS Exp(mu) service.

    Applies the Lindley recursion t'_i = max(t'_{i-1}, t_i) + W_i, vectorized
    via cumulative sums: t'_i = C_i + max_{k<=i}(t_k - C_{k-1}) with
    C_i the running service-time total.
    """
    gen = np.asarray(gen_times, dtype=float)
    if gen.size == 0:
        return np.empty(0)
    if gen.size > 1 and np.any(np.diff(gen) <= 0):
        raise ValueError("generation times must be strictly increasing")
    if mu <= 0:
        raise ValueError(f"mu must be > 0, got {mu}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    service = rng.exponential(1.0 / mu, gen.size)
    csum = np.cumsum(service)
    shifted = np.concatenate(([0.0], csum[:-1]))
    return csum + np.maximum.accumulate(gen - shifted)


def simulate_fcfs(
    q: Mm1Params, n_updates: int, seed, warmup: int = 10_000
) -> tuple[Timeline, np.ndarray]:
    """Steady-state FCFS trace: Timeline of updates plus their system times.

    Generates warmup + n_updates arrivals with Exp(lam) gaps and Exp(mu)
    services, discards the warm-up prefix, and returns the remaining
    timeline (absolute times) with the system-time sequence recv - gen.
    Draw order is fixed (all gaps, then all services) so a seed pins the
    trace.
    """
    if n_updates < 1:
        raise ValueError(f"n_updates must be >= 1, got {n_updates}")
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    total = warmup + n_updates
    gen = np.cumsum(rng.exponential(1.0 / q.lam, total))
    recv = fcfs_receptions(gen, q.mu, rng)
    gen, recv = gen[warmup:], recv[warmup:]
    return Timeline(gen, recv), recv - gen


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def interval_system_pdf(t, s, q: Mm1Params):
    """Joint density of (generation gap T, system time S) in steady state.

    f(t, s) = lam mu e^{-lam t - mu s} - mu^2 e^{-mu (t + s)}
              + mu (mu - lam) e^{-mu t - (mu - lam) s}, for t, s >= 0.
    Marginals are Exp(lam) and Exp(mu - lam); T and S are dependent.
    """
    tt, t_scalar = _as_array(t)
    ss, s_scalar = _as_array(s)
    if np.any(tt < 0) or np.any(ss < 0):
        raise ValueError("t and s must be >= 0")
    lam, mu = q.lam, q.mu
    val = (
        lam * mu * np.exp(-lam * tt - mu * ss)
        - mu * mu * np.exp(-mu * (tt + ss))
        + mu * (mu - lam) * np.exp(-mu * tt - (mu - lam) * ss)
    )
    return float(val[0]) if (t_scalar and s_scalar) else val


def peak_age_pdf(z, q: Mm1Params):
    """Density of the peak age Z = S + T (system time plus generation gap).

    f_Z(z) = mu [ (lam/(mu-lam)) e^{-lam z}
                  - (lam/(mu-lam) + mu z + (mu-lam)/lam) e^{-mu z}
                  + ((mu-lam)/lam) e^{-(mu-lam) z} ], z >= 0; f_Z(0) = 0.
    """
    zz, scalar = _as_array(z)
    if np.any(zz < 0):
        raise ValueError("z must be >= 0")
    lam, mu = q.lam, q.mu
    d = mu - lam
    val = mu * (
        (lam / d) * np.exp(-lam * zz)
        - (lam / d + mu * zz + d / lam) * np.exp(-mu * zz)
        + (d / lam) * np.exp(-d * zz)
    )
    return float(val[0]) if scalar else val


def peak_age_sf(z, q: Mm1Params):
    """Survival function P(Z > z) of the peak age, by term-wise integration.

    S_Z(z) = (mu/(mu-lam)) e^{-lam z} + (mu/lam) e^{-(mu-lam) z}
             - [lam/(mu-lam) + 1 + (mu-lam)/lam + mu z] e^{-mu z};
    S_Z(0) = 1 exactly.  Near z = 0 the three terms cancel to ulp noise that
    can spill a hair outside [0, 1], so the result is clamped.
    """
    zz, scalar = _as_array(z)
    if np.any(zz < 0):
        raise ValueError("z must be >= 0")
    lam, mu = q.lam, q.mu
    d = mu - lam
    val = (
        (mu / d) * np.exp(-lam * zz)
        + (mu / lam) * np.exp(-d * zz)
        - (lam / d + 1.0 + d / lam + mu * zz) * np.exp(-mu * zz)
    )
    val = np.clip(val, 0.0, 1.0)
    return float(val[0]) if scalar else val


def voi_support_max(gamma: float) -> float:
    """Upper end of the worst-case VoI support, 0.5 log(1 + gamma) nats."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    return 0.5 * math.log1p(gamma)


def voi_at_peak_age(z, p: OuParams, gamma: float):
    """VoI of a single noisy sample observed a peak age z in the past.

    g(z) = -0.5 log(1 - (gamma/(1+gamma)) e^{-2 kappa z}): strictly
    decreasing, g(0) = 0.5 log(1+gamma), g(inf) = 0.
    """
    zz, scalar = _as_array(z)
    if np.any(zz < 0):
        raise ValueError("z must be >= 0")
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    val = -0.5 * np.log1p(-(gamma / (1.0 + gamma)) * np.exp(-2.0 * p.kappa * zz))
    return float(val[0]) if scalar else val


def _r_of_v(v: np.ndarray, gamma: float) -> np.ndarray:
    # r(v) = (1+gamma)(1 - e^{-2v})/gamma, in (0, 1) on the open support
    return (1.0 + gamma) * (-np.expm1(-2.0 * v)) / gamma


def peak_age_at_voi(v, p: OuParams, gamma: float):
    """Inverse of voi_at_peak_age: the age at which a sample's VoI equals v.

    z = -log(r(v)) / (2 kappa) with r(v) = (1+gamma)(1-e^{-2v})/gamma.
    Defined only on the open support (0, 0.5 log(1+gamma)); values outside
    raise.
    """
    vv, scalar = _as_array(v)
    vmax = voi_support_max(gamma)
    if np.any(vv <= 0) or np.any(vv >= vmax):
        raise ValueError(f"v must lie in the open support (0, {vmax:.6g})")
    val = -np.log(_r_of_v(vv, gamma)) / (2.0 * p.kappa)
    return float(val[0]) if scalar else val


def _support_mask(vv: np.ndarray, vmax: float) -> np.ndarray:
    """Interior mask; exact endpoint hits raise (outside is handled by convention)."""
    if np.any(vv == 0.0) or np.any(vv == vmax):
        raise ValueError("v at an exact support endpoint; the open interval excludes it")
    return (vv > 0.0) & (vv < vmax)


def worst_case_pdf(v, q: Mm1Params, p: OuParams, gamma: float):
    """Density of the worst-case VoI V = g(Z), expressed through r(v).

    With d = mu - lam,
    f_V(v) = (mu e^{-2v} / (kappa (1 - e^{-2v}))) *
             [ (lam/d) r^{lam/(2 kappa)}
               - (lam/d + d/lam - (mu/(2 kappa)) log r) r^{mu/(2 kappa)}
               + (d/lam) r^{d/(2 kappa)} ],
    identically equal to peak_age_pdf(peak_age_at_voi(v)) |dz/dv|.  Outside
    the open support the density is 0 by convention; the exact endpoints
    raise.
    """
    vv, scalar = _as_array(v)
    vmax = voi_support_max(gamma)
    mask = _support_mask(vv, vmax)
    out = np.zeros_like(vv)
    if np.any(mask):
        vi = vv[mask]
        lam, mu, kap = q.lam, q.mu, p.kappa
        d = mu - lam
        r = _r_of_v(vi, gamma)
        logr = np.log(r)
        jac = np.exp(-2.0 * vi) / (kap * (-np.expm1(-2.0 * vi)))
        bracket = (
            (lam / d) * np.power(r, lam / (2.0 * kap))
            - (lam / d + d / lam - (mu / (2.0 * kap)) * logr) * np.power(r, mu / (2.0 * kap))
            + (d / lam) * np.power(r, d / (2.0 * kap))
        )
        out[mask] = mu * jac * bracket
    return float(out[0]) if scalar else out


def worst_case_cdf(v, q: Mm1Params, p: OuParams, gamma: float):
    """Distribution function of the worst-case VoI.

    Since g is decreasing, F_V(v) = P(g(Z) <= v) = P(Z >= g^{-1}(v)), the
    peak-age survival evaluated at the inverse map.  This z-domain form is
    exact on the whole support and stays finite at both ends (v -> 0 sends
    z -> inf and every term to 0; v -> vmax sends z -> 0 where the survival
    is exactly 1).  Below the support the value is 0, above it 1; exact
    endpoints raise, mirroring the density.
    """
    vv, scalar = _as_array(v)
    vmax = voi_support_max(gamma)
    mask = _support_mask(vv, vmax)
    out = np.where(vv >= vmax, 1.0, 0.0)
    if np.any(mask):
        z = -np.log(_r_of_v(vv[mask], gamma)) / (2.0 * p.kappa)
        out[mask] = peak_age_sf(z, q)
    return float(out[0]) if scalar else out


def sample_worst_case(
    q: Mm1Params,
    p: OuParams,
    gamma: float,
    n: int,
    seed,
    method: str = "steady",
    warmup: int = 10_000,
) -> np.ndarray:
    """Draw n worst-case VoI samples V = g(S + T).

    method="steady" restarts the stationary coupling for every draw: the
    previous system time S0 ~ Exp(mu-lam), the next gap T ~ Exp(lam) and
    service W ~ Exp(mu) are independent, and S = max(S0 - T, 0) + W.  The
    draws are i.i.d. with the exact steady-state joint law of (T, S), which
    is what binomial/KS error bars assume.

    method="path" takes consecutive cycles of one long simulate_fcfs run;
    same marginal law, but serially correlated samples.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if method == "steady":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        s_prev = rng.exponential(1.0 / (q.mu - q.lam), n)
        gap = rng.exponential(1.0 / q.lam, n)
        service = rng.exponential(1.0 / q.mu, n)
        system = np.maximum(s_prev - gap, 0.0) + service
        return voi_at_peak_age(system + gap, p, gamma)
    if method == "path":
        tl, system = simulate_fcfs(q, n + 1, seed, warmup=warmup)
        gaps = np.diff(np.asarray(tl.gen_times))
        return voi_at_peak_age(system[1:] + gaps, p, gamma)
    raise ValueError(f"unknown method {method!r}; expected 'steady' or 'path'")

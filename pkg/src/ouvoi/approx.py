"""Closed-form VoI approximations in the high- and low-SNR regimes.

Each approximation comes with the SNR region where its quadratic truncation
is controlled.  Outside that region the value is still computed (callers may
want to plot the breakdown) but flagged; when the truncated log argument
leaves the domain the value is NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gauss_markov import OuParams
from .voi_exact import markov_voi, snr_ratio
from .window import NoiseModel

__all__ = [
    "ApproxResult",
    "voi_high_snr_uniform",
    "voi_low_snr_uniform",
    "voi_high_snr_poisson",
    "turning_noise_var_uniform",
    "turning_noise_var_poisson",
]


@dataclass(frozen=True)
class ApproxResult:
    """An approximate VoI value plus the validity of the expansion.

    value           approximate VoI in nats (NaN if the truncated log
                    argument left its domain)
    in_valid_region whether the SNR satisfies the expansion's own bound
    region_bound    the SNR threshold: validity means gamma >= bound in the
                    high-SNR regime and gamma <= bound in the low-SNR regime
    """

    value: float
    in_valid_region: bool
    region_bound: float


def _require_positive(name: str, x: float) -> None:
    if x <= 0:
        raise ValueError(f"{name} must be > 0, got {x}")


def voi_high_snr_uniform(p: OuParams, noise: NoiseModel, dt: float, lag: float) -> ApproxResult:
    """High-SNR approximation for a regularly spaced window.

    Truncates the minor ratio to 1/gamma - 1/((1 - rho^2) gamma^2) and folds
    it into the noiseless bound:
    v ~ markov - 0.5 log(1 + C (1/gamma - 1/((1 - rho^2) gamma^2))) with
    C = 1/(e^{2 kappa lag} - 1).  Controlled for gamma >= 2/(1 - rho^2).
    Window length does not enter: older samples contribute at higher order.
    """
    _require_positive("dt", dt)
    _require_positive("lag", lag)
    omega = -math.expm1(-2.0 * p.kappa * dt)  # 1 - rho^2
    bound = 2.0 / omega
    if noise.sigma_n2 == 0:
        return ApproxResult(markov_voi(p, lag), True, bound)
    gamma = snr_ratio(p, noise)
    ratio_trunc = 1.0 / gamma - 1.0 / (omega * gamma * gamma)
    c = 1.0 / math.expm1(2.0 * p.kappa * lag)
    arg = 1.0 + c * ratio_trunc
    value = markov_voi(p, lag) - 0.5 * math.log(arg) if arg > 0 else math.nan
    return ApproxResult(value, gamma >= bound, bound)


def voi_low_snr_uniform(
    p: OuParams, noise: NoiseModel, dt: float, m: int, lag: float
) -> ApproxResult:
    """Low-SNR approximation for a regularly spaced window of m samples.

    v ~ -0.5 log(1 - e^{-2 kappa lag} (P gamma - Q gamma^2)) with
    P = (1 - rho^{2m}) / (1 - rho^2) and
    Q = (1 - rho^{2m})(1 + rho^2)/(1 - rho^2)^2 - 2 m rho^{2m}/(1 - rho^2),
    controlled for gamma <= P / (2 Q).  Q is strictly positive, and the
    bound tends to 1/(2m) as dt -> 0 (P -> m, Q -> m^2).
    """
    _require_positive("dt", dt)
    _require_positive("lag", lag)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if noise.sigma_n2 == 0:
        raise ValueError("low-SNR expansion is undefined for noiseless observations")
    omega = -math.expm1(-2.0 * p.kappa * dt)
    tail = -math.expm1(-2.0 * p.kappa * dt * m)  # 1 - rho^{2m}
    rho2m = math.exp(-2.0 * p.kappa * dt * m)
    p_coef = tail / omega
    q_coef = tail * (1.0 + (1.0 - omega)) / (omega * omega) - 2.0 * m * rho2m / omega
    bound = p_coef / (2.0 * q_coef)
    gamma = snr_ratio(p, noise)
    u = math.exp(-2.0 * p.kappa * lag)
    arg = 1.0 - u * (p_coef * gamma - q_coef * gamma * gamma)
    value = -0.5 * math.log(arg) if arg > 0 else math.nan
    return ApproxResult(value, gamma <= bound, bound)


def voi_high_snr_poisson(
    p: OuParams, noise: NoiseModel, last_interval: float, lag: float
) -> ApproxResult:
    """High-SNR approximation for an irregular window, per realization.

    Only the interval ending at the newest sample enters: with
    R = 1/(1 - e^{-2 kappa T_last}) the minor ratio truncates to
    1/gamma - R/gamma^2, controlled for gamma >= 2 R.  Coincides with the
    regular-spacing expansion when the last interval equals dt.
    """
    _require_positive("last_interval", last_interval)
    _require_positive("lag", lag)
    omega = -math.expm1(-2.0 * p.kappa * last_interval)
    r = 1.0 / omega
    bound = 2.0 * r
    if noise.sigma_n2 == 0:
        return ApproxResult(markov_voi(p, lag), True, bound)
    gamma = snr_ratio(p, noise)
    ratio_trunc = 1.0 / gamma - r / (gamma * gamma)
    c = 1.0 / math.expm1(2.0 * p.kappa * lag)
    arg = 1.0 + c * ratio_trunc
    value = markov_voi(p, lag) - 0.5 * math.log(arg) if arg > 0 else math.nan
    return ApproxResult(value, gamma >= bound, bound)


def turning_noise_var_uniform(p: OuParams, dt: float) -> float:
    """Noise variance at which the high-SNR region boundary is crossed.

    Solves gamma(sigma_n^2) = 2/(1 - rho^2) for sigma_n^2, giving
    sigma^2 (1 - rho^2) / (4 kappa).  Beyond it the quadratic truncation is
    no longer controlled.
    """
    _require_positive("dt", dt)
    omega = -math.expm1(-2.0 * p.kappa * dt)
    return p.sigma**2 * omega / (4.0 * p.kappa)


def turning_noise_var_poisson(p: OuParams, last_interval: float) -> float:
    """Per-realization analogue of turning_noise_var_uniform.

    Uses the realized interval ending at the newest sample:
    sigma^2 (1 - e^{-2 kappa T_last}) / (4 kappa).
    """
    _require_positive("last_interval", last_interval)
    omega = -math.expm1(-2.0 * p.kappa * last_interval)
    return p.sigma**2 * omega / (4.0 * p.kappa)

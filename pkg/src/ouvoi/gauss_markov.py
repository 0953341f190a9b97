"""Latent Ornstein-Uhlenbeck source: moments, covariance kernel, exact sampler.

The hidden state follows the mean-reverting SDE

    dX_t = kappa * (theta - X_t) dt + sigma dW_t,

started from its stationary law N(theta, sigma^2 / (2 kappa)).  Because the
transition density is Gaussian with known mean and variance, paths can be
sampled exactly on arbitrary (irregular) time grids; no Euler step and hence
no discretization error enters any downstream statistic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "OuParams",
    "StationaryMoments",
    "stationary_moments",
    "conditional_moments",
    "covariance",
    "sample_path",
]


@dataclass(frozen=True)
class OuParams:
    """Parameters of the mean-reverting source.

    kappa: mean-reversion rate (1/time), > 0.
    theta: long-term mean (state units).
    sigma: volatility (state units per sqrt(time)), > 0.
    """

    kappa: float
    theta: float
    sigma: float

    def __post_init__(self):
        for name in ("kappa", "theta", "sigma"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


@dataclass(frozen=True)
class StationaryMoments:
    mean: float
    variance: float


def stationary_moments(p: OuParams) -> StationaryMoments:
    """Long-run law of the state: N(theta, sigma^2 / (2 kappa))."""
    return StationaryMoments(mean=p.theta, variance=p.sigma**2 / (2.0 * p.kappa))


def conditional_moments(p: OuParams, x_s: float, dt: float) -> tuple[float, float]:
    """Mean and variance of X_{s+dt} given X_s = x_s.

    mean = theta + (x_s - theta) * exp(-kappa dt)
    var  = sigma^2/(2 kappa) * (1 - exp(-2 kappa dt))

    dt = 0 degenerates to (x_s, 0); dt -> inf approaches the stationary law.
    """
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    decay = np.exp(-p.kappa * dt)
    mean = p.theta + (x_s - p.theta) * decay
    # 1 - exp(-2 kappa dt) via expm1 keeps small-dt variances accurate
    var = p.sigma**2 / (2.0 * p.kappa) * -np.expm1(-2.0 * p.kappa * dt)
    return float(mean), float(var)


def covariance(p: OuParams, lag: float) -> float:
    """Stationary autocovariance Cov(X_t, X_s) = sigma^2/(2 kappa) e^{-kappa |t-s|}."""
    return float(p.sigma**2 / (2.0 * p.kappa) * np.exp(-p.kappa * abs(lag)))


def sample_path(p, times, seed, size=None):
    """Sample the state exactly on a strictly increasing time grid.

    The first point is a stationary draw; every later point is drawn from the
    exact Gaussian transition, so the joint law is correct for any grid.

    Args:
        p: OuParams.
        times: strictly increasing sequence, at least one entry.
        seed: int seed or numpy Generator.
        size: optional number of independent paths; None returns a single
            path of shape (len(times),), an int returns (size, len(times)).

    Returns:
        ndarray of state values.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    rng = np.random.default_rng(seed)

    n_paths = 1 if size is None else int(size)
    sm = stationary_moments(p)
    out = np.empty((n_paths, times.size))
    out[:, 0] = p.theta + np.sqrt(sm.variance) * rng.standard_normal(n_paths)
    for j in range(1, times.size):
        dt = times[j] - times[j - 1]
        decay = np.exp(-p.kappa * dt)
        var = sm.variance * -np.expm1(-2.0 * p.kappa * dt)
        mean = p.theta + (out[:, j - 1] - p.theta) * decay
        out[:, j] = mean + np.sqrt(var) * rng.standard_normal(n_paths)
    return out[0] if size is None else out

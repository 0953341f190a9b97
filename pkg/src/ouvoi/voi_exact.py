"""Exact value of information for windows of noisy samples.

The value of information is the mutual information (in nats) between the
source at query time t and the window of noisy observations it conditions
on.  Two independent routes are provided: a generic Gaussian-MI oracle that
factors the assembled covariances, and a closed form that exploits the
tridiagonal inverse covariance of the window.  They must agree to near
machine precision; tests enforce that.
"""

from __future__ import annotations

import math

import numpy as np

from .gauss_markov import OuParams, covariance
from .tridiag import correction_matrix, det_pair_recurrence, det_ratio, poisson_inverse_cov
from .window import NoiseModel, ObservationWindow

__all__ = [
    "NOISELESS",
    "Noiseless",
    "NonPositiveDefiniteError",
    "SingularCovarianceError",
    "snr_ratio",
    "gaussian_mi_oracle",
    "assemble_covariances",
    "voi_closed_form",
    "markov_voi",
    "correction",
    "voi_single_obs",
]

#: Intervals below this are treated as duplicate sampling instants.
_MIN_INTERVAL = 1e-12


class Noiseless:
    """Marker type for an infinite signal-to-noise ratio (zero noise variance).

    A distinct sentinel rather than float('inf') so that accidental
    arithmetic fails loudly instead of propagating infinities.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOISELESS"


NOISELESS = Noiseless()


class NonPositiveDefiniteError(ValueError):
    """An assembled covariance failed positive definiteness.

    `minor` is the size of the smallest leading principal block that is not
    positive definite (joint-covariance ordering: observations first, source
    last).
    """

    def __init__(self, message: str, minor: int):
        super().__init__(message)
        self.minor = minor


class SingularCovarianceError(ValueError):
    """Observation instants coincide, making the window covariance singular."""


def snr_ratio(p: OuParams, noise: NoiseModel) -> float | Noiseless:
    """Stationary signal-to-noise ratio sigma^2 / (2 kappa sigma_n^2).

    Returns the NOISELESS marker when the observation noise is exactly zero.
    """
    if noise.sigma_n2 == 0:
        return NOISELESS
    return p.sigma**2 / (2.0 * p.kappa * noise.sigma_n2)


def gaussian_mi_oracle(sigma_yy: np.ndarray, sigma_yx: np.ndarray, var_x: float) -> float:
    """Mutual information (nats) between jointly Gaussian Y (vector) and x.

    Computed as 0.5 log(var_x / schur) where schur is the conditional
    variance of x given Y, obtained from a Cholesky factor of sigma_yy:
    with w = L^{-1} sigma_yx, schur = var_x - w.w.  The window precision
    matrix is never formed.
    """
    yy = np.atleast_2d(np.asarray(sigma_yy, dtype=float))
    yx = np.atleast_1d(np.asarray(sigma_yx, dtype=float))
    m = yy.shape[0]
    if yy.shape != (m, m) or yx.shape != (m,):
        raise ValueError(f"shape mismatch: sigma_yy {yy.shape}, sigma_yx {yx.shape}")
    if not np.allclose(yy, yy.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(yy).max()))):
        raise ValueError("sigma_yy must be symmetric")
    if var_x <= 0:
        raise NonPositiveDefiniteError(
            f"source variance must be > 0, got {var_x}", minor=m + 1
        )
    try:
        chol = np.linalg.cholesky(yy)
    except np.linalg.LinAlgError:
        fail = _first_failing_minor(yy)
        raise NonPositiveDefiniteError(
            f"observation covariance is not positive definite: "
            f"leading principal minor {fail} is the smallest to fail",
            minor=fail,
        ) from None
    w = np.linalg.solve(chol, yx)
    schur = float(var_x) - float(w @ w)
    if schur <= 0:
        raise NonPositiveDefiniteError(
            f"joint covariance is not positive definite: conditional variance "
            f"{schur} (order-{m + 1} minor fails)",
            minor=m + 1,
        )
    return 0.5 * math.log(float(var_x) / schur)


def _first_failing_minor(yy: np.ndarray) -> int:
    for k in range(1, yy.shape[0] + 1):
        try:
            np.linalg.cholesky(yy[:k, :k])
        except np.linalg.LinAlgError:
            return k
    return yy.shape[0]


def assemble_covariances(
    p: OuParams, noise: NoiseModel, w: ObservationWindow, t: float
) -> tuple[np.ndarray, np.ndarray, float]:
    """Stationary covariances (Sigma_Y, sigma_Yx, var_x) for a window and query time.

    Sigma_Y adds sigma_n^2 I to the window covariance of the source; t must
    lie strictly after the newest sample.
    """
    times = np.asarray(w.gen_times, dtype=float)
    if t <= times[-1]:
        raise ValueError(f"query time {t} must be strictly after the last sample {times[-1]}")
    var = p.sigma**2 / (2.0 * p.kappa)
    lags = np.abs(times[:, None] - times[None, :])
    sigma_x = var * np.exp(-p.kappa * lags)
    sigma_y = sigma_x + noise.sigma_n2 * np.eye(w.m)
    sigma_yx = var * np.exp(-p.kappa * (t - times))
    return sigma_y, sigma_yx, var


def markov_voi(p: OuParams, lag: float) -> float:
    """VoI of a single noiseless sample a given lag in the past.

    Equals -0.5 log(1 - e^{-2 kappa lag}); an upper bound for every noisy
    window ending at the same sample.  Diverges as lag -> 0.
    """
    if lag <= 0:
        raise ValueError(f"lag must be > 0, got {lag}")
    return -0.5 * math.log(-math.expm1(-2.0 * p.kappa * lag))


def _window_det_ratio(p: OuParams, noise: NoiseModel, w: ObservationWindow) -> float:
    """Minor ratio det(A_mm) / (gamma det(A)) for the window, in (0, 1)."""
    if w.m > 1 and float(np.min(w.intervals)) < _MIN_INTERVAL:
        raise SingularCovarianceError(
            "window contains (near-)duplicate sampling instants; "
            f"smallest interval {float(np.min(w.intervals)):.3e}"
        )
    # The interval-parameterized tridiagonal inverse relies only on the
    # Markov property, so it covers any strictly increasing window; no dense
    # fallback is needed.
    tri = poisson_inverse_cov(p, w.intervals)
    pair = det_pair_recurrence(correction_matrix(tri, noise.sigma_n2))
    gamma = snr_ratio(p, noise)
    return det_ratio(pair, gamma)


def voi_closed_form(p: OuParams, noise: NoiseModel, w: ObservationWindow, t: float) -> float:
    """Exact VoI (nats) of a noisy window at query time t.

    Evaluates the single fused expression -0.5 log(1 - u (1 - q)) with
    u = e^{-2 kappa lag} and q the window's minor ratio, rather than
    subtracting the correction from the noiseless bound; the subtraction
    cancels catastrophically at small lag.  Zero noise routes to the
    noiseless bound.
    """
    lag = t - w.last_time
    if lag <= 0:
        raise ValueError(f"query time {t} must be strictly after the last sample {w.last_time}")
    if noise.sigma_n2 == 0:
        return markov_voi(p, lag)
    q = _window_det_ratio(p, noise, w)
    u = math.exp(-2.0 * p.kappa * lag)
    return -0.5 * math.log1p(-u * (1.0 - q))


def correction(p: OuParams, noise: NoiseModel, w: ObservationWindow, t: float) -> float:
    """Gap (nats) between the noiseless bound and the noisy window VoI.

    Always nonnegative: 0.5 log(1 + q / (e^{2 kappa lag} - 1)) with q the
    window's minor ratio.  Zero when the observations are noiseless.
    """
    lag = t - w.last_time
    if lag <= 0:
        raise ValueError(f"query time {t} must be strictly after the last sample {w.last_time}")
    if noise.sigma_n2 == 0:
        return 0.0
    q = _window_det_ratio(p, noise, w)
    return 0.5 * math.log1p(q / math.expm1(2.0 * p.kappa * lag))


def voi_single_obs(p: OuParams, noise: NoiseModel, lag: float) -> float:
    """VoI (nats) of one noisy sample observed `lag` ago.

    -0.5 log(1 - (gamma / (1 + gamma)) e^{-2 kappa lag}); finite at lag = 0,
    where it equals 0.5 log(1 + gamma).  Noiseless input requires lag > 0 and
    returns the noiseless bound.
    """
    if lag < 0:
        raise ValueError(f"lag must be >= 0, got {lag}")
    if noise.sigma_n2 == 0:
        return markov_voi(p, lag)
    gamma = snr_ratio(p, noise)
    u = math.exp(-2.0 * p.kappa * lag)
    return -0.5 * math.log1p(-(gamma / (1.0 + gamma)) * u)

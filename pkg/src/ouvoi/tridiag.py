"""Tridiagonal inverse-covariance machinery for Markov-sampled windows.

Because the latent process is Markov, the inverse covariance of any window of
samples is symmetric tridiagonal, with entries parameterized by consecutive
intervals.  This module builds those matrices for regular and irregular
spacing, evaluates leading-principal-minor pairs (by recurrence and, for the
regular case, in closed form via the characteristic roots), and exposes the
quadratic inverse-SNR series of a leading minor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gauss_markov import OuParams

__all__ = [
    "SymTridiag",
    "DetPair",
    "uniform_inverse_cov",
    "poisson_inverse_cov",
    "interval_coeff_arrays",
    "correction_matrix",
    "det_pair_recurrence",
    "det_pair_uniform_closed",
    "det_ratio",
    "minor_series_coeffs",
]


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix: m diagonal entries, m-1 off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.diag, dtype=float))
        o = np.atleast_1d(np.asarray(self.offdiag, dtype=float)) if len(np.atleast_1d(self.offdiag)) else np.empty(0)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", o)
        if d.size < 1 or o.size != d.size - 1:
            raise ValueError("offdiag length must be len(diag) - 1")

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        m = self.size
        out = np.diag(self.diag)
        idx = np.arange(m - 1)
        out[idx, idx + 1] = self.offdiag
        out[idx + 1, idx] = self.offdiag
        return out


@dataclass(frozen=True)
class DetPair:
    """Determinant of a matrix and of its leading (m-1)x(m-1) principal block.

    Both are positive whenever the matrix is positive definite; by the f_0 = 1
    convention the m = 1 block determinant is 1.
    """

    det_a: float
    det_amm: float


def uniform_inverse_cov(p: OuParams, dt: float, m: int) -> SymTridiag:
    """Inverse covariance of m regularly spaced samples of the source.

    With rho = exp(-kappa dt) the matrix is
    2 kappa / (sigma^2 (1 - rho^2)) * tridiag(corners 1, interior 1 + rho^2,
    off-diagonal -rho).  A single sample inverts to 2 kappa / sigma^2 alone.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    base = 2.0 * p.kappa / p.sigma**2
    if m == 1:
        return SymTridiag(np.array([base]), np.empty(0))
    rho = math.exp(-p.kappa * dt)
    omega = -math.expm1(-2.0 * p.kappa * dt)  # 1 - rho^2, accurate for small dt
    scale = base / omega
    diag = np.full(m, scale * (1.0 + rho * rho))
    diag[0] = diag[-1] = scale
    off = np.full(m - 1, -rho * scale)
    return SymTridiag(diag, off)


def interval_coeff_arrays(p: OuParams, intervals) -> tuple[np.ndarray, np.ndarray]:
    """Dimensionless tridiagonal coefficients (a_i, b_i) of an irregular window.

    Each interval T contributes R = 1/(1 - e^{-2 kappa T}); the window's
    inverse covariance is (2 kappa / sigma^2) * tridiag(a, b) with
    a_1 = R_2, a_m = R_m, interior a_i = R_i + R_{i+1} - 1 and
    b_i = -sqrt(R_{i+1} (R_{i+1} - 1)).  These bare arrays also feed the
    inverse-SNR series of minor_series_coeffs.

    sqrt(R (R - 1)) is evaluated as e^{-kappa T} R, which is the same value
    but avoids the cancellation in R - 1 when kappa T is large.
    """
    T = np.atleast_1d(np.asarray(intervals, dtype=float))
    if T.size == 0:
        return np.array([1.0]), np.empty(0)
    if np.any(T <= 0):
        raise ValueError("all intervals must be > 0")
    R = 1.0 / (-np.expm1(-2.0 * p.kappa * T))
    m = T.size + 1
    a = np.empty(m)
    a[0] = R[0]
    a[-1] = R[-1]
    a[1:-1] = R[:-1] + R[1:] - 1.0
    b = -np.exp(-p.kappa * T) * R
    return a, b


def poisson_inverse_cov(p: OuParams, intervals) -> SymTridiag:
    """Inverse covariance of an irregularly spaced window, given its intervals.

    Valid for any positive intervals (only the Markov property of the source
    is used); Poisson sampling is the motivating case.  An empty interval
    list denotes a single sample.
    """
    a, b = interval_coeff_arrays(p, intervals)
    base = 2.0 * p.kappa / p.sigma**2
    return SymTridiag(base * a, base * b)


def correction_matrix(inv_cov: SymTridiag, sigma_n2: float) -> SymTridiag:
    """Scale an inverse covariance by the noise variance and add the identity.

    The leading principal minors of this matrix drive the gap between the
    noiseless VoI bound and the noisy VoI.
    """
    if sigma_n2 < 0:
        raise ValueError(f"sigma_n2 must be >= 0, got {sigma_n2}")
    return SymTridiag(sigma_n2 * inv_cov.diag + 1.0, sigma_n2 * inv_cov.offdiag)


def det_pair_recurrence(a: SymTridiag) -> DetPair:
    """Leading-principal-minor recurrence f_k = d_k f_{k-1} - o_{k-1}^2 f_{k-2}.

    Starts from f_0 = 1, so a 1x1 matrix yields (d_1, 1).  Returns the last
    two minors (f_m, f_{m-1}).
    """
    f_prev, f = 1.0, float(a.diag[0])
    for k in range(1, a.size):
        f, f_prev = float(a.diag[k]) * f - float(a.offdiag[k - 1]) ** 2 * f_prev, f
    return DetPair(det_a=f, det_amm=f_prev)


def det_pair_uniform_closed(p: OuParams, dt: float, sigma_n2: float, m: int) -> DetPair:
    """Closed-form minor pair for the regularly spaced case, m >= 3.

    Uses the characteristic roots of the interior recurrence,
    lam^2 + (c/b) lam + 1 = 0, evaluated stably: the larger root is
    (c + sqrt(c^2 - 4 b^2)) / (2|b|) and the smaller is its reciprocal
    (their product is exactly 1).  The naive root differences overflow for
    large m (|b|^{m-1} underflows while lam2^{m-1} overflows), so powers are
    grouped as (|b| lam2)^{m-1} = ((c + s)/2)^{m-1}; for m > 64 the product
    is assembled in log magnitude.  m < 3 delegates to the recurrence, as do
    degenerate roots (c^2 = 4 b^2) and the diagonal case b = 0.
    """
    if m < 3:
        return det_pair_recurrence(correction_matrix(uniform_inverse_cov(p, dt, m), sigma_n2))
    rho = math.exp(-p.kappa * dt)
    if rho < 1e-8:
        raise ValueError("closed form is ill-conditioned for rho < 1e-8; use the recurrence")
    tri = correction_matrix(uniform_inverse_cov(p, dt, m), sigma_n2)
    a = float(tri.diag[0])
    c = float(tri.diag[1])
    b = float(tri.offdiag[0])
    if b == 0.0:
        return det_pair_recurrence(tri)
    disc = c * c - 4.0 * b * b
    if disc <= 0.0:
        return det_pair_recurrence(tri)

    s = math.sqrt(disc)
    absb = abs(b)
    growth = 0.5 * (c + s)  # = |b| * lam2 >= |b|, the per-order growth factor
    lam2 = growth / absb
    inv2 = 1.0 / (lam2 * lam2)

    # det(A): a^2 J_{m-1} + 2ab J_{m-2} + b^2 J_{m-3}, signs folded so every
    # bracketed term is nonnegative for b < 0.
    br_a = (
        a * a * (1.0 - inv2 ** (m - 1))
        - 2.0 * a * absb / lam2 * (1.0 - inv2 ** (m - 2))
        + b * b * inv2 * (1.0 - inv2 ** (m - 3))
    )
    if m > 64:
        det_a = math.exp((m - 1) * math.log(growth) - math.log(s) + math.log(br_a))
    else:
        det_a = growth ** (m - 1) / s * br_a

    if m == 3:
        # the closed form's lowest index is out of derivation range here;
        # the 2x2 leading block is direct
        det_amm = a * c - b * b
    else:
        br_amm = (
            a * c * (1.0 - inv2 ** (m - 2))
            - (a + c) * absb / lam2 * (1.0 - inv2 ** (m - 3))
            + b * b * inv2 * (1.0 - inv2 ** (m - 4))
        )
        if m > 64:
            det_amm = math.exp((m - 2) * math.log(growth) - math.log(s) + math.log(br_amm))
        else:
            det_amm = growth ** (m - 2) / s * br_amm
    return DetPair(det_a=det_a, det_amm=det_amm)


def det_ratio(dp: DetPair, gamma: float) -> float:
    """det_amm / (gamma det_a), the quantity entering the VoI correction."""
    if dp.det_a <= 0:
        raise ValueError("det_a must be > 0")
    return dp.det_amm / (gamma * dp.det_a)


def minor_series_coeffs(a_seq, b_seq, k: int) -> tuple[float, float, float]:
    """Quadratic inverse-SNR series of the k-th leading minor.

    For the matrix with diagonal a_i/gamma + 1 and off-diagonal b_i/gamma,
    the k-th leading principal minor expands as

        f_k = 1 + (sum_i a_i)/gamma
                + (sum_{i<j} a_i a_j - sum_i b_i^2)/gamma^2 + O(gamma^-3).

    Returns (c0, c1, c2), computed with running sums (the pair sum is
    (S1^2 - S2)/2).
    """
    a = np.atleast_1d(np.asarray(a_seq, dtype=float))
    b = np.atleast_1d(np.asarray(b_seq, dtype=float)) if len(np.atleast_1d(b_seq)) else np.empty(0)
    if not 1 <= k <= a.size:
        raise ValueError(f"k must be in 1..{a.size}, got {k}")
    if b.size < k - 1:
        raise ValueError("b_seq too short for requested k")
    s1 = float(a[:k].sum())
    s2 = float((a[:k] ** 2).sum())
    c2 = 0.5 * (s1 * s1 - s2) - float((b[: k - 1] ** 2).sum())
    return 1.0, s1, c2

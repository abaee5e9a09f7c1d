"""Spatial correlation, channel draws and pilot-based MMSE estimation.

Channels are complex Gaussian g = R^{1/2} h with h standard normal. The
exponential correlation model makes R a Hermitian Toeplitz matrix scaled by
the link gain; the uncorrelated model reduces every estimation quantity to
scalar coefficients so no M x M algebra is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CorrelationSpec:
    kind: str = "uncorrelated"  # "uncorrelated" | "exponential"
    magnitude: float = 0.0  # in [0, 1]; ignored for the uncorrelated kind

    def __post_init__(self):
        if self.kind not in ("uncorrelated", "exponential"):
            raise ValueError(f"unknown correlation kind {self.kind!r}")
        if not 0.0 <= self.magnitude <= 1.0:
            raise ValueError(f"correlation magnitude must be in [0, 1], got {self.magnitude}")


@dataclass(frozen=True)
class EstimationStats:
    """Second-order statistics of the pilot-based channel estimate for one
    (bs, user) pilot group."""

    pilot_snr: float
    est_cov: np.ndarray  # (M, M) covariance of the own-cell estimate
    err_cov: np.ndarray  # (M, M) covariance of the estimation error


def exp_correlation_matrix(magnitude: float, angle: float, num_antennas: int, gain: float = 1.0) -> np.ndarray:
    """Hermitian Toeplitz correlation matrix with first row
    gain * [1, r*, (r*)^2, ...], r = magnitude * exp(i * angle)."""
    if not 0.0 <= magnitude <= 1.0:
        raise ValueError(f"magnitude must be in [0, 1], got {magnitude}")
    if num_antennas < 1:
        raise ValueError("num_antennas must be >= 1")
    idx = np.arange(num_antennas)
    lag = idx[:, None] - idx[None, :]
    # 0**0 == 1 keeps the diagonal right when magnitude == 0.
    return gain * magnitude ** np.abs(lag) * np.exp(1j * angle * lag)


def toeplitz_sqrt_factor(magnitude: float, num_antennas: int) -> np.ndarray:
    """Cholesky factor of the zero-angle unit-gain exponential Toeplitz matrix.

    The angled matrix factors as D(angle) @ C with D a unit-modulus diagonal,
    so one factor per magnitude serves every link.
    """
    if magnitude == 0.0:
        return np.eye(num_antennas)
    base = exp_correlation_matrix(magnitude, 0.0, num_antennas).real
    return np.linalg.cholesky(base)


def matrix_sqrt_psd(mat: np.ndarray, clip_tol: float = 1e-10) -> np.ndarray:
    """Square root of a Hermitian PSD matrix; Cholesky with an eigen fallback
    that clips slightly negative eigenvalues."""
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(mat)
        floor = -clip_tol * max(vals.max(), 1.0)
        if vals.min() < floor:
            raise np.linalg.LinAlgError(
                f"matrix is not PSD: min eigenvalue {vals.min():.3e}"
            ) from None
        vals = np.clip(vals, 0.0, None)
        return vecs * np.sqrt(vals)


def draw_channels(corr_matrices: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One channel vector per correlation matrix.

    corr_matrices: (..., M, M); returns (..., M).
    """
    mats = np.asarray(corr_matrices)
    m = mats.shape[-1]
    lead = mats.shape[:-2]
    out = np.empty(lead + (m,), dtype=complex)
    flat_mats = mats.reshape(-1, m, m)
    flat_out = out.reshape(-1, m)
    for i in range(flat_mats.shape[0]):
        root = matrix_sqrt_psd(flat_mats[i])
        h = standard_complex_normal(rng, (m,))
        flat_out[i] = root @ h
    return out


def standard_complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def estimate_stats_correlated(corr_group: np.ndarray, own_cell: int, pilot_snr: float) -> EstimationStats:
    """Estimate/error covariances for one pilot group.

    corr_group: (L, M, M) correlation matrices of the channels sharing the
    pilot at this BS; own_cell selects the served link. The two covariances
    add up to the own-link correlation matrix exactly.
    """
    mats = np.asarray(corr_group)
    if mats.ndim != 3 or mats.shape[-1] != mats.shape[-2]:
        raise ValueError("corr_group must be (L, M, M)")
    if pilot_snr < 0:
        raise ValueError("pilot_snr must be nonnegative")
    m = mats.shape[-1]
    own = mats[own_cell]
    q = pilot_snr * mats.sum(axis=0) + np.eye(m)
    est = pilot_snr * own @ np.linalg.solve(q, own)
    est = (est + est.conj().T) / 2
    return EstimationStats(pilot_snr, est, own - est)


def uncorrelated_alpha(beta: np.ndarray, pilot_snr: float) -> np.ndarray:
    """Scalar estimation coefficients for uncorrelated fading.

    beta: (..., L) link gains of one pilot group (last axis = cell); the
    returned array has the same shape. The own-link estimate has per-antenna
    variance sqrt(pilot_snr) * beta * alpha.
    """
    b = np.asarray(beta, dtype=float)
    denom = 1.0 + pilot_snr * b.sum(axis=-1, keepdims=True)
    return np.sqrt(pilot_snr) * b / denom


def mmse_filter(corr_group: np.ndarray, own_cell: int, pilot_snr: float) -> np.ndarray:
    """Matrix F with estimate = F @ observation for the own-cell link."""
    mats = np.asarray(corr_group)
    m = mats.shape[-1]
    q = pilot_snr * mats.sum(axis=0) + np.eye(m)
    # q is Hermitian PD, so solve(q, R^H)^H equals R @ q^{-1}.
    return np.sqrt(pilot_snr) * np.linalg.solve(q, mats[own_cell].conj().T).conj().T


def mmse_filter_apply(
    observation: np.ndarray, corr_group: np.ndarray, own_cell: int, pilot_snr: float
) -> np.ndarray:
    """MMSE estimate of the own-cell channel from the pilot observation."""
    obs = np.asarray(observation)
    if obs.shape[-1] != corr_group.shape[-1]:
        raise ValueError("observation length does not match matrix size")
    return obs @ mmse_filter(corr_group, own_cell, pilot_snr).T


def cross_estimate_ratio(corr_cross: np.ndarray, corr_own: np.ndarray, est_own: np.ndarray) -> np.ndarray:
    """Estimate of a pilot-sharing cross link from the own-link estimate.

    The two estimates are linearly dependent: cross = R_cross @ R_own^{-1} @ own.
    Requires an invertible own-link correlation matrix.
    """
    est = np.asarray(est_own)
    sol = np.linalg.solve(corr_own, est[..., None])[..., 0]
    return (corr_cross @ sol[..., None])[..., 0]


def pilot_observation(
    channels: np.ndarray, pilot_snr: float, rng: np.random.Generator
) -> np.ndarray:
    """Observation vector for one pilot group: sqrt(pilot_snr) * sum of the
    sharing channels plus unit noise.

    channels: (..., L, M); the sum runs over the second-to-last axis.
    """
    chans = np.asarray(channels)
    noise = standard_complex_normal(rng, chans.shape[:-2] + chans.shape[-1:])
    return np.sqrt(pilot_snr) * chans.sum(axis=-2) + noise

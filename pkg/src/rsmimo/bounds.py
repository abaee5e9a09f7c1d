"""Precoding, power normalization and achievable-rate lower bounds.

Everything a rate bound needs is collected per pilot group into a
:class:`GainTable`: effective signal powers seen by each receiver from each
BS, plus a noise-equivalent denominator base (estimation-error interference
and unit noise). Bounds are worst-case-Gaussian mutual-information lower
bounds in bits/s/Hz (base-2 logs). The closed form covers zero-forcing with
uncorrelated fading; the Monte Carlo estimator covers any precoder and
correlation model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .channel import (
    CorrelationSpec,
    exp_correlation_matrix,
    mmse_filter,
    pilot_observation,
    standard_complex_normal,
    toeplitz_sqrt_factor,
    uncorrelated_alpha,
)


@dataclass(frozen=True)
class PrecoderSpec:
    kind: str = "zf"  # "zf" | "rzf"
    delta: float | None = None  # rzf regularization; defaults to K / rho_dl

    def __post_init__(self):
        if self.kind not in ("zf", "rzf"):
            raise ValueError(f"unknown precoder kind {self.kind!r}")
        if self.kind == "rzf" and self.delta is not None and self.delta <= 0:
            raise ValueError("rzf delta must be positive")


@dataclass(frozen=True)
class GainTable:
    """Per-pilot-group link budget.

    signal_power[l, j] is the effective power of BS j's pilot-sharing signal
    at the receiver in cell l; noise_equiv[l] >= 1 is the denominator base
    (estimation-error interference plus unit noise).
    """

    signal_power: np.ndarray  # (L, L), [receiver, bs]
    noise_equiv: np.ndarray  # (L,)
    rho_dl: float
    power_norm: np.ndarray  # (L,) per-BS normalization

    @property
    def num_cells(self) -> int:
        return self.signal_power.shape[0]


@dataclass(frozen=True)
class LayeredGainTable:
    """Gain table with every signal split into an outer and an inner layer.

    The outer layer carries ``power_split`` of the power and sits at bit
    2*j, the inner layer carries the rest and sits at bit 2*j + 1.
    """

    table: GainTable
    power_split: float

    def __post_init__(self):
        if not 0.0 <= self.power_split <= 1.0:
            raise ValueError(f"power_split must be in [0, 1], got {self.power_split}")

    @property
    def num_cells(self) -> int:
        return self.table.num_cells

    def layer_powers(self) -> np.ndarray:
        """(L, 2L) layer powers per receiver; outer + inner == unsplit exactly."""
        p = self.table.signal_power
        n_cells = p.shape[1]
        out = np.empty((p.shape[0], 2 * n_cells))
        outer = self.power_split * p
        out[:, 0::2] = outer
        out[:, 1::2] = p - outer
        return out


def layer_bit(cell: int, layer: str) -> int:
    """Bit index of a layer in decode-set masks: outer 'a' at 2*cell, inner 'b'
    at 2*cell + 1."""
    if layer == "a":
        return 2 * cell
    if layer == "b":
        return 2 * cell + 1
    raise ValueError(f"layer must be 'a' or 'b', got {layer!r}")


def zf_precoder(ghat: np.ndarray) -> np.ndarray:
    """Zero-forcing precoder W = G (G^H G)^{-1}; W^H G is the identity.

    ghat may be (M, K) or batched (..., M, K); needs full column rank.
    """
    g = np.asarray(ghat)
    gram = np.swapaxes(g, -1, -2).conj() @ g
    try:
        inv = np.linalg.inv(gram)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"rank-deficient estimate matrix: {exc}") from None
    return g @ inv


def rzf_precoder(ghat: np.ndarray, delta: float) -> np.ndarray:
    """Regularized zero-forcing W = G (G^H G + delta I)^{-1}."""
    g = np.asarray(ghat)
    k = g.shape[-1]
    gram = np.swapaxes(g, -1, -2).conj() @ g + delta * np.eye(k)
    return g @ np.linalg.inv(gram)


def apply_precoder(ghat: np.ndarray, spec: PrecoderSpec, rho_dl: float) -> np.ndarray:
    if spec.kind == "zf":
        return zf_precoder(ghat)
    delta = spec.delta if spec.delta is not None else ghat.shape[-1] / rho_dl
    return rzf_precoder(ghat, delta)


def zf_power_norm_closed(
    beta: np.ndarray, pilot_snr: float, num_antennas: int, users_per_cell: int
) -> np.ndarray:
    """Per-BS transmit normalization for ZF on uncorrelated fading, in closed
    form: the average of 1 / (estimate variance) over the served users,
    divided by K * (M - K)."""
    m, k = num_antennas, users_per_cell
    if m <= k:
        raise ValueError(f"need more antennas than users per cell, got M={m}, K={k}")
    b = np.asarray(beta, dtype=float)
    n_cells = b.shape[0]
    alpha = uncorrelated_alpha(b, pilot_snr)
    own = np.arange(n_cells)
    est_var = np.sqrt(pilot_snr) * b[own, :, own] * alpha[own, :, own]  # (L, K)
    return (1.0 / est_var).sum(axis=1) / (k * (m - k))


def power_norm_mc(precoder_draws: np.ndarray) -> float:
    """Empirical normalization: mean of tr(W^H W) / K over draws (..., M, K)."""
    w = np.asarray(precoder_draws)
    per_draw = (np.abs(w) ** 2).sum(axis=(-1, -2)) / w.shape[-1]
    return float(np.mean(per_draw))


def gain_table_closed_zf(
    beta: np.ndarray,
    pilot_snr: float,
    rho_dl: float,
    num_antennas: int,
    users_per_cell: int,
    pilot_index: int,
) -> GainTable:
    """Closed-form gain table for ZF precoding on uncorrelated fading.

    Works for arbitrarily large antenna counts: only scalar arithmetic on
    the (L, K, L) gain tensor, no M x M matrices.
    """
    m, k = num_antennas, users_per_cell
    b = np.asarray(beta, dtype=float)
    n_cells = b.shape[0]
    lam = zf_power_norm_closed(b, pilot_snr, m, k)
    alpha = uncorrelated_alpha(b, pilot_snr)
    scale = rho_dl / lam  # (L,) indexed by bs

    i = pilot_index
    own = np.arange(n_cells)
    # signal_power[l, j] = scale_j * (beta_jil / beta_jij)^2
    ratio = b[:, i, :] / b[own, i, own][:, None]  # (bs j, cell l)
    signal = (scale[:, None] * ratio**2).T

    # Estimation-error interference: sum over serving BSs and their users.
    err = b[:, i, :] - np.sqrt(pilot_snr) * b[:, i, :] * alpha[:, i, :]  # (j, l)
    inv_est_var = 1.0 / ((m - k) * np.sqrt(pilot_snr) * b[own, :, own] * alpha[own, :, own])
    per_bs = inv_est_var.sum(axis=1)  # (j,)
    noise = 1.0 + (scale[:, None] * err * per_bs[:, None]).sum(axis=0)
    return GainTable(signal, noise, rho_dl, lam)


def _draw_group_channels(
    beta_group: np.ndarray,
    angle_group: np.ndarray | None,
    chol: np.ndarray | None,
    num_samples: int,
    num_antennas: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Channels of one pilot group at one BS: (samples, L, M)."""
    n_cells = beta_group.shape[0]
    h = standard_complex_normal(rng, (num_samples, n_cells, num_antennas))
    if chol is not None:
        h = h @ chol.T  # unit-gain zero-angle correlation
        phases = np.exp(1j * angle_group[:, None] * np.arange(num_antennas)[None, :])
        h = h * phases[None, :, :]
    return np.sqrt(beta_group)[None, :, None] * h


def gain_table_mc(
    beta: np.ndarray,
    angles: np.ndarray | None,
    correlation: CorrelationSpec,
    precoder: PrecoderSpec,
    pilot_snr: float,
    rho_dl: float,
    num_antennas: int,
    pilot_index: int,
    num_samples: int,
    rng: np.random.Generator,
) -> GainTable:
    """Monte Carlo gain table: estimate the first and second moments of the
    effective channel-precoder products over channel realizations.

    beta is (L, K, L); angles holds per-link boresight angles and is only
    consulted for exponential correlation. One child rng stream per pilot
    group keeps results reproducible regardless of batch layout.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    b = np.asarray(beta, dtype=float)
    n_cells, users_per_cell = b.shape[0], b.shape[1]
    m = num_antennas

    exponential = correlation.kind == "exponential" and correlation.magnitude > 0
    chol = toeplitz_sqrt_factor(correlation.magnitude, m) if exponential else None
    alpha = None if exponential else uncorrelated_alpha(b, pilot_snr)

    streams = rng.spawn(n_cells * users_per_cell)
    mean_own = np.zeros((n_cells, n_cells), dtype=complex)  # [receiver, bs]
    pow_sum = np.zeros((n_cells, n_cells))
    lam = np.zeros(n_cells)

    for j in range(n_cells):
        ghat = np.empty((num_samples, m, users_per_cell), dtype=complex)
        rx_channels = None
        for k in range(users_per_cell):
            stream = streams[j * users_per_cell + k]
            angle_group = angles[j, k] if exponential else None
            gk = _draw_group_channels(b[j, k], angle_group, chol, num_samples, m, stream)
            obs = pilot_observation(gk, pilot_snr, stream)
            if exponential:
                group_r = np.array(
                    [
                        exp_correlation_matrix(correlation.magnitude, angles[j, k, l], m, b[j, k, l])
                        for l in range(n_cells)
                    ]
                )
                filt = mmse_filter(group_r, j, pilot_snr)
                ghat[:, :, k] = obs @ filt.T
            else:
                ghat[:, :, k] = alpha[j, k, j] * obs
            if k == pilot_index:
                rx_channels = gk
        w = apply_precoder(ghat, precoder, rho_dl)
        lam[j] = power_norm_mc(w)
        prod = np.einsum("slm,smk->slk", rx_channels.conj(), w)
        mean_own[:, j] = prod[:, :, pilot_index].mean(axis=0)
        pow_sum[:, j] = (np.abs(prod) ** 2).sum(axis=2).mean(axis=0)

    scale = rho_dl / lam
    signal = scale[None, :] * np.abs(mean_own) ** 2
    total = (scale[None, :] * pow_sum).sum(axis=1)
    noise = total - signal.sum(axis=1) + 1.0
    return GainTable(signal, noise, rho_dl, lam)


def _as_cell_set(cells: Iterable[int] | int, n_cells: int) -> frozenset:
    if isinstance(cells, (int, np.integer)):
        return frozenset(j for j in range(n_cells) if (cells >> j) & 1)
    return frozenset(int(c) for c in cells)


def bound_value(
    table: GainTable,
    receiver: int,
    decode_cells: Iterable[int] | int,
    subset_cells: Iterable[int] | int,
) -> float:
    """Rate bound on the summed rates of ``subset_cells`` at one receiver when
    the cells in ``decode_cells`` are decoded jointly and the rest is noise.

    Cell sets may be iterables or bitmasks. Requires receiver in decode set
    and subset within it.
    """
    n = table.num_cells
    decode = _as_cell_set(decode_cells, n)
    subset = _as_cell_set(subset_cells, n)
    if receiver not in decode:
        raise ValueError(f"receiver {receiver} must belong to its decode set")
    if not subset <= decode:
        raise ValueError("subset must be contained in the decode set")
    p = table.signal_power[receiver]
    num = sum(p[j] for j in subset)
    den = table.noise_equiv[receiver] + sum(p[j] for j in range(n) if j not in decode)
    return float(np.log2(1.0 + num / den))


def layered_bound_value(
    ltable: LayeredGainTable, receiver: int, decoded: int, conditioned: int
) -> float:
    """Rate bound on the summed rates of the ``decoded`` layers when the
    ``conditioned`` layers are known and every other layer is noise.

    ``decoded`` and ``conditioned`` are disjoint bitmasks over the 2L layers
    (see :func:`layer_bit`).
    """
    if decoded & conditioned:
        raise ValueError("decoded and conditioned layer sets overlap")
    powers = ltable.layer_powers()[receiver]
    n_layers = powers.shape[0]
    all_mask = (1 << n_layers) - 1
    if (decoded | conditioned) & ~all_mask:
        raise ValueError("layer mask out of range")
    removed = decoded | conditioned
    sel_dec = [(decoded >> b) & 1 for b in range(n_layers)]
    sel_noise = [1 - ((removed >> b) & 1) for b in range(n_layers)]
    num = float(np.dot(powers, sel_dec))
    den = float(ltable.table.noise_equiv[receiver] + np.dot(powers, sel_noise))
    return float(np.log2(1.0 + num / den))

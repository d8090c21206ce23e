"""Maximum-likelihood estimators at the fusion center.

Grid-searched MLEs for digital messaging (known CSI, unknown CSI with or
without pilot symbols, and the plug-in variant that treats the MMSE
channel estimate as the true coefficient), plus the closed-form MLE for
analog amplify-and-forward transmission.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelBatch
from .codebook import Codebook
from .likelihood import (
    GridSpec,
    LikelihoodTable,
    est_csi_table,
    grid_maximize,
    known_csi_table,
    loglik_on_points,
    training_table,
    unknown_csi_table,
)
from .model import SystemParams


@dataclass
class EstimateReport:
    """One estimator's output for one trial."""

    theta_hat: float
    loglik_at_max: float | None = None
    iterations: int = 0
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.theta_hat):
            raise ValueError("estimate must be finite")


@dataclass(frozen=True)
class ChannelEstimate:
    h_hat: np.ndarray
    error_variance: float

    def __post_init__(self):
        if not (0.0 < self.error_variance <= 1.0):
            raise ValueError("error variance must lie in (0, 1]")


def mmse_kappa(energy: float, sigma_c: float, length: int, training_len: int) -> float:
    """Scale between the pilot correlation c_p^H y_p and the channel estimate."""
    return np.sqrt(energy) * length / (length * sigma_c**2 + training_len * energy)


def mmse_error_variance(energy: float, sigma_c: float, length: int, training_len: int) -> float:
    return length * sigma_c**2 / (length * sigma_c**2 + training_len * energy)


def mmse_channel_estimate(y_p, c_p, energy: float, sigma_c: float, length: int, training_len: int):
    """Linear-MMSE channel estimate h_hat = kappa * c_p^H y_p.

    y_p may be a single pilot vector (L_p,) or a batch (N, L_p); the
    estimate has the matching leading shape.
    """
    c_p = np.asarray(c_p)
    if training_len < 1 or len(c_p) != training_len:
        raise ValueError("pilot vector length must equal training_len >= 1")
    kappa = mmse_kappa(energy, sigma_c, length, training_len)
    return kappa * (np.asarray(y_p) @ c_p.conj())


def estimate_channel(batch: ChannelBatch, cb: Codebook, sigma_c: float) -> ChannelEstimate:
    """Per-sensor MMSE channel estimates from the pilot part of each word."""
    lp, length = cb.training_len, cb.n_symbols
    h_hat = mmse_channel_estimate(batch.Y[:, :lp], cb.pilot, batch.energy, sigma_c, length, lp)
    return ChannelEstimate(h_hat=h_hat, error_variance=mmse_error_variance(batch.energy, sigma_c, length, lp))


def _grid_mle(table: LikelihoodTable, params: SystemParams, grid: GridSpec | None,
              logpmf_points=None, aux: dict | None = None) -> EstimateReport:
    from .likelihood import default_grid

    grid = grid or default_grid(params)
    pts = grid.points()
    vals = loglik_on_points(table, params.quantizer, params.sigma_s, pts, logpmf_points)
    k = int(np.argmax(vals))
    return EstimateReport(
        theta_hat=float(pts[k]),
        loglik_at_max=float(vals[k]),
        iterations=0,
        aux=aux or {},
    )


def mle_known_csi(batch: ChannelBatch, cb: Codebook, params: SystemParams,
                  grid: GridSpec | None = None, *, logpmf_points=None) -> EstimateReport:
    """Coherent MLE: exhaustive search of the known-CSI log-likelihood."""
    table = known_csi_table(batch, cb, params.sigma_c)
    return _grid_mle(table, params, grid, logpmf_points)


def mle_unknown_csi(batch: ChannelBatch, cb: Codebook, params: SystemParams,
                    grid: GridSpec | None = None, *, logpmf_points=None) -> EstimateReport:
    """Non-coherent MLE.  With a pilot-prefixed codebook this automatically
    becomes the training-symbol MLE (same estimator, pilot terms split out)."""
    if cb.training_len > 0:
        table = training_table(batch, cb, params.sigma_c)
    else:
        table = unknown_csi_table(batch, cb, params.sigma_c)
    return _grid_mle(table, params, grid, logpmf_points)


def mle_est_csi(batch: ChannelBatch, cb: Codebook, params: SystemParams,
                grid: GridSpec | None = None, *, logpmf_points=None) -> EstimateReport:
    """Two-stage plug-in estimator: MMSE channel estimate, then a purely
    coherent search that treats the estimate as the true coefficient."""
    if cb.training_len < 1:
        raise ValueError("estimated-CSI MLE needs a pilot-prefixed codebook")
    est = estimate_channel(batch, cb, params.sigma_c)
    table = est_csi_table(batch, cb, params.sigma_c, est.h_hat)
    return _grid_mle(table, params, grid, logpmf_points, aux={"h_hat": est.h_hat})


def mle_af(y: np.ndarray, h: np.ndarray, gain: float, energy: float,
           sigma_s: float, sigma_c: float) -> EstimateReport:
    """Closed-form MLE for amplify-and-forward transmission.

    Weighted combination of the matched-filter outputs Re{h_i^* y_i};
    the weights fold together receiver noise and the forwarded
    observation noise.
    """
    y = np.asarray(y).reshape(-1)
    h = np.asarray(h).reshape(-1)
    denom_i = sigma_c**2 + 2.0 * energy * gain**2 * np.abs(h) ** 2 * sigma_s**2
    num = np.sum(np.real(np.conj(h) * y) / denom_i)
    den = np.sum(np.sqrt(energy) * gain * np.abs(h) ** 2 / denom_i)
    if den == 0.0:
        raise ValueError("degenerate amplify-and-forward batch: no usable channel energy")
    return EstimateReport(theta_hat=float(num / den))

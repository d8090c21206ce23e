"""Likelihood kernels shared by the ML estimators, plus the 1-D grid search.

Every digital-messaging likelihood factors the same way: a per-sensor,
per-codeword log-weight that does not depend on theta, combined with the
quantizer cell probabilities which carry all the theta dependence:

    loglik(theta) = sum_i logsumexp_m( logw[i, m] + log p(S_m | theta) )

The four kernel variants differ only in how logw is computed from the
received word:

    known-csi     coherent residual      -||y - sqrt(E) h c_m||^2 / sigma^2
    unknown-csi   non-coherent           beta |y^H c_m|^2
    training      pilot cross term       beta |y_d^H c_m|^2
                                         + 2 beta Re{c_p^H y_p y_d^H c_m}
    est-csi       coherent, channel      (2 sqrt(E)/sigma^2) Re{h_hat y_d^H c_m}
                  estimate as truth

with beta = E / (sigma^2 (E + sigma^2)).  Additive terms that do not
depend on m (hence not on theta) are dropped throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .channel import ChannelBatch
from .codebook import Codebook
from .model import Quantizer, SystemParams, pmf_quantized


@dataclass(frozen=True)
class LikelihoodTable:
    """Per-sensor, per-level log-weights, independent of theta."""

    logw: np.ndarray     # (N, M)
    kind: str            # "known-csi" | "unknown-csi" | "training" | "est-csi"

    def __post_init__(self):
        if not np.all(np.isfinite(self.logw)):
            raise ValueError("log-weights must be finite")

    def stack(self, other: "LikelihoodTable") -> "LikelihoodTable":
        """Concatenate two sensor populations (likelihoods add)."""
        if self.kind != other.kind or self.logw.shape[1] != other.logw.shape[1]:
            raise ValueError("incompatible tables")
        return LikelihoodTable(np.vstack([self.logw, other.logw]), self.kind)


@dataclass(frozen=True)
class GridSpec:
    """Uniform search grid {lo, lo+step, ..., hi}."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError("grid needs lo < hi")
        if self.step <= 0:
            raise ValueError("grid step must be positive")

    def points(self) -> np.ndarray:
        # relative fudge absorbs roundoff when (hi-lo)/step is integral
        n = int(np.floor((self.hi - self.lo) / self.step * (1 + 1e-12))) + 1
        return self.lo + self.step * np.arange(n)


def default_grid(params: SystemParams) -> GridSpec:
    """Search on [-V, V] with step <= Delta/N."""
    return GridSpec(
        lo=-params.theta_range,
        hi=params.theta_range,
        step=params.quantizer.step / params.n_sensors,
    )


def beta_factor(energy: float, sigma_c: float) -> float:
    _require_noise(sigma_c)
    return energy / (sigma_c**2 * (energy + sigma_c**2))


def _require_noise(sigma_c: float):
    if sigma_c <= 0:
        raise ValueError("sigma_c must be positive (the density degenerates at 0)")


# ---------------------------------------------------------------------------
# scalar kernels (one sensor, one codeword)
# ---------------------------------------------------------------------------

def logw_known_csi(y, h, c_m, energy: float, sigma_c: float) -> float:
    _require_noise(sigma_c)
    resid = np.asarray(y) - np.sqrt(energy) * h * np.asarray(c_m)
    return float(-np.sum(np.abs(resid) ** 2) / sigma_c**2)


def logw_unknown_csi(y, c_m, energy: float, sigma_c: float) -> float:
    corr = np.vdot(y, c_m)                      # y^H c_m
    return float(beta_factor(energy, sigma_c) * np.abs(corr) ** 2)


def logw_training(y_p, y_d, c_p, c_dm, energy: float, sigma_c: float) -> float:
    if len(np.asarray(c_p)) < 1:
        raise ValueError("training kernel needs at least one pilot symbol")
    beta = beta_factor(energy, sigma_c)
    pilot = np.vdot(c_p, y_p)                   # c_p^H y_p
    data = np.vdot(y_d, c_dm)                   # y_d^H c_m
    return float(beta * np.abs(data) ** 2 + 2.0 * beta * np.real(pilot * data))


def logw_est_csi(y_d, h_hat, c_dm, energy: float, sigma_c: float) -> float:
    _require_noise(sigma_c)
    data = np.vdot(y_d, c_dm)
    return float(2.0 * np.sqrt(energy) / sigma_c**2 * np.real(h_hat * data))


# ---------------------------------------------------------------------------
# table builders (all sensors x all codewords at once)
# ---------------------------------------------------------------------------

def known_csi_table(batch: ChannelBatch, cb: Codebook, sigma_c: float) -> LikelihoodTable:
    _require_noise(sigma_c)
    # expanded residual: -||y - sqrt(E) h c_m||^2 = -||y||^2 - E|h|^2
    #                    + 2 sqrt(E) Re{h y^H c_m}   (codewords have unit energy)
    corr = batch.Y.conj() @ cb.symbols
    const = -(np.abs(batch.Y) ** 2).sum(axis=1) - batch.energy * np.abs(batch.h) ** 2
    logw = (const[:, None] + 2.0 * np.sqrt(batch.energy) * np.real(batch.h[:, None] * corr)) / sigma_c**2
    return LikelihoodTable(logw, "known-csi")


def unknown_csi_table(batch: ChannelBatch, cb: Codebook, sigma_c: float) -> LikelihoodTable:
    corr = batch.Y.conj() @ cb.symbols          # (N, M), entry = y_i^H c_m
    logw = beta_factor(batch.energy, sigma_c) * np.abs(corr) ** 2
    return LikelihoodTable(logw, "unknown-csi")


def training_table(batch: ChannelBatch, cb: Codebook, sigma_c: float) -> LikelihoodTable:
    if cb.training_len < 1:
        raise ValueError("codebook carries no training symbols")
    beta = beta_factor(batch.energy, sigma_c)
    lp = cb.training_len
    pilot = batch.Y[:, :lp] @ cb.pilot.conj()   # (N,), c_p^H y_p
    data = batch.Y[:, lp:].conj() @ cb.data     # (N, M), y_d^H c_m
    logw = beta * np.abs(data) ** 2 + 2.0 * beta * np.real(pilot[:, None] * data)
    return LikelihoodTable(logw, "training")


def est_csi_table(batch: ChannelBatch, cb: Codebook, sigma_c: float, h_hat: np.ndarray) -> LikelihoodTable:
    _require_noise(sigma_c)
    data = batch.Y[:, cb.training_len :].conj() @ cb.data
    logw = 2.0 * np.sqrt(batch.energy) / sigma_c**2 * np.real(h_hat[:, None] * data)
    return LikelihoodTable(logw, "est-csi")


# ---------------------------------------------------------------------------
# combining with the quantizer pmf, and the grid search
# ---------------------------------------------------------------------------

def log_pmf(theta, q: Quantizer, sigma_s: float) -> np.ndarray:
    """log p(S_m | theta); cells with zero numerical mass give -inf."""
    p = pmf_quantized(theta, q, sigma_s)
    if np.any(np.sum(p, axis=-1) <= 0.0) or not np.all(np.isfinite(p)):
        raise ValueError("quantizer pmf vanished; theta is not a finite value "
                         "within any representable distance of the granular region")
    with np.errstate(divide="ignore"):
        return np.log(p)


def loglik(theta: float, table: LikelihoodTable, q: Quantizer, sigma_s: float) -> float:
    """Joint log-likelihood at one theta (up to theta-independent constants)."""
    lp = log_pmf(float(theta), q, sigma_s)
    return float(np.sum(logsumexp(table.logw + lp[None, :], axis=1)))


def loglik_on_points(
    table: LikelihoodTable,
    q: Quantizer,
    sigma_s: float,
    points: np.ndarray,
    logpmf_points: np.ndarray | None = None,
) -> np.ndarray:
    """Vector of loglik values over a theta grid.

    logpmf_points (G, M) may be precomputed once per operating point and
    shared across Monte Carlo trials.
    """
    if logpmf_points is None:
        logpmf_points = log_pmf(points, q, sigma_s)
    combined = table.logw[None, :, :] + logpmf_points[:, None, :]
    return np.sum(logsumexp(combined, axis=2), axis=1)


def grid_maximize(f, grid: GridSpec) -> tuple[float, float]:
    """Exhaustive maximization on the grid.

    f may be vectorized (called with the full point array) or scalar.
    Ties resolve to the smallest grid point.
    """
    pts = grid.points()
    if pts.size == 0:
        raise ValueError("empty grid")
    try:
        vals = np.asarray(f(pts), dtype=float)
        if vals.shape != pts.shape:
            raise TypeError
    except TypeError:
        vals = np.array([float(f(p)) for p in pts])
    k = int(np.argmax(vals))    # argmax returns the first (smallest) maximizer
    return float(pts[k]), float(vals[k])

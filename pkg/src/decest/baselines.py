"""Low-complexity estimators: the iterative soft-fusion scheme and the
classical baselines it is compared against.

The iterative estimator alternates an E-step (per-sensor posterior mean
and variance of the quantized value, given the received word and the
current level prior) with an M-step (variance-weighted linear combine).
The prior starts uniform and is refreshed from the running estimate, so
the scheme is a modified expectation-maximization loop that typically
settles within two iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelBatch
from .codebook import Codebook, crc_check
from .likelihood import known_csi_table, training_table, unknown_csi_table
from .mlest import EstimateReport
from .model import Quantizer, QuantizedVector, SystemParams


@dataclass
class SuboptState:
    """Intermediate quantities of one iteration of the soft-fusion loop."""

    prior: np.ndarray       # (N, M), normalized per row
    s_hat: np.ndarray       # (N,) posterior means
    s_var: np.ndarray       # (N,) posterior variances, clamped at 0
    theta_hat: float
    iteration: int


def posterior_level_moments(logw: np.ndarray, log_prior, levels: np.ndarray, levels_sq=None):
    """E-step: posterior mean/variance of the level per sensor.

    log_prior may be a matrix, a single row, or 0.0 for the uniform
    prior (any per-row constant cancels in the normalization).  Weights
    exp(logw + log_prior) are normalized per row with max subtraction,
    so arbitrarily large magnitudes are safe.
    """
    a = logw if isinstance(log_prior, float) and log_prior == 0.0 else logw + log_prior
    amax = a.max(axis=1)
    if not np.isfinite(amax).all():
        bad = int(np.argmax(~np.isfinite(amax)))
        raise ValueError(f"degenerate posterior weights for sensor {bad}")
    w = np.exp(a - amax[:, None])
    z = w.sum(axis=1)
    s_hat = (w @ levels) / z
    if levels_sq is None:
        levels_sq = levels * levels
    s_var = np.maximum((w @ levels_sq) / z - s_hat * s_hat, 0.0)
    return w / z[:, None], s_hat, s_var


def variance_weighted_mean(s_hat: np.ndarray, s_var: np.ndarray, sigma_s: float) -> float:
    """M-step: linear unbiased combine with weights 1/(sigma_s^2 + var)."""
    w = 1.0 / (sigma_s**2 + s_var)
    return float(np.dot(w, s_hat) / w.sum())


def subopt_estimate(
    batch: ChannelBatch,
    cb: Codebook,
    params: SystemParams,
    max_iters: int = 2,
    known_csi: bool = True,
    tol: float = 1e-6,
) -> EstimateReport:
    """Iterative soft-fusion estimate.

    known_csi selects coherent per-sensor weights; otherwise the
    non-coherent kernel is used (with pilot terms split out when the
    codebook has them).  Stops after max_iters or when the estimate
    moves less than tol.
    """
    if max_iters < 1:
        raise ValueError("need at least one iteration")
    if known_csi:
        table = known_csi_table(batch, cb, params.sigma_c)
    elif cb.training_len > 0:
        table = training_table(batch, cb, params.sigma_c)
    else:
        table = unknown_csi_table(batch, cb, params.sigma_c)

    q = params.quantizer
    levels = q.values
    levels_sq = levels * levels
    inv2var = 0.5 / params.sigma_s**2

    log_prior = 0.0                      # uniform start; constants cancel per row
    theta_hat = 0.0
    s_hat = s_var = None
    done = 0
    path = []
    for it in range(1, max_iters + 1):
        _, s_hat, s_var = posterior_level_moments(table.logw, log_prior, levels, levels_sq)
        new_theta = variance_weighted_mean(s_hat, s_var, params.sigma_s)
        path.append(new_theta)
        done = it
        if it > 1 and abs(new_theta - theta_hat) < tol:
            theta_hat = new_theta
            break
        theta_hat = new_theta
        d = levels - theta_hat           # Gaussian prior refresh, constants dropped
        log_prior = -inv2var * d * d
    return EstimateReport(
        theta_hat=theta_hat,
        iterations=done,
        aux={"theta_path": path, "s_hat": s_hat, "s_var": s_var},
    )


def mrc_estimate(batch: ChannelBatch, cb: Codebook, q: Quantizer) -> EstimateReport:
    """Combine all sensors coherently, detect the nearest codeword, and
    report its level.  Optimal only when every sensor transmitted the
    same word (noiseless observations)."""
    gain = np.sum(np.abs(batch.h) ** 2)
    if gain <= 0.0:
        raise ValueError("zero channel energy, nothing to combine")
    combined = (batch.h.conj() @ batch.Y) / (np.sqrt(batch.energy) * gain)
    dist = np.sum(np.abs(combined[:, None] - cb.symbols) ** 2, axis=0)
    m = int(np.argmin(dist))
    return EstimateReport(theta_hat=float(q.values[m]), aux={"detected": m})


def principal_eigenvector(mat: np.ndarray, tol: float = 1e-10, max_iters: int = 500) -> np.ndarray:
    """Dominant eigenvector of a Hermitian PSD matrix by power iteration,
    falling back to a dense eigensolve if the iteration stalls."""
    mat = np.asarray(mat)
    diag = np.real(np.diag(mat))
    v = mat[:, int(np.argmax(diag))]
    nv = np.linalg.norm(v)
    if nv == 0.0:
        v = np.zeros(mat.shape[0], dtype=complex)
        v[0] = 1.0
    else:
        v = v / nv
    for _ in range(max_iters):
        w = mat @ v
        lam = np.linalg.norm(w)
        if lam == 0.0:
            break
        w = w / lam
        if np.linalg.norm(mat @ w - lam * w) <= tol * max(lam, 1.0):
            return w
        v = w
    vals, vecs = np.linalg.eigh(mat)
    return vecs[:, -1]


def subspace_estimate(Y: np.ndarray, cb: Codebook, q: Quantizer) -> EstimateReport:
    """Non-coherent counterpart of the MRC baseline: detect the common
    codeword from the dominant direction of sum_i y_i y_i^H."""
    Y = np.asarray(Y)
    corr = Y.T @ Y.conj()          # sum_i y_i y_i^H
    v = principal_eigenvector(corr)
    m = int(np.argmax(np.abs(v.conj() @ cb.symbols)))
    return EstimateReport(theta_hat=float(q.values[m]), aux={"detected": m})


def _demod_bits(batch: ChannelBatch, cb: Codebook) -> np.ndarray:
    """Per-symbol coherent BPSK decisions (bit 1 <-> positive symbol)."""
    return (np.real(batch.h.conj()[:, None] * batch.Y) > 0.0).astype(int)


def fusion_estimate(batch: ChannelBatch, cb: Codebook, q: Quantizer, use_crc: bool = False) -> EstimateReport:
    """Demodulate each sensor's word symbol by symbol, rebuild its level,
    and average.  With use_crc, words failing the check are discarded;
    if nothing survives the estimate falls back to 0 (the midpoint of
    the dynamic range) with a flag in aux.
    """
    if cb.data_bits < 1:
        raise ValueError("fusion needs a bit-mapped codebook")
    if use_crc and cb.kind != "crc":
        raise ValueError("CRC-checked fusion needs a CRC codebook")
    bits = _demod_bits(batch, cb)
    data = bits[:, cb.training_len : cb.training_len + cb.data_bits]
    weights = 2 ** np.arange(cb.data_bits - 1, -1, -1)
    idx = data @ weights
    keep = np.ones(len(idx), dtype=bool)
    if use_crc:
        keep = np.array([crc_check(w) for w in bits])
    survivors = int(np.count_nonzero(keep))
    if survivors == 0:
        return EstimateReport(theta_hat=0.0, aux={"survivors": 0, "fallback": True})
    s = q.values[idx[keep]]
    return EstimateReport(theta_hat=float(np.mean(s)), aux={"survivors": survivors})


def blue_estimate(x: np.ndarray) -> float:
    """Sample mean of the raw observations (ideal-communication bound)."""
    x = np.asarray(x, dtype=float)
    if x.size < 1:
        raise ValueError("need at least one observation")
    return float(np.mean(x))


def quasi_blue_estimate(s: QuantizedVector | np.ndarray) -> float:
    """Sample mean of the quantized observations."""
    vals = s.values if isinstance(s, QuantizedVector) else np.asarray(s, dtype=float)
    if vals.size < 1:
        raise ValueError("need at least one observation")
    return float(np.mean(vals))


def quasi_blue_mse_bound(params: SystemParams) -> float:
    """(sigma_s^2 + step^2/12) / N, the quantization-aware fusion floor."""
    return (params.sigma_s**2 + params.quantizer.step**2 / 12.0) / params.n_sensors

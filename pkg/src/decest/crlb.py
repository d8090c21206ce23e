"""Numerical estimation-variance lower bound for the non-coherent receiver.

The per-sensor Fisher information is

    I1 = E_y[ ( sum_m p(y|c_m) p'(S_m|theta) / sum_m p(y|c_m) p(S_m|theta) )^2 ]

where p(y|c_m) marginalizes the fading coefficient (zero-mean complex
Gaussian) out of the received word.  Received words from different
sensors are iid given theta, so the bound is 1/(N * I1): the number of
sensors enters only as a prefactor.

I1 is integrated by Monte Carlo over the received-word space; the
determinant and the ||y||^2 term of p(y|c_m) are codeword-independent
and cancel inside the ratio, leaving the stable softmax form below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import complex_noise, sample_channel
from .codebook import Codebook
from .likelihood import beta_factor
from .model import Quantizer, SystemParams, cell_bounds, pmf_quantized


@dataclass(frozen=True)
class CrlbResult:
    theta: float
    n_sensors: int
    bound: float
    mc_samples: int
    std_error: float

    def __post_init__(self):
        if self.bound <= 0:
            raise ValueError("bound must be positive")


def _phi(z: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)


def pmf_derivatives(theta: float, q: Quantizer, sigma_s: float):
    """First and second theta-derivatives of the cell probabilities.

    Differentiating P(lo < x <= hi) with x ~ N(theta, sigma_s^2) gives
    closed Gaussian-density forms; the open outer cells contribute
    nothing at their infinite edge.  Both vectors sum to zero because
    the pmf sums to one for every theta.
    """
    if sigma_s <= 0:
        raise ValueError("sigma_s must be positive")
    lo, hi = cell_bounds(q)
    zlo = (lo - theta) / sigma_s
    zhi = (hi - theta) / sigma_s
    plo, phi_hi = _phi(zlo), _phi(zhi)
    p1 = (plo - phi_hi) / sigma_s
    # phi'(z) = -z phi(z); z*phi(z) -> 0 at +-inf
    zplo = np.where(np.isfinite(zlo), zlo * plo, 0.0)
    zphi = np.where(np.isfinite(zhi), zhi * phi_hi, 0.0)
    p2 = (zplo - zphi) / sigma_s**2
    return p1, p2


def fisher_information_mc(
    theta: float,
    params: SystemParams,
    cb: Codebook,
    mc_samples: int,
    rng: np.random.Generator,
    chunk: int = 20000,
):
    """Monte Carlo estimate of the single-sensor information I1.

    Draws (level, fading, noise), forms the received word, and averages
    the squared score.  Returns (I1, standard error of I1).
    """
    p = pmf_quantized(theta, params.quantizer, params.sigma_s)
    p1, _ = pmf_derivatives(theta, params.quantizer, params.sigma_s)
    beta = beta_factor(params.energy_per_observation, params.sigma_c)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < mc_samples:
        k = min(chunk, mc_samples - done)
        m = rng.choice(p.size, size=k, p=p / p.sum())
        h = sample_channel(k, rng)
        words = cb.symbols[:, m].T
        y = np.sqrt(params.energy_per_observation) * h[:, None] * words
        y = y + complex_noise(y.shape, params.sigma_c, rng)
        logw = beta * np.abs(y.conj() @ cb.symbols) ** 2
        logw -= np.max(logw, axis=1, keepdims=True)
        w = np.exp(logw)
        score = (w @ p1) / (w @ p)
        sq = score**2
        total += float(np.sum(sq))
        total_sq += float(np.sum(sq * sq))
        done += k
    info = total / mc_samples
    var = max(total_sq / mc_samples - info**2, 0.0)
    return info, float(np.sqrt(var / mc_samples))


def crlb_unknown_csi(
    theta: float,
    params: SystemParams,
    cb: Codebook,
    mc_samples: int,
    rng: np.random.Generator,
) -> CrlbResult:
    """Variance lower bound 1/(N * I1) with Monte Carlo standard error."""
    if mc_samples < 1000:
        raise ValueError("need at least 1000 Monte Carlo samples")
    info, info_se = fisher_information_mc(theta, params, cb, mc_samples, rng)
    if info <= 0.0:
        raise ValueError("information estimate is nonpositive; increase mc_samples")
    n = params.n_sensors
    return CrlbResult(
        theta=theta,
        n_sensors=n,
        bound=1.0 / (n * info),
        mc_samples=mc_samples,
        std_error=info_se / (n * info**2),
    )

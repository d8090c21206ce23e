"""Rayleigh block-fading orthogonal multiple-access channel.

Each sensor's L-symbol word sees one complex Gaussian coefficient h_i
(CN(0,1), constant over the word) and additive receiver noise with
variance sigma_c^2 per complex sample.  Sensors do not interfere: the
fusion center receives one clean row y_i per sensor.

SNR bookkeeping: the observation SNR gamma_s fixes sigma_s relative to
the granular half-width W, and the communication SNR gamma_c fixes the
noise level N0 = sigma_c^2 relative to the per-observation energy E_d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SnrSpec:
    gamma_s_db: float
    gamma_c_db: float


@dataclass(frozen=True)
class ChannelBatch:
    """One trial's fading draw and received words.

    h: (N,) complex coefficients; Y: (N, L) received rows; energy: E_d.
    """

    h: np.ndarray
    Y: np.ndarray
    energy: float


def sigma_s_from_gamma_s(gamma_s_db: float, granular_half_width: float) -> float:
    return granular_half_width * 10.0 ** (-gamma_s_db / 20.0)


def gamma_s_from_sigma_s(sigma_s: float, granular_half_width: float) -> float:
    return 20.0 * np.log10(granular_half_width / sigma_s)


def sigma_c_from_gamma_c(gamma_c_db: float, energy: float) -> float:
    """sigma_c = sqrt(N0) with N0 = E_d * 10^(-gamma_c/10)."""
    return float(np.sqrt(energy * 10.0 ** (-gamma_c_db / 10.0)))


def gamma_c_from_sigma_c(sigma_c: float, energy: float) -> float:
    return 10.0 * np.log10(energy / sigma_c**2)


def sample_channel(n: int, rng: np.random.Generator) -> np.ndarray:
    """n iid CN(0,1) coefficients (E|h|^2 = 1)."""
    if n < 1:
        raise ValueError("need at least one coefficient")
    z = rng.standard_normal((2, n))
    return (z[0] + 1j * z[1]) / np.sqrt(2.0)


def complex_noise(shape, sigma_c: float, rng: np.random.Generator) -> np.ndarray:
    """Complex Gaussian noise with variance sigma_c^2 per sample."""
    z = rng.standard_normal((2, *shape))
    return (sigma_c / np.sqrt(2.0)) * (z[0] + 1j * z[1])


def apply_channel(messages: np.ndarray, h: np.ndarray, energy: float, noise: np.ndarray) -> ChannelBatch:
    """Deterministic part of transmission with externally supplied noise.

    Used by the Monte Carlo harness so that several messaging schemes can
    share one noise realization.
    """
    messages = np.asarray(messages)
    if messages.ndim != 2 or messages.shape[0] != len(h):
        raise ValueError(f"messages shape {messages.shape} does not match {len(h)} sensors")
    if noise.shape != messages.shape:
        raise ValueError(f"noise shape {noise.shape} does not match messages {messages.shape}")
    y = np.sqrt(energy) * h[:, None] * messages + noise
    return ChannelBatch(h=np.asarray(h), Y=y, energy=energy)


def transmit(
    messages: np.ndarray,
    h: np.ndarray,
    energy: float,
    sigma_c: float,
    rng: np.random.Generator,
) -> ChannelBatch:
    """y_i = sqrt(E_d) h_i c(x_i) + n_i with fresh receiver noise."""
    messages = np.asarray(messages)
    if messages.ndim != 2 or messages.shape[0] != len(h):
        raise ValueError(f"messages shape {messages.shape} does not match {len(h)} sensors")
    return apply_channel(messages, h, energy, complex_noise(messages.shape, sigma_c, rng))

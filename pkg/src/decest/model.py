"""Observation and quantization model.

A scalar parameter theta, bounded to [-V, +V], is observed by N sensors
through additive Gaussian noise.  Each sensor rounds its reading with an
M-level uniform quantizer whose granular region is [-W, +W]; the outer
cells saturate.  Everything downstream (coding, modulation, channels,
estimators) works on the quantizer outputs, so the cell probabilities
p(S_m | theta) computed here are the data-level core of every estimator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc, ndtr

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class Quantizer:
    """M-level uniform quantizer with granular region [-W, +W].

    Levels are S_m = m*step - W for m = 0..M-1, so S_0 = -W, S_{M-1} = +W
    and step = 2W/(M-1).  Cells are half-open, (S_m - step/2, S_m + step/2],
    with the two outer cells extending to -inf / +inf.
    """

    levels: int
    granular_half_width: float
    step: float = field(init=False)

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError(f"need at least 2 levels, got {self.levels}")
        if self.granular_half_width <= 0:
            raise ValueError("granular half-width must be positive")
        object.__setattr__(self, "step", 2.0 * self.granular_half_width / (self.levels - 1))

    @property
    def values(self) -> np.ndarray:
        """All level values S_0..S_{M-1}, strictly increasing."""
        return np.arange(self.levels) * self.step - self.granular_half_width

    def cell_edges(self) -> np.ndarray:
        """Interior cell boundaries S_m + step/2, m = 0..M-2."""
        return self.values[:-1] + 0.5 * self.step


@dataclass(frozen=True)
class CodebookSpec:
    """Which messaging scheme the sensors use.

    kind: "natural-binary", "crc", "training" or "analog-af".
    training_len is the pilot prefix length and only meaningful for
    kind == "training".
    """

    kind: str = "natural-binary"
    training_len: int = 0

    _KINDS = ("natural-binary", "crc", "training", "analog-af")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown codebook kind {self.kind!r}; expected one of {self._KINDS}")
        if self.kind == "training" and self.training_len < 1:
            raise ValueError("training codebook needs training_len >= 1")


@dataclass(frozen=True)
class SystemParams:
    """Full scenario description for one operating point.

    sigma_c**2 is the total variance of each complex receiver-noise sample
    (both real dimensions together); this convention is used consistently
    in every likelihood below.
    """

    n_sensors: int
    theta_range: float          # V: theta lives in [-V, +V]
    sigma_s: float              # observation-noise std
    sigma_c: float              # receiver-noise std per complex sample
    energy_per_observation: float
    quantizer: Quantizer
    codebook: CodebookSpec = CodebookSpec()

    def __post_init__(self):
        if self.n_sensors < 1:
            raise ValueError("need at least one sensor")
        if self.theta_range <= 0:
            raise ValueError("theta_range must be positive")
        if self.sigma_s <= 0:
            raise ValueError("sigma_s must be positive")
        if self.sigma_c < 0:
            raise ValueError("sigma_c must be nonnegative")
        if self.energy_per_observation <= 0:
            raise ValueError("energy_per_observation must be positive")


@dataclass(frozen=True)
class QuantizedVector:
    """Quantizer outputs for one batch of observations."""

    indices: np.ndarray   # int, in [0, M-1]
    values: np.ndarray    # S_{m_i}


def sample_observations(theta: float, params: SystemParams, rng: np.random.Generator) -> np.ndarray:
    """Draw the N sensor readings theta + noise, noise ~ N(0, sigma_s^2) iid."""
    if not np.isfinite(theta) or abs(theta) > params.theta_range:
        raise ValueError(f"theta={theta} outside dynamic range [-{params.theta_range}, {params.theta_range}]")
    return theta + params.sigma_s * rng.standard_normal(params.n_sensors)


def quantize_indices(x, q: Quantizer) -> np.ndarray:
    """Cell indices for an array of inputs (saturating, ties go to the lower cell)."""
    return np.searchsorted(q.cell_edges(), np.asarray(x, dtype=float), side="left")


def quantize(x: float, q: Quantizer) -> tuple[int, float]:
    """Round one reading to the nearest level; returns (index, level value)."""
    m = int(quantize_indices(x, q))
    return m, m * q.step - q.granular_half_width


def quantize_vector(x, q: Quantizer) -> QuantizedVector:
    idx = quantize_indices(x, q)
    return QuantizedVector(indices=idx, values=idx * q.step - q.granular_half_width)


def _gaussian_cell_prob(zlo: np.ndarray, zhi: np.ndarray) -> np.ndarray:
    """P(zlo < Z <= zhi) for standard normal Z, accurate in both tails."""
    zlo = np.asarray(zlo, dtype=float)
    zhi = np.asarray(zhi, dtype=float)
    # Complementary-error-function forms avoid cancellation when the whole
    # cell sits in one tail.
    right = 0.5 * (erfc(zlo / _SQRT2) - erfc(zhi / _SQRT2))
    left = 0.5 * (erfc(-zhi / _SQRT2) - erfc(-zlo / _SQRT2))
    mid = ndtr(zhi) - ndtr(zlo)
    out = np.where(zlo > 0, right, np.where(zhi < 0, left, mid))
    return np.maximum(out, 0.0)


def cell_bounds(q: Quantizer) -> tuple[np.ndarray, np.ndarray]:
    """Lower/upper cell boundaries with the outer cells open to +-inf."""
    s = q.values
    lo = np.concatenate(([-np.inf], s[:-1] + 0.5 * q.step))
    hi = np.concatenate((s[:-1] + 0.5 * q.step, [np.inf]))
    return lo, hi


def pmf_quantized(theta, q: Quantizer, sigma_s: float) -> np.ndarray:
    """Exact cell probabilities p(S_m | theta) under N(theta, sigma_s^2).

    theta may be a scalar (returns shape (M,)) or a vector (returns
    shape (len(theta), M)).  Rows sum to 1 up to roundoff because the
    outer cells carry the full Gaussian tails.
    """
    if sigma_s <= 0:
        raise ValueError("sigma_s must be positive")
    lo, hi = cell_bounds(q)
    th = np.asarray(theta, dtype=float)
    zlo = (lo - th[..., None]) / sigma_s
    zhi = (hi - th[..., None]) / sigma_s
    return _gaussian_cell_prob(zlo, zhi)


def pmf_approx(theta, q: Quantizer, sigma_s: float) -> np.ndarray:
    """Small-step surrogate for pmf_quantized: one Gaussian density sample
    per cell, scaled by the step.

    Not normalized: the weights only sum to ~1 when the step is small
    relative to sigma_s and theta is well inside the granular region.
    """
    if sigma_s <= 0:
        raise ValueError("sigma_s must be positive")
    th = np.asarray(theta, dtype=float)
    z = (q.values - th[..., None]) / sigma_s
    return q.step / (np.sqrt(2.0 * np.pi) * sigma_s) * np.exp(-0.5 * z * z)


def log_pmf_approx(theta, q: Quantizer, sigma_s: float) -> np.ndarray:
    """log of pmf_approx, kept in closed form so it never underflows."""
    if sigma_s <= 0:
        raise ValueError("sigma_s must be positive")
    th = np.asarray(theta, dtype=float)
    z = (q.values - th[..., None]) / sigma_s
    return np.log(q.step / (np.sqrt(2.0 * np.pi) * sigma_s)) - 0.5 * z * z

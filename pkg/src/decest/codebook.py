"""Messaging functions: quantizer index -> L transmission symbols.

Digital schemes map each of the M quantizer levels to a BPSK codeword
(a column of an L x M complex matrix); the analog scheme simply scales
the raw reading.  Every digital codeword is normalized to unit energy,
so the per-symbol energy is 1/L regardless of the code length.

The BPSK bit map is bit 1 -> +1/sqrt(L), bit 0 -> -1/sqrt(L), MSB first;
pilot symbols are +1/sqrt(L).  These constants are arbitrary but fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Quantizer, quantize

CRC_POLY = 0b10011   # x^4 + x + 1
CRC_BITS = 4

AMBIGUITY_TOL = 1e-9


@dataclass(frozen=True)
class Codebook:
    """L x M complex symbol matrix; column m is transmitted for level m.

    training_len counts leading rows that are identical across columns
    (known pilot symbols).  data_bits is the number of information bits
    per word for the BPSK constructions (0 for custom codebooks).
    """

    symbols: np.ndarray
    training_len: int = 0
    kind: str = "custom"
    data_bits: int = 0

    def __post_init__(self):
        s = np.asarray(self.symbols, dtype=complex)
        object.__setattr__(self, "symbols", s)
        if s.ndim != 2:
            raise ValueError("symbols must be an L x M matrix")
        energies = np.sum(np.abs(s) ** 2, axis=0)
        if np.any(np.abs(energies - 1.0) > 1e-12):
            raise ValueError("codeword energies must all equal 1")
        if self.training_len > 0:
            pilot = s[: self.training_len, :]
            if not np.allclose(pilot, pilot[:, :1], rtol=0, atol=1e-12):
                raise ValueError("pilot rows must be identical across columns")

    @property
    def n_symbols(self) -> int:
        return self.symbols.shape[0]

    @property
    def n_words(self) -> int:
        return self.symbols.shape[1]

    @property
    def pilot(self) -> np.ndarray:
        return self.symbols[: self.training_len, 0]

    @property
    def data(self) -> np.ndarray:
        return self.symbols[self.training_len :, :]


@dataclass(frozen=True)
class AfMessage:
    """Analog amplify-and-forward messaging: c(x) = gain * x."""

    gain: float


def af_gain(theta_range: float, sigma_s: float) -> AfMessage:
    """Gain that makes E|c(x)|^2 = 1 for theta ~ Uniform[-V, V] plus noise."""
    return AfMessage(gain=1.0 / np.sqrt(theta_range**2 / 3.0 + sigma_s**2))


def af_message(x: float, af: AfMessage) -> complex:
    return complex(af.gain * x)


def _check_power_of_two(m: int) -> int:
    if m < 2 or m & (m - 1):
        raise ValueError(f"number of levels must be a power of 2, got {m}")
    return int(m).bit_length() - 1


def _bits_of(value: int, width: int) -> np.ndarray:
    """MSB-first bit vector of an integer."""
    return (value >> np.arange(width - 1, -1, -1)) & 1


def _bpsk(bits: np.ndarray, length: int) -> np.ndarray:
    return (2.0 * bits - 1.0) / np.sqrt(length)


def crc_remainder(bits: np.ndarray) -> np.ndarray:
    """4 check bits: remainder of bits * x^4 divided by x^4 + x + 1."""
    reg = 0
    for b in np.concatenate([bits, np.zeros(CRC_BITS, dtype=int)]):
        reg = (reg << 1) | int(b)
        if reg & (1 << CRC_BITS):
            reg ^= CRC_POLY
    return _bits_of(reg, CRC_BITS)


def crc_check(word_bits: np.ndarray) -> bool:
    """True when the data+check word divides cleanly."""
    reg = 0
    for b in word_bits:
        reg = (reg << 1) | int(b)
        if reg & (1 << CRC_BITS):
            reg ^= CRC_POLY
    return reg == 0


def build_natural_binary(m_levels: int) -> Codebook:
    """Uncoded codebook: log2(M) BPSK symbols per word, MSB first."""
    k = _check_power_of_two(m_levels)
    cols = [_bpsk(_bits_of(m, k), k) for m in range(m_levels)]
    return Codebook(np.column_stack(cols).astype(complex), kind="natural-binary", data_bits=k)


def build_crc(m_levels: int) -> Codebook:
    """CRC-protected codebook: data bits followed by 4 check bits."""
    k = _check_power_of_two(m_levels)
    length = k + CRC_BITS
    cols = []
    for m in range(m_levels):
        data = _bits_of(m, k)
        word = np.concatenate([data, crc_remainder(data)])
        cols.append(_bpsk(word, length))
    return Codebook(np.column_stack(cols).astype(complex), kind="crc", data_bits=k)


def build_training(m_levels: int, training_len: int) -> Codebook:
    """Pilot-prefixed codebook: L_p known symbols, then natural-binary data.

    The unit-energy constraint is kept over the whole word, so adding
    pilots lowers the energy available to the data symbols.
    """
    if training_len < 1:
        raise ValueError("training_len must be >= 1")
    k = _check_power_of_two(m_levels)
    length = training_len + k
    pilot = np.full(training_len, 1.0 / np.sqrt(length))
    cols = [np.concatenate([pilot, _bpsk(_bits_of(m, k), length)]) for m in range(m_levels)]
    return Codebook(
        np.column_stack(cols).astype(complex),
        training_len=training_len,
        kind="training",
        data_bits=k,
    )


def message(x: float, cb: Codebook, q: Quantizer) -> np.ndarray:
    """Symbols transmitted for reading x: the codeword of its quantizer cell."""
    m, _ = quantize(x, q)
    return cb.symbols[:, m]


def detect_phase_ambiguity(cb: Codebook) -> list[tuple[int, int, float]]:
    """All column pairs that coincide up to a unit phase.

    Returns (m, n, phase) with m < n and c_m = c_n * exp(1j*phase).
    Any non-empty result means a non-coherent receiver cannot tell the
    two words apart.
    """
    s = cb.symbols
    gram = s.conj().T @ s                      # gram[n, m] = c_n^H c_m
    norms = np.sqrt(np.real(np.diag(gram)))
    pairs = []
    for m in range(s.shape[1]):
        for n in range(m + 1, s.shape[1]):
            if abs(gram[n, m]) >= (1.0 - AMBIGUITY_TOL) * norms[m] * norms[n]:
                pairs.append((m, n, float(np.angle(gram[n, m]))))
    return pairs


def save_codebook(cb: Codebook, path) -> None:
    """Write the symbol matrix as text: one row per symbol period,
    whitespace-separated "re,im" pairs."""
    with open(path, "w") as fh:
        for row in cb.symbols:
            fh.write(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
            fh.write("\n")


def load_codebook(path) -> Codebook:
    """Read a symbol matrix written by save_codebook.  Only the symbols
    survive the round trip; the result has kind "custom"."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = []
            for tok in line.split():
                re_s, im_s = tok.split(",")
                row.append(complex(float(re_s), float(im_s)))
            rows.append(row)
    if not rows:
        raise ValueError(f"no codebook rows found in {path}")
    return Codebook(np.array(rows, dtype=complex), kind="custom")

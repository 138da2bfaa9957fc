"""Symbol mapping, MA/BC signal synthesis, brute-force ML detection, XOR coding.

Bit packets are numpy uint8 arrays of 0/1; symbol vectors are complex
arrays whose entries all belong to the active constellation. The ML
detector enumerates every candidate vector (K^length stays tiny for the
validated configurations), so no search-tree machinery is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class Constellation:
    """Unit-average-power symbol alphabet with its bit mapping.

    distance_classes counts the distinct symbol differences seen from one
    reference symbol; it drives the reduced metric enumeration.
    """

    name: str
    symbols: tuple[complex, ...]
    bits_per_symbol: int
    distance_classes: int

    def __post_init__(self):
        if len(self.symbols) != 2**self.bits_per_symbol:
            raise ValueError("constellation order must be 2**bits_per_symbol")
        power = np.mean(np.abs(np.asarray(self.symbols)) ** 2)
        if not np.isclose(power, 1.0, atol=1e-12):
            raise ValueError(f"average symbol power must be 1, got {power}")

    @property
    def order(self) -> int:
        return len(self.symbols)

    def points(self) -> np.ndarray:
        return np.asarray(self.symbols, dtype=complex)


def bpsk() -> Constellation:
    """BPSK with bit 0 -> +1, bit 1 -> -1."""
    return Constellation(name="bpsk", symbols=(1.0 + 0j, -1.0 + 0j), bits_per_symbol=1, distance_classes=1)


def qpsk() -> Constellation:
    """Unit-power QPSK; parameterized but not validated against reference curves."""
    s = 1.0 / np.sqrt(2.0)
    return Constellation(
        name="qpsk",
        symbols=(complex(s, s), complex(-s, s), complex(-s, -s), complex(s, -s)),
        bits_per_symbol=2,
        distance_classes=3,
    )


def constellation_by_name(name: str) -> Constellation:
    table = {"bpsk": bpsk, "qpsk": qpsk}
    try:
        return table[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown constellation {name!r}; choose from {sorted(table)}") from None


@dataclass(frozen=True)
class NoiseModel:
    """AWGN with per-entry total variance n0 (0 only in noise-off diagnostics)."""

    n0: float

    def __post_init__(self):
        if self.n0 < 0:
            raise ValueError(f"n0 must be >= 0, got {self.n0}")


def map_bits_to_symbols(bits: np.ndarray, c: Constellation) -> np.ndarray:
    """Map 0/1 bits (grouped MSB-first along the last axis) to symbols."""
    bits = np.asarray(bits)
    if bits.shape[-1] % c.bits_per_symbol != 0:
        raise ValueError(
            f"bit count {bits.shape[-1]} not divisible by bits_per_symbol {c.bits_per_symbol}"
        )
    groups = bits.reshape(*bits.shape[:-1], -1, c.bits_per_symbol)
    weights = 1 << np.arange(c.bits_per_symbol - 1, -1, -1)
    idx = np.tensordot(groups, weights, axes=([-1], [0]))
    return c.points()[idx]


def map_symbols_to_bits(symbols: np.ndarray, c: Constellation) -> np.ndarray:
    """Inverse of map_bits_to_symbols; rejects entries off the constellation."""
    symbols = np.asarray(symbols, dtype=complex)
    dist = np.abs(symbols[..., None] - c.points())
    idx = np.argmin(dist, axis=-1)
    if np.any(np.take_along_axis(dist, idx[..., None], axis=-1) > _MATCH_TOL):
        raise ValueError("symbol vector contains entries not in the constellation")
    shifts = np.arange(c.bits_per_symbol - 1, -1, -1)
    bits = (idx[..., None] >> shifts) & 1
    return bits.reshape(*symbols.shape[:-1], -1).astype(np.uint8)


def awgn_sample(dim: int, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """dim i.i.d. CN(0, n0) samples (real/imaginary parts n0/2 each)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return awgn_block((dim,), noise, rng)


def awgn_block(shape, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """awgn_sample generalized to an arbitrary array shape."""
    if noise.n0 == 0.0:
        return np.zeros(shape, dtype=complex)
    scale = np.sqrt(noise.n0 / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _checked_transmit(x, h, energy, m, noise, dim):
    x = np.asarray(x)
    noise = np.asarray(noise)
    if h.shape != (dim, dim) or x.shape[0] != dim or noise.shape[0] != dim:
        raise ValueError(
            f"dimension mismatch: H {h.shape}, x {x.shape}, noise {noise.shape}, expected {dim}"
        )
    return np.sqrt(energy / m) * (h @ x) + noise


def transmit_ma(x, h, energy: float, m: int, noise) -> np.ndarray:
    """Multiple-access slot: y = sqrt(E/M) H x + n with 2M-dimensional shapes."""
    return _checked_transmit(x, h, energy, m, noise, 2 * m)


def transmit_bc(v, h, energy: float, m: int, noise) -> np.ndarray:
    """Broadcast slot: y = sqrt(E/M) H v + n with M-dimensional shapes."""
    return _checked_transmit(v, h, energy, m, noise, m)


@lru_cache(maxsize=None)
def _candidates(c: Constellation, length: int) -> np.ndarray:
    """All K^length candidate symbol vectors in bit-lexicographic order, shape (K^length, length)."""
    total_bits = length * c.bits_per_symbol
    idx = np.arange(2**total_bits)
    bits = ((idx[:, None] >> np.arange(total_bits - 1, -1, -1)) & 1).astype(np.uint8)
    return map_bits_to_symbols(bits, c)


def ml_detect(
    y: np.ndarray,
    h_est: np.ndarray,
    energy: float,
    m: int,
    c: Constellation,
    length: int | None = None,
) -> np.ndarray:
    """Exhaustive ML detection: the candidate minimizing ||y - sqrt(E/M) H x'||^2.

    Ties resolve to the lowest candidate index (all-zero bits first), which
    only matters for degenerate channels.
    """
    y = np.asarray(y)
    if length is None:
        length = y.shape[0]
    if h_est.shape != (length, length) or y.shape[0] != length:
        raise ValueError(f"dimension mismatch: H {h_est.shape}, y {y.shape}, length {length}")
    block = ml_detect_block(y.reshape(length, 1), h_est, energy, m, c)
    return block[:, 0]


def ml_detect_block(
    y: np.ndarray,
    h_est: np.ndarray,
    energy: float,
    m: int,
    c: Constellation,
) -> np.ndarray:
    """Vectorized ml_detect over the columns of y, shape (length, count)."""
    length = y.shape[0]
    cand = _candidates(c, length)  # (ncand, length)
    tx = np.sqrt(energy / m) * (h_est @ cand.T)  # (length, ncand)
    resid = y[:, None, :] - tx[:, :, None]  # (length, ncand, count)
    cost = np.sum(resid.real**2 + resid.imag**2, axis=0)  # (ncand, count)
    best = np.argmin(cost, axis=0)
    return cand[best].T  # (length, count)


def xor_combine(b1: np.ndarray, b2: np.ndarray) -> np.ndarray:
    """Element-wise XOR of two equal-shape bit packets."""
    b1 = np.asarray(b1)
    b2 = np.asarray(b2)
    if b1.shape != b2.shape:
        raise ValueError(f"bit vector shapes differ: {b1.shape} vs {b2.shape}")
    return np.bitwise_xor(b1, b2)


def xor_recover(own: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Recover the partner's bits from the network-coded packet and one's own."""
    return xor_combine(own, v)

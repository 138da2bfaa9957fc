"""Rayleigh block-fading channel draws and their imperfect-CSI counterparts.

Every user-relay (UR) link is a 2M x 2M matrix (both users of a cluster
stacked towards one relay); every relay-user (RU) link is M x M. Channels
are redrawn independently every time slot and stay constant within the slot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Topology:
    """Network size: Z user clusters, N relays, M antennas per user (2M per relay)."""

    clusters: int
    relays: int
    antennas: int

    def __post_init__(self):
        if self.clusters < 1 or self.relays < 1 or self.antennas < 1:
            raise ValueError("topology counts must all be >= 1")


@dataclass(frozen=True)
class CsiErrorModel:
    """Additive channel-estimation error with variance sigma_e^2 = beta * E^(-alpha)."""

    beta: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    def error_variance(self, energy: float) -> float:
        return self.beta * energy ** (-self.alpha)


@dataclass(frozen=True)
class ChannelRealization:
    """All link matrices for one time slot.

    ur_*: shape (Z, N, 2M, 2M), user-pair to relay.
    ru_*: shape (Z, N, 2, M, M), relay to user k in {0, 1}.
    The *_est arrays are what selection and detection see; the *_true
    arrays are what the physical signal propagates through.
    """

    ur_true: np.ndarray
    ur_est: np.ndarray
    ru_true: np.ndarray
    ru_est: np.ndarray


def _complex_gaussian(shape, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Circularly-symmetric complex Gaussian entries, total variance per entry."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_channel(rows: int, cols: int, variance: float, rng: np.random.Generator) -> np.ndarray:
    """One rows x cols fading matrix with i.i.d. CN(0, variance) entries."""
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be >= 1")
    if variance <= 0:
        raise ValueError(f"variance must be > 0, got {variance}")
    return _complex_gaussian((rows, cols), variance, rng)


def apply_csi_error(
    h_true: np.ndarray,
    model: CsiErrorModel,
    energy: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Estimated channel h_true + h_err, h_err ~ CN(0, beta * E^-alpha) per entry.

    Always consumes the same number of rng draws regardless of beta so that
    perfect- and imperfect-CSI runs stay stream-aligned on every other draw.
    """
    if energy <= 0:
        raise ValueError(f"energy must be > 0, got {energy}")
    err = _complex_gaussian(h_true.shape, 1.0, rng)
    return h_true + np.sqrt(model.error_variance(energy)) * err


def draw_slot_channels(
    topology: Topology,
    variance: float,
    model: CsiErrorModel,
    energy: float,
    rng_true: np.random.Generator,
    rng_csi: np.random.Generator,
) -> ChannelRealization:
    """All Z*N UR and 2*Z*N RU matrices for one slot, plus CSI estimates.

    Separate generators for the true channels and the estimation error keep
    the physical realization identical across CSI settings.
    """
    z, n, m = topology.clusters, topology.relays, topology.antennas
    ur_true = _complex_gaussian((z, n, 2 * m, 2 * m), variance, rng_true)
    ru_true = _complex_gaussian((z, n, 2, m, m), variance, rng_true)
    sigma = np.sqrt(model.error_variance(energy))
    ur_est = ur_true + sigma * _complex_gaussian(ur_true.shape, 1.0, rng_csi)
    ru_est = ru_true + sigma * _complex_gaussian(ru_true.shape, 1.0, rng_csi)
    return ChannelRealization(ur_true=ur_true, ur_est=ur_est, ru_true=ru_true, ru_est=ru_est)

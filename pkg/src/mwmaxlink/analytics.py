"""Analytic side channel: pairwise error probability and per-slot sum rates.

These evaluate closed-form expressions on the true channel matrices of the
slot's selected links; nothing here feeds back into the protocol.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


def q_function(x: float) -> float:
    """Standard normal tail probability Q(x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def pep_conditional(b_prime: float, energy: float, n0: float, m: int) -> float:
    """Pairwise error probability Q(sqrt(E b' / (2 N0 M))) given the channel."""
    if b_prime < 0:
        raise ValueError("b_prime must be >= 0")
    return q_function(math.sqrt(energy * b_prime / (2.0 * n0 * m)))


def pep_worst_case(b_prime_min: float, energy: float, n0: float, m: int) -> float:
    """Two-hop worst-case approximation 1 - (1 - Q(.))^2 at the minimum distance."""
    q = pep_conditional(b_prime_min, energy, n0, m)
    return 1.0 - (1.0 - q) ** 2


def _half_logdet_rate(h: np.ndarray, energy: float, m: int, n0: float) -> float:
    h = np.asarray(h)
    gram = (energy / (m * n0)) * (h @ h.conj().T)
    sign, logdet = np.linalg.slogdet(np.eye(h.shape[0]) + gram)
    return 0.5 * logdet / math.log(2.0)


def sumrate_ur_slot(h_true: np.ndarray, energy: float, m: int, n0: float) -> float:
    """Slot rate 0.5 log2 det(I + (E/M) H H^H / N0) for a 2Mx2M MA channel."""
    return _half_logdet_rate(h_true, energy, m, n0)


def sumrate_ru_slot(
    h1_true: np.ndarray,
    h2_true: np.ndarray,
    energy: float,
    m: int,
    n0: float,
) -> tuple[float, float]:
    """Per-user slot rates for the MxM broadcast channels to both users."""
    return (
        _half_logdet_rate(h1_true, energy, m, n0),
        _half_logdet_rate(h2_true, energy, m, n0),
    )


def average_sum_rate(records: Iterable) -> float:
    """Average per-slot rate over a run: (sum UR rates + sum RU pair rates) / slots.

    Accepts SlotRecord-like objects (their sum_rate_contrib is used) or
    plain per-slot contribution values.
    """
    values = [getattr(r, "sum_rate_contrib", r) for r in records]
    if not values:
        raise ValueError("cannot average an empty slot list")
    return float(np.mean(values))


def df_capacity(i_ur: float, i_ru: float) -> float:
    """Decode-and-forward bound: half the bottleneck mutual information."""
    if i_ur < 0 or i_ru < 0:
        raise ValueError("mutual informations must be >= 0")
    return 0.5 * min(i_ur, i_ru)

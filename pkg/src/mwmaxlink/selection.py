"""Max-min distance relay/cluster selection: metric chain, mode rule, complexity.

The per-link metric is (E/M) * min_d ||H_est d||^2 over a reduced set of
candidate-difference vectors. The protocol keeps, per mode, the smallest
metric of each link, the best relay of each cluster, and the best cluster
overall, then compares the two winners against the calibrated threshold C
to pick MA or BC for the slot.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .channel import CsiErrorModel, Topology, _complex_gaussian
from .phy import Constellation

MODE_MA = "MA"
MODE_BC = "BC"


class NoFeasibleCandidateError(RuntimeError):
    """Raised when a selection is requested over an empty candidate set."""


class DegenerateSlotError(RuntimeError):
    """Both mode metrics are exactly zero; the slot cannot be ranked."""


@dataclass
class OpCounter:
    """Running totals of the additions/multiplications spent on selection metrics."""

    additions: int = 0
    multiplications: int = 0

    def charge(self, m: int, n_vectors: int, evaluations: int = 1) -> None:
        """Account for `evaluations` min-metric computations over n_vectors diffs."""
        self.additions += evaluations * m * (n_vectors - 1)
        self.multiplications += evaluations * m * n_vectors

    def copy(self) -> "OpCounter":
        return OpCounter(self.additions, self.multiplications)


@dataclass(frozen=True)
class DifferenceSet:
    """Reduced set of candidate-difference vectors, deduplicated up to global sign."""

    vectors: np.ndarray  # (count, m_prime) complex
    m_prime: int

    def __len__(self) -> int:
        return self.vectors.shape[0]


def metric_count(c: Constellation, m_prime: int) -> int:
    """Number of distance evaluations per channel matrix: sum_i 2^(i-1) W^i C(m', i)."""
    w = c.distance_classes
    return sum(2 ** (i - 1) * w**i * comb(m_prime, i) for i in range(1, m_prime + 1))


@lru_cache(maxsize=None)
def _entry_classes(c: Constellation) -> tuple[complex, ...]:
    """Distinct nonzero symbol differences seen from the first constellation point."""
    ref = c.symbols[0]
    classes: list[complex] = []
    for s in c.symbols[1:]:
        d = complex(ref - s)
        if not any(np.isclose(d, k) or np.isclose(d, -k) for k in classes):
            classes.append(d)
    return tuple(classes)


@lru_cache(maxsize=None)
def enumerate_difference_vectors(c: Constellation, m_prime: int) -> DifferenceSet:
    """Build the reduced difference set for vectors of m_prime symbols.

    Each vector picks a support of nonzero positions, assigns every
    position one per-entry difference class, and flips signs on all but
    the first nonzero entry (the global sign carries no distance
    information). The cardinality matches metric_count exactly.
    """
    if m_prime < 1:
        raise ValueError("m_prime must be >= 1")
    classes = _entry_classes(c)
    if len(classes) != c.distance_classes:
        raise ValueError(
            f"constellation declares {c.distance_classes} distance classes, found {len(classes)}"
        )
    out = []
    for support_size in range(1, m_prime + 1):
        for support in itertools.combinations(range(m_prime), support_size):
            for values in itertools.product(classes, repeat=support_size):
                for signs in itertools.product((1.0, -1.0), repeat=support_size - 1):
                    vec = np.zeros(m_prime, dtype=complex)
                    vec[support[0]] = values[0]
                    for pos, val, sign in zip(support[1:], values[1:], signs):
                        vec[pos] = sign * val
                    out.append(vec)
    vectors = np.asarray(out)
    assert vectors.shape[0] == metric_count(c, m_prime)
    return DifferenceSet(vectors=vectors, m_prime=m_prime)


def min_distance_metric(
    h_est: np.ndarray,
    energy: float,
    m: int,
    diffs: DifferenceSet,
    counter: OpCounter | None = None,
) -> np.ndarray | float:
    """(E/M) * min over difference vectors of ||H d||^2.

    Accepts a single (d, d) matrix or any stack (..., d, d) of them; the
    batched form evaluates one metric per leading index. Counter charges
    follow the aggregate complexity accounting, one evaluation per matrix.
    """
    h_est = np.asarray(h_est)
    d = diffs.m_prime
    if h_est.shape[-2:] != (d, d):
        raise ValueError(f"H trailing dims {h_est.shape[-2:]} do not match m_prime {d}")
    prod = h_est @ diffs.vectors.T  # (..., d, count)
    norms = np.sum(prod.real**2 + prod.imag**2, axis=-2)  # (..., count)
    metric = (energy / m) * np.min(norms, axis=-1)
    if counter is not None:
        counter.charge(m, len(diffs), evaluations=int(np.prod(h_est.shape[:-2], dtype=int)))
    return metric if metric.ndim else float(metric)


@dataclass
class MetricTable:
    """Per-(cluster, relay) folded minimum metrics for the two modes.

    Only feasibility-filtered candidates are present: ur holds MA
    candidates (buffer not full), ru holds BC candidates (buffer not
    empty) already folded over the two users.
    """

    ur: dict[tuple[int, int], float] = field(default_factory=dict)
    ru: dict[tuple[int, int], float] = field(default_factory=dict)

    def maxmin_ur(self) -> float:
        return max(self.ur.values())

    def maxmin_ru(self) -> float:
        return max(self.ru.values())


def _argmax_lowest_relay(entries: dict[tuple[int, int], float]) -> tuple[int, int, float]:
    if not entries:
        raise NoFeasibleCandidateError("no feasible (cluster, relay) candidates")
    # Highest metric wins; ties fall to the lowest relay index, then cluster.
    best_z, best_n = min(entries, key=lambda zn: (-entries[zn], zn[1], zn[0]))
    return best_z, best_n, entries[(best_z, best_n)]


def select_ma(table: MetricTable) -> tuple[int, int, float]:
    """Best (cluster, relay, metric) for the multiple-access mode."""
    return _argmax_lowest_relay(table.ur)


def select_bc(table: MetricTable) -> tuple[int, int, float]:
    """Best (cluster, relay, metric) for the broadcast mode."""
    return _argmax_lowest_relay(table.ru)


def decide_mode(b_ur: float, b_ru: float, c_threshold: float) -> str:
    """MA when b_ur / b_ru >= C, else BC; both metrics zero is degenerate."""
    if b_ru == 0.0:
        if b_ur == 0.0:
            raise DegenerateSlotError("both mode metrics are zero")
        return MODE_MA
    return MODE_MA if b_ur / b_ru >= c_threshold else MODE_BC


def twmaxmin_select(table: MetricTable) -> int:
    """Single-cluster baseline: argmax over relays of min(UR, RU) metrics."""
    relays = sorted(n for (_, n) in table.ur)
    folded = [min(table.ur[(0, n)], table.ru[(0, n)]) for n in relays]
    return relays[int(np.argmax(folded))]  # argmax takes the first max: lowest index


@dataclass(frozen=True)
class SelectionDecision:
    mode: str
    cluster: int
    relay: int
    metric: float
    threshold_c: float


def sweep_metric_tables(
    realization_ur_est: np.ndarray,
    realization_ru_est: np.ndarray,
    energy: float,
    m: int,
    diffs_ma: DifferenceSet,
    diffs_bc: DifferenceSet,
    counter: OpCounter | None = None,
    ma_clusters: list[int] | None = None,
    bc_clusters: list[int] | None = None,
) -> MetricTable:
    """Metric sweep over the feasibility-filtered clusters of one realization.

    realization_ur_est: (Z, N, 2M, 2M); realization_ru_est: (Z, N, 2, M, M).
    """
    z_total = realization_ur_est.shape[0]
    ma_clusters = list(range(z_total)) if ma_clusters is None else ma_clusters
    bc_clusters = list(range(z_total)) if bc_clusters is None else bc_clusters
    table = MetricTable()
    if ma_clusters:
        ur = min_distance_metric(realization_ur_est[ma_clusters], energy, m, diffs_ma, counter)
        for i, z in enumerate(ma_clusters):
            for n in range(ur.shape[1]):
                table.ur[(z, n)] = float(ur[i, n])
    if bc_clusters:
        per_user = min_distance_metric(realization_ru_est[bc_clusters], energy, m, diffs_bc, counter)
        folded = np.min(per_user, axis=-1)  # min over the two users
        for i, z in enumerate(bc_clusters):
            for n in range(folded.shape[1]):
                table.ru[(z, n)] = float(folded[i, n])
    return table


def calibrate_c(
    topology: Topology,
    energy: float,
    constellation: Constellation,
    csi: CsiErrorModel,
    n_cal: int,
    rng: np.random.Generator,
    variance: float = 1.0,
) -> float:
    """Monte Carlo estimate of C = E[max-min UR metric] / E[max-min RU metric].

    Draws n_cal independent realizations, evaluates both winners on the
    estimated channels (mirroring what the live protocol ranks), and
    returns the ratio of sample means.
    """
    if n_cal < 1:
        raise ValueError("n_cal must be >= 1")
    ur_samples, ru_samples = calibration_samples(
        topology, energy, constellation, csi, n_cal, rng, variance
    )
    mean_ru = float(np.mean(ru_samples))
    if mean_ru == 0.0:
        raise RuntimeError("calibration failed: RU metric sample mean is zero")
    return float(np.mean(ur_samples)) / mean_ru


def calibration_samples(
    topology: Topology,
    energy: float,
    constellation: Constellation,
    csi: CsiErrorModel,
    n_cal: int,
    rng: np.random.Generator,
    variance: float = 1.0,
    chunk: int = 256,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-draw (max-min UR, max-min RU) metric samples used by calibrate_c.

    Only the estimated channels are ranked, and true + independent error is
    again complex Gaussian, so the estimates are drawn directly with the
    summed variance and realizations are processed in batches.
    """
    z, n, m = topology.clusters, topology.relays, topology.antennas
    diffs_ma = enumerate_difference_vectors(constellation, 2 * m)
    diffs_bc = enumerate_difference_vectors(constellation, m)
    est_var = variance + csi.error_variance(energy)
    ur_samples = np.empty(n_cal)
    ru_samples = np.empty(n_cal)
    done = 0
    while done < n_cal:
        b = min(chunk, n_cal - done)
        ur_est = _complex_gaussian((b, z, n, 2 * m, 2 * m), est_var, rng)
        ru_est = _complex_gaussian((b, z, n, 2, m, m), est_var, rng)
        ur = min_distance_metric(ur_est, energy, m, diffs_ma)
        ru = np.min(min_distance_metric(ru_est, energy, m, diffs_bc), axis=-1)
        ur_samples[done : done + b] = ur.reshape(b, -1).max(axis=1)
        ru_samples[done : done + b] = ru.reshape(b, -1).max(axis=1)
        done += b
    return ur_samples, ru_samples


def complexity_counts(z: int, n: int, m: int, c: Constellation, scheme: str) -> OpCounter:
    """Per-slot additions/multiplications of the selection stage.

    MW-Max-Link (and TW-Max-Link with z=1) sweeps every cluster each slot;
    the TW-Max-Min baseline amortizes one sweep over its two-slot frame.
    """
    x_ma = metric_count(c, 2 * m)
    x_bc = metric_count(c, m)
    if scheme in ("mw", "mw-max-link", "tw-max-link"):
        factor = z * n * m
    elif scheme in ("tw-max-min", "twmaxmin"):
        factor = n * m / 2
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    additions = factor * (2 * x_bc + x_ma - 3)
    multiplications = factor * (2 * x_bc + x_ma)
    return OpCounter(additions=int(additions), multiplications=int(multiplications))

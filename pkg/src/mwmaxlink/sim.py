"""Time-slot protocol engine and Monte Carlo experiment drivers.

Each slot the engine draws fresh channels, sweeps the selection metrics
over the feasibility-filtered clusters, picks MA or BC, and runs the
chosen transmission end to end. Selection and detection only ever see the
estimated channels; the transmitted signal propagates through the true
ones. BER counts bits recovered at the users in BC slots against the
stored ground truth, so relay decoding errors surface once the corrupted
network-coded packet is delivered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import analytics
from .buffers import RelayBufferSystem, StoredPacket, initialize_half_full
from .channel import ChannelRealization, CsiErrorModel, Topology, draw_slot_channels
from .phy import (
    Constellation,
    NoiseModel,
    awgn_block,
    bpsk,
    map_bits_to_symbols,
    map_symbols_to_bits,
    ml_detect_block,
    transmit_bc,
    transmit_ma,
    xor_combine,
    xor_recover,
)
from .selection import (
    MODE_BC,
    MODE_MA,
    DegenerateSlotError,
    DifferenceSet,
    MetricTable,
    OpCounter,
    SelectionDecision,
    calibrate_c,
    decide_mode,
    enumerate_difference_vectors,
    min_distance_metric,
    select_bc,
    select_ma,
    sweep_metric_tables,
    twmaxmin_select,
)

_MAX_REDRAWS = 100


class Scheme(str, Enum):
    MW_MAX_LINK = "mw-max-link"
    TW_MAX_LINK = "tw-max-link"
    TW_MAX_MIN = "tw-max-min"


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """One simulation cell: scheme, topology, link budget, and run length.

    total_packets counts network-coded packets delivered to the users
    (each BC slot delivers M of them). energy is the per-slot transmit
    energy E; the transmit SNR is E/n0.
    """

    scheme: Scheme
    Z: int
    N: int
    M: int
    J: int = 6
    energy: float = 1.0
    n0: float = 1.0
    constellation: Constellation = bpsk()
    csi: CsiErrorModel = CsiErrorModel()
    symbols_per_packet: int = 100
    total_packets: int = 1000
    seed: int = 1
    n_cal: int = 10_000
    noise_off: bool = False
    channel_variance: float = 1.0

    def __post_init__(self):
        if self.scheme in (Scheme.TW_MAX_LINK, Scheme.TW_MAX_MIN) and self.Z != 1:
            raise ConfigurationError(f"{self.scheme.value} requires Z=1, got Z={self.Z}")
        if min(self.Z, self.N, self.M, self.J) < 1:
            raise ConfigurationError("Z, N, M, J must all be >= 1")
        if self.energy <= 0 or self.n0 <= 0:
            raise ConfigurationError("energy and n0 must be > 0")
        if self.total_packets < 1 or self.symbols_per_packet < 1 or self.n_cal < 1:
            raise ConfigurationError("total_packets, symbols_per_packet, n_cal must be >= 1")
        if self.channel_variance <= 0:
            raise ConfigurationError("channel_variance must be > 0")

    @property
    def topology(self) -> Topology:
        return Topology(clusters=self.Z, relays=self.N, antennas=self.M)

    @property
    def bits_per_packet(self) -> int:
        return self.symbols_per_packet * self.constellation.bits_per_symbol

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.energy / self.n0)


@dataclass(frozen=True)
class SlotRecord:
    """Per-slot trace entry.

    selected_metric is the winning estimated-channel metric; b_prime_min
    is the selected link's normalized minimum distance recomputed on the
    true channels, which feeds the worst-case PEP.
    """

    slot: int
    mode: str
    cluster: int
    relay: int
    selected_metric: float
    b_prime_min: float
    pep_wc: float
    sum_rate_contrib: float
    bit_errors_delivered: int
    bits_delivered: int


@dataclass(frozen=True)
class RunResult:
    """Aggregates of one simulation cell."""

    ber: float
    avg_pep_wc: float
    avg_sum_rate: float
    ma_fraction: float
    slots: int
    bits_delivered: int
    bit_errors: int
    op_counter: OpCounter
    calibrated_c: float
    avg_occupancy: float
    max_occupancy: int


@dataclass
class RunStreams:
    """Independent generators so CSI settings never shift the physical draws."""

    chan: np.random.Generator
    csi: np.random.Generator
    data: np.random.Generator
    cal: np.random.Generator


def make_streams(seed: int) -> RunStreams:
    chan, csi, data, cal = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(4))
    return RunStreams(chan=chan, csi=csi, data=data, cal=cal)


@dataclass
class MaxLinkState:
    """Mutable per-run state of the MW/TW-Max-Link engine."""

    cfg: SimConfig
    streams: RunStreams
    c_threshold: float
    buffers: RelayBufferSystem
    retained: list[dict[int, tuple[np.ndarray, np.ndarray]]]
    next_seq: list[int]
    diffs_ma: DifferenceSet
    diffs_bc: DifferenceSet
    counter: OpCounter = field(default_factory=OpCounter)
    slot_index: int = 0


def _new_maxlink_state(cfg: SimConfig, streams: RunStreams, c_threshold: float) -> MaxLinkState:
    buffers = RelayBufferSystem(cfg.Z, cfg.J)
    init_packets = initialize_half_full(buffers, cfg.M, cfg.bits_per_packet, streams.data)
    retained: list[dict[int, tuple[np.ndarray, np.ndarray]]] = [{} for _ in range(cfg.Z)]
    next_seq = [0] * cfg.Z
    for p in init_packets:
        retained[p.cluster][p.seq] = (p.truth_x1, p.truth_x2)
        next_seq[p.cluster] = p.seq + 1
    return MaxLinkState(
        cfg=cfg,
        streams=streams,
        c_threshold=c_threshold,
        buffers=buffers,
        retained=retained,
        next_seq=next_seq,
        diffs_ma=enumerate_difference_vectors(cfg.constellation, 2 * cfg.M),
        diffs_bc=enumerate_difference_vectors(cfg.constellation, cfg.M),
    )


def _noise(cfg: SimConfig, shape, rng) -> np.ndarray:
    model = NoiseModel(0.0 if cfg.noise_off else cfg.n0)
    return awgn_block(shape, model, rng)


def _run_ma_transmission(
    state: MaxLinkState, real: ChannelRealization, z: int, n: int
) -> StoredPacket:
    """Both users transmit fresh packets; the relay decodes and network-codes."""
    cfg = state.cfg
    x1 = state.streams.data.integers(0, 2, size=(cfg.M, cfg.bits_per_packet), dtype=np.uint8)
    x2 = state.streams.data.integers(0, 2, size=(cfg.M, cfg.bits_per_packet), dtype=np.uint8)
    stacked = np.vstack(
        [map_bits_to_symbols(x1, cfg.constellation), map_bits_to_symbols(x2, cfg.constellation)]
    )
    noise = _noise(cfg, stacked.shape, state.streams.data)
    y = transmit_ma(stacked, real.ur_true[z, n], cfg.energy, cfg.M, noise)
    detected = ml_detect_block(y, real.ur_est[z, n], cfg.energy, cfg.M, cfg.constellation)
    bits = map_symbols_to_bits(detected, cfg.constellation)
    v = xor_combine(bits[: cfg.M], bits[cfg.M :])
    seq = state.next_seq[z]
    state.next_seq[z] += 1
    packet = StoredPacket(cluster=z, seq=seq, v_bits=v, truth_x1=x1, truth_x2=x2, sub_packets=cfg.M)
    state.buffers.store(z, packet)
    state.retained[z][seq] = (x1, x2)
    return packet


def _run_bc_transmission(
    state: MaxLinkState, real: ChannelRealization, z: int, n: int
) -> tuple[int, int]:
    """The relay broadcasts the head packet; both users recover via XOR."""
    cfg = state.cfg
    packet = state.buffers.extract(z)
    v_symbols = map_bits_to_symbols(packet.v_bits, cfg.constellation)
    v_hat = []
    for k in range(2):
        noise = _noise(cfg, v_symbols.shape, state.streams.data)
        y = transmit_bc(v_symbols, real.ru_true[z, n, k], cfg.energy, cfg.M, noise)
        detected = ml_detect_block(y, real.ru_est[z, n, k], cfg.energy, cfg.M, cfg.constellation)
        v_hat.append(map_symbols_to_bits(detected, cfg.constellation))
    x1_own, x2_own = state.retained[z].pop(packet.seq)
    recovered_x2 = xor_recover(x1_own, v_hat[0])  # at user 1
    recovered_x1 = xor_recover(x2_own, v_hat[1])  # at user 2
    errors = int(np.count_nonzero(recovered_x2 != packet.truth_x2)) + int(
        np.count_nonzero(recovered_x1 != packet.truth_x1)
    )
    return errors, 2 * cfg.M * cfg.bits_per_packet


def _true_channel_analytics(
    cfg: SimConfig,
    real: ChannelRealization,
    mode: str,
    z: int,
    n: int,
    diffs_ma: DifferenceSet,
    diffs_bc: DifferenceSet,
) -> tuple[float, float, float]:
    """(b_prime_min, worst-case PEP, sum-rate contribution) of the selected link."""
    if mode == MODE_MA:
        b_true = min_distance_metric(real.ur_true[z, n], cfg.energy, cfg.M, diffs_ma)
        rate = analytics.sumrate_ur_slot(real.ur_true[z, n], cfg.energy, cfg.M, cfg.n0)
    else:
        per_user = min_distance_metric(real.ru_true[z, n], cfg.energy, cfg.M, diffs_bc)
        b_true = float(np.min(per_user))
        rate = sum(
            analytics.sumrate_ru_slot(
                real.ru_true[z, n, 0], real.ru_true[z, n, 1], cfg.energy, cfg.M, cfg.n0
            )
        )
    b_prime = b_true * cfg.M / cfg.energy
    pep = analytics.pep_worst_case(b_prime, cfg.energy, cfg.n0, cfg.M)
    return b_prime, pep, rate


def run_slot(state: MaxLinkState) -> SlotRecord:
    """One MW/TW-Max-Link time slot: sweep, decide, transmit, account."""
    cfg = state.cfg
    ma_clusters = [z for z in range(cfg.Z) if state.buffers.feasible_ma(z)]
    bc_clusters = [z for z in range(cfg.Z) if state.buffers.feasible_bc(z)]
    if not ma_clusters and not bc_clusters:
        raise RuntimeError("no feasible mode: buffers simultaneously full and empty")

    for _ in range(_MAX_REDRAWS):
        real = draw_slot_channels(
            cfg.topology,
            cfg.channel_variance,
            cfg.csi,
            cfg.energy,
            state.streams.chan,
            state.streams.csi,
        )
        table = sweep_metric_tables(
            real.ur_est,
            real.ru_est,
            cfg.energy,
            cfg.M,
            state.diffs_ma,
            state.diffs_bc,
            state.counter,
            ma_clusters,
            bc_clusters,
        )
        if not ma_clusters:
            mode = MODE_BC
        elif not bc_clusters:
            mode = MODE_MA
        else:
            try:
                mode = decide_mode(table.maxmin_ur(), table.maxmin_ru(), state.c_threshold)
            except DegenerateSlotError:
                continue  # probability-zero slot: redraw the channels
        break
    else:
        raise RuntimeError(f"degenerate channels for {_MAX_REDRAWS} consecutive redraws")

    z, n, metric = select_ma(table) if mode == MODE_MA else select_bc(table)
    decision = SelectionDecision(
        mode=mode, cluster=z, relay=n, metric=metric, threshold_c=state.c_threshold
    )
    if decision.mode == MODE_MA:
        _run_ma_transmission(state, real, decision.cluster, decision.relay)
        errors, bits = 0, 0
    else:
        errors, bits = _run_bc_transmission(state, real, decision.cluster, decision.relay)
    b_prime, pep, rate = _true_channel_analytics(
        cfg, real, decision.mode, decision.cluster, decision.relay, state.diffs_ma, state.diffs_bc
    )
    record = SlotRecord(
        slot=state.slot_index,
        mode=decision.mode,
        cluster=decision.cluster,
        relay=decision.relay,
        selected_metric=decision.metric,
        b_prime_min=b_prime,
        pep_wc=pep,
        sum_rate_contrib=rate,
        bit_errors_delivered=errors,
        bits_delivered=bits,
    )
    state.slot_index += 1
    return record


@dataclass
class _Aggregator:
    slots: int = 0
    ma_slots: int = 0
    errors: int = 0
    bits: int = 0
    pep_sum: float = 0.0
    rate_sum: float = 0.0
    occupancy_sum: float = 0.0
    max_occupancy: int = 0

    def add(self, record: SlotRecord, occupancies: list[int]) -> None:
        self.slots += 1
        self.ma_slots += record.mode == MODE_MA
        self.errors += record.bit_errors_delivered
        self.bits += record.bits_delivered
        self.pep_sum += record.pep_wc
        self.rate_sum += record.sum_rate_contrib
        self.occupancy_sum += float(np.mean(occupancies))
        self.max_occupancy = max(self.max_occupancy, max(occupancies))

    def result(self, counter: OpCounter, calibrated_c: float) -> RunResult:
        return RunResult(
            ber=self.errors / self.bits if self.bits else 0.0,
            avg_pep_wc=self.pep_sum / self.slots,
            avg_sum_rate=self.rate_sum / self.slots,
            ma_fraction=self.ma_slots / self.slots,
            slots=self.slots,
            bits_delivered=self.bits,
            bit_errors=self.errors,
            op_counter=counter.copy(),
            calibrated_c=calibrated_c,
            avg_occupancy=self.occupancy_sum / self.slots,
            max_occupancy=self.max_occupancy,
        )


def _run_maxlink(cfg: SimConfig, streams: RunStreams, collect):
    c_threshold = calibrate_c(
        cfg.topology,
        cfg.energy,
        cfg.constellation,
        cfg.csi,
        cfg.n_cal,
        streams.cal,
        cfg.channel_variance,
    )
    state = _new_maxlink_state(cfg, streams, c_threshold)
    agg = _Aggregator()
    delivered = 0
    slot_cap = 4 * (math.ceil(cfg.total_packets / cfg.M) + cfg.Z * cfg.J) + 64
    while delivered < cfg.total_packets:
        if agg.slots >= slot_cap:
            raise RuntimeError("slot budget exhausted before delivering all packets")
        record = run_slot(state)
        if record.mode == MODE_BC:
            delivered += cfg.M
        agg.add(record, state.buffers.occupancies())
        if collect is not None:
            collect.append(record)
    return agg.result(state.counter, c_threshold)


def run_twmaxmin_frame(
    cfg: SimConfig,
    real: ChannelRealization,
    streams: RunStreams,
    counter: OpCounter,
    slot_index: int,
    diffs_ma: DifferenceSet,
    diffs_bc: DifferenceSet,
) -> tuple[SlotRecord, SlotRecord]:
    """One prefixed MA+BC frame of the baseline on a single held realization."""
    table = sweep_metric_tables(
        real.ur_est, real.ru_est, cfg.energy, cfg.M, diffs_ma, diffs_bc, counter
    )
    n = twmaxmin_select(table)
    folded = min(table.ur[(0, n)], table.ru[(0, n)])

    # MA half: users transmit, the relay decodes and network-codes.
    x1 = streams.data.integers(0, 2, size=(cfg.M, cfg.bits_per_packet), dtype=np.uint8)
    x2 = streams.data.integers(0, 2, size=(cfg.M, cfg.bits_per_packet), dtype=np.uint8)
    stacked = np.vstack(
        [map_bits_to_symbols(x1, cfg.constellation), map_bits_to_symbols(x2, cfg.constellation)]
    )
    y = transmit_ma(stacked, real.ur_true[0, n], cfg.energy, cfg.M, _noise(cfg, stacked.shape, streams.data))
    detected = ml_detect_block(y, real.ur_est[0, n], cfg.energy, cfg.M, cfg.constellation)
    bits_hat = map_symbols_to_bits(detected, cfg.constellation)
    v = xor_combine(bits_hat[: cfg.M], bits_hat[cfg.M :])
    b_prime, pep, rate = _true_channel_analytics(cfg, real, MODE_MA, 0, n, diffs_ma, diffs_bc)
    ma_record = SlotRecord(
        slot=slot_index,
        mode=MODE_MA,
        cluster=0,
        relay=n,
        selected_metric=folded,
        b_prime_min=b_prime,
        pep_wc=pep,
        sum_rate_contrib=rate,
        bit_errors_delivered=0,
        bits_delivered=0,
    )

    # BC half: the same relay forwards over the same held channels, fresh noise.
    v_symbols = map_bits_to_symbols(v, cfg.constellation)
    v_hat = []
    for k in range(2):
        yk = transmit_bc(v_symbols, real.ru_true[0, n, k], cfg.energy, cfg.M, _noise(cfg, v_symbols.shape, streams.data))
        det_k = ml_detect_block(yk, real.ru_est[0, n, k], cfg.energy, cfg.M, cfg.constellation)
        v_hat.append(map_symbols_to_bits(det_k, cfg.constellation))
    errors = int(np.count_nonzero(xor_recover(x1, v_hat[0]) != x2)) + int(
        np.count_nonzero(xor_recover(x2, v_hat[1]) != x1)
    )
    b_prime_bc, pep_bc, rate_bc = _true_channel_analytics(
        cfg, real, MODE_BC, 0, n, diffs_ma, diffs_bc
    )
    bc_record = SlotRecord(
        slot=slot_index + 1,
        mode=MODE_BC,
        cluster=0,
        relay=n,
        selected_metric=folded,
        b_prime_min=b_prime_bc,
        pep_wc=pep_bc,
        sum_rate_contrib=rate_bc,
        bit_errors_delivered=errors,
        bits_delivered=2 * cfg.M * cfg.bits_per_packet,
    )
    return ma_record, bc_record


def run_baseline_twmaxmin(cfg: SimConfig, streams: RunStreams, collect=None) -> RunResult:
    """Prefixed two-slot schedule: every frame is one MA slot then one BC slot."""
    agg = _Aggregator()
    counter = OpCounter()
    diffs_ma = enumerate_difference_vectors(cfg.constellation, 2 * cfg.M)
    diffs_bc = enumerate_difference_vectors(cfg.constellation, cfg.M)
    delivered = 0
    slot_index = 0
    while delivered < cfg.total_packets:
        real = draw_slot_channels(
            cfg.topology,
            cfg.channel_variance,
            cfg.csi,
            cfg.energy,
            streams.chan,
            streams.csi,
        )
        ma_record, bc_record = run_twmaxmin_frame(
            cfg, real, streams, counter, slot_index, diffs_ma, diffs_bc
        )
        slot_index += 2
        delivered += cfg.M
        agg.add(ma_record, [1])  # the holding register carries the frame's packet
        agg.add(bc_record, [0])
        if collect is not None:
            collect.extend([ma_record, bc_record])
    return agg.result(counter, 0.0)


def run_simulation(cfg: SimConfig, return_records: bool = False):
    """Run one simulation cell to completion; deterministic given cfg.seed."""
    streams = make_streams(cfg.seed)
    records: list[SlotRecord] | None = [] if return_records else None
    if cfg.scheme is Scheme.TW_MAX_MIN:
        result = run_baseline_twmaxmin(cfg, streams, records)
    else:
        result = _run_maxlink(cfg, streams, records)
    return (result, records) if return_records else result


def config_for_snr(cfg: SimConfig, snr_db: float) -> SimConfig:
    """The same cell with energy set to reach the requested transmit SNR."""
    return replace(cfg, energy=cfg.n0 * 10.0 ** (snr_db / 10.0))


def snr_sweep(cfg: SimConfig, snr_grid_db: list[float]) -> list[tuple[SimConfig, RunResult]]:
    """One run per grid point, in grid order."""
    if not snr_grid_db:
        raise ValueError("SNR grid must be non-empty")
    out = []
    for snr_db in snr_grid_db:
        point = config_for_snr(cfg, snr_db)
        out.append((point, run_simulation(point)))
    return out

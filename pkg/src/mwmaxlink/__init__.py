"""Monte Carlo simulator for buffer-aided multi-way relay selection.

Modules: channel (fading + imperfect CSI), phy (modulation, ML detection,
XOR network coding), selection (max-min distance metric chain), buffers
(per-cluster FIFO queues), sim (slot-level protocol engines), analytics
(PEP and sum-rate formulas), cli (sweeps to CSV).
"""

from .channel import ChannelRealization, CsiErrorModel, Topology, draw_channel, draw_slot_channels
from .phy import Constellation, NoiseModel, bpsk, ml_detect, qpsk
from .selection import (
    DifferenceSet,
    MetricTable,
    OpCounter,
    calibrate_c,
    complexity_counts,
    decide_mode,
    enumerate_difference_vectors,
    metric_count,
    min_distance_metric,
)
from .sim import RunResult, Scheme, SimConfig, SlotRecord, config_for_snr, run_simulation, snr_sweep

__all__ = [
    "ChannelRealization",
    "Constellation",
    "CsiErrorModel",
    "DifferenceSet",
    "MetricTable",
    "NoiseModel",
    "OpCounter",
    "RunResult",
    "Scheme",
    "SimConfig",
    "SlotRecord",
    "Topology",
    "bpsk",
    "calibrate_c",
    "complexity_counts",
    "config_for_snr",
    "decide_mode",
    "draw_channel",
    "draw_slot_channels",
    "enumerate_difference_vectors",
    "metric_count",
    "min_distance_metric",
    "ml_detect",
    "qpsk",
    "run_simulation",
    "snr_sweep",
]

__version__ = "0.1.0"

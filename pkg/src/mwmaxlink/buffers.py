"""Shared logical FIFO buffers holding network-coded packets, one per cluster.

Whichever relay wins the broadcast slot transmits the head packet of the
selected cluster's queue, so the queues are centrally coordinated rather
than pinned to a physical relay. Ground-truth bits ride along for
end-to-end error accounting only; no receiver logic may read them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .phy import xor_combine


class BufferFullError(RuntimeError):
    """Store on a full queue: the feasibility filter upstream is broken."""


class BufferEmptyError(RuntimeError):
    """Extract on an empty queue."""


@dataclass
class StoredPacket:
    """One slot's worth of network-coded payload (M sub-packets).

    v_bits may contain relay decoding errors; truth_x1/truth_x2 are the
    bits the users actually transmitted and exist for auditing only.
    """

    cluster: int
    seq: int
    v_bits: np.ndarray
    truth_x1: np.ndarray
    truth_x2: np.ndarray
    sub_packets: int


class RelayBufferSystem:
    """Z FIFO queues of capacity J with store/extract bookkeeping."""

    def __init__(self, clusters: int, capacity: int):
        if clusters < 1 or capacity < 1:
            raise ValueError("need at least one buffer with capacity >= 1")
        self.capacity = capacity
        self._queues: list[deque[StoredPacket]] = [deque() for _ in range(clusters)]
        self.stores = [0] * clusters
        self.extracts = [0] * clusters

    @property
    def clusters(self) -> int:
        return len(self._queues)

    def occupancy(self, z: int) -> int:
        return len(self._queues[z])

    def occupancies(self) -> list[int]:
        return [len(q) for q in self._queues]

    def feasible_ma(self, z: int) -> bool:
        return self.occupancy(z) < self.capacity

    def feasible_bc(self, z: int) -> bool:
        return self.occupancy(z) > 0

    def store(self, z: int, packet: StoredPacket) -> None:
        if not self.feasible_ma(z):
            raise BufferFullError(f"buffer {z} already holds {self.capacity} packets")
        self._queues[z].append(packet)
        self.stores[z] += 1

    def extract(self, z: int) -> StoredPacket:
        if not self.feasible_bc(z):
            raise BufferEmptyError(f"buffer {z} is empty")
        self.extracts[z] += 1
        return self._queues[z].popleft()

    def packets(self, z: int) -> tuple[StoredPacket, ...]:
        return tuple(self._queues[z])


def initialize_half_full(
    buf: RelayBufferSystem,
    sub_packets: int,
    bits_per_packet: int,
    rng: np.random.Generator,
) -> list[StoredPacket]:
    """Fill every queue with floor(J/2) error-free packets of random user bits.

    Returns the created packets so the caller can register the users'
    retained copies. Sequence numbers start at 0 per cluster.
    """
    if any(buf.occupancy(z) for z in range(buf.clusters)):
        raise RuntimeError("buffers must be empty before initialization")
    created = []
    for z in range(buf.clusters):
        for seq in range(buf.capacity // 2):
            x1 = rng.integers(0, 2, size=(sub_packets, bits_per_packet), dtype=np.uint8)
            x2 = rng.integers(0, 2, size=(sub_packets, bits_per_packet), dtype=np.uint8)
            packet = StoredPacket(
                cluster=z,
                seq=seq,
                v_bits=xor_combine(x1, x2),
                truth_x1=x1,
                truth_x2=x2,
                sub_packets=sub_packets,
            )
            buf.store(z, packet)
            created.append(packet)
    return created

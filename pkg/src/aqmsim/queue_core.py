"""Bounded FIFO router buffer operating in discrete slot time."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass


@dataclass(frozen=True)
class PacketRecord:
    """A queued unit packet, stamped with the slot it entered the buffer."""

    enqueue_slot: int


class RouterQueue:
    """FIFO buffer of unit packets with an idle-period anchor.

    ``idle_since`` holds the slot at which the queue last became empty and is
    present exactly while the queue is empty; it feeds the idle decay of the
    average-queue-length estimator.
    """

    def __init__(self, capacity: int, start_slot: int = 0):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self._packets: deque[PacketRecord] = deque()
        self._idle_since: int | None = start_slot

    @property
    def occupancy(self) -> int:
        return len(self._packets)

    @property
    def idle_since(self) -> int | None:
        return self._idle_since

    def enqueue(self, slot: int) -> bool:
        """Append a packet stamped ``slot``; returns False if the buffer is full.

        A full buffer is a domain outcome (the packet is lost), not an error.
        """
        if len(self._packets) >= self.capacity:
            return False
        self._packets.append(PacketRecord(slot))
        self._idle_since = None
        return True

    def dequeue(self, slot: int) -> tuple[PacketRecord, int] | None:
        """Remove and return (head, waiting slots), or None when empty."""
        if not self._packets:
            return None
        pkt = self._packets.popleft()
        if not self._packets:
            self._idle_since = slot
        return pkt, slot - pkt.enqueue_slot

    def mark_idle(self, slot: int) -> None:
        """Re-anchor the idle period at ``slot``; only valid while empty.

        Used after an arrival is evaluated but not enqueued (dropped at an
        empty queue): the pending idle decay up to ``slot`` has then been
        consumed, so later decays must start from here.
        """
        if self._packets:
            raise ValueError("queue is not idle")
        self._idle_since = slot

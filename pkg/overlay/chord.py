"""
Chord overlay: per-identity routing tables computed from the full sorted ring,
and the key-routing step of the DHT-based detection protocol.

Intervals are half-open (a, b] everywhere: an identity owns the segment that
ends at its own ring point.
"""
import bisect
import logging
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from network import Location, Network, NodeId
from security import RingPoint, chord_coordinate, in_interval

logger = logging.getLogger(__name__)


class OverlayError(ValueError):
    """Raised when a ring cannot support the requested tables."""


@dataclass(frozen=True)
class RingEntry:
    node_id: NodeId
    point: RingPoint
    location: Location


@dataclass(frozen=True)
class OverlayTables:
    """
    Routing state of one identity.

    successors[i] is the (i+1)-th clockwise successor; fingers[j] is the first
    identity at or after self + 2^(b-(j+1)).
    """
    entry: RingEntry
    predecessor: RingEntry
    successors: Tuple[RingEntry, ...]
    fingers: Tuple[RingEntry, ...]

    @property
    def node_id(self) -> NodeId:
        return self.entry.node_id

    @property
    def self_point(self) -> RingPoint:
        return self.entry.point

    @property
    def bits(self) -> int:
        return self.entry.point.bits


class HopKind(Enum):
    DESTINATION = "destination"
    PRE_DESTINATION = "pre_destination"
    NEXT = "next"


@dataclass(frozen=True)
class HopDecision:
    kind: HopKind
    target: Optional[RingEntry] = None

    @property
    def node_id(self) -> Optional[NodeId]:
        return self.target.node_id if self.target is not None else None


def finger_count(participants: int) -> int:
    """t = ceil(log2(participants))."""
    return (participants - 1).bit_length() if participants > 1 else 0


def owner_oracle(ring: Sequence[RingEntry], key: Union[RingPoint, int]) -> NodeId:
    """Linear scan: the first identity clockwise from key (closed at the identity's own point)."""
    if not ring:
        raise OverlayError("owner_oracle needs at least one participant")
    value = int(key)
    ordered = sorted(ring, key=lambda e: e.point.value)
    for entry in ordered:
        if entry.point.value >= value:
            return entry.node_id
    return ordered[0].node_id


class Overlay(Mapping):
    """Read-only mapping NodeId -> OverlayTables for one ring."""

    def __init__(self, ring: Sequence[RingEntry], bits: int, g: int, t: Optional[int] = None):
        self.bits = bits
        self.g = g
        self.ring: Tuple[RingEntry, ...] = tuple(sorted(ring, key=lambda e: e.point.value))
        self._values = [e.point.value for e in self.ring]
        self.t = finger_count(len(self.ring)) if t is None else t
        self._tables: Dict[NodeId, OverlayTables] = self._build()

    def _successor_index(self, value: int) -> int:
        idx = bisect.bisect_left(self._values, value)
        return idx if idx < len(self._values) else 0

    def _build(self) -> Dict[NodeId, OverlayTables]:
        size = len(self.ring)
        modulus = 1 << self.bits
        tables = {}
        for i, entry in enumerate(self.ring):
            successors = tuple(self.ring[(i + k) % size] for k in range(1, self.g + 1))
            fingers = tuple(
                self.ring[self._successor_index((entry.point.value + (1 << (self.bits - j))) % modulus)]
                for j in range(1, self.t + 1)
            )
            tables[entry.node_id] = OverlayTables(
                entry=entry,
                predecessor=self.ring[(i - 1) % size],
                successors=successors,
                fingers=fingers,
            )
        return tables

    def __getitem__(self, node_id: NodeId) -> OverlayTables:
        return self._tables[node_id]

    def __iter__(self) -> Iterator[NodeId]:
        return iter(self._tables)

    def __len__(self) -> int:
        return len(self._tables)

    def owner(self, key: Union[RingPoint, int]) -> NodeId:
        return self.ring[self._successor_index(int(key))].node_id

    def predecessors_of(self, node_id: NodeId, count: int) -> List[NodeId]:
        """The `count` identities counter-clockwise from node_id, nearest first."""
        idx = self._values.index(self._tables[node_id].self_point.value)
        size = len(self.ring)
        return [self.ring[(idx - k) % size].node_id for k in range(1, min(count, size - 1) + 1)]


def build_ring(entries: Iterable[RingEntry], bits: int, g: int, t: Optional[int] = None) -> Overlay:
    """Tables for an explicit ring. `t` overrides the default finger count ceil(log2 P)."""
    entries = list(entries)
    if t is not None and not 0 <= t <= bits:
        raise OverlayError(f"finger count t must be in [0, {bits}], got {t}")
    if g < 1:
        raise OverlayError(f"successors table size g must be >= 1, got {g}")
    if g >= len(entries):
        raise OverlayError(f"ring too small: g={g} needs more than {len(entries)} participants")
    seen: Dict[int, NodeId] = {}
    for entry in entries:
        if entry.point.bits != bits:
            raise OverlayError(f"ring point of {entry.node_id} has {entry.point.bits} bits, expected {bits}")
        other = seen.setdefault(entry.point.value, entry.node_id)
        if other != entry.node_id:
            raise OverlayError(f"ring coordinate collision between identities {other} and {entry.node_id}")
    return Overlay(entries, bits, g, t)


def build_overlay(
    net: Network,
    b: int,
    g: int,
    participants: Optional[Iterable[NodeId]] = None,
) -> Overlay:
    """
    Globally consistent Chord tables for the participating identities.
    One ring entry per identity regardless of how many physical replicas carry it;
    the entry location is that of the lowest-indexed replica.
    """
    if participants is None:
        participants = net.identities()
    entries = []
    for node_id in sorted(set(participants)):
        replicas = net.replicas_of(node_id)
        if not replicas:
            raise OverlayError(f"identity {node_id} is not deployed")
        entries.append(RingEntry(node_id, chord_coordinate(node_id, b), net.nodes[replicas[0]].location))
    overlay = build_ring(entries, b, g)
    logger.debug("built overlay: %d participants, b=%d, g=%d, t=%d", len(overlay), b, g, overlay.t)
    return overlay


def next_overlay_hop(tables: OverlayTables, key: Union[RingPoint, int]) -> HopDecision:
    """
    One routing step for `key` at the identity owning `tables`.

    DESTINATION when key is in (predecessor, self]; PRE_DESTINATION(successor)
    when the owner is one of the g successors (the caller inspects here too);
    otherwise NEXT via the farthest finger not past the key, falling back to
    the last successor.
    """
    bits = tables.bits
    k = int(key)
    me = tables.self_point.value
    if in_interval(k, tables.predecessor.point.value, me, bits):
        return HopDecision(HopKind.DESTINATION)
    for successor in tables.successors:
        if in_interval(k, me, successor.point.value, bits):
            return HopDecision(HopKind.PRE_DESTINATION, successor)
    modulus = 1 << bits
    for j, finger in enumerate(tables.fingers, start=1):
        if in_interval(k, (me + (1 << (bits - j))) % modulus, me, bits):
            return HopDecision(HopKind.NEXT, finger)
    return HopDecision(HopKind.NEXT, tables.successors[-1])


def route_key(overlay: Overlay, start: NodeId, key: Union[RingPoint, int], max_hops: Optional[int] = None) -> List[NodeId]:
    """
    Iterate next_overlay_hop from `start` until DESTINATION.
    Returns the overlay path including start and destination.
    """
    limit = max_hops if max_hops is not None else 4 * (overlay.t + overlay.g) + 8
    path = [start]
    current = start
    for _ in range(limit + 1):
        decision = next_overlay_hop(overlay[current], key)
        if decision.kind is HopKind.DESTINATION:
            return path
        current = decision.node_id
        path.append(current)
    raise OverlayError(f"key {int(key)} not resolved within {limit} overlay hops from {start}")

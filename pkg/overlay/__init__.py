from .chord import (
    HopDecision,
    HopKind,
    Overlay,
    OverlayError,
    OverlayTables,
    RingEntry,
    build_overlay,
    build_ring,
    finger_count,
    next_overlay_hop,
    owner_oracle,
    route_key,
)

__all__ = [
    "HopDecision",
    "HopKind",
    "Overlay",
    "OverlayError",
    "OverlayTables",
    "RingEntry",
    "build_overlay",
    "build_ring",
    "finger_count",
    "next_overlay_hop",
    "owner_oracle",
    "route_key",
]

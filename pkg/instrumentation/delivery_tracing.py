"""
Per-message delivery tracing for detection rounds.
Records the path, inspectors and fate of every claim when enabled.
"""
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

DELIVERED = "delivered"
DROPPED = "dropped"
TRANSPORT_FAILURE = "transport_failure"
HOP_LIMIT = "hop_limit"
NOT_IN_OVERLAY = "not_in_overlay"
BAD_SIGNATURE = "bad_signature"
TTL_EXPIRED = "ttl_expired"
BORDER = "border"


@dataclass
class DeliveryTrace:
    """Everything that happened to one claiming message."""
    protocol: str
    claim_index: int
    origin: int
    key: Optional[int] = None
    overlay_path: List[int] = field(default_factory=list)
    visited: List[int] = field(default_factory=list)
    physical_hops: int = 0
    inspectors: List[Tuple[int, str]] = field(default_factory=list)
    outcome: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "protocol": self.protocol,
            "claim_index": int(self.claim_index),
            "origin": int(self.origin),
            "key": None if self.key is None else int(self.key),
            "overlay_path": [int(i) for i in self.overlay_path],
            "visited": [int(i) for i in self.visited],
            "physical_hops": int(self.physical_hops),
            "inspectors": [[int(i), role] for i, role in self.inspectors],
            "outcome": self.outcome,
        }


class DeliveryTracer:
    """
    Collects DeliveryTrace objects for one round.

    Tracing costs memory proportional to the number of claims, so it is off
    unless requested explicitly or through CLONESIM_TRACE=true.
    """

    def __init__(self, enabled: bool = None):
        if enabled is None:
            enabled = os.getenv("CLONESIM_TRACE", "false").lower() == "true"
        self.enabled = enabled
        self.traces: List[DeliveryTrace] = []

    def start(self, protocol: str, claim_index: int, origin: int, key: Optional[int] = None) -> Optional[DeliveryTrace]:
        """Open a trace, or return None when tracing is disabled."""
        if not self.enabled:
            return None
        trace = DeliveryTrace(protocol=protocol, claim_index=claim_index, origin=origin, key=key)
        self.traces.append(trace)
        return trace

    def by_outcome(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for trace in self.traces:
            counts[trace.outcome] = counts.get(trace.outcome, 0) + 1
        return counts

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Set, Tuple

import numpy as np

from network import Network, NodeId

from .evidence import Evidence


@dataclass
class RoundReport:
    """Measurements of one detection round."""
    protocol: str
    messages_sent: np.ndarray
    cache_sizes: np.ndarray
    # most claims any single node held at once
    buffered_claims_peak: int = 0
    participants: int = 0
    action_messages: int = 0
    evidence_flood_messages: int = 0
    claims_sent: int = 0
    claims_dropped: int = 0
    transport_failures: int = 0
    witness_ids: Tuple[NodeId, ...] = ()
    witnesses_by_identity: Dict[NodeId, Tuple[NodeId, ...]] = field(default_factory=dict)
    detected_identities: Set[NodeId] = field(default_factory=set)
    revocations: Dict[NodeId, int] = field(default_factory=dict)
    evidence: List[Evidence] = field(default_factory=list)
    # DHT transport statistics
    overlay_hops: List[int] = field(default_factory=list)
    physical_hops: List[int] = field(default_factory=list)
    predecessor_inspections: int = 0
    destination_arrivals: int = 0
    # RDE exploration statistics
    exploration_reach: List[int] = field(default_factory=list)
    line_messages: List[int] = field(default_factory=list)
    border_discards: int = 0
    ttl_discards: int = 0
    clone_lines: int = 0
    clone_line_detections: int = 0
    traces: List[Any] = field(default_factory=list)

    @property
    def total_messages(self) -> int:
        return int(self.messages_sent.sum())

    @property
    def messages_per_node(self) -> float:
        return float(self.messages_sent.mean()) if len(self.messages_sent) else 0.0

    @property
    def cache_mean(self) -> float:
        return float(self.cache_sizes.mean()) if len(self.cache_sizes) else 0.0

    def witness_count(self, identity: NodeId) -> int:
        return len(self.witnesses_by_identity.get(identity, ()))


class DetectionProtocol(ABC):
    """A clone-detection protocol the experiment engine can run round by round."""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description

    @abstractmethod
    def build_config(self, scenario) -> Any:
        """Translate a Scenario into this protocol's round configuration."""

    @abstractmethod
    def run_round(self, network: Network, config: Any, rng: np.random.Generator) -> RoundReport:
        pass

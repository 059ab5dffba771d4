"""
Clone-detection protocols and the shared round machinery.
"""
from typing import Dict

from .base import DetectionProtocol, RoundReport
from .activation import ActionMessage, NodeRoundState, activate_round, make_action_message, validate_action
from .evidence import Evidence, RevocationReport, broadcast_evidence, verify_evidence
from .flooding import FloodResult, flood
from .dht_protocol import (
    CacheEntry,
    CacheTable,
    ClaimDHT,
    DhtDetection,
    DhtRound,
    DhtRoundConfig,
    InspectionKind,
    InspectionResult,
    inspect,
    make_claims_dht,
    make_forced_claims,
    overlay_participants,
    route_claim,
    run_dht_round,
)
from .rde_protocol import (
    ClaimRDE,
    NeighborList,
    ProcessKind,
    ProcessResult,
    RdeDetection,
    RdeDispatch,
    ZoneConfig,
    compare_neighbor_lists,
    default_ttl,
    get_next_node,
    make_claims_rde,
    own_claim,
    rde_process_message,
    run_rde_round,
)


def default_registry() -> Dict[str, DetectionProtocol]:
    return {"DHT": DhtDetection(), "RDE": RdeDetection()}


__all__ = [
    "DetectionProtocol",
    "RoundReport",
    "ActionMessage",
    "NodeRoundState",
    "activate_round",
    "make_action_message",
    "validate_action",
    "Evidence",
    "RevocationReport",
    "broadcast_evidence",
    "verify_evidence",
    "FloodResult",
    "flood",
    "CacheEntry",
    "CacheTable",
    "ClaimDHT",
    "DhtDetection",
    "DhtRound",
    "DhtRoundConfig",
    "InspectionKind",
    "InspectionResult",
    "inspect",
    "make_claims_dht",
    "make_forced_claims",
    "overlay_participants",
    "route_claim",
    "run_dht_round",
    "ClaimRDE",
    "NeighborList",
    "ProcessKind",
    "ProcessResult",
    "RdeDetection",
    "RdeDispatch",
    "ZoneConfig",
    "compare_neighbor_lists",
    "default_ttl",
    "get_next_node",
    "make_claims_rde",
    "own_claim",
    "rde_process_message",
    "run_rde_round",
    "default_registry",
]

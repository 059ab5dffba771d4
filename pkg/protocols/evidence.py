"""
Self-certifying clone evidence and its network-wide revocation flood.

Evidence is a pair of validly signed claims that place one identity at two
locations further apart than LOCATION_EPSILON. Any honest node can check it
without trusting the witness, so the witness does not sign it.
"""
import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Set

from network import LOCATION_EPSILON, Network, NodeId

from .flooding import flood

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Evidence:
    """
    claim_a/claim_b are ClaimDHT pairs (DHT) or the conflicting message plus
    the witness's own neighbor-list claim (RDE). Both claim types expose
    verify_signature() and location_of(identity).
    """
    identity: NodeId
    claim_a: Any
    claim_b: Any
    witness_id: NodeId


def verify_evidence(evidence: Evidence, eps: float = LOCATION_EPSILON) -> bool:
    if not (evidence.claim_a.verify_signature() and evidence.claim_b.verify_signature()):
        return False
    loc_a = evidence.claim_a.location_of(evidence.identity)
    loc_b = evidence.claim_b.location_of(evidence.identity)
    if loc_a is None or loc_b is None:
        return False
    return loc_a.distance_to(loc_b) > eps


@dataclass
class RevocationReport:
    identity: NodeId
    accepted: bool
    revoked: List[int]
    flood_messages: int


def broadcast_evidence(
    net: Network,
    evidence: Evidence,
    witness_index: int,
    revoked: Optional[List[Set[NodeId]]] = None,
) -> RevocationReport:
    """
    Flood evidence from the witness. Every honest node re-verifies it, revokes
    the identity and rebroadcasts; nodes that already revoked the identity
    suppress the duplicate. Adversarial nodes neither revoke nor relay.

    `revoked` holds each physical node's revoked-identity set and is updated
    in place so that later floods in the same round deduplicate against it.
    """
    if revoked is None:
        revoked = [set() for _ in range(len(net))]
    if not verify_evidence(evidence):
        logger.warning("witness %s holds evidence for %s that does not verify; not broadcasting",
                       evidence.witness_id, evidence.identity)
        return RevocationReport(evidence.identity, False, [], 0)

    newly_revoked: List[int] = []

    def accept(index: int) -> bool:
        node = net.nodes[index]
        if node.behavior.is_adversarial:
            return False
        if evidence.identity in revoked[index]:
            return False
        if not verify_evidence(evidence):
            return False
        revoked[index].add(evidence.identity)
        newly_revoked.append(index)
        return True

    if not net.nodes[witness_index].behavior.is_adversarial and evidence.identity not in revoked[witness_index]:
        revoked[witness_index].add(evidence.identity)
        newly_revoked.append(witness_index)
    result = flood(net, witness_index, accept)
    logger.debug("evidence for %s from %s: %d revocations, %d flood messages",
                 evidence.identity, evidence.witness_id, len(newly_revoked), result.messages)
    return RevocationReport(evidence.identity, True, sorted(newly_revoked), result.messages)

"""
Randomly directed exploration: every observer sends its signed neighbor list
along a roughly straight random line; each node on the line compares the
list with its own view and becomes a witness on any location conflict.
"""
import heapq
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from adversary import Action, MessageContext, apply_behavior, emits_claims, perturb_location
from instrumentation.delivery_tracing import (
    BAD_SIGNATURE,
    BORDER,
    DROPPED,
    TTL_EXPIRED,
    DeliveryTracer,
)
from network import INITIATOR_ID, LOCATION_EPSILON, Location, Network, NodeId, direction
from security import Signature, encode_claim_rde, sign, verify

from .activation import activate_round, make_action_message
from .base import DetectionProtocol, RoundReport
from .evidence import Evidence, broadcast_evidence

logger = logging.getLogger(__name__)

DEFAULT_TARGET_HALF_ANGLE = math.pi / 2
DEFAULT_PRIORITY_HALF_ANGLE = math.pi / 6


def default_ttl(n: int) -> int:
    return math.ceil(math.sqrt(n))


@dataclass(frozen=True)
class ZoneConfig:
    theta_t: float = DEFAULT_TARGET_HALF_ANGLE
    theta_p: float = DEFAULT_PRIORITY_HALF_ANGLE
    ttl_init: int = 32
    r: int = 1
    nonce: int = 1
    trace: Optional[bool] = None

    def validate(self):
        if not 0.0 < self.theta_p < self.theta_t <= math.pi:
            raise ValueError(f"need 0 < theta_p < theta_t <= pi, got theta_p={self.theta_p}, theta_t={self.theta_t}")
        if self.ttl_init < 1:
            raise ValueError(f"ttl_init must be >= 1, got {self.ttl_init}")
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")

    @classmethod
    def for_network(cls, n: int, **kwargs) -> "ZoneConfig":
        """Zone settings with ttl_init = ceil(sqrt(n))."""
        return cls(ttl_init=default_ttl(n), **kwargs)


@dataclass(frozen=True)
class NeighborList:
    """A claimer's radio neighbors at round start, sorted by NodeId."""
    entries: Tuple[Tuple[NodeId, Location], ...] = ()

    @classmethod
    def from_network(cls, net: Network, index: int) -> "NeighborList":
        return cls(tuple(sorted(net.adjacency[index], key=lambda e: (e[0], e[1].x, e[1].y))))

    def __len__(self) -> int:
        return len(self.entries)

    def locations_by_id(self) -> Dict[NodeId, List[Location]]:
        view: Dict[NodeId, List[Location]] = {}
        for node_id, loc in self.entries:
            view.setdefault(node_id, []).append(loc)
        return view


@dataclass(frozen=True)
class ClaimRDE:
    """The ttl field is the only mutable part and is not covered by the signature."""
    ttl: int
    observer_id: NodeId
    observer_loc: Location
    neighbor_list: NeighborList
    nonce: int
    sig: Optional[Signature] = None

    def signed_bytes(self) -> bytes:
        return encode_claim_rde(self.observer_id, self.observer_loc, self.neighbor_list.entries, self.nonce)

    def verify_signature(self) -> bool:
        return verify(self.signed_bytes(), self.sig, self.observer_id)

    def view(self) -> Dict[NodeId, List[Location]]:
        """The claimer's neighbor list plus the claimer itself."""
        view = self.neighbor_list.locations_by_id()
        view.setdefault(self.observer_id, []).append(self.observer_loc)
        return view

    def location_of(self, identity: NodeId) -> Optional[Location]:
        if identity == self.observer_id:
            return self.observer_loc
        for node_id, loc in self.neighbor_list.entries:
            if node_id == identity:
                return loc
        return None

    @classmethod
    def create(cls, ttl: int, observer_id: NodeId, observer_loc: Location,
               neighbor_list: NeighborList, nonce: int) -> "ClaimRDE":
        claim = cls(ttl, observer_id, observer_loc, neighbor_list, nonce)
        return replace(claim, sig=sign(claim.signed_bytes(), observer_id))


def own_claim(net: Network, index: int, zone: ZoneConfig) -> ClaimRDE:
    node = net.nodes[index]
    return ClaimRDE.create(zone.ttl_init, node.identity, node.location, NeighborList.from_network(net, index), zone.nonce)


@dataclass(frozen=True)
class RdeDispatch:
    claim: ClaimRDE
    first_hop: int


def make_claims_rde(net: Network, observer: int, zone: ZoneConfig, rng: np.random.Generator,
                    claim: Optional[ClaimRDE] = None) -> List[RdeDispatch]:
    """r copies of the observer's signed claim, each to a uniformly random neighbor."""
    node = net.nodes[observer]
    nbrs = net.neighbors(observer)
    if not emits_claims(node) or len(nbrs) == 0:
        return []
    claim = claim or own_claim(net, observer, zone)
    return [RdeDispatch(claim, int(nbrs[rng.integers(len(nbrs))])) for _ in range(zone.r)]


def compare_neighbor_lists(mine: ClaimRDE, msg: ClaimRDE, eps: float = LOCATION_EPSILON) -> Optional[Evidence]:
    """
    Flag the smallest NodeId that both views place at locations more than eps
    apart. The evidence pairs the received message with the witness's own claim.
    """
    my_view = mine.view()
    their_view = msg.view()
    for node_id in sorted(set(my_view) & set(their_view)):
        for here in my_view[node_id]:
            if any(here.distance_to(there) > eps for there in their_view[node_id]):
                return Evidence(identity=node_id, claim_a=msg, claim_b=mine, witness_id=mine.observer_id)
    return None


def get_next_node(net: Network, current: int, sender: int, zone: ZoneConfig,
                  rng: np.random.Generator) -> Optional[int]:
    """
    Continue the line sender -> current. None means no neighbor lies in the
    target zone, i.e. the message has reached the network border.
    """
    ideal = direction(net.nodes[sender].location, net.nodes[current].location)
    nbrs = net.neighbors(current)
    nbrs = nbrs[nbrs != sender]
    if len(nbrs) == 0:
        return None
    offsets = net.positions[nbrs] - net.positions[current]
    bearings = np.arctan2(offsets[:, 1], offsets[:, 0])
    deviation = np.abs((bearings - ideal + math.pi) % (2.0 * math.pi) - math.pi)

    in_target = deviation <= zone.theta_t
    if not in_target.any():
        return None
    in_priority = deviation <= zone.theta_p
    if in_priority.any():
        weights = zone.theta_p - deviation[in_priority]
        total = float(weights.sum())
        if total > 0.0:
            pick = int(np.searchsorted(np.cumsum(weights), rng.random() * total, side="right"))
            return int(nbrs[in_priority][min(pick, len(weights) - 1)])
    candidates = np.flatnonzero(in_target)
    return int(nbrs[candidates[np.argmin(deviation[candidates])]])


class ProcessKind(Enum):
    DISCARDED = "discarded"
    FORWARDED = "forwarded"
    WITNESS = "witness"


@dataclass(frozen=True)
class ProcessResult:
    """
    WITNESS carries evidence; the message may still travel on (next_hop set)
    because finding a clone does not stop the round.
    """
    kind: ProcessKind
    message: ClaimRDE
    next_hop: Optional[int] = None
    evidence: Optional[Evidence] = None
    discard_reason: Optional[str] = None


def rde_process_message(net: Network, node_index: int, msg: ClaimRDE, sender: int, zone: ZoneConfig,
                        rng: np.random.Generator, mine: Optional[ClaimRDE] = None) -> ProcessResult:
    """Verify, compare neighbor lists, decrement ttl, pick the next node."""
    node = net.nodes[node_index]
    relay = apply_behavior(node, MessageContext.RELAY)
    if relay is Action.DROP:
        return ProcessResult(ProcessKind.DISCARDED, msg, discard_reason=DROPPED)
    if not msg.verify_signature():
        return ProcessResult(ProcessKind.DISCARDED, msg, discard_reason=BAD_SIGNATURE)

    evidence = None
    if mine is not None and apply_behavior(node, MessageContext.INSPECT) is Action.FORWARD:
        evidence = compare_neighbor_lists(mine, msg)
    found = ProcessKind.WITNESS if evidence is not None else None

    msg = replace(msg, ttl=msg.ttl - 1)
    if msg.ttl <= 0:
        return ProcessResult(found or ProcessKind.DISCARDED, msg, evidence=evidence, discard_reason=TTL_EXPIRED)
    next_hop = get_next_node(net, node_index, sender, zone, rng)
    if next_hop is None:
        return ProcessResult(found or ProcessKind.DISCARDED, msg, evidence=evidence, discard_reason=BORDER)
    if relay is Action.MODIFY:
        msg = replace(msg, observer_loc=perturb_location(msg.observer_loc))
    return ProcessResult(found or ProcessKind.FORWARDED, msg, next_hop=next_hop, evidence=evidence)


@dataclass
class NodeMemory:
    """Protocol state one node holds during an RDE round; peaks are sampled after every event."""
    neighbor_entries: int = 0
    held_claims: List[ClaimRDE] = field(default_factory=list)
    revoked: Set[NodeId] = field(default_factory=set)
    peak_entries: int = 0
    peak_buffered: int = 0

    def size(self) -> int:
        return self.neighbor_entries + len(self.held_claims) + len(self.revoked)

    def settle(self):
        self.peak_entries = max(self.peak_entries, self.size())
        self.peak_buffered = max(self.peak_buffered, len(self.held_claims))


def run_rde_round(net: Network, zone: ZoneConfig, rng: np.random.Generator) -> RoundReport:
    """All observers explore, lines walk until ttl or border, witnesses flood evidence."""
    zone.validate()
    seed = int(rng.integers(0, 2 ** 63))
    activation = activate_round(net, make_action_message(INITIATOR_ID, zone.nonce, seed, 0))
    participants = set(activation.participants)
    claims = {i: own_claim(net, i, zone) for i in activation.participants}
    memory = [NodeMemory() for _ in range(len(net))]
    for i in activation.participants:
        memory[i].neighbor_entries = len(claims[i].neighbor_list)
        memory[i].settle()
    tracer = DeliveryTracer(zone.trace)
    cloned = set(net.cloned_identities())

    messages_sent = np.zeros(len(net), dtype=np.int64)
    queue: List[Tuple[int, int, ClaimRDE, int, int]] = []
    line_messages: List[int] = []
    line_reach: List[Set[int]] = []
    line_clones: List[Set[NodeId]] = []
    traces = []
    for observer in activation.participants:
        for dispatch in make_claims_rde(net, observer, zone, rng, claims[observer]):
            line = len(line_messages)
            messages_sent[observer] += 1
            line_messages.append(1)
            line_reach.append(set())
            line_clones.append(cloned & set(dispatch.claim.view()))
            traces.append(tracer.start("RDE", line, observer))
            heapq.heappush(queue, (0, line, dispatch.claim, dispatch.first_hop, observer))

    findings: List[Tuple[int, Evidence]] = []
    witnessed: Set[Tuple[int, NodeId]] = set()
    detecting_lines: Set[int] = set()
    border_discards = ttl_discards = dropped = 0
    while queue:
        step, line, msg, at, sender = heapq.heappop(queue)
        line_reach[line].add(at)
        trace = traces[line]
        if trace is not None:
            trace.visited.append(at)
        held = memory[at].held_claims
        held.append(msg)
        result = rde_process_message(net, at, msg, sender, zone, rng, claims.get(at))
        held.pop()
        memory[at].settle()
        if result.evidence is not None:
            if trace is not None:
                trace.inspectors.append((at, "witness"))
            if result.evidence.identity in line_clones[line]:
                detecting_lines.add(line)
            marker = (at, result.evidence.identity)
            if marker not in witnessed:
                witnessed.add(marker)
                findings.append((at, result.evidence))
        if result.next_hop is not None:
            messages_sent[at] += 1
            line_messages[line] += 1
            heapq.heappush(queue, (step + 1, line, result.message, result.next_hop, at))
            continue
        reason = result.discard_reason
        if reason == BORDER:
            border_discards += 1
        elif reason == TTL_EXPIRED:
            ttl_discards += 1
        elif reason == DROPPED:
            dropped += 1
        if trace is not None:
            trace.outcome = reason
            trace.physical_hops = line_messages[line]

    revoked = [state.revoked for state in memory]
    flood_messages = 0
    witnesses: Dict[NodeId, Set[NodeId]] = {}
    detected: Set[NodeId] = set()
    evidence_list = []
    for witness_index, evidence in findings:
        report = broadcast_evidence(net, evidence, witness_index, revoked)
        flood_messages += report.flood_messages
        for i in report.revoked:
            memory[i].settle()
        if report.accepted:
            detected.add(evidence.identity)
            witnesses.setdefault(evidence.identity, set()).add(net.nodes[witness_index].identity)
            evidence_list.append(evidence)

    storage = np.array([state.peak_entries for state in memory], dtype=np.int64)
    report = RoundReport(
        protocol="RDE",
        messages_sent=messages_sent,
        cache_sizes=storage,
        buffered_claims_peak=max((state.peak_buffered for state in memory), default=0),
        participants=len(participants),
        action_messages=activation.messages,
        evidence_flood_messages=flood_messages,
        claims_sent=len(line_messages),
        claims_dropped=dropped,
        witness_ids=tuple(sorted({w for ws in witnesses.values() for w in ws})),
        witnesses_by_identity={k: tuple(sorted(v)) for k, v in witnesses.items()},
        detected_identities=detected,
        revocations={
            identity: sum(1 for i, ids in enumerate(revoked) if identity in ids and not net.nodes[i].behavior.is_adversarial)
            for identity in detected
        },
        evidence=evidence_list,
        exploration_reach=[len(reach) for reach in line_reach],
        line_messages=line_messages,
        border_discards=border_discards,
        ttl_discards=ttl_discards,
        clone_lines=sum(1 for ids in line_clones if ids),
        clone_line_detections=len(detecting_lines),
        traces=[t for t in traces if t is not None],
    )
    logger.debug("RDE round: %d lines, %d msgs, %d border discards, detected=%s",
                 len(line_messages), report.total_messages, border_discards, sorted(detected))
    if tracer.enabled:
        logger.debug("RDE line outcomes: %s", tracer.by_outcome())
    return report


class RdeDetection(DetectionProtocol):
    def __init__(self):
        super().__init__(
            name="RDE",
            description="Neighbor-list claims walked along randomly directed lines with border determination",
        )

    def build_config(self, scenario) -> ZoneConfig:
        return ZoneConfig(
            theta_t=scenario.theta_t,
            theta_p=scenario.theta_p,
            ttl_init=scenario.ttl or default_ttl(scenario.n),
            r=scenario.r,
        )

    def run_round(self, network: Network, config: ZoneConfig, rng: np.random.Generator) -> RoundReport:
        return run_rde_round(network, config, rng)

"""
DHT-based clone detection: observers send signed location claims about their
neighbors to the Chord owner of H(seed || examinee); the owner and the
predecessors the claim passes through cache and compare them.
"""
import heapq
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from adversary import Action, MessageContext, apply_behavior, emits_claims, joins_overlay, perturb_location
from instrumentation.delivery_tracing import (
    DELIVERED,
    DROPPED,
    HOP_LIMIT,
    NOT_IN_OVERLAY,
    TRANSPORT_FAILURE,
    DeliveryTrace,
    DeliveryTracer,
)
from network import INITIATOR_ID, LOCATION_EPSILON, GreedyRouter, Location, Network, NodeId
from overlay import HopKind, Overlay, build_overlay, next_overlay_hop
from security import DEFAULT_RING_BITS, RingPoint, Signature, detection_key, encode_claim_dht, sign, verify

from .activation import activate_round, make_action_message
from .base import DetectionProtocol, RoundReport
from .evidence import Evidence, broadcast_evidence

logger = logging.getLogger(__name__)

DEFAULT_SUCCESSORS = 10


@dataclass(frozen=True)
class DhtRoundConfig:
    """
    forced_m switches to formula-validation mode: every examinee is claimed
    exactly forced_m times, by observers drawn among all round participants.
    """
    p_c: float = 0.3
    g: int = DEFAULT_SUCCESSORS
    b: int = DEFAULT_RING_BITS
    seed: Optional[int] = None
    nonce: int = 1
    time: int = 0
    forced_m: Optional[int] = None
    trace: Optional[bool] = None

    def validate(self):
        if not 0.0 < self.p_c <= 1.0:
            raise ValueError(f"p_c must be in (0, 1], got {self.p_c}")
        if self.g < 1:
            raise ValueError(f"g must be >= 1, got {self.g}")
        if self.nonce < 1:
            raise ValueError(f"nonce must be >= 1, got {self.nonce}")
        if self.forced_m is not None and self.forced_m < 1:
            raise ValueError(f"forced_m must be >= 1, got {self.forced_m}")


@dataclass(frozen=True)
class ClaimDHT:
    examinee_id: NodeId
    examinee_loc: Location
    observer_id: NodeId
    observer_loc: Location
    nonce: int
    sig: Optional[Signature] = None

    def signed_bytes(self) -> bytes:
        return encode_claim_dht(self.examinee_id, self.examinee_loc, self.observer_id, self.observer_loc, self.nonce)

    def verify_signature(self) -> bool:
        return verify(self.signed_bytes(), self.sig, self.observer_id)

    def location_of(self, identity: NodeId) -> Optional[Location]:
        if identity == self.examinee_id:
            return self.examinee_loc
        if identity == self.observer_id:
            return self.observer_loc
        return None

    @classmethod
    def create(cls, examinee_id: NodeId, examinee_loc: Location, observer_id: NodeId,
               observer_loc: Location, nonce: int) -> "ClaimDHT":
        claim = cls(examinee_id, examinee_loc, observer_id, observer_loc, nonce)
        return replace(claim, sig=sign(claim.signed_bytes(), observer_id))


@dataclass(frozen=True)
class CacheEntry:
    examinee_id: NodeId
    examinee_loc: Location
    observer_id: NodeId
    nonce: int


class CacheTable:
    """One inspector's per-round cache: at most one record per examinee."""

    def __init__(self, owner_id: NodeId):
        self.owner_id = owner_id
        self._records: Dict[NodeId, Tuple[CacheEntry, ClaimDHT]] = {}

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, examinee_id: NodeId) -> bool:
        return examinee_id in self._records

    def get(self, examinee_id: NodeId) -> Optional[Tuple[CacheEntry, ClaimDHT]]:
        return self._records.get(examinee_id)

    def put(self, claim: ClaimDHT):
        entry = CacheEntry(claim.examinee_id, claim.examinee_loc, claim.observer_id, claim.nonce)
        self._records[claim.examinee_id] = (entry, claim)

    def clear(self):
        self._records.clear()


class InspectionKind(Enum):
    DISCARDED = "discarded"
    BUFFERED = "buffered"
    DUPLICATE = "duplicate"
    CLONE_FOUND = "clone_found"


@dataclass(frozen=True)
class InspectionResult:
    kind: InspectionKind
    evidence: Optional[Evidence] = None


def inspect(cache: CacheTable, claim: ClaimDHT, eps: float = LOCATION_EPSILON) -> InspectionResult:
    """Cache-and-compare check run by the destination and by pre-destination predecessors."""
    if not claim.verify_signature():
        return InspectionResult(InspectionKind.DISCARDED)
    record = cache.get(claim.examinee_id)
    if record is None:
        cache.put(claim)
        return InspectionResult(InspectionKind.BUFFERED)
    entry, stored = record
    if entry.examinee_loc.distance_to(claim.examinee_loc) <= eps:
        return InspectionResult(InspectionKind.DUPLICATE)
    evidence = Evidence(identity=claim.examinee_id, claim_a=stored, claim_b=claim, witness_id=cache.owner_id)
    return InspectionResult(InspectionKind.CLONE_FOUND, evidence)


def make_claims_dht(net: Network, observer: int, cfg: DhtRoundConfig, rng: np.random.Generator) -> List[ClaimDHT]:
    """One signed claim per radio neighbor, each independently with probability p_c."""
    node = net.nodes[observer]
    if not emits_claims(node):
        return []
    claims = []
    for examinee_id, examinee_loc in net.adjacency[observer]:
        if cfg.p_c >= 1.0 or rng.random() < cfg.p_c:
            claims.append(ClaimDHT.create(examinee_id, examinee_loc, node.identity, node.location, cfg.nonce))
    return claims


def make_forced_claims(
    net: Network, observers: List[int], cfg: DhtRoundConfig, rng: np.random.Generator
) -> List[Tuple[ClaimDHT, int]]:
    """Formula-validation mode: exactly forced_m claims per physical examinee."""
    m = cfg.forced_m
    pool = np.array(observers, dtype=np.int64)
    pool_ids = np.array([net.nodes[i].identity for i in observers], dtype=np.int64)
    result = []
    for examinee in range(len(net)):
        target = net.nodes[examinee]
        candidates = pool[pool_ids != target.identity]
        if len(candidates) < m:
            raise ValueError(f"forced_m={m} exceeds the {len(candidates)} available observers")
        for observer in rng.choice(candidates, size=m, replace=False):
            observer = int(observer)
            node = net.nodes[observer]
            claim = ClaimDHT.create(target.identity, target.location, node.identity, node.location, cfg.nonce)
            result.append((claim, observer))
    return result


@dataclass
class _InFlight:
    claim: ClaimDHT
    key: RingPoint
    origin: int
    at: int
    at_id: NodeId
    overlay_hops: int = 0
    physical_hops: int = 0
    trace: Optional[DeliveryTrace] = None


@dataclass
class DeliveryRecord:
    """Outcome of routing one claim; the trace is present only when tracing is on."""
    outcome: str
    overlay_hops: int
    physical_hops: int
    destination: Optional[NodeId] = None
    trace: Optional[DeliveryTrace] = None


class DhtRound:
    """
    Deterministic event loop of one DHT detection round.

    In-flight claims advance one overlay hop per step; the queue is ordered by
    (step, creation index).
    """

    def __init__(self, net: Network, overlay: Overlay, cfg: DhtRoundConfig, seed: int,
                 tracer: Optional[DeliveryTracer] = None):
        self.net = net
        self.overlay = overlay
        self.cfg = cfg
        self.seed = seed
        self.router = GreedyRouter(net)
        self.tracer = tracer or DeliveryTracer(cfg.trace)
        self.caches: Dict[int, CacheTable] = {}
        self.messages_sent = np.zeros(len(net), dtype=np.int64)
        self.hop_limit = 4 * (overlay.t + overlay.g) + 8
        self.records: List[DeliveryRecord] = []
        self.findings: List[Tuple[int, Evidence]] = []
        self._witnessed: Set[Tuple[int, NodeId]] = set()
        self.transport_failures = 0
        self.dropped = 0
        self.predecessor_inspections = 0
        self.destination_arrivals = 0
        self._queue: List[Tuple[int, int, _InFlight]] = []
        self._created = 0

    def dispatch(self, claim: ClaimDHT, observer: int):
        key = detection_key(self.seed, claim.examinee_id, self.cfg.b)
        trace = self.tracer.start("DHT", self._created, observer, key.value)
        item = _InFlight(claim, key, observer, observer, self.net.nodes[observer].identity, trace=trace)
        if trace is not None:
            trace.overlay_path.append(int(item.at_id))
            trace.visited.append(observer)
        heapq.heappush(self._queue, (0, self._created, item))
        self._created += 1

    def run(self):
        while self._queue:
            step, created, item = heapq.heappop(self._queue)
            if self._advance(item):
                heapq.heappush(self._queue, (step + 1, created, item))

    def _finish(self, item: _InFlight, outcome: str, destination: Optional[NodeId] = None) -> bool:
        if item.trace is not None:
            item.trace.outcome = outcome
            item.trace.physical_hops = item.physical_hops
        self.records.append(DeliveryRecord(outcome, item.overlay_hops, item.physical_hops, destination, item.trace))
        return False

    def _inspect_at(self, item: _InFlight, role: str):
        node = self.net.nodes[item.at]
        cache = self.caches.get(item.at)
        if cache is None:
            cache = self.caches[item.at] = CacheTable(node.identity)
        if item.trace is not None:
            item.trace.inspectors.append((item.at, role))
        result = inspect(cache, item.claim)
        if result.kind is InspectionKind.CLONE_FOUND:
            marker = (item.at, result.evidence.identity)
            if marker not in self._witnessed:
                self._witnessed.add(marker)
                self.findings.append((item.at, result.evidence))

    def _relay_physically(self, item: _InFlight, relay: int) -> bool:
        """Greedy-path relay between two overlay hops; False if the claim dies there."""
        action = apply_behavior(self.net.nodes[relay], MessageContext.RELAY)
        if action is Action.DROP:
            self.dropped += 1
            if item.trace is not None:
                item.trace.visited.append(relay)
            return False
        if action is Action.MODIFY:
            item.claim = replace(item.claim, examinee_loc=perturb_location(item.claim.examinee_loc))
        return True

    def _advance(self, item: _InFlight) -> bool:
        """Process the claim at its current overlay node; True if it moves on."""
        tables = self.overlay.get(item.at_id)
        if tables is None:
            return self._finish(item, NOT_IN_OVERLAY)
        if item.overlay_hops > self.hop_limit:
            logger.warning("claim about %s exceeded %d overlay hops", item.claim.examinee_id, self.hop_limit)
            return self._finish(item, HOP_LIMIT)

        node = self.net.nodes[item.at]
        at_origin = item.overlay_hops == 0
        decision = next_overlay_hop(tables, item.key)

        if decision.kind is not HopKind.NEXT:
            role = "destination" if decision.kind is HopKind.DESTINATION else "predecessor"
            if decision.kind is HopKind.DESTINATION:
                self.destination_arrivals += 1
            if apply_behavior(node, MessageContext.INSPECT) is Action.FORWARD:
                if decision.kind is HopKind.PRE_DESTINATION:
                    self.predecessor_inspections += 1
                self._inspect_at(item, role)
            if decision.kind is HopKind.DESTINATION:
                return self._finish(item, DELIVERED, item.at_id)

        if not at_origin:
            action = apply_behavior(node, MessageContext.RELAY)
            if action is Action.DROP:
                self.dropped += 1
                return self._finish(item, DROPPED)
            if action is Action.MODIFY:
                item.claim = replace(item.claim, examinee_loc=perturb_location(item.claim.examinee_loc))

        next_id = decision.node_id
        target = self.net.nearest_replica(next_id, node.location)
        route = self.router.route(item.at, target)
        for hop, sender in enumerate(route.path[:-1]):
            if hop > 0 and not self._relay_physically(item, sender):
                return self._finish(item, DROPPED)
            self.messages_sent[sender] += 1
            item.physical_hops += 1
        if not route.delivered:
            self.transport_failures += 1
            return self._finish(item, TRANSPORT_FAILURE)

        item.at = target
        item.at_id = next_id
        item.overlay_hops += 1
        if item.trace is not None:
            item.trace.overlay_path.append(int(next_id))
            item.trace.visited.append(target)
        return True


def overlay_participants(net: Network) -> List[NodeId]:
    """Identities whose every replica takes part in overlay construction."""
    return [
        node_id for node_id in net.identities()
        if all(joins_overlay(net.nodes[i]) for i in net.replicas_of(node_id))
    ]


def route_claim(net: Network, overlay: Overlay, claim: ClaimDHT, observer: int, seed: int,
                cfg: Optional[DhtRoundConfig] = None, trace: bool = True) -> DeliveryRecord:
    """Route a single claim through a fresh round (empty caches) and report its delivery."""
    cfg = cfg or DhtRoundConfig(g=overlay.g, b=overlay.bits, trace=trace)
    round_ = DhtRound(net, overlay, cfg, seed, DeliveryTracer(trace))
    round_.dispatch(claim, observer)
    round_.run()
    return round_.records[0]


def run_dht_round(net: Network, overlay: Overlay, cfg: DhtRoundConfig, rng: np.random.Generator) -> RoundReport:
    """Action message, claiming, overlay routing with inspection, evidence broadcast."""
    cfg.validate()
    seed = cfg.seed if cfg.seed is not None else int(rng.integers(0, 2 ** 63))
    action = make_action_message(INITIATOR_ID, cfg.nonce, seed, cfg.time)
    activation = activate_round(net, action)

    round_ = DhtRound(net, overlay, cfg, seed)
    observers = [
        i for i in activation.participants
        if net.nodes[i].identity in overlay and emits_claims(net.nodes[i])
    ]
    claims_sent = 0
    if cfg.forced_m is not None:
        for claim, observer in make_forced_claims(net, observers, cfg, rng):
            round_.dispatch(claim, observer)
            claims_sent += 1
    else:
        for observer in observers:
            for claim in make_claims_dht(net, observer, cfg, rng):
                round_.dispatch(claim, observer)
                claims_sent += 1
    round_.run()

    revoked: List[Set[NodeId]] = [set() for _ in range(len(net))]
    flood_messages = 0
    witnesses: Dict[NodeId, Set[NodeId]] = {}
    detected: Set[NodeId] = set()
    evidence_list = []
    for witness_index, evidence in round_.findings:
        report = broadcast_evidence(net, evidence, witness_index, revoked)
        flood_messages += report.flood_messages
        if report.accepted:
            detected.add(evidence.identity)
            witnesses.setdefault(evidence.identity, set()).add(net.nodes[witness_index].identity)
            evidence_list.append(evidence)

    cache_sizes = np.zeros(len(net), dtype=np.int64)
    for index, cache in round_.caches.items():
        cache_sizes[index] = len(cache)

    revocations = {
        identity: sum(1 for i, ids in enumerate(revoked) if identity in ids and not net.nodes[i].behavior.is_adversarial)
        for identity in detected
    }
    report = RoundReport(
        protocol="DHT",
        messages_sent=round_.messages_sent,
        cache_sizes=cache_sizes,
        buffered_claims_peak=int(cache_sizes.max()) if len(cache_sizes) else 0,
        participants=len(activation.participants),
        action_messages=activation.messages,
        evidence_flood_messages=flood_messages,
        claims_sent=claims_sent,
        claims_dropped=round_.dropped,
        transport_failures=round_.transport_failures,
        witness_ids=tuple(sorted({w for ws in witnesses.values() for w in ws})),
        witnesses_by_identity={k: tuple(sorted(v)) for k, v in witnesses.items()},
        detected_identities=detected,
        revocations=revocations,
        evidence=evidence_list,
        overlay_hops=[r.overlay_hops for r in round_.records],
        physical_hops=[r.physical_hops for r in round_.records],
        predecessor_inspections=round_.predecessor_inspections,
        destination_arrivals=round_.destination_arrivals,
        traces=list(round_.tracer.traces),
    )
    logger.debug("DHT round: %d claims, %d msgs, %d witnesses, detected=%s",
                 claims_sent, report.total_messages, len(report.witness_ids), sorted(detected))
    if round_.tracer.enabled:
        logger.debug("DHT claim outcomes: %s", round_.tracer.by_outcome())
    return report


class DhtDetection(DetectionProtocol):
    def __init__(self):
        super().__init__(
            name="DHT",
            description="Chord-based key routing with caching and checking at the key owner and its predecessors",
        )

    def build_config(self, scenario) -> DhtRoundConfig:
        return DhtRoundConfig(p_c=scenario.p_c, g=scenario.g, b=scenario.b, forced_m=scenario.forced_m)

    def run_round(self, network: Network, config: DhtRoundConfig, rng: np.random.Generator) -> RoundReport:
        overlay = build_overlay(network, config.b, config.g, overlay_participants(network))
        return run_dht_round(network, overlay, config, rng)

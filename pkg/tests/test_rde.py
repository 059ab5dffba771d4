import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import stats

from adversary import AdversaryConfig, Placement, inject_clones
from instrumentation.delivery_tracing import BORDER, DROPPED, TTL_EXPIRED
from network import Behavior, Location, NodeId, angle_diff, direction
from protocols import (
    ClaimRDE,
    NeighborList,
    ProcessKind,
    ZoneConfig,
    compare_neighbor_lists,
    default_ttl,
    get_next_node,
    make_claims_rde,
    own_claim,
    rde_process_message,
    run_rde_round,
    verify_evidence,
)

ZONE = ZoneConfig()


def rde_claim(observer, loc, entries, ttl=5):
    neighbors = NeighborList(tuple((NodeId(i), Location(*p)) for i, p in entries))
    return ClaimRDE.create(ttl, NodeId(observer), Location(*loc), neighbors, 1)


def at(angle, radius=10.0):
    return (50 + radius * math.cos(angle), 50 + radius * math.sin(angle))


def test_single_neighbor_dead_ahead_is_chosen(make_network):
    net = make_network([(0, 50), (10, 50), (20, 50)], radio_range=12.0)
    rng = np.random.default_rng(0)
    assert all(get_next_node(net, 1, 0, ZONE, rng) == 2 for _ in range(20))


def test_neighbors_behind_mean_border(make_network):
    net = make_network([(10, 50), (20, 50), (12, 55)], radio_range=12.0)
    assert get_next_node(net, 1, 0, ZONE, np.random.default_rng(0)) is None


def test_priority_zone_weights(make_network):
    half = ZONE.theta_p / 2
    points = [(40, 50), (50, 50), (60, 50), at(half)]
    net = make_network(points, radio_range=11.0)
    rng = np.random.default_rng(7)
    draws = [get_next_node(net, 1, 0, ZONE, rng) for _ in range(20000)]
    share_ahead = draws.count(2) / len(draws)
    assert share_ahead == pytest.approx(2 / 3, abs=0.02)
    assert set(draws) == {2, 3}


def test_outside_priority_zone_takes_smallest_deviation(make_network):
    net = make_network([(40, 50), (50, 50), at(math.pi / 3), at(-math.pi / 2.5)], radio_range=11.0)
    rng = np.random.default_rng(1)
    assert all(get_next_node(net, 1, 0, ZONE, rng) == 2 for _ in range(10))


def test_claims_go_to_random_neighbors(make_network):
    rng = np.random.default_rng(3)
    pair = make_network([(0, 0), (5, 0)], radio_range=6.0)
    [only] = make_claims_rde(pair, 0, ZONE, rng)
    assert only.first_hop == 1
    assert only.claim.verify_signature()

    lonely = make_network([(0, 0), (50, 0)], radio_range=6.0)
    assert make_claims_rde(lonely, 0, ZONE, rng) == []

    ring = [(50.0, 50.0)] + [(50 + 5 * math.cos(k * math.pi / 5), 50 + 5 * math.sin(k * math.pi / 5)) for k in range(10)]
    star = make_network(ring, radio_range=6.0)
    assert len(star.neighbors(0)) == 10
    assert len(make_claims_rde(star, 0, replace(ZONE, r=3), rng)) == 3

    counts = np.zeros(len(star), dtype=int)
    for _ in range(10000):
        for dispatch in make_claims_rde(star, 0, ZONE, rng):
            counts[dispatch.first_hop] += 1
    assert counts[0] == 0
    assert stats.chisquare(counts[1:]).pvalue > 0.01


def test_compare_neighbor_lists():
    mine = rde_claim(1, (0, 0), [(7, (5, 5)), (8, (6, 6))])
    assert compare_neighbor_lists(mine, rde_claim(2, (100, 100), [(9, (101, 101))])) is None
    assert compare_neighbor_lists(mine, rde_claim(2, (10, 10), [(7, (5, 5))])) is None

    evidence = compare_neighbor_lists(mine, rde_claim(2, (900, 40), [(7, (900, 40))]))
    assert evidence.identity == NodeId(7)
    assert evidence.claim_b is mine
    assert verify_evidence(evidence)


def test_claimer_itself_is_compared():
    mine = rde_claim(1, (0, 0), [(7, (5, 5))])
    evidence = compare_neighbor_lists(mine, rde_claim(7, (700, 700), []))
    assert evidence.identity == NodeId(7)


def test_ttl_is_not_signed():
    claim = rde_claim(2, (10, 10), [(7, (5, 5))], ttl=9)
    assert replace(claim, ttl=1).verify_signature()
    assert not replace(claim, observer_loc=Location(11, 10)).verify_signature()


def test_last_ttl_is_inspected_then_discarded(make_network):
    net = make_network([(0, 50), (10, 50), (20, 50)], radio_range=12.0)
    zone = replace(ZONE, ttl_init=1)
    msg = own_claim(net, 0, zone)
    result = rde_process_message(net, 1, msg, 0, zone, np.random.default_rng(0), own_claim(net, 1, zone))
    assert result.kind is ProcessKind.DISCARDED
    assert result.discard_reason == TTL_EXPIRED
    assert result.message.ttl == 0

    conflicting = rde_claim(99, (90, 90), [(3, (70, 70))], ttl=1)
    result = rde_process_message(net, 1, conflicting, 0, zone, np.random.default_rng(0), own_claim(net, 1, zone))
    assert result.kind is ProcessKind.WITNESS
    assert result.evidence.identity == NodeId(3)
    assert result.discard_reason == TTL_EXPIRED


def test_forwarding_and_border(make_network):
    net = make_network([(0, 50), (10, 50), (20, 50)], radio_range=12.0)
    zone = replace(ZONE, ttl_init=10)
    rng = np.random.default_rng(0)
    msg = own_claim(net, 0, zone)
    step = rde_process_message(net, 1, msg, 0, zone, rng, own_claim(net, 1, zone))
    assert step.kind is ProcessKind.FORWARDED and step.next_hop == 2
    assert step.message.ttl == 9
    end = rde_process_message(net, 2, step.message, 1, zone, rng, own_claim(net, 2, zone))
    assert end.discard_reason == BORDER


def test_adversarial_hops(make_network):
    points = [(0, 50), (10, 50), (20, 50)]
    zone = replace(ZONE, ttl_init=10)
    rng = np.random.default_rng(0)
    dropper = make_network(points, 12.0, behaviors={1: Behavior.DROPPER})
    result = rde_process_message(dropper, 1, own_claim(dropper, 0, zone), 0, zone, rng, own_claim(dropper, 1, zone))
    assert result.discard_reason == DROPPED

    modifier = make_network(points, 12.0, behaviors={1: Behavior.MODIFIER})
    result = rde_process_message(modifier, 1, own_claim(modifier, 0, zone), 0, zone, rng, own_claim(modifier, 1, zone))
    assert result.kind is ProcessKind.FORWARDED
    assert not result.message.verify_signature()
    downstream = rde_process_message(modifier, 2, result.message, 1, zone, rng, own_claim(modifier, 2, zone))
    assert downstream.kind is ProcessKind.DISCARDED


def test_witness_between_two_replicas(small_net):
    cfg = AdversaryConfig(
        cloned_identities=1, placement=Placement.FIXED,
        fixed_locations=(Location(250.0, 250.0), Location(750.0, 750.0)),
    )
    net = inject_clones(small_net, cfg, np.random.default_rng(5))
    clone_id = net.cloned_identities()[0]
    a, b = net.replicas_of(clone_id)
    near_a = [int(i) for i in net.neighbors(a) if not net.nodes[int(i)].is_clone]
    near_b = [int(i) for i in net.neighbors(b) if not net.nodes[int(i)].is_clone]
    if not near_a or not near_b:
        pytest.skip("a replica landed without honest neighbors")
    zone = ZoneConfig.for_network(len(net))
    node = near_a[0]
    sender = int(net.neighbors(node)[0])
    result = rde_process_message(net, node, own_claim(net, near_b[0], zone), sender, zone,
                                 np.random.default_rng(0), own_claim(net, node, zone))
    assert result.kind is ProcessKind.WITNESS
    assert result.evidence.identity == clone_id


def test_round_without_clones_is_sound_and_bounded(small_net):
    zone = ZoneConfig.for_network(len(small_net))
    report = run_rde_round(small_net, zone, np.random.default_rng(2))
    assert report.witness_ids == () and report.detected_identities == set()
    assert report.evidence_flood_messages == 0
    assert max(report.line_messages) <= zone.ttl_init
    assert report.border_discards > 0
    assert report.messages_per_node <= math.sqrt(len(small_net))
    assert report.claims_sent == len(report.line_messages) == len(report.exploration_reach)
    assert all(1 <= h <= zone.ttl_init for h in report.exploration_reach)


def test_nodes_never_buffer_claims(small_net):
    net = inject_clones(small_net, AdversaryConfig(cloned_identities=1), np.random.default_rng(8))
    report = run_rde_round(net, ZoneConfig.for_network(len(net), r=3), np.random.default_rng(8))
    assert report.buffered_claims_peak == 0

    participating = report.cache_sizes > 0
    assert participating.any()
    degrees = np.array([net.degree(i) for i in range(len(net))])
    sizes, floor = report.cache_sizes[participating], degrees[participating]
    assert np.all(sizes >= floor)
    assert np.all(sizes <= floor + len(report.detected_identities))
    if report.detected_identities:
        assert np.any(sizes > floor)


def test_lines_bend_within_the_target_zone(small_net):
    zone = ZoneConfig.for_network(len(small_net), trace=True)
    report = run_rde_round(small_net, zone, np.random.default_rng(4))
    deviations = []
    for trace in report.traces:
        points = [small_net.nodes[i].location for i in [trace.origin] + trace.visited]
        for k in range(2, len(points)):
            turn = angle_diff(direction(points[k - 1], points[k]), direction(points[k - 2], points[k - 1]))
            deviations.append(abs(turn))
    assert deviations
    assert max(deviations) <= zone.theta_t + 1e-9
    assert np.mean(deviations) < zone.theta_p


def test_round_with_clone_reports_consistently(small_net):
    net = inject_clones(small_net, AdversaryConfig(cloned_identities=1), np.random.default_rng(8))
    report = run_rde_round(net, ZoneConfig.for_network(len(net), r=3), np.random.default_rng(8))
    assert report.detected_identities <= set(net.cloned_identities())
    for identity in report.detected_identities:
        assert report.witness_count(identity) >= 1
        assert report.revocations[identity] > 0


def test_default_ttl():
    assert default_ttl(1000) == 32
    assert default_ttl(100) == 10
    assert ZoneConfig.for_network(1000).ttl_init == 32
    with pytest.raises(ValueError):
        ZoneConfig(theta_t=0.1, theta_p=0.2).validate()

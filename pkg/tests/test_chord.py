import math

import numpy as np
import pytest

from network import DeploymentConfig, Location, NodeId, deploy_network
from overlay import (
    HopKind,
    OverlayError,
    RingEntry,
    build_overlay,
    build_ring,
    finger_count,
    next_overlay_hop,
    owner_oracle,
    route_key,
)
from security import RingPoint


def ring_of(values, bits=16):
    return [RingEntry(NodeId(v + 1), RingPoint(v, bits), Location(0, 0)) for v in values]


def test_predecessor_and_successors():
    overlay = build_ring(ring_of([10, 20, 30]), bits=16, g=1)
    tables = overlay[NodeId(21)]
    assert tables.predecessor.point.value == 10
    assert [s.point.value for s in tables.successors] == [30]
    assert overlay[NodeId(31)].successors[0].point.value == 10


def test_finger_ladder():
    overlay = build_ring(ring_of([0, 3, 7, 12], bits=4), bits=4, g=1, t=4)
    fingers = overlay[NodeId(1)].fingers
    assert [f.point.value for f in fingers] == [12, 7, 3, 3]


def test_default_finger_count():
    assert finger_count(1) == 0
    assert finger_count(2) == 1
    assert finger_count(64) == 6
    assert finger_count(1000) == 10


def test_owner_oracle():
    assert owner_oracle(ring_of([42]), 7) == NodeId(43)
    ring = ring_of([10, 20, 30])
    assert owner_oracle(ring, 15) == NodeId(21)
    assert owner_oracle(ring, 20) == NodeId(21)
    assert owner_oracle(ring, 35) == NodeId(11)
    assert build_ring(ring, bits=16, g=1).owner(35) == NodeId(11)


def test_own_point_is_destination():
    overlay = build_ring(ring_of([10, 20, 30]), bits=16, g=1)
    assert next_overlay_hop(overlay[NodeId(21)], 20).kind is HopKind.DESTINATION
    assert next_overlay_hop(overlay[NodeId(21)], 15).kind is HopKind.DESTINATION


def test_pre_destination_names_the_owner():
    overlay = build_ring(ring_of([10, 20, 30, 40]), bits=16, g=2)
    decision = next_overlay_hop(overlay[NodeId(11)], 25)
    assert decision.kind is HopKind.PRE_DESTINATION
    assert decision.node_id == NodeId(31)


def test_small_ring_exhaustive_against_oracle():
    ring = ring_of([10, 20, 30], bits=6)
    overlay = build_ring(ring, bits=6, g=1)
    for start in overlay:
        for key in range(64):
            assert route_key(overlay, start, key)[-1] == owner_oracle(ring, key)


@pytest.mark.parametrize("g", [2, 8])
def test_routing_matches_oracle(g):
    bits, n = 16, 64
    rng = np.random.default_rng(2024 + g)
    values = sorted(int(v) for v in rng.choice(1 << bits, size=n, replace=False))
    ring = ring_of(values, bits)
    overlay = build_ring(ring, bits=bits, g=g)

    bound = math.ceil(math.log2(n)) + g

    starts = [overlay.ring[int(i)].node_id for i in rng.choice(n, size=16, replace=False)]
    for start in starts:
        for key in rng.integers(0, 1 << bits, size=500):
            key = int(key)
            path = route_key(overlay, start, key)
            owner = owner_oracle(ring, key)
            assert path[-1] == owner
            assert len(path) - 1 <= bound
            owner_point = overlay[owner].self_point
            remaining = [overlay[node].self_point.distance_to(owner_point) for node in path]
            assert all(b < a for a, b in zip(remaining, remaining[1:]))


def test_build_overlay_successor_lists():
    net = deploy_network(DeploymentConfig(n=1000, side=1000.0, target_degree=10, rng_seed=5))
    overlay = build_overlay(net, b=64, g=20)
    assert len(overlay) == 1000
    for node_id, tables in overlay.items():
        assert len(tables.successors) == 20
        gaps = [tables.self_point.distance_to(s.point) for s in tables.successors]
        assert all(0 < a < b for a, b in zip(gaps, gaps[1:])) and gaps[0] > 0
        assert len(tables.fingers) == overlay.t == 10


def test_ring_construction_errors():
    with pytest.raises(OverlayError):
        build_ring(ring_of([10, 20, 30]), bits=16, g=3)
    with pytest.raises(OverlayError):
        build_ring(ring_of([10, 20]), bits=16, g=0)
    clash = ring_of([10, 20]) + [RingEntry(NodeId(99), RingPoint(10, 16), Location(0, 0))]
    with pytest.raises(OverlayError):
        build_ring(clash, bits=16, g=1)
    with pytest.raises(OverlayError):
        build_ring(ring_of([10, 20, 30], bits=8), bits=16, g=1)


def test_predecessors_of():
    overlay = build_ring(ring_of([10, 20, 30, 40]), bits=16, g=2)
    assert overlay.predecessors_of(NodeId(11), 2) == [NodeId(41), NodeId(31)]

from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from adversary import (
    Action,
    AdversaryConfig,
    AdversaryConfigError,
    CloneBehavior,
    MessageContext,
    Placement,
    apply_behavior,
    emits_claims,
    inject_clones,
    joins_overlay,
)
from network import Behavior, Location, NodeId, PhysicalNode
from overlay import build_overlay
from protocols import DhtRoundConfig, overlay_participants, run_dht_round


def node_with(behavior):
    return PhysicalNode(0, NodeId(1), Location(0, 0), is_clone=behavior.is_clone, behavior=behavior)


def test_no_adversary_leaves_network_unchanged(small_net):
    assert inject_clones(small_net, AdversaryConfig(), np.random.default_rng(1)) is small_net


def test_one_identity_two_replicas(small_net):
    net = inject_clones(small_net, AdversaryConfig(cloned_identities=1), np.random.default_rng(1))
    assert len(net) == len(small_net) + 1
    counts = Counter(node.identity for node in net.nodes)
    cloned = [identity for identity, c in counts.items() if c == 2]
    assert len(cloned) == 1 and net.cloned_identities() == cloned

    a, b = (net.nodes[i] for i in net.replicas_of(cloned[0]))
    assert a.is_clone and b.is_clone
    assert a.behavior is b.behavior is Behavior.CLONE_NON_PARTICIPATING
    assert a.location.distance_to(b.location) > net.radio_range
    assert sum(node.is_clone for node in net.nodes) == 2


def test_fixed_placement_at_opposite_corners(small_net):
    cfg = AdversaryConfig(
        cloned_identities=1,
        placement=Placement.FIXED,
        fixed_locations=(Location(1.0, 1.0), Location(999.0, 999.0)),
        clone_behavior=CloneBehavior.PARTICIPATING,
    )
    net = inject_clones(small_net, cfg, np.random.default_rng(3))
    identity = net.cloned_identities()[0]
    locations = sorted(net.nodes[i].location for i in net.replicas_of(identity))
    assert locations == [Location(1.0, 1.0), Location(999.0, 999.0)]
    assert all(net.nodes[i].behavior is Behavior.CLONE_PARTICIPATING for i in net.replicas_of(identity))


def test_droppers_are_chosen_among_honest_nodes(small_net):
    cfg = AdversaryConfig(cloned_identities=2, dropper_fraction=0.1)
    net = inject_clones(small_net, cfg, np.random.default_rng(9))
    droppers = [node for node in net.nodes if node.behavior is Behavior.DROPPER]
    assert len(droppers) == 30
    assert not any(node.is_clone for node in droppers)


def test_modify_enabled_turns_droppers_into_modifiers(small_net):
    cfg = AdversaryConfig(dropper_fraction=0.05, modify_enabled=True)
    net = inject_clones(small_net, cfg, np.random.default_rng(9))
    behaviors = Counter(node.behavior for node in net.nodes)
    assert behaviors[Behavior.MODIFIER] == 15
    assert behaviors[Behavior.DROPPER] == 0


def test_injection_is_deterministic(small_net):
    cfg = AdversaryConfig(cloned_identities=3, dropper_fraction=0.1)
    first = inject_clones(small_net, cfg, np.random.default_rng(4))
    second = inject_clones(small_net, cfg, np.random.default_rng(4))
    assert first.fingerprint() == second.fingerprint()


@pytest.mark.parametrize("cfg", [
    AdversaryConfig(cloned_identities=-1),
    AdversaryConfig(cloned_identities=1, replicas_per_identity=1),
    AdversaryConfig(dropper_fraction=1.5),
    AdversaryConfig(cloned_identities=1, placement=Placement.FIXED, fixed_locations=(Location(1, 1),)),
    AdversaryConfig(
        cloned_identities=1, placement=Placement.FIXED,
        fixed_locations=(Location(1, 1), Location(2000, 1)),
    ),
    AdversaryConfig(
        cloned_identities=1, placement=Placement.FIXED,
        fixed_locations=(Location(1, 1), Location(2, 2)),
    ),
])
def test_unrealizable_configs_raise(small_net, cfg):
    with pytest.raises(AdversaryConfigError):
        inject_clones(small_net, cfg, np.random.default_rng(0))


@pytest.mark.parametrize("behavior,relay,inspect", [
    (Behavior.HONEST, Action.FORWARD, Action.FORWARD),
    (Behavior.DROPPER, Action.DROP, Action.DROP),
    (Behavior.MODIFIER, Action.MODIFY, Action.DROP),
    (Behavior.CLONE_PARTICIPATING, Action.FORWARD, Action.DROP),
    (Behavior.CLONE_NON_PARTICIPATING, Action.FORWARD, Action.DROP),
])
def test_behavior_table(behavior, relay, inspect):
    node = node_with(behavior)
    for _ in range(3):
        assert apply_behavior(node, MessageContext.RELAY) is relay
        assert apply_behavior(node, MessageContext.INSPECT) is inspect


def test_non_participating_clones_stay_silent():
    assert not emits_claims(node_with(Behavior.CLONE_NON_PARTICIPATING))
    assert not joins_overlay(node_with(Behavior.CLONE_NON_PARTICIPATING))
    assert emits_claims(node_with(Behavior.CLONE_PARTICIPATING))
    assert joins_overlay(node_with(Behavior.DROPPER))


def test_more_droppers_never_add_witnesses(small_net):
    # droppers are nested: each fraction extends the previous set
    fractions = (0.0, 0.05, 0.1, 0.2)
    cfg = DhtRoundConfig(p_c=1.0, g=5, b=32)
    for seed in range(3):
        net = inject_clones(small_net, AdversaryConfig(cloned_identities=1), np.random.default_rng(seed))
        clone_id = net.cloned_identities()[0]
        overlay = build_overlay(net, b=32, g=5, participants=overlay_participants(net))
        honest = [i for i, node in enumerate(net.nodes) if not node.is_clone]
        order = [int(i) for i in np.random.default_rng(100 + seed).permutation(honest)]
        witnesses = []
        for fraction in fractions:
            marked = set(order[:int(fraction * len(small_net))])
            nodes = [replace(node, behavior=Behavior.DROPPER) if i in marked else node
                     for i, node in enumerate(net.nodes)]
            report = run_dht_round(net.with_nodes(nodes), overlay, cfg, np.random.default_rng(seed))
            witnesses.append(report.witness_count(clone_id))
        assert witnesses == sorted(witnesses, reverse=True)

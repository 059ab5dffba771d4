"""
Clone injection and dropper assignment.
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from network import Behavior, Location, Network, PhysicalNode

logger = logging.getLogger(__name__)

MAX_PLACEMENT_ATTEMPTS = 1000


class AdversaryConfigError(ValueError):
    """Raised for adversary settings that cannot be realized."""


class Placement(Enum):
    UNIFORM_RANDOM = "uniform_random"
    FIXED = "fixed"


class CloneBehavior(Enum):
    PARTICIPATING = "participating"
    NON_PARTICIPATING = "non_participating"

    def as_behavior(self) -> Behavior:
        if self is CloneBehavior.PARTICIPATING:
            return Behavior.CLONE_PARTICIPATING
        return Behavior.CLONE_NON_PARTICIPATING


@dataclass(frozen=True)
class AdversaryConfig:
    """
    With FIXED placement, fixed_locations lists every replica of every cloned
    identity in order (replicas_per_identity per identity); the captured
    original is redeployed at the first location of its group.
    """
    cloned_identities: int = 0
    replicas_per_identity: int = 2
    placement: Placement = Placement.UNIFORM_RANDOM
    fixed_locations: Tuple[Location, ...] = ()
    dropper_fraction: float = 0.0
    clone_behavior: CloneBehavior = CloneBehavior.NON_PARTICIPATING
    modify_enabled: bool = False

    def validate(self, n: int, side: float):
        if self.cloned_identities < 0:
            raise AdversaryConfigError("cloned_identities must be >= 0")
        if self.cloned_identities > n:
            raise AdversaryConfigError(f"cannot clone {self.cloned_identities} of {n} identities")
        if self.replicas_per_identity < 2:
            raise AdversaryConfigError("replicas_per_identity must be >= 2")
        if not 0.0 <= self.dropper_fraction <= 1.0:
            raise AdversaryConfigError(f"dropper_fraction must be in [0, 1], got {self.dropper_fraction}")
        if self.placement is Placement.FIXED:
            needed = self.cloned_identities * self.replicas_per_identity
            if len(self.fixed_locations) != needed:
                raise AdversaryConfigError(
                    f"FIXED placement needs {needed} locations, got {len(self.fixed_locations)}"
                )
            for loc in self.fixed_locations:
                if not loc.inside(side):
                    raise AdversaryConfigError(f"placement {loc} lies outside the region [0, {side}]^2")


def _far_from_twins(loc: Location, twins: Sequence[Location], radio_range: float) -> bool:
    return all(loc.distance_to(t) > radio_range for t in twins)


def _random_replica_location(
    twins: Sequence[Location], net: Network, rng: np.random.Generator
) -> Location:
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        x, y = rng.uniform(0.0, net.side, size=2)
        loc = Location(float(x), float(y))
        if _far_from_twins(loc, twins, net.radio_range):
            return loc
        logger.warning("replica landed within radio range of its twin at %s; re-placing", loc)
    raise AdversaryConfigError("could not place a replica out of radio range of its twins")


def inject_clones(net: Network, cfg: AdversaryConfig, rng: np.random.Generator) -> Network:
    """
    Capture cloned_identities legitimate identities, deploy the extra replicas,
    tag every replica (the original included) as a clone, and turn
    dropper_fraction of the remaining nodes into droppers (modifiers when
    modify_enabled).
    """
    cfg.validate(len(net), net.side)
    n_original = len(net)
    dropper_count = int(round(cfg.dropper_fraction * n_original))
    if cfg.cloned_identities == 0 and dropper_count == 0:
        return net

    nodes: List[PhysicalNode] = list(net.nodes)
    clone_tag = cfg.clone_behavior.as_behavior()
    victims = rng.choice(n_original, size=cfg.cloned_identities, replace=False) if cfg.cloned_identities else []

    for group, victim in enumerate(int(v) for v in victims):
        original = nodes[victim]
        if cfg.placement is Placement.FIXED:
            group_locs = cfg.fixed_locations[group * cfg.replicas_per_identity:(group + 1) * cfg.replicas_per_identity]
            for i, loc in enumerate(group_locs):
                if not _far_from_twins(loc, group_locs[:i], net.radio_range):
                    raise AdversaryConfigError(f"fixed replica {loc} is within radio range of its twin")
            nodes[victim] = replace(original, location=group_locs[0], is_clone=True, behavior=clone_tag)
            extra_locs = list(group_locs[1:])
        else:
            nodes[victim] = replace(original, is_clone=True, behavior=clone_tag)
            twins = [original.location]
            extra_locs = []
            for _ in range(cfg.replicas_per_identity - 1):
                loc = _random_replica_location(twins, net, rng)
                twins.append(loc)
                extra_locs.append(loc)

        for loc in extra_locs:
            nodes.append(PhysicalNode(
                physical_index=len(nodes),
                identity=original.identity,
                location=loc,
                is_clone=True,
                behavior=clone_tag,
            ))

    if dropper_count:
        honest = [i for i in range(n_original) if not nodes[i].is_clone]
        dropper_count = min(dropper_count, len(honest))
        tag = Behavior.MODIFIER if cfg.modify_enabled else Behavior.DROPPER
        for i in sorted(int(k) for k in rng.choice(honest, size=dropper_count, replace=False)):
            nodes[i] = replace(nodes[i], behavior=tag)

    logger.debug(
        "injected %d cloned identities x %d replicas, %d %s nodes",
        cfg.cloned_identities, cfg.replicas_per_identity, dropper_count,
        "modifier" if cfg.modify_enabled else "dropper",
    )
    return net.with_nodes(nodes)

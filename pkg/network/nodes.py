from dataclasses import dataclass
from enum import Enum
from typing import NewType

from .geometry import Location

NodeId = NewType("NodeId", int)

# Reserved identity of the round initiator; never assigned to a sensor.
INITIATOR_ID = NodeId(0)


class Behavior(Enum):
    """Per-node adversary behavior tag."""
    HONEST = "honest"
    DROPPER = "dropper"
    MODIFIER = "modifier"
    CLONE_PARTICIPATING = "clone_participating"
    CLONE_NON_PARTICIPATING = "clone_non_participating"

    @property
    def is_clone(self) -> bool:
        return self in (Behavior.CLONE_PARTICIPATING, Behavior.CLONE_NON_PARTICIPATING)

    @property
    def is_adversarial(self) -> bool:
        return self is not Behavior.HONEST


@dataclass(frozen=True)
class PhysicalNode:
    physical_index: int
    identity: NodeId
    location: Location
    is_clone: bool = False
    behavior: Behavior = Behavior.HONEST

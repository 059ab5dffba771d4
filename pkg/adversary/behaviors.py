"""
Per-node misbehavior policy: what an adversarial node does with a detection
message it is asked to relay or inspect.
"""
import logging
from enum import Enum

from network import Behavior, Location, PhysicalNode

logger = logging.getLogger(__name__)


class MessageContext(Enum):
    RELAY = "relay"
    INSPECT = "inspect"


class Action(Enum):
    FORWARD = "forward"
    DROP = "drop"
    MODIFY = "modify"


def apply_behavior(node: PhysicalNode, context: MessageContext) -> Action:
    """
    Honest nodes always forward and inspect. Droppers drop everything.
    Modifiers perturb what they relay and never inspect. Clones relay
    faithfully to stay hidden but never inspect, so they never witness.

    DROP in the INSPECT context means "skips inspection"; DROP in the RELAY
    context means the message dies at this node.
    """
    behavior = node.behavior
    if behavior is Behavior.HONEST:
        return Action.FORWARD
    if behavior is Behavior.DROPPER:
        return Action.DROP
    if behavior is Behavior.MODIFIER:
        return Action.MODIFY if context is MessageContext.RELAY else Action.DROP
    # clones
    return Action.FORWARD if context is MessageContext.RELAY else Action.DROP


def emits_claims(node: PhysicalNode) -> bool:
    return node.behavior is not Behavior.CLONE_NON_PARTICIPATING


def joins_overlay(node: PhysicalNode) -> bool:
    return node.behavior is not Behavior.CLONE_NON_PARTICIPATING


def perturb_location(loc: Location) -> Location:
    """A modifier's tampering: shift the claimed location by one meter."""
    logger.debug("modifying claimed location %s; downstream signature checks will discard it", loc)
    return Location(loc.x + 1.0, loc.y)

"""
Round activation: the initiator's signed action message and its acceptance rule.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from network import INITIATOR_ID, Location, Network, NodeId
from security import Signature, encode_action, sign, verify

from .flooding import flood


@dataclass(frozen=True)
class ActionMessage:
    nonce: int
    seed: int
    time: int
    sig: Optional[Signature] = None

    def signed_bytes(self) -> bytes:
        return encode_action(self.nonce, self.seed, self.time)


@dataclass
class NodeRoundState:
    """What a node remembers between rounds: the last accepted nonce and seed."""
    stored_nonce: int = 0
    seed: Optional[int] = None


def make_action_message(initiator: NodeId, nonce: int, seed: int, time: int) -> ActionMessage:
    unsigned = ActionMessage(nonce=nonce, seed=seed, time=time)
    return ActionMessage(nonce=nonce, seed=seed, time=time, sig=sign(unsigned.signed_bytes(), initiator))


def validate_action(state: NodeRoundState, msg: ActionMessage, initiator: NodeId = INITIATOR_ID) -> bool:
    """
    Accept iff the initiator's signature verifies and the nonce is fresh.
    Acceptance stores the nonce and the seed; rejection leaves state untouched.
    """
    if not verify(msg.signed_bytes(), msg.sig, initiator):
        return False
    if msg.nonce <= state.stored_nonce:
        return False
    state.stored_nonce = msg.nonce
    state.seed = msg.seed
    return True


@dataclass
class Activation:
    participants: List[int]
    messages: int
    states: Dict[int, NodeRoundState] = field(default_factory=dict)


def activate_round(net: Network, msg: ActionMessage, states: Optional[Dict[int, NodeRoundState]] = None) -> Activation:
    """
    Flood the action message from the node nearest the region centre.
    Nodes that accept it take part in the round; unreachable nodes do not.
    """
    if states is None:
        states = {i: NodeRoundState(stored_nonce=msg.nonce - 1) for i in range(len(net))}
    origin = net.nearest_to(Location(net.side / 2.0, net.side / 2.0))
    if not validate_action(states[origin], msg):
        return Activation(participants=[], messages=0, states=states)
    result = flood(net, origin, lambda i: validate_action(states[i], msg))
    return Activation(participants=sorted(result.reached), messages=result.messages, states=states)

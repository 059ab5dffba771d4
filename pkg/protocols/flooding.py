"""
Flooding with duplicate suppression over radio adjacency.
"""
from collections import deque
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from network import Network


@dataclass
class FloodResult:
    reached: List[int]
    messages: int


def flood(net: Network, origin: int, accept: Callable[[int], bool]) -> FloodResult:
    """
    Broadcast from `origin`. Each node hears the flood at most once; a node
    rebroadcasts (one transmission) only if accept(index) returns True.
    The origin always transmits and is not passed to accept.
    """
    heard = np.zeros(len(net), dtype=bool)
    heard[origin] = True
    queue = deque([origin])
    reached = [origin]
    messages = 0
    while queue:
        sender = queue.popleft()
        messages += 1
        for receiver in net.neighbors(sender):
            receiver = int(receiver)
            if heard[receiver]:
                continue
            heard[receiver] = True
            if accept(receiver):
                reached.append(receiver)
                queue.append(receiver)
    return FloodResult(reached=reached, messages=messages)

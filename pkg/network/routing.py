"""
Greedy geographic forwarding, the physical transport under both protocols.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .deployment import Network
from .geometry import LOCATION_EPSILON, Location

VOID_REGION = "void_region"


@dataclass(frozen=True)
class RouteResult:
    path: Tuple[int, ...]
    delivered: bool
    failure: Optional[str] = None

    @property
    def hops(self) -> int:
        """Physical transmissions charged to the sender side of each hop."""
        return len(self.path) - 1


def greedy_geo_route(net: Network, src: int, dst_loc: Location) -> RouteResult:
    """
    Forward hop by hop to the neighbor strictly closest to dst_loc.

    Terminates at the node located at dst_loc, or fails with VOID_REGION at a
    local minimum; hops taken before the failure still appear in the path.
    """
    target = np.array([dst_loc.x, dst_loc.y])
    positions = net.positions
    current = src
    current_dist = float(np.linalg.norm(positions[current] - target))
    path = [src]

    while current_dist > LOCATION_EPSILON:
        nbrs = net.neighbor_indices[current]
        if len(nbrs) == 0:
            return RouteResult(tuple(path), False, VOID_REGION)
        dists = np.linalg.norm(positions[nbrs] - target, axis=1)
        k = int(np.argmin(dists))
        if dists[k] >= current_dist:
            return RouteResult(tuple(path), False, VOID_REGION)
        current = int(nbrs[k])
        current_dist = float(dists[k])
        path.append(current)

    return RouteResult(tuple(path), True)


class GreedyRouter:
    """Memoizes greedy routes between physical nodes of one immutable network."""

    def __init__(self, net: Network):
        self.net = net
        self._cache: Dict[Tuple[int, int], RouteResult] = {}

    def route(self, src: int, dst: int) -> RouteResult:
        key = (src, dst)
        result = self._cache.get(key)
        if result is None:
            result = greedy_geo_route(self.net, src, self.net.nodes[dst].location)
            self._cache[key] = result
        return result

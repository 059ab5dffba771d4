"""
Sensor network deployment: uniform placement in a square region and
unit-disk neighbor discovery.
"""
import hashlib
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.neighbors import radius_neighbors_graph

from .geometry import Location
from .nodes import NodeId, PhysicalNode

logger = logging.getLogger(__name__)


class DeploymentError(ValueError):
    """Raised for deployment configurations that cannot produce a network."""


@dataclass(frozen=True)
class DeploymentConfig:
    n: int = 1000
    side: float = 1000.0
    radio_range: Optional[float] = None
    target_degree: Optional[float] = None
    rng_seed: int = 1

    def validate(self):
        if self.n < 2:
            raise DeploymentError(f"n must be >= 2, got {self.n}")
        if self.side <= 0:
            raise DeploymentError(f"side must be positive, got {self.side}")
        if self.target_degree is None and (self.radio_range is None or self.radio_range <= 0):
            raise DeploymentError("either radio_range > 0 or target_degree >= 1 is required")
        if self.target_degree is not None and self.target_degree < 1:
            raise DeploymentError(f"target_degree must be >= 1, got {self.target_degree}")

    def resolved_radio_range(self) -> float:
        """Radio range, derived from target_degree when that is given."""
        if self.target_degree is not None:
            return self.side * math.sqrt(self.target_degree / (math.pi * self.n))
        return float(self.radio_range)

    def expected_degree(self) -> float:
        r = self.resolved_radio_range()
        return self.n * math.pi * r * r / (self.side * self.side)


class Network:
    """
    Immutable deployed topology.

    Adjacency is symmetric: u hears v iff v hears u iff their distance is
    within radio_range. Every adjacency entry carries the neighbor's true
    location (nodes are stationary).
    """

    def __init__(self, nodes: Sequence[PhysicalNode], side: float, radio_range: float):
        self.nodes: Tuple[PhysicalNode, ...] = tuple(nodes)
        self.side = float(side)
        self.radio_range = float(radio_range)
        for i, node in enumerate(self.nodes):
            if node.physical_index != i:
                raise DeploymentError(f"physical_index {node.physical_index} at position {i}")

        self.positions = np.array([[nd.location.x, nd.location.y] for nd in self.nodes], dtype=float)
        self.positions.setflags(write=False)
        self.neighbor_indices: Tuple[np.ndarray, ...] = self._discover_neighbors()
        self.adjacency: Tuple[Tuple[Tuple[NodeId, Location], ...], ...] = tuple(
            tuple((self.nodes[j].identity, self.nodes[j].location) for j in nbrs)
            for nbrs in self.neighbor_indices
        )

        replicas: Dict[NodeId, List[int]] = {}
        for node in self.nodes:
            replicas.setdefault(node.identity, []).append(node.physical_index)
        self._replicas = {k: tuple(v) for k, v in replicas.items()}

    def _discover_neighbors(self) -> Tuple[np.ndarray, ...]:
        graph = radius_neighbors_graph(
            self.positions, radius=self.radio_range, mode="connectivity", include_self=False
        )
        # Symmetrize so floating-point edge cases cannot produce one-way links
        graph = graph.maximum(graph.T).tocsr()
        graph.sort_indices()
        result = []
        for i in range(len(self.nodes)):
            nbrs = graph.indices[graph.indptr[i]:graph.indptr[i + 1]].astype(np.int64)
            nbrs.setflags(write=False)
            result.append(nbrs)
        return tuple(result)

    def __len__(self) -> int:
        return len(self.nodes)

    def neighbors(self, index: int) -> np.ndarray:
        return self.neighbor_indices[index]

    def degree(self, index: int) -> int:
        return len(self.neighbor_indices[index])

    def mean_degree(self) -> float:
        return float(np.mean([len(nbrs) for nbrs in self.neighbor_indices]))

    def replicas_of(self, node_id: NodeId) -> Tuple[int, ...]:
        return self._replicas.get(node_id, ())

    def identities(self) -> List[NodeId]:
        return sorted(self._replicas)

    def cloned_identities(self) -> List[NodeId]:
        return sorted(k for k, v in self._replicas.items() if len(v) >= 2)

    def nearest_replica(self, node_id: NodeId, origin: Location) -> int:
        """Physical index of the replica of node_id closest to origin (ties: lowest index)."""
        candidates = self.replicas_of(node_id)
        if not candidates:
            raise KeyError(f"unknown identity {node_id}")
        return min(candidates, key=lambda i: (self.nodes[i].location.distance_to(origin), i))

    def nearest_to(self, location: Location) -> int:
        deltas = self.positions - np.array([location.x, location.y])
        return int(np.argmin(np.einsum("ij,ij->i", deltas, deltas)))

    def with_nodes(self, nodes: Sequence[PhysicalNode]) -> "Network":
        """A new network over the same region and radio range (adjacency recomputed)."""
        return Network(nodes, self.side, self.radio_range)

    def fingerprint(self) -> str:
        """Digest over every node and adjacency list; equal networks give equal digests."""
        digest = hashlib.sha256()
        digest.update(self.positions.tobytes())
        for node in self.nodes:
            digest.update(f"{node.identity}|{node.is_clone}|{node.behavior.value};".encode())
        for nbrs in self.neighbor_indices:
            digest.update(np.ascontiguousarray(nbrs).tobytes())
            digest.update(b"/")
        return digest.hexdigest()


def deploy_network(cfg: DeploymentConfig) -> Network:
    """
    Place cfg.n nodes uniformly at random in [0, side]^2 and discover neighbors.
    Deterministic for a fixed rng_seed.
    """
    cfg.validate()
    radio_range = cfg.resolved_radio_range()
    if cfg.expected_degree() < 1.0:
        logger.warning(
            "expected node degree %.3f < 1 (n=%d, side=%g, range=%g); network will be sparse",
            cfg.expected_degree(), cfg.n, cfg.side, radio_range,
        )

    rng = np.random.default_rng(cfg.rng_seed)
    coords = rng.uniform(0.0, cfg.side, size=(cfg.n, 2))
    nodes = [
        PhysicalNode(
            physical_index=i,
            identity=NodeId(i + 1),
            location=Location(float(coords[i, 0]), float(coords[i, 1])),
        )
        for i in range(cfg.n)
    ]
    network = Network(nodes, cfg.side, radio_range)
    logger.debug("deployed n=%d range=%.3f mean degree=%.3f", cfg.n, radio_range, network.mean_degree())
    return network

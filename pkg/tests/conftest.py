import sys
from pathlib import Path

import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from network import DeploymentConfig, Location, Network, NodeId, PhysicalNode, deploy_network


def build_network(points, radio_range, side=100.0, behaviors=None):
    """Network over explicit coordinates; identity i+1 at physical index i."""
    nodes = []
    for i, (x, y) in enumerate(points):
        node = PhysicalNode(physical_index=i, identity=NodeId(i + 1), location=Location(float(x), float(y)))
        if behaviors and i in behaviors:
            node = PhysicalNode(i, node.identity, node.location, behavior=behaviors[i])
        nodes.append(node)
    return Network(nodes, side, radio_range)


@pytest.fixture
def make_network():
    return build_network


@pytest.fixture
def grid_network():
    """10 x 10 grid, 10 m spacing, 4-connected."""
    points = [(5.0 + 10.0 * col, 5.0 + 10.0 * row) for row in range(10) for col in range(10)]
    return build_network(points, radio_range=10.5, side=100.0)


@pytest.fixture(scope="session")
def small_net():
    return deploy_network(DeploymentConfig(n=300, side=1000.0, target_degree=12, rng_seed=3))

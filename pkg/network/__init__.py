"""
Physical sensor network model: placement, neighbor discovery, geometry and
greedy geographic transport.
"""
from .geometry import LOCATION_EPSILON, Location, angle_diff, direction
from .nodes import INITIATOR_ID, Behavior, NodeId, PhysicalNode
from .deployment import DeploymentConfig, DeploymentError, Network, deploy_network
from .routing import VOID_REGION, GreedyRouter, RouteResult, greedy_geo_route

__all__ = [
    "LOCATION_EPSILON",
    "Location",
    "angle_diff",
    "direction",
    "INITIATOR_ID",
    "Behavior",
    "NodeId",
    "PhysicalNode",
    "DeploymentConfig",
    "DeploymentError",
    "Network",
    "deploy_network",
    "VOID_REGION",
    "GreedyRouter",
    "RouteResult",
    "greedy_geo_route",
]

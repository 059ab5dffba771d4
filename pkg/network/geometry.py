"""
Planar geometry primitives for the deployment region.
Locations are exact reals; two locations are "the same" within LOCATION_EPSILON.
"""
import math
from dataclasses import dataclass

LOCATION_EPSILON = 1e-9


@dataclass(frozen=True, order=True)
class Location:
    """A point in the square deployment region, in meters."""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Location coordinates must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: "Location") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def same_place(self, other: "Location", eps: float = LOCATION_EPSILON) -> bool:
        return self.distance_to(other) <= eps

    def inside(self, side: float) -> bool:
        return 0.0 <= self.x <= side and 0.0 <= self.y <= side


def direction(origin: Location, target: Location) -> float:
    """
    Bearing of the vector origin -> target, in (-pi, pi].

    Raises:
        ValueError: if the two points coincide (no bearing exists).
    """
    dx = target.x - origin.x
    dy = target.y - origin.y
    if dx == 0.0 and dy == 0.0:
        raise ValueError("direction() is undefined for coincident points")
    angle = math.atan2(dy, dx)
    # atan2 may return -pi for (negative, -0.0); fold it onto +pi
    if angle == -math.pi:
        angle = math.pi
    return angle


def angle_diff(a: float, b: float) -> float:
    """Wrapped difference a - b in (-pi, pi]."""
    diff = math.fmod(a - b, 2.0 * math.pi)
    if diff > math.pi:
        diff -= 2.0 * math.pi
    elif diff <= -math.pi:
        diff += 2.0 * math.pi
    return diff

"""
Closed-form predictions for the detection protocols, used as oracles by the
experiment harness.
"""
import math
from typing import Tuple


def _check_common(g: float, p_r: float, m: float):
    if g < 1:
        raise ValueError(f"g must be >= 1, got {g}")
    if not 0.0 <= p_r <= 1.0:
        raise ValueError(f"p_r must be in [0, 1], got {p_r}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")


def analytic_dht_cache_size_general(g: float, p_r: float, m: float) -> float:
    """Average cache table size s = 1 + g(1 - (1 - p_r)^m)."""
    _check_common(g, p_r, m)
    return 1.0 + g * (1.0 - (1.0 - p_r) ** m)


def analytic_dht_witness_general(g: float, p_r: float, m: float) -> float:
    """Average witness number w = 1 + g(1 - (1 - p_r)^m)^2."""
    _check_common(g, p_r, m)
    return 1.0 + g * (1.0 - (1.0 - p_r) ** m) ** 2


def analytic_dht_ideal(g: float, m: float) -> Tuple[float, float]:
    """
    Ideal-case cache size and two-replica witness count:
    s = 1 + gm/(g+m), w = 1 + 2gm^2/((g+m)(g+2m)).
    """
    if g < 1 or m < 1:
        raise ValueError(f"need g >= 1 and m >= 1, got g={g}, m={m}")
    s = 1.0 + g * m / (g + m)
    w = 1.0 + 2.0 * g * m * m / ((g + m) * (g + 2.0 * m))
    return s, w


def analytic_dht_comm_cost(p_c: float, d: float, c: float, l: float, n: float) -> float:
    """Messages sent per node per round: p_c * d * c * l * log2(n)."""
    if min(p_c, d, c, l, n) <= 0:
        raise ValueError("all communication-cost parameters must be positive")
    return p_c * d * c * l * math.log2(n)


def rde_detection_probability(h: float, n: float) -> float:
    """P = h / n, with h the number of nodes an exploration line reaches."""
    if n <= 0 or not 0 <= h <= n:
        raise ValueError(f"need 0 <= h <= n and n > 0, got h={h}, n={n}")
    return h / n


def relative_error(measured: float, predicted: float) -> float:
    if predicted == 0:
        return 0.0 if measured == 0 else math.inf
    return abs(measured - predicted) / abs(predicted)

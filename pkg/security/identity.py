"""
Chord ring coordinates and detection keys.

Both are SHA-256 digests of canonical bytes truncated to the top b bits, so
results are bit-identical on every platform.
"""
import hashlib
from dataclasses import dataclass

from network import NodeId

from .encoding import encode_u64

HASH_NAME = "sha256"
DEFAULT_RING_BITS = 64
MIN_RING_BITS = 1
MAX_RING_BITS = 64


def _check_bits(bits: int):
    if not MIN_RING_BITS <= bits <= MAX_RING_BITS:
        raise ValueError(f"ring bit-width must be in [{MIN_RING_BITS}, {MAX_RING_BITS}], got {bits}")


def _truncated_digest(data: bytes, bits: int) -> int:
    _check_bits(bits)
    top = int.from_bytes(hashlib.sha256(data).digest()[:8], "big")
    return top >> (64 - bits)


@dataclass(frozen=True, order=True)
class RingPoint:
    """A point on the 2^bits Chord ring."""
    value: int
    bits: int = DEFAULT_RING_BITS

    def __post_init__(self):
        _check_bits(self.bits)
        if not 0 <= self.value < (1 << self.bits):
            raise ValueError(f"ring value {self.value} outside [0, 2^{self.bits})")

    @property
    def modulus(self) -> int:
        return 1 << self.bits

    def advance(self, offset: int) -> "RingPoint":
        return RingPoint((self.value + offset) % self.modulus, self.bits)

    def distance_to(self, other: "RingPoint") -> int:
        """Clockwise distance from self to other."""
        return (other.value - self.value) % self.modulus

    def __int__(self) -> int:
        return self.value


def in_interval(x: int, a: int, b: int, bits: int) -> bool:
    """
    Half-open wrap-aware interval membership x in (a, b] on the 2^bits ring.
    (a, a] is the full ring.
    """
    modulus = 1 << bits
    x, a, b = x % modulus, a % modulus, b % modulus
    if a == b:
        return True
    if a < b:
        return a < x <= b
    return x > a or x <= b


def chord_coordinate(node_id: NodeId, bits: int = DEFAULT_RING_BITS) -> RingPoint:
    """Ring coordinate of an identity; the simulated MAC address is the NodeId itself."""
    return RingPoint(_truncated_digest(encode_u64(node_id), bits), bits)


def detection_key(seed: int, examinee: NodeId, bits: int = DEFAULT_RING_BITS) -> RingPoint:
    """key = H(seed || id_examinee); independent of the observer."""
    return RingPoint(_truncated_digest(encode_u64(seed) + encode_u64(examinee), bits), bits)

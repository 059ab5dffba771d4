from .encoding import (
    encode_action,
    encode_claim_dht,
    encode_claim_rde,
    encode_location,
    encode_neighbor_list,
)
from .identity import (
    DEFAULT_RING_BITS,
    HASH_NAME,
    RingPoint,
    chord_coordinate,
    detection_key,
    in_interval,
)
from .signatures import Signature, sign, verify

__all__ = [
    "encode_action",
    "encode_claim_dht",
    "encode_claim_rde",
    "encode_location",
    "encode_neighbor_list",
    "DEFAULT_RING_BITS",
    "HASH_NAME",
    "RingPoint",
    "chord_coordinate",
    "detection_key",
    "in_interval",
    "Signature",
    "sign",
    "verify",
]

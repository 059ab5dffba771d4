"""
Canonical byte encodings of every signed or hashed structure.

Layout rules: fields in the documented order, unsigned integers as 8-byte
big-endian, locations as two big-endian IEEE-754 doubles (x then y), lists
prefixed with a 4-byte big-endian element count.

These layouts are stable: claims and evidence are signed over them.
"""
import struct
from typing import Iterable, Tuple

from network import Location, NodeId

_U64 = struct.Struct(">Q")
_U32 = struct.Struct(">I")
_LOC = struct.Struct(">dd")

TAG_ACTION = b"ACT"
TAG_CLAIM_DHT = b"CDH"
TAG_CLAIM_RDE = b"CRD"


def encode_u64(value: int) -> bytes:
    return _U64.pack(value)


def encode_location(loc: Location) -> bytes:
    return _LOC.pack(loc.x, loc.y)


def encode_action(nonce: int, seed: int, time: int) -> bytes:
    """nonce || seed || time"""
    return TAG_ACTION + _U64.pack(nonce) + _U64.pack(seed) + _U64.pack(time)


def encode_claim_dht(
    examinee_id: NodeId,
    examinee_loc: Location,
    observer_id: NodeId,
    observer_loc: Location,
    nonce: int,
) -> bytes:
    """id_beta || L_beta || id_alpha || L_alpha || nonce"""
    return (
        TAG_CLAIM_DHT
        + _U64.pack(examinee_id)
        + encode_location(examinee_loc)
        + _U64.pack(observer_id)
        + encode_location(observer_loc)
        + _U64.pack(nonce)
    )


def encode_neighbor_list(entries: Iterable[Tuple[NodeId, Location]]) -> bytes:
    entries = list(entries)
    body = b"".join(_U64.pack(node_id) + encode_location(loc) for node_id, loc in entries)
    return _U32.pack(len(entries)) + body


def encode_claim_rde(
    observer_id: NodeId,
    observer_loc: Location,
    neighbor_list: Iterable[Tuple[NodeId, Location]],
    nonce: int,
) -> bytes:
    """id_alpha || L_alpha || neighbor list || nonce (ttl is not covered)"""
    return (
        TAG_CLAIM_RDE
        + _U64.pack(observer_id)
        + encode_location(observer_loc)
        + encode_neighbor_list(neighbor_list)
        + _U64.pack(nonce)
    )

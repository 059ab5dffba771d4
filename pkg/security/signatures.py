"""
Simulated signatures: deterministic keyed tags over canonical bytes.

Each identity's signing key is derived from the identity, so whoever holds
an identity's credentials (the node itself, or the adversary after capture)
can sign for it. Protocol code only ever signs as the identity of the
physical node doing the signing.
"""
import hashlib
import hmac
from dataclasses import dataclass

from network import NodeId

from .encoding import encode_u64

TAG_BYTES = 16
_KEY_DOMAIN = b"clonesim/identity-key/v1"


@dataclass(frozen=True)
class Signature:
    tag: bytes
    signer: NodeId


def _private_key(signer: NodeId) -> bytes:
    return hashlib.sha256(_KEY_DOMAIN + encode_u64(signer)).digest()


def sign(msg_bytes: bytes, signer: NodeId) -> Signature:
    tag = hmac.new(_private_key(signer), msg_bytes, hashlib.sha256).digest()[:TAG_BYTES]
    return Signature(tag=tag, signer=signer)


def verify(msg_bytes: bytes, sig: Signature, claimed_signer: NodeId) -> bool:
    if sig is None or sig.signer != claimed_signer:
        return False
    expected = sign(msg_bytes, claimed_signer).tag
    return hmac.compare_digest(expected, sig.tag)

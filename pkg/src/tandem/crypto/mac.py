"""Hash-based MAC with a public key commitment.

The tag construction is t = H(k || m) with H = SHA3-256, plus a commitment
h = H(k) that is carried alongside the tag.  Verification accepts only if
both the commitment and the message digest match, which is what gives the
scheme key authenticity on top of unforgeability.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .rng import Rng

KEY_LEN = 32
DIGEST_LEN = 32


def _h(data: bytes) -> bytes:
    return hashlib.sha3_256(data).digest()


@dataclass(frozen=True)
class MacKey:
    bytes: bytes

    def __post_init__(self):
        if len(self.bytes) != KEY_LEN:
            raise ValueError(f"MAC key must be {KEY_LEN} bytes")

    @classmethod
    def generate(cls, rng: Rng) -> "MacKey":
        return cls(rng.bytes(KEY_LEN))


@dataclass(frozen=True)
class MacTag:
    tag: bytes
    key_commitment: bytes

    def __post_init__(self):
        if len(self.tag) != DIGEST_LEN or len(self.key_commitment) != DIGEST_LEN:
            raise ValueError("tag and key commitment must be 32 bytes")


def mac_tag(key: MacKey, message: bytes) -> MacTag:
    return MacTag(tag=_h(key.bytes + message), key_commitment=_h(key.bytes))


def mac_verify(key: MacKey, message: bytes, tag: MacTag) -> bool:
    """Accept iff H(k) matches the commitment and H(k || m) matches the tag."""
    return _h(key.bytes) == tag.key_commitment and _h(key.bytes + message) == tag.tag


def keyed_hash(key: MacKey, data: bytes) -> bytes:
    """Deterministic 32-byte digest H(key || data); used as a sort key when
    shuffling stored tables."""
    return _h(key.bytes + data)

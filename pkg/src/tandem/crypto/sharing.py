"""MAC-then-share: authenticated XOR secret sharing.

A message is MAC'd under a fresh key, then the message and the key are each
XOR-split into two shares.  Both halves carry the same tag.  Reconstruction
verifies the tag over the XOR-recombined key and message, so any modification
of either share is detected.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .mac import KEY_LEN, MacKey, MacTag, mac_tag, mac_verify
from .rng import Rng


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("xor_bytes length mismatch")
    return (int.from_bytes(a, "little") ^ int.from_bytes(b, "little")).to_bytes(
        len(a), "little"
    )


class Invalid:
    """Sentinel returned when authenticity checks fail."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INVALID"

    def __bool__(self):
        return False


INVALID = Invalid()


@dataclass(frozen=True)
class Share:
    m: bytes
    k: bytes
    tag: MacTag

    def to_bytes(self) -> bytes:
        """Binary framing: [u32 len | m][32B k][32B t][32B h], little-endian."""
        return (
            struct.pack("<I", len(self.m))
            + self.m
            + self.k
            + self.tag.tag
            + self.tag.key_commitment
        )

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Share":
        (mlen,) = struct.unpack_from("<I", raw, 0)
        off = 4
        m = raw[off : off + mlen]
        off += mlen
        k = raw[off : off + 32]
        t = raw[off + 32 : off + 64]
        h = raw[off + 64 : off + 96]
        if len(raw) != off + 96:
            raise ValueError("malformed share framing")
        return cls(m=m, k=k, tag=MacTag(tag=t, key_commitment=h))


@dataclass(frozen=True)
class AuthenticatedSharePair:
    share1: Share
    share2: Share


def mts_share(message: bytes, rng: Rng) -> AuthenticatedSharePair:
    """Split a message into two authenticated shares.

    The second share is a fresh uniform pad (message and key), the first is
    the XOR of the secret with that pad; both carry the tag over the original
    key and message.
    """
    if not message:
        raise ValueError("cannot share an empty message")
    k = MacKey.generate(rng)
    t = mac_tag(k, message)
    m2 = rng.bytes(len(message))
    k2 = rng.bytes(KEY_LEN)
    m1 = xor_bytes(message, m2)
    k1 = xor_bytes(k.bytes, k2)
    return AuthenticatedSharePair(
        share1=Share(m=m1, k=k1, tag=t),
        share2=Share(m=m2, k=k2, tag=t),
    )


def mts_rec(pair: AuthenticatedSharePair) -> bytes | Invalid:
    """Recombine and verify a share pair; INVALID on any tampering."""
    s1, s2 = pair.share1, pair.share2
    if len(s1.m) != len(s2.m):
        return INVALID
    if s1.tag != s2.tag:
        return INVALID
    k = MacKey(xor_bytes(s1.k, s2.k))
    m = xor_bytes(s1.m, s2.m)
    if not mac_verify(k, m, s1.tag):
        return INVALID
    return m

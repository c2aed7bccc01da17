"""Encrypt-then-MAC row sealing.

The cipher is a counter-mode keystream derived from SHA3-256, so the whole
toolbox rests on a single primitive.  The MAC covers nonce || ciphertext and
decryption refuses to proceed unless it verifies.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .mac import MacKey, MacTag, mac_tag, mac_verify
from .sharing import INVALID, Invalid, xor_bytes

NONCE_LEN = 16


def keystream(key: MacKey, nonce: bytes, n: int) -> bytes:
    """Counter-mode stream: H(key || nonce || counter) blocks, truncated to n."""
    if len(nonce) != NONCE_LEN:
        raise ValueError(f"nonce must be {NONCE_LEN} bytes")
    blocks = []
    for ctr in range((n + 31) // 32):
        blocks.append(
            hashlib.sha3_256(key.bytes + nonce + ctr.to_bytes(4, "little")).digest()
        )
    return b"".join(blocks)[:n]


@dataclass(frozen=True)
class EtmRecord:
    ciphertext: bytes
    mac: MacTag
    nonce: bytes

    def to_bytes(self) -> bytes:
        return self.nonce + self.mac.tag + self.mac.key_commitment + self.ciphertext

    @classmethod
    def from_bytes(cls, raw: bytes) -> "EtmRecord":
        nonce, t, h = raw[:16], raw[16:48], raw[48:80]
        return cls(ciphertext=raw[80:], mac=MacTag(tag=t, key_commitment=h), nonce=nonce)


def etm_seal(enc_key: MacKey, mac_key: MacKey, plaintext: bytes, nonce: bytes) -> EtmRecord:
    """Seal a record.  The caller must not reuse a nonce under the same key."""
    ct = xor_bytes(plaintext, keystream(enc_key, nonce, len(plaintext)))
    return EtmRecord(ciphertext=ct, mac=mac_tag(mac_key, nonce + ct), nonce=nonce)


def etm_open(enc_key: MacKey, mac_key: MacKey, record: EtmRecord) -> bytes | Invalid:
    if not mac_verify(mac_key, record.nonce + record.ciphertext, record.mac):
        return INVALID
    return xor_bytes(
        record.ciphertext, keystream(enc_key, record.nonce, len(record.ciphertext))
    )


def derived_nonce(key: MacKey, data: bytes) -> bytes:
    """Deterministic nonce for sealing values that must be re-derivable, such
    as primary keys that get looked up by recomputing their sealed form."""
    return hashlib.sha3_256(b"nonce" + key.bytes + data).digest()[:NONCE_LEN]

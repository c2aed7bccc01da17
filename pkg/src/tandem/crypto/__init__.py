"""MACs, XOR secret sharing, MAC-then-share, encrypt-then-MAC, keyed hashing."""

from .mac import MacKey, MacTag, mac_tag, mac_verify, keyed_hash
from .rng import DeterministicRng, SystemRng, Rng
from .sealing import EtmRecord, etm_seal, etm_open, keystream
from .sharing import (
    INVALID,
    Invalid,
    AuthenticatedSharePair,
    Share,
    mts_share,
    mts_rec,
    xor_bytes,
)

__all__ = [
    "MacKey",
    "MacTag",
    "mac_tag",
    "mac_verify",
    "keyed_hash",
    "DeterministicRng",
    "SystemRng",
    "Rng",
    "EtmRecord",
    "etm_seal",
    "etm_open",
    "keystream",
    "INVALID",
    "Invalid",
    "AuthenticatedSharePair",
    "Share",
    "mts_share",
    "mts_rec",
    "xor_bytes",
]

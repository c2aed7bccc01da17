"""Plain-integer Keccak, independent of hashlib.

Serves two purposes: a cross-check oracle for the hashlib-backed MAC, and the
host-side counterpart of the in-circuit sponge when a round-reduced permutation
is configured for fast tests.  Round-reduced digests are NOT cryptographically
secure and are only ever used in test configurations.
"""

from __future__ import annotations

_RHO = [
    0, 1, 62, 28, 27,
    36, 44, 6, 55, 20,
    3, 10, 43, 25, 39,
    41, 45, 15, 21, 8,
    18, 2, 61, 56, 14,
]

ROUND_CONSTANTS = [
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A,
    0x8000000080008000, 0x000000000000808B, 0x0000000080000001,
    0x8000000080008081, 0x8000000000008009, 0x000000000000008A,
    0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089,
    0x8000000000008003, 0x8000000000008002, 0x8000000000000080,
    0x000000000000800A, 0x800000008000000A, 0x8000000080008081,
    0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
]

MASK64 = (1 << 64) - 1
RATE_BYTES = 136  # SHA3-256 rate (1088 bits)
FULL_ROUNDS = 24


def _rotl(x: int, n: int) -> int:
    n %= 64
    return ((x << n) | (x >> (64 - n))) & MASK64


def keccak_f1600(lanes: list[int], rounds: int = FULL_ROUNDS) -> list[int]:
    """One permutation over 25 64-bit lanes, lane order a[x + 5y]."""
    a = list(lanes)
    for rc in ROUND_CONSTANTS[:rounds]:
        # theta
        c = [a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20] for x in range(5)]
        d = [c[(x - 1) % 5] ^ _rotl(c[(x + 1) % 5], 1) for x in range(5)]
        a = [a[i] ^ d[i % 5] for i in range(25)]
        # rho + pi
        b = [0] * 25
        for x in range(5):
            for y in range(5):
                b[y + 5 * ((2 * x + 3 * y) % 5)] = _rotl(a[x + 5 * y], _RHO[x + 5 * y])
        # chi
        a = [
            b[x + 5 * y] ^ ((~b[(x + 1) % 5 + 5 * y] & MASK64) & b[(x + 2) % 5 + 5 * y])
            for y in range(5)
            for x in range(5)
        ]
        # iota
        a[0] ^= rc
    return a


def _absorb_block(state: list[int], block: bytes) -> list[int]:
    out = list(state)
    for i in range(len(block) // 8):
        out[i] ^= int.from_bytes(block[8 * i : 8 * i + 8], "little")
    return out


def sha3_256_ref(data: bytes, rounds: int = FULL_ROUNDS) -> bytes:
    """SHA3-256 with a configurable round count (24 = the real function)."""
    state = [0] * 25
    # pad10*1 with the SHA3 domain bits: 0x06 ... 0x80
    padded = bytearray(data)
    pad_len = RATE_BYTES - (len(data) % RATE_BYTES)
    padded += b"\x06" + b"\x00" * (pad_len - 2) + b"\x80" if pad_len >= 2 else b"\x86"
    for off in range(0, len(padded), RATE_BYTES):
        state = _absorb_block(state, bytes(padded[off : off + RATE_BYTES]))
        state = keccak_f1600(state, rounds)
    return b"".join(state[i].to_bytes(8, "little") for i in range(4))

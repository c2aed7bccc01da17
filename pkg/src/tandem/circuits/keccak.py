"""Keccak-f[1600] as a boolean circuit, and gadgets built on it.

The chi step costs 1600 AND gates per round; everything else is XOR/NOT or
free rewiring, so a full 24-round permutation is ~38k AND gates.  A
round-reduced variant can be configured for fast tests; it is NOT secure and
host-side verification must then use the matching round count from
crypto.keccak_ref.
"""

from __future__ import annotations

from ..crypto.keccak_ref import FULL_ROUNDS, RATE_BYTES, ROUND_CONSTANTS, _RHO
from .core import CircuitBuilder, P1, P2, WireVec
from .gadgets import eq, xor_vec

LANE = 64
STATE_BITS = 1600


def _rotl_vec(v: WireVec, n: int) -> WireVec:
    n %= LANE
    if n == 0:
        return v
    # bit i of output = bit (i - n) mod 64 of input; pure rewiring
    return WireVec([v[(i - n) % LANE] for i in range(LANE)])


def keccak_f_gadget(b: CircuitBuilder, lanes: list, rounds: int = FULL_ROUNDS) -> list:
    """Apply the permutation to 25 lane WireVecs (lane order a[x + 5y])."""
    a = list(lanes)
    for rc in ROUND_CONSTANTS[:rounds]:
        # theta
        c = []
        for x in range(5):
            col = a[x]
            for y in range(1, 5):
                col = xor_vec(b, col, a[x + 5 * y])
            c.append(col)
        d = [xor_vec(b, c[(x - 1) % 5], _rotl_vec(c[(x + 1) % 5], 1)) for x in range(5)]
        a = [xor_vec(b, a[i], d[i % 5]) for i in range(25)]
        # rho + pi (rewiring only)
        bb = [None] * 25
        for x in range(5):
            for y in range(5):
                bb[y + 5 * ((2 * x + 3 * y) % 5)] = _rotl_vec(a[x + 5 * y], _RHO[x + 5 * y])
        # chi: out = b0 ^ (~b1 & b2)
        a = []
        for y in range(5):
            for x in range(5):
                b0 = bb[x + 5 * y]
                b1 = bb[(x + 1) % 5 + 5 * y]
                b2 = bb[(x + 2) % 5 + 5 * y]
                bits = []
                for i in range(LANE):
                    t = b.gate_and(b.gate_not(b1[i]), b2[i])
                    bits.append(b.gate_xor(b0[i], t))
                a.append(WireVec(bits))
        # iota: xor the round constant into lane 0
        lane0 = list(a[0])
        for i in range(LANE):
            if (rc >> i) & 1:
                lane0[i] = b.gate_not(lane0[i])
        a[0] = WireVec(lane0)
    return a


def sha3_256_gadget(b: CircuitBuilder, msg_bits: WireVec, rounds: int = FULL_ROUNDS) -> WireVec:
    """Single-block SHA3-256 over a fixed-length bit-string (LSB-first within
    bytes).  Message must fit one rate block: at most 135 bytes."""
    if len(msg_bits) % 8:
        raise ValueError("message must be a whole number of bytes")
    nbytes = len(msg_bits) // 8
    if nbytes > RATE_BYTES - 1:
        raise ValueError(f"single-block gadget supports <= {RATE_BYTES - 1} bytes")
    # absorbed block = msg || 0x06 || 0x00.. || 0x80, then zero capacity
    pad = bytearray(RATE_BYTES - nbytes)
    pad[0] |= 0x06
    pad[-1] |= 0x80
    block_bits = list(msg_bits)
    for byte in pad:
        block_bits.extend((byte >> i) & 1 for i in range(8))
    block_bits.extend([0] * (STATE_BITS - RATE_BYTES * 8))
    lanes = [WireVec(block_bits[64 * i : 64 * (i + 1)]) for i in range(25)]
    out = keccak_f_gadget(b, lanes, rounds)
    return out[0].concat(out[1], out[2], out[3])


def build_keccak_f(rounds: int = FULL_ROUNDS):
    """Standalone permutation circuit: 1600 state bits in and out."""
    b = CircuitBuilder()
    state = b.add_input("state", P1, STATE_BITS)
    lanes = [state[64 * i : 64 * (i + 1)] for i in range(25)]
    out = keccak_f_gadget(b, lanes, rounds)
    b.add_output("state", WireVec([w for lane in out for w in lane]))
    return b.build()


def build_mac_verify_gadget(message_bits: int, rounds: int = FULL_ROUNDS):
    """Accepts (message, key, tag); outputs 1 bit: SHA3(key || message) == tag.

    Key and message arrive XOR-shared between the parties, the tag is public
    (held identically by both, supplied by party 1)."""
    b = CircuitBuilder()
    k1 = b.add_input("key_x1", P1, 256)
    k2 = b.add_input("key_x2", P2, 256)
    m1 = b.add_input("msg_x1", P1, message_bits)
    m2 = b.add_input("msg_x2", P2, message_bits)
    tag = b.add_input("tag", P1, 256)
    key = xor_vec(b, k1, k2)
    msg = xor_vec(b, m1, m2)
    digest = sha3_256_gadget(b, key.concat(msg), rounds)
    b.add_output("accept", WireVec([eq(b, digest, tag)]))
    return b.build()

"""AES-128 as a boolean circuit: optional alternative stream gadget.

Off by default; the hash-based keystream in crypto.sealing is what the rest
of the system uses.  The S-box is realized as a one-hot table lookup (the
table itself is derived from GF(2^8) inversion below), trading gate count for
obvious correctness rather than using a hand-optimized S-box circuit.
"""

from __future__ import annotations

from .core import CircuitBuilder, P1, WireVec
from .gadgets import onehot, xor_tree


def _gf_mul(a: int, b: int) -> int:
    p = 0
    for _ in range(8):
        if b & 1:
            p ^= a
        hi = a & 0x80
        a = (a << 1) & 0xFF
        if hi:
            a ^= 0x1B
        b >>= 1
    return p


def _make_sbox() -> list:
    inv = [0] * 256
    for x in range(1, 256):
        for y in range(1, 256):
            if _gf_mul(x, y) == 1:
                inv[x] = y
                break
    box = []
    for x in range(256):
        s = inv[x]
        r = 0
        for i in range(8):
            bit = (
                (s >> i)
                ^ (s >> ((i + 4) % 8))
                ^ (s >> ((i + 5) % 8))
                ^ (s >> ((i + 6) % 8))
                ^ (s >> ((i + 7) % 8))
                ^ (0x63 >> i)
            ) & 1
            r |= bit << i
        box.append(r)
    return box


SBOX = _make_sbox()
RCON = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36]


def _sbox_gadget(b: CircuitBuilder, byte: WireVec) -> WireVec:
    lines = onehot(b, byte)
    # at most one line is active, so each output bit is an XOR fold
    return WireVec(
        [
            xor_tree(b, [lines[v] for v in range(256) if (SBOX[v] >> bit) & 1])
            for bit in range(8)
        ]
    )


def _xtime(b: CircuitBuilder, byte: WireVec) -> WireVec:
    out = [byte[7] if i == 0 else byte[i - 1] for i in range(8)]
    for i in (1, 3, 4):
        out[i] = b.gate_xor(out[i], byte[7])
    return WireVec(out)


def _xor_byte(b, x, y):
    return WireVec([b.gate_xor(a, c) for a, c in zip(x, y)])


def aes128_block_gadget(b: CircuitBuilder, key: list, block: list) -> list:
    """key, block: 16 byte WireVecs each; returns 16 ciphertext bytes."""
    round_keys = [list(key)]
    for rnd in range(10):
        prev = round_keys[-1]
        t = [_sbox_gadget(b, prev[13]), _sbox_gadget(b, prev[14]),
             _sbox_gadget(b, prev[15]), _sbox_gadget(b, prev[12])]
        rcon_bits = RCON[rnd]
        w0 = []
        first = list(_xor_byte(b, prev[0], t[0]))
        for i in range(8):
            if (rcon_bits >> i) & 1:
                first[i] = b.gate_not(first[i])
        w = [WireVec(first)] + [_xor_byte(b, prev[i], t[i]) for i in (1, 2, 3)]
        new = list(w)
        for col in range(1, 4):
            for row in range(4):
                new.append(_xor_byte(b, new[4 * (col - 1) + row], prev[4 * col + row]))
        del w0
        round_keys.append(new)

    state = [_xor_byte(b, block[i], round_keys[0][i]) for i in range(16)]
    for rnd in range(1, 11):
        state = [_sbox_gadget(b, s) for s in state]
        # shift rows (state laid out column-major: index = 4*col + row)
        shifted = [None] * 16
        for col in range(4):
            for row in range(4):
                shifted[4 * col + row] = state[4 * ((col + row) % 4) + row]
        state = shifted
        if rnd < 10:
            mixed = []
            for col in range(4):
                a = state[4 * col : 4 * col + 4]
                x = [_xtime(b, v) for v in a]
                mixed.append(_xor_byte(b, _xor_byte(b, x[0], x[1]), _xor_byte(b, a[1], _xor_byte(b, a[2], a[3]))))
                mixed.append(_xor_byte(b, _xor_byte(b, x[1], x[2]), _xor_byte(b, a[2], _xor_byte(b, a[3], a[0]))))
                mixed.append(_xor_byte(b, _xor_byte(b, x[2], x[3]), _xor_byte(b, a[3], _xor_byte(b, a[0], a[1]))))
                mixed.append(_xor_byte(b, _xor_byte(b, x[3], x[0]), _xor_byte(b, a[0], _xor_byte(b, a[1], a[2]))))
            state = mixed
        state = [_xor_byte(b, state[i], round_keys[rnd][i]) for i in range(16)]
    return state


def build_aes128():
    """Standalone AES-128 single-block encryption circuit."""
    b = CircuitBuilder()
    key_bits = b.add_input("key", P1, 128)
    blk_bits = b.add_input("block", P1, 128)
    key = [key_bits[8 * i : 8 * (i + 1)] for i in range(16)]
    blk = [blk_bits[8 * i : 8 * (i + 1)] for i in range(16)]
    ct = aes128_block_gadget(b, key, blk)
    b.add_output("ciphertext", WireVec([w for byte in ct for w in byte]))
    return b.build()

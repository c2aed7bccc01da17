"""In-circuit Bloom filter for set-membership during trajectory queries.

The filter state is a B-bit wire bundle threaded through calls.  Positions
come from keyed hashing: one Keccak sponge call over (key || element) yields
all h positions, each log2(B) bits, so the per-operation cost is one
permutation plus h one-hot decodes over the state.
"""

from __future__ import annotations

from .core import CircuitBuilder, P1, P2, WireVec
from .gadgets import and_tree, onehot, or2, xor_vec
from .keccak import FULL_ROUNDS, sha3_256_gadget

BLOOM_KEY_BITS = 256


def _check_params(capacity_bits: int, hash_count: int):
    if capacity_bits < 2 or capacity_bits & (capacity_bits - 1):
        raise ValueError("Bloom capacity must be a power of two")
    if hash_count < 1:
        raise ValueError("hash_count must be >= 1")
    index_bits = capacity_bits.bit_length() - 1
    if hash_count * index_bits > 256:
        raise ValueError("hash_count * log2(capacity) exceeds one digest")


def bloom_positions(
    b: CircuitBuilder, key: WireVec, element: WireVec,
    capacity_bits: int, hash_count: int, rounds: int = FULL_ROUNDS,
) -> list:
    """h index vectors (log2 B bits each), truncated from one keyed digest."""
    _check_params(capacity_bits, hash_count)
    index_bits = capacity_bits.bit_length() - 1
    digest = sha3_256_gadget(b, key.concat(element), rounds)
    return [
        digest[i * index_bits : (i + 1) * index_bits] for i in range(hash_count)
    ]


def bloom_insert(
    b: CircuitBuilder, state: WireVec, key: WireVec, element: WireVec,
    capacity_bits: int, hash_count: int, rounds: int = FULL_ROUNDS,
    enabled: int | None = None,
) -> WireVec:
    """Set the h positions for element; returns the new state.  When `enabled`
    is given, the insert is a no-op if that wire is 0 (same circuit shape)."""
    positions = bloom_positions(b, key, element, capacity_bits, hash_count, rounds)
    cells = list(state)
    for pos in positions:
        lines = onehot(b, pos)
        for i in range(capacity_bits):
            line = lines[i]
            if enabled is not None:
                line = b.gate_and(line, enabled)
            cells[i] = or2(b, cells[i], line)
    return WireVec(cells)


def bloom_query(
    b: CircuitBuilder, state: WireVec, key: WireVec, element: WireVec,
    capacity_bits: int, hash_count: int, rounds: int = FULL_ROUNDS,
) -> int:
    """1 iff all h positions for element are set (no false negatives)."""
    positions = bloom_positions(b, key, element, capacity_bits, hash_count, rounds)
    hits = []
    for pos in positions:
        lines = onehot(b, pos)
        # lines are one-hot so the disjunction of products is a plain XOR fold
        acc = b.zero
        for line, cell in zip(lines, state):
            acc = b.gate_xor(acc, b.gate_and(line, cell))
        hits.append(acc)
    return and_tree(b, hits)


def build_bloom_insert(
    element_bits: int, capacity_bits: int, hash_count: int,
    rounds: int = FULL_ROUNDS,
):
    """Standalone insert: (state, key, element) -> state'."""
    b = CircuitBuilder()
    state = b.add_input("state", P1, capacity_bits)
    key = b.add_input("key", P1, BLOOM_KEY_BITS)
    elem = b.add_input("element", P1, element_bits)
    out = bloom_insert(b, state, key, elem, capacity_bits, hash_count, rounds)
    b.add_output("state", out)
    return b.build()


def build_bloom_query(
    element_bits: int, capacity_bits: int, hash_count: int,
    rounds: int = FULL_ROUNDS,
):
    """Standalone query: (state, key, element) -> 1 bit."""
    b = CircuitBuilder()
    state = b.add_input("state", P1, capacity_bits)
    key = b.add_input("key", P1, BLOOM_KEY_BITS)
    elem = b.add_input("element", P1, element_bits)
    hit = bloom_query(b, state, key, elem, capacity_bits, hash_count, rounds)
    b.add_output("member", WireVec([hit]))
    return b.build()


def expected_false_positive_rate(capacity_bits: int, hash_count: int, n_inserted: int) -> float:
    """Analytic (1 - e^{-hn/B})^h approximation."""
    import math

    return (1.0 - math.exp(-hash_count * n_inserted / capacity_bits)) ** hash_count

"""Oblivious sorting, merging and compaction networks over record bundles.

All three are comparator/switch networks whose wiring depends only on the
record count and layout, never on data.  Sort keys are made unique by
appending the input position as low-order tie-break bits, which makes the
network's output deterministic and equal to a stable sort of the original
keys; compaction is order-preserving for unmarked records by construction.
"""

from __future__ import annotations

from .core import CircuitBuilder, P1, P2, WireVec
from .gadgets import cond_swap, inc_if, lt_unsigned, xor_vec


def _check_pow2(n: int):
    if n < 1 or n & (n - 1):
        raise ValueError(f"record count must be a power of two, got {n}")


def comparator_count_sort(n: int) -> int:
    """Closed form for the Batcher bitonic sorting network."""
    _check_pow2(n)
    m = n.bit_length() - 1
    return n * m * (m + 1) // 4


def comparator_count_merge(n: int) -> int:
    _check_pow2(n)
    return (n // 2) * (n.bit_length() - 1)


def _tiebreak_width(n: int) -> int:
    return max(1, (n - 1).bit_length())


def _comparator(b, bundles, keys, i, j, ascending: bool):
    if ascending:
        sel = lt_unsigned(b, keys[j], keys[i])  # out of order: swap
    else:
        sel = lt_unsigned(b, keys[i], keys[j])
    bundles[i], bundles[j] = cond_swap(b, sel, bundles[i], bundles[j])
    ki, kj = cond_swap(b, sel, keys[i], keys[j])
    keys[i], keys[j] = ki, kj


def sort_records(b: CircuitBuilder, records: list, key_of, counter=None) -> list:
    """Append a bitonic sort over `records` (list of WireVec), ascending by
    key_of(record) with position tie-breaks.  Returns the sorted records."""
    n = len(records)
    _check_pow2(n)
    if n == 1:
        return list(records)
    tw = _tiebreak_width(n)
    bundles = list(records)
    keys = [b.const_vec(i, tw).concat(key_of(r)) for i, r in enumerate(records)]
    m = n.bit_length() - 1
    for stage in range(1, m + 1):
        k = 1 << stage
        for sub in range(stage - 1, -1, -1):
            j = 1 << sub
            for i in range(n):
                l = i ^ j
                if l > i:
                    ascending = (i & k) == 0
                    _comparator(b, bundles, keys, i, l, ascending)
                    if counter is not None:
                        counter[0] += 1
    return bundles


def merge_records(b: CircuitBuilder, half_a: list, half_b: list, key_of, counter=None) -> list:
    """Append a bitonic merge of two ascending-sorted halves; duplicates are
    retained and ties resolve to half_a before half_b."""
    if len(half_a) != len(half_b):
        raise ValueError("merge halves must be the same length")
    n = 2 * len(half_a)
    _check_pow2(n)
    tw = _tiebreak_width(n)
    # reversing the second half makes the whole sequence bitonic
    bundles = list(half_a) + list(reversed(half_b))
    order = list(range(len(half_a))) + list(reversed(range(len(half_a), n)))
    keys = [b.const_vec(order[i], tw).concat(key_of(r)) for i, r in enumerate(bundles)]
    sub = n // 2
    while sub >= 1:
        for i in range(n):
            l = i ^ sub
            if l > i:
                _comparator(b, bundles, keys, i, l, ascending=True)
                if counter is not None:
                    counter[0] += 1
        sub //= 2
    return bundles


def compact_records(b: CircuitBuilder, records: list, mark_of, counter=None) -> list:
    """Append an order-preserving compaction: unmarked records move to the
    front keeping their relative order, marked records end up after them.

    Each unmarked record at position i must shift left by the number of
    marked records before it; routing that offset bit by bit through
    log n phases of width-2^k switches is collision-free because unmarked
    ranks are strictly increasing.
    """
    n = len(records)
    _check_pow2(n)
    if n == 1:
        return list(records)
    ow = _tiebreak_width(n)
    # prefix count of marked records strictly before each position
    offsets = []
    run = b.const_vec(0, ow)
    for rec in records:
        offsets.append(run)
        run = inc_if(b, run, mark_of(rec))
    bundles = list(records)
    marks = [mark_of(r) for r in records]
    for k in range(ow):
        step = 1 << k
        if step >= n:
            break
        for p in range(step, n):
            not_marked = b.gate_not(marks[p])
            sel = b.gate_and(offsets[p][k], not_marked)
            left, right = cond_swap(b, sel, bundles[p - step], bundles[p])
            bundles[p - step], bundles[p] = left, right
            oleft, oright = cond_swap(b, sel, offsets[p - step], offsets[p])
            offsets[p - step], offsets[p] = oleft, oright
            mleft, mright = cond_swap(
                b, sel, WireVec([marks[p - step]]), WireVec([marks[p]])
            )
            marks[p - step], marks[p] = mleft[0], mright[0]
            if counter is not None:
                counter[0] += 1
    return bundles


# ------------------------------------------------------------ standalone ops


def _record_inputs(b: CircuitBuilder, n: int, width: int, shared: bool) -> list:
    if shared:
        x1 = b.add_input("records_x1", P1, n * width)
        x2 = b.add_input("records_x2", P2, n * width)
        flat = xor_vec(b, x1, x2)
    else:
        flat = b.add_input("records", P1, n * width)
    return [flat[i * width : (i + 1) * width] for i in range(n)]


def build_bitonic_sort(
    n: int, record_width: int, key_offset: int = 0, key_width: int | None = None,
    shared_inputs: bool = False,
):
    """Standalone sort circuit over n fixed-width records."""
    _check_pow2(n)
    if key_width is None:
        key_width = record_width
    b = CircuitBuilder()
    records = _record_inputs(b, n, record_width, shared_inputs)
    out = sort_records(b, records, lambda r: r[key_offset : key_offset + key_width])
    b.add_output("records", WireVec([w for r in out for w in r]))
    return b.build()


def build_bitonic_merge(
    n: int, record_width: int, key_offset: int = 0, key_width: int | None = None,
    shared_inputs: bool = False,
):
    """Standalone merge of two sorted halves of n/2 records each."""
    _check_pow2(n)
    if key_width is None:
        key_width = record_width
    b = CircuitBuilder()
    records = _record_inputs(b, n, record_width, shared_inputs)
    out = merge_records(
        b,
        records[: n // 2],
        records[n // 2 :],
        lambda r: r[key_offset : key_offset + key_width],
    )
    b.add_output("records", WireVec([w for r in out for w in r]))
    return b.build()


def build_compaction(n: int, record_width: int, mark_offset: int, shared_inputs: bool = False):
    """Standalone compaction circuit; mark bit lives at mark_offset."""
    _check_pow2(n)
    b = CircuitBuilder()
    records = _record_inputs(b, n, record_width, shared_inputs)
    out = compact_records(b, records, lambda r: r[mark_offset])
    b.add_output("records", WireVec([w for r in out for w in r]))
    return b.build()

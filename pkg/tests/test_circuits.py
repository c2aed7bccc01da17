import numpy as np
import pytest

from tandem.circuits import BooleanCircuit, CircuitBuilder, WireVec, eval_cleartext
from tandem.circuits.core import bits_from_int, int_from_bits
from tandem.circuits.gadgets import (
    add,
    add_saturating,
    cond_swap,
    eq,
    inc_if,
    lt_unsigned,
    mux,
    onehot,
    or_tree,
    select_bit,
)
from tandem.circuits.scan import build_linear_scan, count_where_step, field_equals, mark_where_step, sum_field_step
from tandem.circuits.sortnet import (
    build_bitonic_merge,
    build_bitonic_sort,
    build_compaction,
    comparator_count_merge,
    comparator_count_sort,
    compact_records,
    merge_records,
    sort_records,
)
from tandem.crypto import DeterministicRng


# ------------------------------------------------------------------ core


def test_single_xor_gate():
    b = CircuitBuilder()
    x = b.add_input("x", 1, 2)
    b.add_output("out", WireVec([b.gate_xor(x[0], x[1])]))
    c = b.build()
    out = eval_cleartext(c, {"x": [True, False]})
    assert out.tolist() == [True]


def test_two_bit_adder():
    b = CircuitBuilder()
    x = b.add_input("x", 1, 2)
    y = b.add_input("y", 1, 2)
    s, carry = add(b, x, y)
    b.add_output("sum", s)
    b.add_output("carry", WireVec([carry]))
    c = b.build()
    out = eval_cleartext(c, {"x": bits_from_int(1, 2), "y": bits_from_int(1, 2)})
    assert int_from_bits(out[:2]) == 2 and not out[2]


def _random_circuit(rng, n_inputs, n_gates):
    b = CircuitBuilder()
    x = b.add_input("x", 1, n_inputs)
    wires = list(x)
    for _ in range(n_gates):
        op = rng.randbelow(3)
        a = wires[rng.randbelow(len(wires))]
        if op == 0:
            wires.append(b.gate_xor(a, wires[rng.randbelow(len(wires))]))
        elif op == 1:
            wires.append(b.gate_and(a, wires[rng.randbelow(len(wires))]))
        else:
            wires.append(b.gate_not(a))
    b.add_output("out", WireVec(wires[-8:]))
    return b.build()


def _truth_table_interp(circuit, x_bits):
    """Independent reference: plain per-gate dict interpreter."""
    vals = {0: False, 1: True}
    group = circuit.group("x")
    for w, bit in zip(group.wires, x_bits):
        vals[w] = bool(bit)
    for g in range(circuit.n_gates):
        a = vals[int(circuit.gin0[g])]
        if circuit.gate_op[g] == 0:
            r = a ^ vals[int(circuit.gin1[g])]
        elif circuit.gate_op[g] == 1:
            r = a and vals[int(circuit.gin1[g])]
        else:
            r = not a
        vals[int(circuit.gout[g])] = r
    return [vals[int(w)] for w in circuit.output_wires]


def test_random_circuits_match_truth_table_interpreter():
    rng = DeterministicRng(100)
    c = _random_circuit(rng, 8, 200)
    batch = np.array(
        [[(v >> i) & 1 for v in range(256)] for i in range(8)], dtype=bool
    )
    got = eval_cleartext(c, {"x": batch}, batch=256)
    for v in range(256):
        expect = _truth_table_interp(c, [(v >> i) & 1 for i in range(8)])
        assert got[:, v].tolist() == expect


def test_serialization_round_trip():
    rng = DeterministicRng(101)
    c = _random_circuit(rng, 8, 50)
    c2 = BooleanCircuit.from_bytes(c.to_bytes())
    assert c2.structural_digest() == c.structural_digest()
    x = bits_from_int(0xA5, 8)
    assert (eval_cleartext(c, {"x": x}) == eval_cleartext(c2, {"x": x})).all()


# ------------------------------------------------------------------ gadgets


@pytest.mark.parametrize("xv,yv", [(0, 0), (3, 9), (15, 15), (13, 2), (7, 8)])
def test_lt_eq_mux(xv, yv):
    b = CircuitBuilder()
    x = b.add_input("x", 1, 4)
    y = b.add_input("y", 1, 4)
    b.add_output("lt", WireVec([lt_unsigned(b, x, y)]))
    b.add_output("eq", WireVec([eq(b, x, y)]))
    s, _ = add(b, x, y)
    b.add_output("sum", s)
    c = b.build()
    out = eval_cleartext(c, {"x": bits_from_int(xv, 4), "y": bits_from_int(yv, 4)})
    assert bool(out[0]) == (xv < yv)
    assert bool(out[1]) == (xv == yv)
    assert int_from_bits(out[2:6]) == (xv + yv) % 16


def test_saturating_add():
    b = CircuitBuilder()
    x = b.add_input("x", 1, 4)
    y = b.add_input("y", 1, 4)
    b.add_output("s", add_saturating(b, x, y))
    c = b.build()
    for xv, yv in [(3, 4), (9, 9), (15, 1), (15, 15)]:
        out = eval_cleartext(c, {"x": bits_from_int(xv, 4), "y": bits_from_int(yv, 4)})
        assert int_from_bits(out) == min(xv + yv, 15)


def test_onehot_select():
    b = CircuitBuilder()
    idx = b.add_input("idx", 1, 3)
    cells = b.add_input("cells", 1, 8)
    lines = onehot(b, idx)
    b.add_output("bit", WireVec([select_bit(b, lines, cells)]))
    c = b.build()
    cells_v = bits_from_int(0b10110010, 8)
    for i in range(8):
        out = eval_cleartext(c, {"idx": bits_from_int(i, 3), "cells": cells_v})
        assert bool(out[0]) == bool(cells_v[i])


# ------------------------------------------------------------------ sortnet


def _run_records(circuit, records, width):
    flat = np.concatenate([bits_from_int(r, width) for r in records])
    out = eval_cleartext(circuit, {"records": flat})
    return [int_from_bits(out[i * width : (i + 1) * width]) for i in range(len(records))]


def test_sort_small():
    c = build_bitonic_sort(4, 4)
    assert _run_records(c, [3, 1, 2, 0], 4) == [0, 1, 2, 3]


def test_sort_random_vs_oracle():
    rng = DeterministicRng(102)
    for n in (4, 8, 16):
        c = build_bitonic_sort(n, 8)
        for _ in range(25):
            recs = [rng.randbelow(256) for _ in range(n)]
            assert _run_records(c, recs, 8) == sorted(recs)


def test_sort_discard_bit_pushes_marked_to_end():
    # discard bit as most-significant key: marked records land after unmarked
    rng = DeterministicRng(103)
    n, w = 8, 6  # 5 value bits + discard bit at offset 5
    c = build_bitonic_sort(n, w, key_offset=0, key_width=6)
    for _ in range(100):
        recs = [rng.randbelow(32) | (rng.bit() << 5) for _ in range(n)]
        got = _run_records(c, recs, w)
        marked = [r for r in got if r >> 5]
        unmarked = [r for r in got if not (r >> 5)]
        assert got == unmarked + marked
        assert unmarked == sorted(r for r in recs if not (r >> 5))


def test_sort_is_stable_via_tiebreak():
    # equal keys keep input order because the input index tie-breaks
    c = build_bitonic_sort(8, 8, key_offset=4, key_width=4)
    recs = [0x12, 0x21, 0x15, 0x11, 0x24, 0x18, 0x22, 0x13]
    got = _run_records(c, recs, 8)
    expect = sorted(recs, key=lambda r: r >> 4)  # python sort is stable
    assert got == expect


def test_comparator_count_closed_form():
    for n in (4, 8, 16):
        counter = [0]
        b = CircuitBuilder()
        recs = [b.add_input(f"r{i}", 1, 4) for i in range(n)]
        sort_records(b, recs, lambda r: r, counter=counter)
        assert counter[0] == comparator_count_sort(n)
        assert comparator_count_sort(n) == n * (
            (n.bit_length() - 1) * n.bit_length() // 2
        ) // 2


def test_merge_small():
    c = build_bitonic_merge(4, 4)
    assert _run_records(c, [1, 3, 2, 4], 4) == [1, 2, 3, 4]


def test_merge_retains_duplicates():
    c = build_bitonic_merge(4, 4)
    assert _run_records(c, [1, 1, 1, 2], 4) == [1, 1, 1, 2]


def test_merge_random_vs_oracle():
    rng = DeterministicRng(104)
    for n in (4, 8, 16, 32):
        c = build_bitonic_merge(n, 8)
        counter = [0]
        b = CircuitBuilder()
        recs = [b.add_input(f"r{i}", 1, 4) for i in range(n)]
        merge_records(b, recs[: n // 2], recs[n // 2 :], lambda r: r, counter=counter)
        assert counter[0] == comparator_count_merge(n)
        for _ in range(25):
            a = sorted(rng.randbelow(256) for _ in range(n // 2))
            bb = sorted(rng.randbelow(256) for _ in range(n // 2))
            assert _run_records(c, a + bb, 8) == sorted(a + bb)


def _oracle_compact(recs, width):
    # stable filter: unmarked first in order, marked after (order free)
    unmarked = [r for r in recs if not (r >> (width - 1))]
    marked = [r for r in recs if r >> (width - 1)]
    return unmarked, marked


def test_compaction_exhaustive_small():
    for n in (2, 4, 8):
        w = 8  # 7 payload bits, mark at bit 7
        c = build_compaction(n, w, mark_offset=7)
        for pattern in range(1 << n):
            recs = [(i + 1) | (((pattern >> i) & 1) << 7) for i in range(n)]
            got = _run_records(c, recs, w)
            unmarked, marked = _oracle_compact(recs, w)
            assert got[: len(unmarked)] == unmarked, (n, pattern, got)
            assert sorted(got[len(unmarked) :]) == sorted(marked)


def test_compaction_random_vs_stable_filter_oracle():
    rng = DeterministicRng(105)
    for n in (16, 32):
        c = build_compaction(n, 9, mark_offset=8)
        for _ in range(50):
            recs = [rng.randbelow(256) | (rng.bit() << 8) for _ in range(n)]
            got = _run_records(c, recs, 9)
            unmarked, marked = _oracle_compact(recs, 9)
            assert got[: len(unmarked)] == unmarked
            assert sorted(got[len(unmarked) :]) == sorted(marked)


def test_compaction_all_unmarked_is_identity():
    c = build_compaction(8, 8, mark_offset=7)
    recs = list(range(10, 18))
    assert _run_records(c, recs, 8) == recs


# ------------------------------------------------------------------ scan


def test_count_scan():
    step = count_where_step(field_equals(0, 4, 7))
    c = build_linear_scan(3, 4, step, state_width=8)
    flat = np.concatenate([bits_from_int(v, 4) for v in (7, 2, 7)])
    out = eval_cleartext(c, {"records": flat})
    assert int_from_bits(out[12:20]) == 2


def test_sum_scan():
    step = sum_field_step(0, 4)
    c = build_linear_scan(3, 4, step, state_width=8)
    flat = np.concatenate([bits_from_int(v, 4) for v in (1, 2, 3)])
    out = eval_cleartext(c, {"records": flat})
    assert int_from_bits(out[12:20]) == 6


def test_mark_scan_never_false():
    def never(b, rec):
        return b.zero

    step = mark_where_step(never, mark_offset=4)
    c = build_linear_scan(4, 5, step)
    flat = np.concatenate([bits_from_int(v, 5) for v in (1, 2, 3, 4)])
    out = eval_cleartext(c, {"records": flat})
    marks = [bool(out[i * 5 + 4]) for i in range(4)]
    assert marks == [False] * 4


# ------------------------------------------------------------------ structure


def test_structure_independent_of_planned_data():
    # build twice with different intended contents: identical wiring
    c1 = build_bitonic_sort(8, 8)
    c2 = build_bitonic_sort(8, 8)
    assert c1.structural_digest() == c2.structural_digest()


def test_gate_count_shapes():
    import math

    def fit_slope(ns, counts, model):
        xs = [math.log(model(n)) for n in ns]
        ys = [math.log(c) for c in counts]
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum(
            (x - mx) ** 2 for x in xs
        )

    ns = [8, 16, 32, 64, 128, 256]
    w = 16
    sort_counts = [
        build_bitonic_sort(n, w).gate_counts().and_gates for n in ns
    ]
    merge_counts = [
        build_bitonic_merge(n, w).gate_counts().and_gates for n in ns
    ]
    compact_counts = [
        build_compaction(n, w, mark_offset=w - 1).gate_counts().and_gates for n in ns
    ]
    scan_counts = [
        build_linear_scan(n, w, count_where_step(field_equals(0, 8, 3)), 16)
        .gate_counts()
        .and_gates
        for n in ns
    ]
    lg = math.log2
    s_sort = fit_slope(ns, sort_counts, lambda n: n * lg(n) ** 2)
    s_merge = fit_slope(ns, merge_counts, lambda n: n * lg(n))
    s_compact = fit_slope(ns, compact_counts, lambda n: n * lg(n))
    s_scan = fit_slope(ns, scan_counts, lambda n: n)
    assert abs(s_sort - 1) <= 0.10, s_sort
    assert abs(s_merge - 1) <= 0.10, s_merge
    assert abs(s_compact - 1) <= 0.10, s_compact
    assert abs(s_scan - 1) <= 0.10, s_scan

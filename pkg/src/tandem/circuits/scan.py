"""Linear scans: one pass over a record list with carried running state.

The per-record operation is supplied as a sub-circuit builder, so the same
frame serves predicate marking, running aggregates, group deduplication and
encounter confirmation.
"""

from __future__ import annotations

from .core import CircuitBuilder, P1, P2, WireVec
from .gadgets import add, and_vec, eq, not_vec, or2, xor_vec


def linear_scan(b: CircuitBuilder, records: list, state: WireVec, step) -> tuple:
    """step(b, record, state) -> (record', state'); returns (records', state)."""
    out = []
    for rec in records:
        rec2, state = step(b, rec, state)
        out.append(rec2)
    return out, state


def _record_inputs(b, n, width, shared):
    if shared:
        x1 = b.add_input("records_x1", P1, n * width)
        x2 = b.add_input("records_x2", P2, n * width)
        flat = xor_vec(b, x1, x2)
    else:
        flat = b.add_input("records", P1, n * width)
    return [flat[i * width : (i + 1) * width] for i in range(n)]


def build_linear_scan(n: int, record_width: int, step, state_width: int = 0,
                      shared_inputs: bool = False):
    """Standalone scan circuit: outputs the rewritten records and final state."""
    b = CircuitBuilder()
    records = _record_inputs(b, n, record_width, shared_inputs)
    state = b.const_vec(0, state_width)
    out, state = linear_scan(b, records, state, step)
    b.add_output("records", WireVec([w for r in out for w in r]))
    if state_width:
        b.add_output("state", state)
    return b.build()


def count_where_step(predicate):
    """Accumulate a count of records satisfying predicate(b, record)."""

    def step(b, rec, state):
        hit = predicate(b, rec)
        ext = WireVec([hit] + [b.zero] * (len(state) - 1))
        state2, _ = add(b, state, ext)
        return rec, state2

    return step


def sum_field_step(offset: int, width: int):
    """Accumulate the sum of a record field into the running state."""

    def step(b, rec, state):
        ext = rec[offset : offset + width]
        pad = WireVec(list(ext) + [b.zero] * (len(state) - width))
        state2, _ = add(b, state, pad)
        return rec, state2

    return step


def mark_where_step(predicate, mark_offset: int, invert: bool = False):
    """Set the record's mark bit from predicate(b, record); with invert, the
    mark is set when the predicate does NOT hold (discard-style marking)."""

    def step(b, rec, state):
        hit = predicate(b, rec)
        if invert:
            hit = b.gate_not(hit)
        # never clear an already-set mark
        new_mark = or2(b, rec[mark_offset], hit)
        wires = list(rec)
        wires[mark_offset] = new_mark
        return WireVec(wires), state

    return step


def field_equals(offset: int, width: int, value: int):
    def predicate(b, rec):
        return eq(b, rec[offset : offset + width], b.const_vec(value, width))

    return predicate

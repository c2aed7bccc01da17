"""Small reusable sub-circuits: arithmetic, comparison, selection.

Everything is costed for free-XOR garbling, so the shapes below minimize AND
gates: a full adder, a borrow step, a mux bit and a conditional-swap bit each
cost one AND.
"""

from __future__ import annotations

from .core import CircuitBuilder, WireVec


def xor_vec(b: CircuitBuilder, x: WireVec, y: WireVec) -> WireVec:
    assert len(x) == len(y)
    return WireVec([b.gate_xor(a, c) for a, c in zip(x, y)])


def and_vec(b: CircuitBuilder, x: WireVec, y: WireVec) -> WireVec:
    assert len(x) == len(y)
    return WireVec([b.gate_and(a, c) for a, c in zip(x, y)])


def not_vec(b: CircuitBuilder, x: WireVec) -> WireVec:
    return WireVec([b.gate_not(a) for a in x])


def and_bit(b: CircuitBuilder, bit: int, x: WireVec) -> WireVec:
    return WireVec([b.gate_and(bit, a) for a in x])


def or2(b: CircuitBuilder, x: int, y: int) -> int:
    # x | y == (x ^ y) ^ (x & y)
    return b.gate_xor(b.gate_xor(x, y), b.gate_and(x, y))


def or_tree(b: CircuitBuilder, wires) -> int:
    ws = list(wires)
    if not ws:
        return b.zero
    while len(ws) > 1:
        nxt = [or2(b, ws[i], ws[i + 1]) for i in range(0, len(ws) - 1, 2)]
        if len(ws) % 2:
            nxt.append(ws[-1])
        ws = nxt
    return ws[0]


def and_tree(b: CircuitBuilder, wires) -> int:
    ws = list(wires)
    if not ws:
        return b.one
    while len(ws) > 1:
        nxt = [b.gate_and(ws[i], ws[i + 1]) for i in range(0, len(ws) - 1, 2)]
        if len(ws) % 2:
            nxt.append(ws[-1])
        ws = nxt
    return ws[0]


def mux(b: CircuitBuilder, sel: int, if0: WireVec, if1: WireVec) -> WireVec:
    """out = if0 when sel == 0 else if1; one AND per bit."""
    assert len(if0) == len(if1)
    out = []
    for a, c in zip(if0, if1):
        d = b.gate_xor(a, c)
        out.append(b.gate_xor(a, b.gate_and(sel, d)))
    return WireVec(out)


def cond_swap(b: CircuitBuilder, sel: int, x: WireVec, y: WireVec):
    """Swap x and y when sel == 1; one AND per bit pair."""
    assert len(x) == len(y)
    xs, ys = [], []
    for a, c in zip(x, y):
        d = b.gate_and(sel, b.gate_xor(a, c))
        xs.append(b.gate_xor(a, d))
        ys.append(b.gate_xor(c, d))
    return WireVec(xs), WireVec(ys)


def eq(b: CircuitBuilder, x: WireVec, y: WireVec) -> int:
    assert len(x) == len(y)
    same = [b.gate_not(b.gate_xor(a, c)) for a, c in zip(x, y)]
    return and_tree(b, same)


def lt_unsigned(b: CircuitBuilder, x: WireVec, y: WireVec) -> int:
    """1 iff x < y, comparing as unsigned integers (vectors LSB-first)."""
    assert len(x) == len(y)
    borrow = b.zero
    for xi, yi in zip(x, y):
        nx = b.gate_not(xi)
        # borrow' = majority(~x, y, borrow)
        t = b.gate_and(b.gate_xor(nx, borrow), b.gate_xor(yi, borrow))
        borrow = b.gate_xor(borrow, t)
    return borrow


def add(b: CircuitBuilder, x: WireVec, y: WireVec, carry_in: int | None = None):
    """Ripple-carry addition; returns (sum WireVec, carry_out)."""
    assert len(x) == len(y)
    c = carry_in if carry_in is not None else b.zero
    out = []
    for xi, yi in zip(x, y):
        s = b.gate_xor(b.gate_xor(xi, yi), c)
        t = b.gate_and(b.gate_xor(xi, c), b.gate_xor(yi, c))
        c = b.gate_xor(c, t)
        out.append(s)
    return WireVec(out), c


def add_saturating(b: CircuitBuilder, x: WireVec, y: WireVec) -> WireVec:
    """Addition clamped to all-ones on overflow."""
    s, carry = add(b, x, y)
    ones = WireVec([b.one] * len(x))
    return mux(b, carry, s, ones)


def inc_if(b: CircuitBuilder, x: WireVec, cond: int) -> WireVec:
    """x + cond (half-adder chain, one AND per bit)."""
    c = cond
    out = []
    for xi in x:
        out.append(b.gate_xor(xi, c))
        c = b.gate_and(xi, c)
    return WireVec(out)


def xor_tree(b: CircuitBuilder, wires) -> int:
    ws = list(wires)
    if not ws:
        return b.zero
    acc = ws[0]
    for w in ws[1:]:
        acc = b.gate_xor(acc, w)
    return acc


def onehot(b: CircuitBuilder, x: WireVec) -> WireVec:
    """Decode w bits into 2^w one-hot lines (index = integer value of x)."""
    lines = None
    for bit in x:
        nbit = b.gate_not(bit)
        if lines is None:
            lines = [nbit, bit]
        else:
            lines = [b.gate_and(line, nbit) for line in lines] + [
                b.gate_and(line, bit) for line in lines
            ]
    return WireVec(lines if lines is not None else [b.one])


def select_bit(b: CircuitBuilder, lines: WireVec, cells: WireVec) -> int:
    """Inner product: OR over (line_i AND cell_i); selects cells[index] when
    lines is one-hot."""
    assert len(lines) == len(cells)
    return or_tree(b, [b.gate_and(l, c) for l, c in zip(lines, cells)])


def is_zero(b: CircuitBuilder, x: WireVec) -> int:
    return b.gate_not(or_tree(b, list(x)))

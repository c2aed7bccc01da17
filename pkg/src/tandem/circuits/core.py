"""Core boolean-circuit representation.

Gate basis is {XOR, AND, NOT}.  Wires 0 and 1 are the constants 0 and 1 in
every circuit; all other wires are either declared inputs or single-assignment
gate outputs, appended in topological order by construction.  Gates are also
grouped into dependency levels so evaluation and garbling can be vectorized
level by level.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

OP_XOR = 0
OP_AND = 1
OP_NOT = 2

# party tags for input groups
P_CONST = 0
P1 = 1
P2 = 2
P_CARRIED = 3

CONST_WIRES = 2  # wire 0 == constant 0, wire 1 == constant 1
_NO_WIRE = 0xFFFFFFFF


class WidthMismatch(Exception):
    pass


class WireVec:
    """An ordered, least-significant-first list of wire ids."""

    __slots__ = ("wires",)

    def __init__(self, wires):
        self.wires = list(wires)

    def __len__(self):
        return len(self.wires)

    def __iter__(self):
        return iter(self.wires)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return WireVec(self.wires[idx])
        return self.wires[idx]

    def concat(self, *others: "WireVec") -> "WireVec":
        out = list(self.wires)
        for o in others:
            out.extend(o.wires)
        return WireVec(out)

    def __repr__(self):
        return f"WireVec({self.wires})"


@dataclass(frozen=True)
class InputGroup:
    name: str
    party: int
    wires: tuple


@dataclass(frozen=True)
class GateCountProfile:
    and_gates: int
    xor_gates: int
    not_gates: int

    @property
    def total(self) -> int:
        return self.and_gates + self.xor_gates + self.not_gates


@dataclass
class BooleanCircuit:
    n_wires: int
    gate_op: np.ndarray  # u8, topological order
    gin0: np.ndarray  # u32
    gin1: np.ndarray  # u32 (NO_WIRE for NOT)
    gout: np.ndarray  # u32
    input_groups: list
    output_wires: np.ndarray
    output_groups: dict  # name -> (start, width) into output_wires
    _levels: tuple | None = field(default=None, repr=False)

    # ---------------------------------------------------------- structure

    @property
    def n_gates(self) -> int:
        return len(self.gate_op)

    @property
    def n_inputs(self) -> int:
        return sum(len(g.wires) for g in self.input_groups)

    def inputs_of(self, party: int) -> list:
        return [g for g in self.input_groups if g.party == party]

    def group(self, name: str) -> InputGroup:
        for g in self.input_groups:
            if g.name == name:
                return g
        raise KeyError(name)

    def gate_counts(self) -> GateCountProfile:
        return GateCountProfile(
            and_gates=int(np.count_nonzero(self.gate_op == OP_AND)),
            xor_gates=int(np.count_nonzero(self.gate_op == OP_XOR)),
            not_gates=int(np.count_nonzero(self.gate_op == OP_NOT)),
        )

    def levels(self):
        """Gate indices grouped by dependency level, for vectorized passes."""
        if self._levels is None:
            depth = np.zeros(self.n_wires, dtype=np.int32)
            gate_level = np.zeros(self.n_gates, dtype=np.int32)
            for g in range(self.n_gates):
                d = depth[self.gin0[g]]
                if self.gate_op[g] != OP_NOT:
                    d = max(d, depth[self.gin1[g]])
                gate_level[g] = d + 1
                depth[self.gout[g]] = d + 1
            order = np.argsort(gate_level, kind="stable")
            top = int(gate_level.max()) + 2 if self.n_gates else 1
            bounds = np.searchsorted(gate_level[order], np.arange(1, top))
            self._levels = (order.astype(np.int64), bounds)
        return self._levels

    # ---------------------------------------------------------- serialization

    def to_bytes(self) -> bytes:
        """Flat binary format: header with input/output maps, then
        [gate_type u8 | in0 u32 | in1 u32 | out u32] per gate."""
        out = [b"TBC1", struct.pack("<II", self.n_wires, self.n_gates)]
        out.append(struct.pack("<I", len(self.input_groups)))
        for g in self.input_groups:
            name = g.name.encode()
            out.append(struct.pack("<HBI", len(name), g.party, len(g.wires)))
            out.append(name)
            out.append(np.asarray(g.wires, dtype=np.uint32).tobytes())
        out.append(struct.pack("<I", len(self.output_wires)))
        out.append(self.output_wires.astype(np.uint32).tobytes())
        out.append(struct.pack("<I", len(self.output_groups)))
        for name, (start, width) in self.output_groups.items():
            nb = name.encode()
            out.append(struct.pack("<HII", len(nb), start, width))
            out.append(nb)
        gates = np.empty((self.n_gates, 13), dtype=np.uint8)
        gates[:, 0] = self.gate_op
        gates[:, 1:5] = self.gin0.astype("<u4").view(np.uint8).reshape(-1, 4)
        gates[:, 5:9] = self.gin1.astype("<u4").view(np.uint8).reshape(-1, 4)
        gates[:, 9:13] = self.gout.astype("<u4").view(np.uint8).reshape(-1, 4)
        out.append(gates.tobytes())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, raw: bytes) -> "BooleanCircuit":
        if raw[:4] != b"TBC1":
            raise ValueError("bad circuit magic")
        off = 4
        n_wires, n_gates = struct.unpack_from("<II", raw, off)
        off += 8
        (n_groups,) = struct.unpack_from("<I", raw, off)
        off += 4
        groups = []
        for _ in range(n_groups):
            nlen, party, width = struct.unpack_from("<HBI", raw, off)
            off += 7
            name = raw[off : off + nlen].decode()
            off += nlen
            wires = np.frombuffer(raw, dtype=np.uint32, count=width, offset=off)
            off += 4 * width
            groups.append(InputGroup(name, party, tuple(int(w) for w in wires)))
        (n_out,) = struct.unpack_from("<I", raw, off)
        off += 4
        out_wires = np.frombuffer(raw, dtype=np.uint32, count=n_out, offset=off).copy()
        off += 4 * n_out
        (n_og,) = struct.unpack_from("<I", raw, off)
        off += 4
        out_groups = {}
        for _ in range(n_og):
            nlen, start, width = struct.unpack_from("<HII", raw, off)
            off += 10
            name = raw[off : off + nlen].decode()
            off += nlen
            out_groups[name] = (start, width)
        gates = np.frombuffer(raw, dtype=np.uint8, offset=off).reshape(n_gates, 13)
        return cls(
            n_wires=n_wires,
            gate_op=gates[:, 0].copy(),
            gin0=gates[:, 1:5].copy().view("<u4").reshape(-1),
            gin1=gates[:, 5:9].copy().view("<u4").reshape(-1),
            gout=gates[:, 9:13].copy().view("<u4").reshape(-1),
            input_groups=groups,
            output_wires=out_wires,
            output_groups=out_groups,
        )

    def structural_digest(self) -> bytes:
        return hashlib.sha3_256(self.to_bytes()).digest()


class CircuitBuilder:
    """Append-only circuit construction.  Inputs may be declared at any time
    before the wires are used; gates allocate one fresh output wire each."""

    def __init__(self):
        self._ops = []
        self._in0 = []
        self._in1 = []
        self._next_wire = CONST_WIRES
        self._input_groups = []
        self._outputs = []
        self._output_groups = {}

    # ---------------------------------------------------------- inputs

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def add_input(self, name: str, party: int, width: int) -> WireVec:
        wires = tuple(range(self._next_wire, self._next_wire + width))
        self._next_wire += width
        self._input_groups.append(InputGroup(name, party, wires))
        return WireVec(wires)

    def const_vec(self, value: int, width: int) -> WireVec:
        return WireVec([(value >> i) & 1 for i in range(width)])

    # ---------------------------------------------------------- gates

    def _gate(self, op: int, a: int, b: int) -> int:
        out = self._next_wire
        self._next_wire += 1
        self._ops.append(op)
        self._in0.append(a)
        self._in1.append(b)
        return out

    def gate_xor(self, a: int, b: int) -> int:
        return self._gate(OP_XOR, a, b)

    def gate_and(self, a: int, b: int) -> int:
        return self._gate(OP_AND, a, b)

    def gate_not(self, a: int) -> int:
        return self._gate(OP_NOT, a, _NO_WIRE)

    # ---------------------------------------------------------- outputs

    def add_output(self, name: str, vec: WireVec):
        self._output_groups[name] = (len(self._outputs), len(vec))
        self._outputs.extend(vec.wires)

    def build(self) -> BooleanCircuit:
        # gate output wires were allocated interleaved with input declarations;
        # recover them by replaying the allocation order
        gout = np.asarray(self._gate_out_wires(), dtype=np.uint32)
        return BooleanCircuit(
            n_wires=self._next_wire,
            gate_op=np.asarray(self._ops, dtype=np.uint8),
            gin0=np.asarray(self._in0, dtype=np.uint32),
            gin1=np.asarray(self._in1, dtype=np.uint32),
            gout=gout,
            input_groups=list(self._input_groups),
            output_wires=np.asarray(self._outputs, dtype=np.uint32),
            output_groups=dict(self._output_groups),
        )

    def _gate_out_wires(self):
        # replay wire allocation: inputs and gates each consumed ids in order
        ids = []
        cursor = CONST_WIRES
        groups = iter(self._input_groups)
        next_group = next(groups, None)
        for _ in range(len(self._ops)):
            while next_group is not None and (
                len(next_group.wires) == 0 or next_group.wires[0] == cursor
            ):
                cursor += len(next_group.wires)
                next_group = next(groups, None)
            ids.append(cursor)
            cursor += 1
        return ids


def _as_input_array(bits, width: int, batch: int | None) -> np.ndarray:
    arr = np.asarray(bits, dtype=bool)
    if arr.ndim == 1:
        if batch is not None:
            arr = np.broadcast_to(arr[:, None], (len(arr), batch))
    if arr.shape[0] != width:
        raise WidthMismatch(f"expected {width} bits, got {arr.shape[0]}")
    return arr


def eval_cleartext(circuit: BooleanCircuit, inputs: dict, batch: int | None = None):
    """Deterministic gate-by-gate evaluation; the oracle for secure paths.

    inputs maps group name to a bool array of shape (width,) or
    (width, batch).  Returns the output wires as a bool array.
    """
    shape = (circuit.n_wires,) if batch is None else (circuit.n_wires, batch)
    vals = np.zeros(shape, dtype=bool)
    vals[1] = True
    seen = set()
    for g in circuit.input_groups:
        if g.name not in inputs:
            raise WidthMismatch(f"missing input group {g.name!r}")
        arr = _as_input_array(inputs[g.name], len(g.wires), batch)
        vals[list(g.wires)] = arr
        seen.add(g.name)
    extra = set(inputs) - seen
    if extra:
        raise WidthMismatch(f"unknown input groups: {sorted(extra)}")

    order, bounds = circuit.levels()
    op, i0, i1, out = circuit.gate_op, circuit.gin0, circuit.gin1, circuit.gout
    start = 0
    for end in bounds:
        lvl = order[start:end]
        if len(lvl) == 0:
            start = end
            continue
        for kind in (OP_XOR, OP_AND, OP_NOT):
            sel = lvl[op[lvl] == kind]
            if len(sel) == 0:
                continue
            a = vals[i0[sel]]
            if kind == OP_XOR:
                vals[out[sel]] = a ^ vals[i1[sel]]
            elif kind == OP_AND:
                vals[out[sel]] = a & vals[i1[sel]]
            else:
                vals[out[sel]] = ~a
        start = end
    return vals[circuit.output_wires]


def bits_from_int(value: int, width: int) -> np.ndarray:
    return np.array([(value >> i) & 1 for i in range(width)], dtype=bool)


def int_from_bits(bits) -> int:
    return sum(1 << i for i, b in enumerate(np.asarray(bits).astype(int)) if b)


def bits_from_bytes(data: bytes) -> np.ndarray:
    arr = np.frombuffer(data, dtype=np.uint8)
    return np.unpackbits(arr, bitorder="little").astype(bool)


def bytes_from_bits(bits) -> bytes:
    arr = np.packbits(np.asarray(bits, dtype=bool), bitorder="little")
    return arr.tobytes()

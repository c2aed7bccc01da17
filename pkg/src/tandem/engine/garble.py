"""Garbling and evaluation.

Free XOR: one global offset R per labeling plan, XOR gates cost nothing and
NOT gates are a relabeling.  AND gates get classic 4-row point-and-permute
tables; each row carries an 8-byte authenticator so the evaluator detects
corrupted tables or garbage input labels instead of silently propagating
them.  Output decoding is withheld until explicitly released.
"""

from __future__ import annotations

import hashlib

import numpy as np

from ..circuits.core import OP_AND, OP_NOT, OP_XOR, BooleanCircuit, P_CARRIED
from ..crypto.rng import Rng
from .labels import (
    EvalPlan,
    LabelPlan,
    ROW_WORDS,
    hash_rows,
    permute_bits,
    random_labels,
    random_offset,
)

ROW_BYTES = ROW_WORDS * 8
TABLE_ROWS = 4


class InvalidLabel(Exception):
    """Row authenticator mismatch: a table row or an input label is garbage."""


class DecodeFailure(Exception):
    """An output label matched neither entry of the decoding table."""


def _decode_digest(label: np.ndarray, wire: int) -> int:
    raw = label.astype("<u8").tobytes() + int(wire).to_bytes(4, "little")
    return int.from_bytes(hashlib.blake2b(raw, digest_size=8).digest(), "little")


class Garbling:
    """Generator-side garbled circuit: all wire labels plus lazily generated
    table batches.  With a LabelPlan, carried input groups reuse registered
    labels and gate ids continue the plan's cursor."""

    def __init__(self, circuit: BooleanCircuit, rng: Rng, plan: LabelPlan | None = None):
        self.circuit = circuit
        self.plan = plan
        self.R = plan.R if plan is not None else random_offset(rng)
        n = circuit.n_wires
        self.label0 = np.zeros((n, 2), dtype=np.uint64)
        self.label0[0] = rng.uint64((2,))
        self.label0[1] = rng.uint64((2,))
        for group in circuit.input_groups:
            if not group.wires:
                continue
            idx = list(group.wires)
            if group.party == P_CARRIED:
                if plan is None:
                    raise ValueError("carried inputs need a labeling plan")
                self.label0[idx] = plan.lookup(group.name, len(idx))
            else:
                self.label0[idx] = random_labels(rng, len(idx))

        order, bounds = circuit.levels()
        op = circuit.gate_op
        self._and_gates = order[op[order] == OP_AND]  # level-sorted AND order
        self.and_level_counts = []
        start = 0
        for end in bounds:
            lvl = order[start:end]
            start = end
            n_lvl = int(np.count_nonzero(op[lvl] == OP_AND))
            if n_lvl:
                self.and_level_counts.append(n_lvl)
        n_and = len(self._and_gates)
        base = plan.claim_gids(n_and) if plan is not None else 0
        self._gids = (base + np.arange(n_and)).astype(np.uint64)

        # label propagation (tables deferred)
        and_out_labels = random_labels(rng, n_and) if n_and else np.zeros((0, 2), np.uint64)
        and_cursor = 0
        start = 0
        for end in bounds:
            lvl = order[start:end]
            start = end
            if len(lvl) == 0:
                continue
            xors = lvl[op[lvl] == OP_XOR]
            if len(xors):
                self.label0[circuit.gout[xors]] = (
                    self.label0[circuit.gin0[xors]] ^ self.label0[circuit.gin1[xors]]
                )
            nots = lvl[op[lvl] == OP_NOT]
            if len(nots):
                self.label0[circuit.gout[nots]] = self.label0[circuit.gin0[nots]] ^ self.R
            ands = lvl[op[lvl] == OP_AND]
            if len(ands):
                self.label0[circuit.gout[ands]] = and_out_labels[
                    and_cursor : and_cursor + len(ands)
                ]
                and_cursor += len(ands)

    @property
    def n_and(self) -> int:
        return len(self._and_gates)

    def table_batch(self, seq_start: int, count: int) -> bytes:
        """Rows for AND gates [seq_start, seq_start+count) in level order."""
        sel = self._and_gates[seq_start : seq_start + count]
        c = self.circuit
        A0 = self.label0[c.gin0[sel]]
        B0 = self.label0[c.gin1[sel]]
        C0 = self.label0[c.gout[sel]]
        pa = permute_bits(A0)
        pb = permute_bits(B0)
        gids = self._gids[seq_start : seq_start + count]
        rows = np.empty((len(sel), TABLE_ROWS, ROW_WORDS), dtype=np.uint64)
        for alpha in (0, 1):
            va = (np.uint8(alpha) ^ pa).astype(np.uint64)
            Aslot = A0 ^ (va[:, None] * self.R)
            for beta in (0, 1):
                vb = (np.uint8(beta) ^ pb).astype(np.uint64)
                Bslot = B0 ^ (vb[:, None] * self.R)
                out_val = va * vb
                h = hash_rows(Aslot, Bslot, gids)
                mask = C0 ^ (out_val[:, None] * self.R)
                row = h.copy()
                row[:, :2] ^= mask
                rows[:, 2 * alpha + beta] = row
        return rows.astype("<u8").tobytes()

    # ---------------------------------------------------------------- encode

    def active_label(self, wire: int, bit: int) -> np.ndarray:
        lab = self.label0[wire].copy()
        if bit:
            lab ^= self.R
        return lab

    def encode_bits(self, wires, bits) -> np.ndarray:
        idx = np.asarray(wires, dtype=np.int64)
        vals = np.asarray(bits, dtype=np.uint64)
        return self.label0[idx] ^ (vals[:, None] * self.R)

    def label_pairs(self, wires) -> np.ndarray:
        idx = np.asarray(wires, dtype=np.int64)
        pairs = np.empty((len(idx), 2, 2), dtype=np.uint64)
        pairs[:, 0] = self.label0[idx]
        pairs[:, 1] = self.label0[idx] ^ self.R
        return pairs

    # ---------------------------------------------------------------- decode

    def output_decoding(self) -> np.ndarray:
        outs = self.circuit.output_wires
        table = np.empty((len(outs), 2), dtype=np.uint64)
        for i, w in enumerate(outs):
            table[i, 0] = _decode_digest(self.label0[w], int(w))
            table[i, 1] = _decode_digest(self.label0[w] ^ self.R, int(w))
        return table

    def blinded_decoding(self, rng: Rng) -> tuple:
        """(mask_bits, payload): evaluator learns output XOR mask only."""
        outs = self.circuit.output_wires
        mask = np.frombuffer(rng.bytes(len(outs)), dtype=np.uint8) & 1
        payload = bytearray()
        for i, w in enumerate(outs):
            d0 = _decode_digest(self.label0[w], int(w))
            d1 = _decode_digest(self.label0[w] ^ self.R, int(w))
            entries = sorted(
                [(d0, int(mask[i])), (d1, int(mask[i]) ^ 1)], key=lambda e: e[0]
            )
            for digest, bit in entries:
                payload += digest.to_bytes(8, "little") + bytes([bit])
        return mask, bytes(payload)

    def register_carry(self, key: str, wires):
        if self.plan is None:
            raise ValueError("carry registration needs a labeling plan")
        self.plan.register(key, self.label0[np.asarray(wires, dtype=np.int64)].copy())


def decode_outputs(output_labels: np.ndarray, table: np.ndarray, wires) -> np.ndarray:
    bits = np.zeros(len(output_labels), dtype=bool)
    for i, w in enumerate(wires):
        d = _decode_digest(output_labels[i], int(w))
        if d == table[i, 0]:
            bits[i] = False
        elif d == table[i, 1]:
            bits[i] = True
        else:
            raise DecodeFailure(f"output wire {w}: label matches neither decoding")
    return bits


def blind_decode(output_labels: np.ndarray, payload: bytes, wires) -> np.ndarray:
    bits = np.zeros(len(output_labels), dtype=bool)
    for i, w in enumerate(wires):
        d = _decode_digest(output_labels[i], int(w))
        e0 = payload[18 * i : 18 * i + 9]
        e1 = payload[18 * i + 9 : 18 * i + 18]
        if d == int.from_bytes(e0[:8], "little"):
            bits[i] = bool(e0[8])
        elif d == int.from_bytes(e1[:8], "little"):
            bits[i] = bool(e1[8])
        else:
            raise DecodeFailure(f"output wire {w}: label missing from blinded decoding")
    return bits


class Evaluation:
    """Evaluator-side state: active labels, fed table batches level by level."""

    def __init__(self, circuit: BooleanCircuit, plan: EvalPlan | None = None):
        self.circuit = circuit
        self.plan = plan
        self.labels = np.zeros((circuit.n_wires, 2), dtype=np.uint64)
        order, bounds = circuit.levels()
        self._order = order
        self._bounds = bounds
        self._and_gates = order[circuit.gate_op[order] == OP_AND]
        self._gid_base = plan.claim_gids(len(self._and_gates)) if plan is not None else 0
        self.max_resident_table_rows = 0

    def set_labels(self, wires, labels: np.ndarray):
        self.labels[np.asarray(wires, dtype=np.int64)] = labels

    def load_carried(self):
        for group in self.circuit.input_groups:
            if group.party == P_CARRIED and group.wires:
                if self.plan is None:
                    raise ValueError("carried inputs need an evaluation plan")
                self.set_labels(list(group.wires), self.plan.lookup(group.name, len(group.wires)))

    def evaluate(self, next_table_batch):
        """Run all levels; next_table_batch(count) must return the raw rows
        for the next `count` AND gates in level order."""
        c = self.circuit
        op = c.gate_op
        gid_base = self._gid_base
        and_seq = 0
        start = 0
        for end in self._bounds:
            lvl = self._order[start:end]
            start = end
            if len(lvl) == 0:
                continue
            xors = lvl[op[lvl] == OP_XOR]
            if len(xors):
                self.labels[c.gout[xors]] = self.labels[c.gin0[xors]] ^ self.labels[c.gin1[xors]]
            nots = lvl[op[lvl] == OP_NOT]
            if len(nots):
                self.labels[c.gout[nots]] = self.labels[c.gin0[nots]]
            ands = lvl[op[lvl] == OP_AND]
            if len(ands):
                done = 0
                while done < len(ands):
                    raw, n_rows = next_table_batch(len(ands) - done)
                    self.max_resident_table_rows = max(self.max_resident_table_rows, n_rows)
                    sel = ands[done : done + n_rows]
                    gids = (gid_base + and_seq + np.arange(n_rows)).astype(np.uint64)
                    self._eval_and(sel, raw, gids)
                    done += n_rows
                    and_seq += n_rows

    def _eval_and(self, sel, raw: bytes, gids: np.ndarray):
        c = self.circuit
        rows = np.frombuffer(raw, dtype="<u8").reshape(len(sel), TABLE_ROWS, ROW_WORDS)
        A = self.labels[c.gin0[sel]]
        B = self.labels[c.gin1[sel]]
        alpha = permute_bits(A).astype(np.int64)
        beta = permute_bits(B).astype(np.int64)
        h = hash_rows(A, B, gids)
        chosen = rows[np.arange(len(sel)), 2 * alpha + beta]
        if not (chosen[:, 2] == h[:, 2]).all():
            raise InvalidLabel("row authenticator mismatch")
        self.labels[c.gout[sel]] = chosen[:, :2] ^ h[:, :2]

    def output_labels(self) -> np.ndarray:
        return self.labels[self.circuit.output_wires.astype(np.int64)]

    def register_carry(self, key: str, wires):
        if self.plan is None:
            raise ValueError("carry registration needs an evaluation plan")
        self.plan.register(key, self.labels[np.asarray(wires, dtype=np.int64)].copy())


def evaluate_level_batch(circuit, garbling, inputs):
    """Local garble+evaluate shortcut used by tests: returns decoded bits."""
    ev = Evaluation(circuit)
    for group in circuit.input_groups:
        if not group.wires:
            continue
        bits = inputs[group.name]
        ev.set_labels(list(group.wires), garbling.encode_bits(list(group.wires), bits))
    ev.set_labels([0, 1], np.stack([garbling.active_label(0, 0), garbling.active_label(1, 1)]))
    cursor = [0]

    def feeder(max_count):
        count = min(max_count, garbling.n_and - cursor[0], 4096)
        raw = garbling.table_batch(cursor[0], count)
        cursor[0] += count
        return raw, count

    ev.evaluate(feeder)
    return decode_outputs(
        ev.output_labels(), garbling.output_decoding(), circuit.output_wires
    )

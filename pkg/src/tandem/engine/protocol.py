"""The passively secure GC protocol run between two party endpoints.

Flow: garble -> direct-encode generator inputs (and the two constant wires)
-> OT the evaluator inputs -> stream tables level by level -> evaluate.
Output decoding is NOT part of the flow; the generator releases it (real or
blinded) only when the layer above asks, which is what dual execution needs.
"""

from __future__ import annotations

import struct
import threading

import numpy as np

from ..circuits.core import BooleanCircuit, P_CARRIED, P_CONST
from ..crypto.rng import DeterministicRng, Rng
from .channel import (
    BLIND_DECODE,
    DECODE_RELEASE,
    GEN_INPUT_LABELS,
    TABLES,
    Channel,
    channel_pair,
)
from .garble import Evaluation, Garbling, blind_decode, decode_outputs
from .labels import EvalPlan, LabelPlan, labels_from_bytes, labels_to_bytes
from .ot import ObliviousTransferSession, OTDealer

STREAM_BATCH = 2048  # AND gates per TABLES frame; bounds evaluator table memory


def _other(party: int) -> int:
    return 2 if party == 1 else 1


def _direct_groups(circuit: BooleanCircuit, gen_party: int):
    for g in circuit.input_groups:
        if g.wires and (g.party == gen_party or g.party == P_CONST):
            yield g


def _ot_groups(circuit: BooleanCircuit, gen_party: int):
    for g in circuit.input_groups:
        if g.wires and g.party == _other(gen_party):
            yield g


def _concat_bits(groups, inputs) -> np.ndarray:
    parts = []
    for g in groups:
        bits = np.asarray(inputs[g.name], dtype=np.uint8)
        if len(bits) != len(g.wires):
            raise ValueError(f"group {g.name!r}: expected {len(g.wires)} bits")
        parts.append(bits)
    if not parts:
        return np.zeros(0, dtype=np.uint8)
    return np.concatenate(parts)


class GcSession:
    """Handle returned by either role; decoding flows through it."""

    def __init__(self, role: str, circuit: BooleanCircuit, chan: Channel,
                 garbling: Garbling | None = None, evaluation: Evaluation | None = None):
        self.role = role
        self.circuit = circuit
        self.chan = chan
        self.garbling = garbling
        self.evaluation = evaluation

    # generator side ------------------------------------------------------

    def release_decoding(self):
        table = self.garbling.output_decoding()
        self.chan.send(DECODE_RELEASE, table.astype("<u8").tobytes())

    def release_blinded(self, rng: Rng) -> np.ndarray:
        mask, payload = self.garbling.blinded_decoding(rng)
        self.chan.send(BLIND_DECODE, payload)
        return mask.astype(bool)

    # evaluator side ------------------------------------------------------

    def output_labels(self) -> np.ndarray:
        return self.evaluation.output_labels()

    def recv_decoded(self) -> np.ndarray:
        _, raw = self.chan.recv(expect=DECODE_RELEASE)
        table = np.frombuffer(raw, dtype="<u8").reshape(-1, 2)
        return decode_outputs(
            self.output_labels(), table, self.circuit.output_wires
        )

    def recv_blind_decoded(self) -> np.ndarray:
        _, raw = self.chan.recv(expect=BLIND_DECODE)
        return blind_decode(self.output_labels(), raw, self.circuit.output_wires)

    # pipeline ------------------------------------------------------------

    def register_carry(self, key: str, output_group: str):
        start, width = self.circuit.output_groups[output_group]
        wires = self.circuit.output_wires[start : start + width]
        if self.role == "generator":
            self.garbling.register_carry(key, wires)
        else:
            self.evaluation.register_carry(key, wires)


def generator_session(
    circuit: BooleanCircuit, gen_party: int, inputs: dict, chan: Channel, rng: Rng,
    *, plan: LabelPlan | None = None, ot: ObliviousTransferSession | None = None,
    stream_batch: int = STREAM_BATCH,
) -> GcSession:
    g = Garbling(circuit, rng, plan)

    direct = list(_direct_groups(circuit, gen_party))
    wires = [0, 1] + [w for grp in direct for w in grp.wires]
    bits = np.concatenate([[0, 1], _concat_bits(direct, inputs)]).astype(np.uint8)
    chan.send(GEN_INPUT_LABELS, labels_to_bytes(g.encode_bits(wires, bits)))

    ot_wires = [w for grp in _ot_groups(circuit, gen_party) for w in grp.wires]
    if ot_wires:
        if ot is None:
            raise ValueError("evaluator inputs present but no OT session given")
        ot.send_labels(chan, g.label_pairs(ot_wires), rng)

    # frames never span a dependency level so the evaluator can consume each
    # one immediately and hold at most stream_batch rows of tables
    seq = 0
    for level_count in g.and_level_counts:
        done = 0
        while done < level_count:
            count = min(stream_batch, level_count - done)
            header = struct.pack("<II", seq, count)
            chan.send(TABLES, header + g.table_batch(seq, count))
            seq += count
            done += count
    return GcSession("generator", circuit, chan, garbling=g)


def evaluator_session(
    circuit: BooleanCircuit, gen_party: int, inputs: dict, chan: Channel, rng: Rng,
    *, plan: EvalPlan | None = None, ot: ObliviousTransferSession | None = None,
) -> GcSession:
    ev = Evaluation(circuit, plan)

    direct = list(_direct_groups(circuit, gen_party))
    wires = [0, 1] + [w for grp in direct for w in grp.wires]
    _, raw = chan.recv(expect=GEN_INPUT_LABELS)
    ev.set_labels(wires, labels_from_bytes(raw, len(wires)))

    ot_groups = list(_ot_groups(circuit, gen_party))
    ot_wires = [w for grp in ot_groups for w in grp.wires]
    if ot_wires:
        if ot is None:
            raise ValueError("evaluator inputs present but no OT session given")
        choice = _concat_bits(ot_groups, inputs)
        ev.set_labels(ot_wires, ot.receive_labels(chan, choice, rng))

    ev.load_carried()

    pending = {"raw": b"", "seq": 0}

    def next_batch(_want: int):
        if not pending["raw"]:
            _, frame = chan.recv(expect=TABLES)
            start, count = struct.unpack_from("<II", frame, 0)
            if start != pending["seq"]:
                from .channel import ProtocolError

                raise ProtocolError("table batch out of sequence")
            pending["raw"] = frame[8:]
            pending["count"] = count
            pending["seq"] += count
        raw = pending["raw"]
        count = pending["count"]
        pending["raw"] = b""
        return raw, count

    ev.evaluate(next_batch)
    return GcSession("evaluator", circuit, chan, evaluation=ev)


def run_semi_honest_2pc(
    circuit: BooleanCircuit, gen_inputs: dict, eval_inputs: dict,
    gen_party: int = 1, seed: int = 0, ot_mode: str = "dealer",
    release: bool = True, capture_payloads: bool = False,
):
    """Run both roles over an in-process channel pair; returns
    (decoded bits or None, generator session, evaluator session)."""
    chan_g, chan_e = channel_pair(capture_payloads=capture_payloads)
    dealer = OTDealer() if ot_mode == "dealer" else None
    ot_g = ObliviousTransferSession(mode=ot_mode, dealer=dealer, session_id=b"shortcut")
    ot_e = ObliviousTransferSession(mode=ot_mode, dealer=dealer, session_id=b"shortcut")
    inputs = dict(gen_inputs)
    results = {}
    errors = {}

    def gen():
        try:
            rng = DeterministicRng(seed * 2 + 1)
            results["gen"] = generator_session(circuit, gen_party, inputs, chan_g, rng, ot=ot_g)
            if release:
                results["gen"].release_decoding()
        except Exception as exc:  # surface in the main thread
            errors["gen"] = exc
            chan_g.close()

    def ev():
        try:
            rng = DeterministicRng(seed * 2 + 2)
            sess = evaluator_session(circuit, gen_party, eval_inputs, chan_e, rng, ot=ot_e)
            results["eval"] = sess
            if release:
                results["bits"] = sess.recv_decoded()
        except Exception as exc:
            errors["eval"] = exc
            chan_e.close()

    t1 = threading.Thread(target=gen)
    t2 = threading.Thread(target=ev)
    t1.start()
    t2.start()
    t1.join()
    t2.join()
    if errors:
        raise next(iter(errors.values()))
    return results.get("bits"), results["gen"], results["eval"]

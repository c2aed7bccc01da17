import math
import threading

import numpy as np
import pytest

from tandem.circuits import CircuitBuilder, WireVec, eval_cleartext
from tandem.circuits.core import bits_from_int, int_from_bits
from tandem.circuits.gadgets import add
from tandem.circuits.sortnet import build_bitonic_sort
from tandem.crypto import DeterministicRng
from tandem.engine import (
    DecodeFailure,
    InvalidLabel,
    ObliviousTransferSession,
    OTDealer,
    PrimeOrderGroup,
    run_semi_honest_2pc,
)
from tandem.engine.channel import OT_MSG2, TABLES, channel_pair
from tandem.engine.garble import Garbling, decode_outputs, evaluate_level_batch
from tandem.engine.protocol import STREAM_BATCH


def adder_circuit(width):
    b = CircuitBuilder()
    x = b.add_input("x", 1, width)
    y = b.add_input("y", 2, width)
    s, carry = add(b, x, y)
    b.add_output("sum", s)
    return b.build()


def and_circuit():
    b = CircuitBuilder()
    x = b.add_input("x", 1, 1)
    y = b.add_input("y", 2, 1)
    b.add_output("out", WireVec([b.gate_and(x[0], y[0])]))
    return b.build()


def random_circuit(rng, n_inputs, n_gates, split=True):
    b = CircuitBuilder()
    x = b.add_input("x", 1, n_inputs)
    y = b.add_input("y", 2, n_inputs) if split else None
    wires = list(x) + (list(y) if split else [])
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


# ------------------------------------------------------------------ garbling


def test_garble_single_and_truth_table():
    c = and_circuit()
    for xv in (0, 1):
        for yv in (0, 1):
            g = Garbling(c, DeterministicRng(xv * 2 + yv))
            bits = evaluate_level_batch(c, g, {"x": [xv], "y": [yv]})
            assert bool(bits[0]) == bool(xv and yv)


def test_garble_random_circuits_match_cleartext():
    rng = DeterministicRng(300)
    for trial in range(100):
        c = random_circuit(rng, 8, 60)
        g = Garbling(c, DeterministicRng(1000 + trial))
        xv = [rng.bit() for _ in range(8)]
        yv = [rng.bit() for _ in range(8)]
        got = evaluate_level_batch(c, g, {"x": xv, "y": yv})
        expect = eval_cleartext(c, {"x": xv, "y": yv})
        assert (got == expect).all()


def test_two_garblings_differ_in_bytes_same_outputs():
    c = adder_circuit(16)
    g1 = Garbling(c, DeterministicRng(1))
    g2 = Garbling(c, DeterministicRng(2))
    t1 = g1.table_batch(0, g1.n_and)
    t2 = g2.table_batch(0, g2.n_and)
    assert t1 != t2
    inp = {"x": bits_from_int(1234, 16), "y": bits_from_int(4321, 16)}
    b1 = evaluate_level_batch(c, g1, inp)
    b2 = evaluate_level_batch(c, g2, inp)
    assert (b1 == b2).all()
    assert int_from_bits(b1) == (1234 + 4321) % (1 << 16)


def test_xor_only_circuit_has_no_tables():
    b = CircuitBuilder()
    x = b.add_input("x", 1, 8)
    y = b.add_input("y", 2, 8)
    out = WireVec([b.gate_xor(a, c) for a, c in zip(x, y)])
    b.add_output("out", out)
    c = b.build()
    g = Garbling(c, DeterministicRng(3))
    assert g.n_and == 0
    bits = evaluate_level_batch(c, g, {"x": bits_from_int(0xA5, 8), "y": bits_from_int(0x0F, 8)})
    assert int_from_bits(bits) == 0xA5 ^ 0x0F


def _live_wires(c):
    """Wires with a path to some output."""
    live = set(int(w) for w in c.output_wires)
    for g in range(c.n_gates - 1, -1, -1):
        if int(c.gout[g]) in live:
            live.add(int(c.gin0[g]))
            if c.gate_op[g] != 2:  # NOT has one input
                live.add(int(c.gin1[g]))
    return live


def test_corrupt_input_label_detected():
    rng = DeterministicRng(301)
    detected = 0
    trials = 100
    trial = 0
    while trial < trials:
        c = random_circuit(rng, 8, 40)
        live = _live_wires(c)
        candidates = [w for w in c.group("x").wires if w in live]
        if not candidates:
            continue
        trial += 1
        g = Garbling(c, DeterministicRng(2000 + trial))
        from tandem.engine.garble import Evaluation

        ev = Evaluation(c)
        xv = [rng.bit() for _ in range(8)]
        yv = [rng.bit() for _ in range(8)]
        for grp in c.input_groups:
            bits = {"x": xv, "y": yv}[grp.name]
            ev.set_labels(list(grp.wires), g.encode_bits(list(grp.wires), bits))
        ev.set_labels([0, 1], np.stack([g.active_label(0, 0), g.active_label(1, 1)]))
        victim = int(candidates[rng.randbelow(len(candidates))])
        ev.labels[victim] ^= np.uint64(0x8000000000000001)
        cursor = [0]

        def feeder(want, g=g, cursor=cursor):
            n = min(want, g.n_and - cursor[0])
            raw = g.table_batch(cursor[0], n)
            cursor[0] += n
            return raw, n

        try:
            ev.evaluate(feeder)
            decode_outputs(ev.output_labels(), g.output_decoding(), c.output_wires)
        except (InvalidLabel, DecodeFailure):
            detected += 1
    assert detected == trials


# ------------------------------------------------------------------ OT


def test_ot_dealer_choice_routing():
    dealer = OTDealer()
    rng = DeterministicRng(302)
    pairs = np.stack([rng.uint64((128, 2)), rng.uint64((128, 2))], axis=1)
    choices = np.array([rng.bit() for _ in range(128)], dtype=np.uint8)
    ot_s = ObliviousTransferSession(mode="dealer", dealer=dealer, session_id=b"t")
    ot_r = ObliviousTransferSession(mode="dealer", dealer=dealer, session_id=b"t")
    ot_s.send_labels(None, pairs, rng)
    got = ot_r.receive_labels(None, choices, rng)
    for i, ch in enumerate(choices):
        assert (got[i] == pairs[i, ch]).all()


def test_ot_public_key_correctness():
    group = PrimeOrderGroup.test_group()
    rng_s = DeterministicRng(303)
    rng_r = DeterministicRng(304)
    pairs = rng_s.uint64((8, 2, 2))
    choices = np.array([0, 1, 1, 0, 1, 0, 0, 1], dtype=np.uint8)
    ca, cb = channel_pair()
    ot_s = ObliviousTransferSession(mode="public_key", group=group, session_id=b"pk")
    ot_r = ObliviousTransferSession(mode="public_key", group=group, session_id=b"pk")
    out = {}

    def sender():
        ot_s.send_labels(ca, pairs, rng_s)

    def receiver():
        out["labels"] = ot_r.receive_labels(cb, choices, rng_r)

    ts = threading.Thread(target=sender)
    tr = threading.Thread(target=receiver)
    ts.start(); tr.start(); ts.join(); tr.join()
    for i, ch in enumerate(choices):
        assert (out["labels"][i] == pairs[i, ch]).all()


def test_ot_sender_transcript_independent_of_choices():
    group = PrimeOrderGroup.test_group()
    wires = 8

    def run_sessions(choice_bit, n, seed0):
        payload_bytes = []
        for s in range(n):
            rng_s = DeterministicRng(seed0 + 2 * s)
            rng_r = DeterministicRng(seed0 + 2 * s + 1)
            pairs = rng_s.uint64((wires, 2, 2))
            choices = np.full(wires, choice_bit, dtype=np.uint8)
            ca, cb = channel_pair(capture_payloads=True)
            ot_s = ObliviousTransferSession(mode="public_key", group=group, session_id=b"ind")
            ot_r = ObliviousTransferSession(mode="public_key", group=group, session_id=b"ind")
            ts = threading.Thread(target=lambda: ot_s.send_labels(ca, pairs, rng_s))
            tr = threading.Thread(target=lambda: ot_r.receive_labels(cb, choices, rng_r))
            ts.start(); tr.start(); ts.join(); tr.join()
            for d, t, payload in ca.transcript.payloads:
                if d == "send" and t == OT_MSG2:
                    payload_bytes.append(np.frombuffer(payload, dtype=np.uint8))
        return np.concatenate(payload_bytes)

    a = run_sessions(0, 50, 5000)
    b = run_sessions(1, 50, 9000)

    def entropy(x):
        hist = np.bincount(x, minlength=256) / len(x)
        nz = hist[hist > 0]
        return float(-(nz * np.log2(nz)).sum())

    assert abs(entropy(a) - entropy(b)) < 0.05
    assert abs(float(a.mean()) - float(b.mean())) < 2.0


# ------------------------------------------------------------------ protocol


def test_2pc_adder():
    c = adder_circuit(32)
    bits, _, _ = run_semi_honest_2pc(c, {"x": bits_from_int(5, 32)}, {"y": bits_from_int(9, 32)})
    assert int_from_bits(bits) == 14


def test_2pc_sort_matches_cleartext():
    c = build_bitonic_sort(8, 8, shared_inputs=True)
    rng = DeterministicRng(305)
    for trial in range(50):
        recs = [rng.randbelow(256) for _ in range(8)]
        flat = np.concatenate([bits_from_int(r, 8) for r in recs])
        mask = np.frombuffer(rng.bytes(64), dtype=np.uint8).astype(bool)
        bits, _, _ = run_semi_honest_2pc(
            c, {"records_x1": flat ^ mask}, {"records_x2": mask}, seed=trial
        )
        got = [int_from_bits(bits[8 * i : 8 * (i + 1)]) for i in range(8)]
        assert got == sorted(recs)


def test_2pc_transcript_linear_in_and_gates():
    ratios = []
    for width in (16, 32, 64, 128):
        c = adder_circuit(width)
        _, gen, _ = run_semi_honest_2pc(
            c, {"x": bits_from_int(1, width)}, {"y": bits_from_int(2, width)}
        )
        n_and = c.gate_counts().and_gates
        tables = gen.chan.transcript.bytes_by("send", TABLES)
        ratios.append(tables / n_and)
    assert max(ratios) / min(ratios) <= 1.10, ratios


def test_2pc_decode_withheld_until_release():
    c = adder_circuit(8)
    bits, gen, ev = run_semi_honest_2pc(
        c, {"x": bits_from_int(3, 8)}, {"y": bits_from_int(4, 8)}, release=False
    )
    assert bits is None
    # evaluator holds output labels but cannot decode them without release
    labels = ev.output_labels()
    assert labels.shape == (8, 2)
    rng = DeterministicRng(306)
    fake_table = rng.uint64((8, 2))
    with pytest.raises(DecodeFailure):
        decode_outputs(labels, fake_table, c.output_wires)


def test_streaming_memory_bound():
    c = build_bitonic_sort(16, 16, shared_inputs=True)
    rng = DeterministicRng(307)
    flat = np.frombuffer(rng.bytes(256), dtype=np.uint8).astype(bool)
    mask = np.frombuffer(rng.bytes(256), dtype=np.uint8).astype(bool)
    _, _, ev = run_semi_honest_2pc(c, {"records_x1": flat}, {"records_x2": mask})
    assert c.gate_counts().and_gates > STREAM_BATCH  # actually streams
    assert ev.evaluation.max_resident_table_rows <= STREAM_BATCH

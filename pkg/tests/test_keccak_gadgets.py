import hashlib
import math

import numpy as np
import pytest

from tandem.circuits import CircuitBuilder, WireVec, eval_cleartext
from tandem.circuits.bloom import (
    build_bloom_insert,
    build_bloom_query,
    expected_false_positive_rate,
)
from tandem.circuits.core import bits_from_bytes, bytes_from_bits
from tandem.circuits.keccak import build_keccak_f, build_mac_verify_gadget, sha3_256_gadget
from tandem.crypto import DeterministicRng, MacKey, mac_tag
from tandem.crypto.keccak_ref import keccak_f1600, sha3_256_ref


def _lanes_to_bits(lanes):
    out = np.zeros(1600, dtype=bool)
    for i, lane in enumerate(lanes):
        for bit in range(64):
            out[64 * i + bit] = (lane >> bit) & 1
    return out


def test_keccak_f_zero_state_matches_reference():
    c = build_keccak_f()
    got = eval_cleartext(c, {"state": np.zeros(1600, dtype=bool)})
    expect = _lanes_to_bits(keccak_f1600([0] * 25))
    assert (got == expect).all()


def test_keccak_f_random_state_matches_reference():
    rng = DeterministicRng(200)
    c = build_keccak_f()
    lanes = [int.from_bytes(rng.bytes(8), "little") for _ in range(25)]
    got = eval_cleartext(c, {"state": _lanes_to_bits(lanes)})
    assert (got == _lanes_to_bits(keccak_f1600(lanes))).all()


def test_reduced_round_permutation_matches_reference():
    rng = DeterministicRng(201)
    c = build_keccak_f(rounds=4)
    lanes = [int.from_bytes(rng.bytes(8), "little") for _ in range(25)]
    got = eval_cleartext(c, {"state": _lanes_to_bits(lanes)})
    assert (got == _lanes_to_bits(keccak_f1600(lanes, rounds=4))).all()


@pytest.mark.parametrize("msg", [b"", b"abc", b"x" * 64, b"y" * 135])
def test_sha3_gadget_matches_hashlib(msg):
    b = CircuitBuilder()
    m = b.add_input("m", 1, len(msg) * 8)
    b.add_output("digest", sha3_256_gadget(b, m))
    c = b.build()
    got = eval_cleartext(c, {"m": bits_from_bytes(msg)} if msg else {"m": np.zeros(0, bool)})
    assert bytes_from_bits(got) == hashlib.sha3_256(msg).digest()


def test_mac_verify_gadget_accepts_and_rejects():
    rng = DeterministicRng(202)
    k = MacKey.generate(rng)
    msg = b"in-circuit check"
    tag = mac_tag(k, msg)
    c = build_mac_verify_gadget(message_bits=len(msg) * 8)

    kb = bits_from_bytes(k.bytes)
    mb = bits_from_bytes(msg)
    kmask = bits_from_bytes(rng.bytes(32))
    mmask = bits_from_bytes(rng.bytes(len(msg)))
    inputs = {
        "key_x1": kb ^ kmask,
        "key_x2": kmask,
        "msg_x1": mb ^ mmask,
        "msg_x2": mmask,
        "tag": bits_from_bytes(tag.tag),
    }
    assert eval_cleartext(c, inputs)[0]

    bad = bytearray(tag.tag)
    bad[0] ^= 1
    inputs["tag"] = bits_from_bytes(bytes(bad))
    assert not eval_cleartext(c, inputs)[0]


def test_reduced_round_sha3_matches_host_reference():
    msg = b"round-reduced"
    b = CircuitBuilder()
    m = b.add_input("m", 1, len(msg) * 8)
    b.add_output("digest", sha3_256_gadget(b, m, rounds=4))
    c = b.build()
    got = eval_cleartext(c, {"m": bits_from_bytes(msg)})
    assert bytes_from_bits(got) == sha3_256_ref(msg, rounds=4)


# ------------------------------------------------------------------ bloom


def _bloom_env(capacity, h, rounds=4):
    rng = DeterministicRng(203)
    key = bits_from_bytes(rng.bytes(32))
    ins = build_bloom_insert(64, capacity, h, rounds=rounds)
    qry = build_bloom_query(64, capacity, h, rounds=rounds)
    return rng, key, ins, qry


def _elem_bits(value):
    return bits_from_bytes(value.to_bytes(8, "little"))


def test_bloom_no_false_negatives_and_empty_rejects():
    capacity, h = 256, 3
    rng, key, ins, qry = _bloom_env(capacity, h)
    state = np.zeros(capacity, dtype=bool)
    for v in (7, 99, 12345):
        state = eval_cleartext(
            ins, {"state": state, "key": key, "element": _elem_bits(v)}
        )
    for v in (7, 99, 12345):
        assert eval_cleartext(
            qry, {"state": state, "key": key, "element": _elem_bits(v)}
        )[0]
    empty = np.zeros(capacity, dtype=bool)
    for v in (7, 99, 500):
        assert not eval_cleartext(
            qry, {"state": empty, "key": key, "element": _elem_bits(v)}
        )[0]


def test_bloom_false_positive_rate_matches_analytic():
    capacity, h, n = 512, 3, 120
    rng, key, ins, qry = _bloom_env(capacity, h)
    state = np.zeros(capacity, dtype=bool)
    for v in range(n):
        state = eval_cleartext(
            ins, {"state": state, "key": key, "element": _elem_bits(v)}
        )
    trials = 1000
    elems = np.stack(
        [_elem_bits(10_000 + i) for i in range(trials)], axis=1
    )
    got = eval_cleartext(
        qry,
        {
            "state": np.broadcast_to(state[:, None], (capacity, trials)),
            "key": np.broadcast_to(key[:, None], (256, trials)),
            "element": elems,
        },
        batch=trials,
    )
    rate = got[0].sum() / trials
    expect = expected_false_positive_rate(capacity, h, n)
    assert abs(rate - expect) / expect <= 0.5, (rate, expect)


# ------------------------------------------------------------------ aes


def test_aes128_gadget_matches_library():
    from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

    from tandem.circuits.aes import build_aes128

    c = build_aes128()
    rng = DeterministicRng(204)
    for _ in range(2):
        key = rng.bytes(16)
        block = rng.bytes(16)
        expect = Cipher(algorithms.AES(key), modes.ECB()).encryptor().update(block)
        got = eval_cleartext(
            c, {"key": bits_from_bytes(key), "block": bits_from_bytes(block)}
        )
        assert bytes_from_bits(got) == expect

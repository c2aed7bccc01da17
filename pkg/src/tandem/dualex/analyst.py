"""Analyst result delivery: MtS sharing computed inside the final circuit.

The query circuit's result bits are authenticated and split in-circuit: the
MAC key is the XOR of per-party random inputs, the tag and key commitment are
Keccak digests computed on wires, and share 1 leaves the circuit masked by
party 1's private pad so party 2 sees only uniform bits.  Party 2's share is
its own pad inputs plus the public tag.  Only an entity holding both shares
(the analyst) can reconstruct and verify the result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuits.core import CircuitBuilder, P1, P2, WireVec, bits_from_bytes, bytes_from_bits
from ..circuits.gadgets import xor_vec
from ..circuits.keccak import FULL_ROUNDS, sha3_256_gadget
from ..crypto import AuthenticatedSharePair, INVALID, MacTag, Share
from ..crypto.keccak_ref import sha3_256_ref
from ..crypto.rng import Rng

KEY_BITS = 256


@dataclass
class AnalystResult:
    shares: AuthenticatedSharePair
    verified_value: bytes | object  # bytes, or INVALID
    overflow: bool = False
    truncation_warning: bool = False


def mts_output_stage(b: CircuitBuilder, result: WireVec, rounds: int = FULL_ROUNDS):
    """Append in-circuit MtS sharing of `result` to a builder.

    Adds the randomness inputs for both parties and emits output groups:
    share1_m and share1_k (masked under party 1's pads), tag and commit
    (public).  Result length must be a whole number of bytes and fit one
    Keccak rate block together with the key.
    """
    if len(result) % 8:
        raise ValueError("result width must be a whole number of bytes")
    w = len(result)
    k_a = b.add_input("mts_k_a", P1, KEY_BITS)
    pad_m = b.add_input("mts_pad_m", P1, w)
    pad_k = b.add_input("mts_pad_k", P1, KEY_BITS)
    k_b = b.add_input("mts_k_b", P2, KEY_BITS)
    r_m = b.add_input("mts_r_m", P2, w)
    r_k = b.add_input("mts_r_k", P2, KEY_BITS)

    key = xor_vec(b, k_a, k_b)
    tag = sha3_256_gadget(b, key.concat(result), rounds)
    commit = sha3_256_gadget(b, key, rounds)
    m1 = xor_vec(b, result, r_m)
    k1 = xor_vec(b, key, r_k)
    b.add_output("share1_m", xor_vec(b, m1, pad_m))
    b.add_output("share1_k", xor_vec(b, k1, pad_k))
    b.add_output("tag", tag)
    b.add_output("commit", commit)


def mts_stage_inputs(rng1: Rng, rng2: Rng, result_bytes: int):
    """Fresh per-query randomness for the sharing stage, per party."""
    x1 = {
        "mts_k_a": bits_from_bytes(rng1.bytes(32)),
        "mts_pad_m": bits_from_bytes(rng1.bytes(result_bytes)),
        "mts_pad_k": bits_from_bytes(rng1.bytes(32)),
    }
    x2 = {
        "mts_k_b": bits_from_bytes(rng2.bytes(32)),
        "mts_r_m": bits_from_bytes(rng2.bytes(result_bytes)),
        "mts_r_k": bits_from_bytes(rng2.bytes(32)),
    }
    return x1, x2


def extract_party_shares(circuit, out1: np.ndarray, out2: np.ndarray,
                         x1: dict, x2: dict) -> tuple:
    """Each party assembles its share from the released outputs and its own
    randomness; returns (share1, share2)."""
    groups = circuit.output_groups

    def slice_out(bits, name):
        start, width = groups[name]
        return bits[start : start + width]

    tag = MacTag(
        tag=bytes_from_bits(slice_out(out1, "tag")),
        key_commitment=bytes_from_bits(slice_out(out1, "commit")),
    )
    share1 = Share(
        m=bytes_from_bits(slice_out(out1, "share1_m") ^ x1["mts_pad_m"]),
        k=bytes_from_bits(slice_out(out1, "share1_k") ^ x1["mts_pad_k"]),
        tag=tag,
    )
    tag2 = MacTag(
        tag=bytes_from_bits(slice_out(out2, "tag")),
        key_commitment=bytes_from_bits(slice_out(out2, "commit")),
    )
    share2 = Share(
        m=bytes_from_bits(x2["mts_r_m"]),
        k=bytes_from_bits(x2["mts_r_k"]),
        tag=tag2,
    )
    return share1, share2


def verify_analyst_shares(share1: Share, share2: Share, rounds: int = FULL_ROUNDS):
    """Analyst-side reconstruction, honoring the circuit's hash round count."""
    from ..crypto.sharing import xor_bytes

    if share1.tag != share2.tag or len(share1.m) != len(share2.m):
        return INVALID
    k = xor_bytes(share1.k, share2.k)
    m = xor_bytes(share1.m, share2.m)
    if sha3_256_ref(k, rounds) != share1.tag.key_commitment:
        return INVALID
    if sha3_256_ref(k + m, rounds) != share1.tag.tag:
        return INVALID
    return m

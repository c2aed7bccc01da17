"""128-bit wire labels and the fixed-key hash used for garbled table rows.

Labels are numpy arrays of shape (..., 2) uint64, little-endian 128-bit
values.  The permute bit is the LSB of the first word; the global free-XOR
offset R has that bit set so a wire's two labels always carry opposite
permute bits.

The row hash is fixed-key AES in a Davies-Meyer arrangement over tweaked,
doubled labels: H(A, B, gid) = pi(K) ^ K with K = 2A ^ 4B ^ tweak(gid).  Each
row consumes two AES blocks: 16 bytes mask the output label, 8 bytes act as a
row authenticator that lets the evaluator detect garbage labels.
"""

from __future__ import annotations

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from ..crypto.rng import Rng

_FIXED_KEY = bytes.fromhex("9d2c5680a1b2c3d4e5f60718293a4b5c")
_aes = Cipher(algorithms.AES(_FIXED_KEY), modes.ECB()).encryptor()

ROW_WORDS = 3  # 16 bytes label mask + 8 bytes row authenticator


class LabelPlanMismatch(Exception):
    """A pipeline stage referenced carried wires with no registered labels."""


def random_labels(rng: Rng, n: int) -> np.ndarray:
    return rng.uint64((n, 2))


def random_offset(rng: Rng) -> np.ndarray:
    r = rng.uint64((2,))
    r[0] |= np.uint64(1)  # permute bit of R must be set
    return r


def permute_bits(labels: np.ndarray) -> np.ndarray:
    return (labels[..., 0] & np.uint64(1)).astype(np.uint8)


def gf_double(x: np.ndarray) -> np.ndarray:
    """Doubling in GF(2^128) with the standard x^128 + x^7 + x^2 + x + 1."""
    w0, w1 = x[..., 0], x[..., 1]
    carry = (w1 >> np.uint64(63)).astype(np.uint64)
    out = np.empty_like(x)
    out[..., 1] = (w1 << np.uint64(1)) | (w0 >> np.uint64(63))
    out[..., 0] = (w0 << np.uint64(1)) ^ (carry * np.uint64(0x87))
    return out


def _aes_batch(blocks: np.ndarray) -> np.ndarray:
    raw = blocks.astype("<u8").tobytes()
    ct = _aes.update(raw)
    return np.frombuffer(ct, dtype=np.uint64).reshape(blocks.shape)


def hash_rows(a: np.ndarray, b: np.ndarray, gids: np.ndarray) -> np.ndarray:
    """Row hash for batches: a, b of shape (n, 2); gids (n,) uint64.
    Returns (n, 3): two mask words plus one authenticator word."""
    k = gf_double(a) ^ gf_double(gf_double(b))
    k[..., 0] ^= gids * np.uint64(2)
    k2 = k.copy()
    k2[..., 0] ^= np.uint64(1)
    blocks = np.concatenate([k, k2], axis=-1).reshape(-1, 2)  # (2n, 2)
    digest = _aes_batch(blocks) ^ blocks  # Davies-Meyer
    digest = digest.reshape(-1, 4)
    return digest[:, :ROW_WORDS].copy()


def labels_to_bytes(labels: np.ndarray) -> bytes:
    return labels.astype("<u8").tobytes()


def labels_from_bytes(raw: bytes, n: int) -> np.ndarray:
    arr = np.frombuffer(raw, dtype="<u8")
    if len(arr) != 2 * n:
        raise ValueError(f"expected {n} labels, got {len(arr) // 2}")
    return arr.reshape(n, 2).astype(np.uint64)


class LabelPlan:
    """Generator-side labeling plan for a multi-stage pipeline.

    Holds the global offset R, a registry of carried wire labels keyed by
    name, and the running gate-id cursor so row hashes never repeat across
    stages garbled under one plan.
    """

    def __init__(self, rng: Rng):
        self.R = random_offset(rng)
        self.registry: dict[str, np.ndarray] = {}
        self.gid_cursor = 0

    def claim_gids(self, count: int) -> int:
        base = self.gid_cursor
        self.gid_cursor += count
        return base

    def register(self, key: str, label0: np.ndarray):
        self.registry[key] = label0

    def lookup(self, key: str, width: int) -> np.ndarray:
        if key not in self.registry:
            raise LabelPlanMismatch(f"no carried labels registered under {key!r}")
        arr = self.registry[key]
        if len(arr) != width:
            raise LabelPlanMismatch(
                f"carried group {key!r}: registered width {len(arr)}, need {width}"
            )
        return arr


class EvalPlan:
    """Evaluator-side counterpart: carried active labels by key, plus a gate-id
    cursor kept in lockstep with the generator's plan."""

    def __init__(self):
        self.registry: dict[str, np.ndarray] = {}
        self.gid_cursor = 0

    def claim_gids(self, count: int) -> int:
        base = self.gid_cursor
        self.gid_cursor += count
        return base

    def register(self, key: str, labels: np.ndarray):
        self.registry[key] = labels

    def lookup(self, key: str, width: int) -> np.ndarray:
        if key not in self.registry:
            raise LabelPlanMismatch(f"no carried labels registered under {key!r}")
        arr = self.registry[key]
        if len(arr) != width:
            raise LabelPlanMismatch(
                f"carried group {key!r}: registered width {len(arr)}, need {width}"
            )
        return arr

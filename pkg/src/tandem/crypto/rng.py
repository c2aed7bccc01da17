"""Randomness sources.

Every protocol component takes an injected Rng so that runs are reproducible
in tests.  DeterministicRng is a ChaCha20-based stream seeded from an integer
or byte string; SystemRng wraps os.urandom.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher
from cryptography.hazmat.primitives.ciphers.algorithms import ChaCha20


class Rng:
    """Interface: a source of random bytes plus small conveniences."""

    def bytes(self, n: int) -> bytes:
        raise NotImplementedError

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        k = (n - 1).bit_length()
        nbytes = (k + 7) // 8
        while True:
            r = int.from_bytes(self.bytes(nbytes), "little") >> (nbytes * 8 - k)
            if r < n:
                return r

    def bit(self) -> int:
        return self.bytes(1)[0] & 1

    def uint64(self, shape) -> np.ndarray:
        size = int(np.prod(shape))
        buf = self.bytes(size * 8)
        return np.frombuffer(buf, dtype=np.uint64).reshape(shape).copy()

    def shuffled(self, seq: list) -> list:
        out = list(seq)
        for i in range(len(out) - 1, 0, -1):
            j = self.randbelow(i + 1)
            out[i], out[j] = out[j], out[i]
        return out

    def fork(self, label: bytes) -> "DeterministicRng":
        """Derive an independent deterministic stream (for worker processes)."""
        return DeterministicRng(self.bytes(32) + label)


class SystemRng(Rng):
    def bytes(self, n: int) -> bytes:
        return os.urandom(n)


class DeterministicRng(Rng):
    """Seedable CSPRNG: ChaCha20 keystream under a hash-derived key."""

    def __init__(self, seed: int | bytes | str):
        if isinstance(seed, int):
            seed = seed.to_bytes(16, "little", signed=False)
        elif isinstance(seed, str):
            seed = seed.encode()
        key = hashlib.sha3_256(b"tandem-rng" + seed).digest()
        self._enc = Cipher(ChaCha20(key, b"\x00" * 16), mode=None).encryptor()

    def bytes(self, n: int) -> bytes:
        return self._enc.update(b"\x00" * n)

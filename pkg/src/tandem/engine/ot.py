"""Oblivious transfer of evaluator input labels.

Two modes.  Dealer mode routes label pairs and choice bits through a trusted
in-process dealer, giving deterministic tests and by-construction privacy.
Public-key mode is a two-message exchange over a prime-order group: the
receiver publishes one key per choice bit (the other key is pinned by a
nothing-up-my-sleeve group element), the sender returns hashed-ElGamal
encryptions of both labels.  The sender's transcript is independent of the
choice bits.
"""

from __future__ import annotations

import hashlib

import numpy as np

from ..crypto.rng import Rng
from .channel import OT_MSG1, OT_MSG2, Channel
from .labels import labels_from_bytes, labels_to_bytes

# RFC 3526 group 14 (2048-bit MODP, safe prime); generator 4 spans the
# prime-order subgroup of quadratic residues.
_P_2048 = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF",
    16,
)

# Oakley group 1 (RFC 2409, 768-bit safe prime): test-scale group, far too
# small for production but an order of magnitude faster in pure Python.
_P_768 = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A63A3620FFFFFFFFFFFFFFFF",
    16,
)


class PrimeOrderGroup:
    """Multiplicative subgroup of quadratic residues modulo a safe prime."""

    def __init__(self, p: int):
        self.p = p
        self.q = (p - 1) // 2
        self.g = 4  # 2^2, a generator of the QR subgroup
        self.element_bytes = (p.bit_length() + 7) // 8

    @classmethod
    def default(cls) -> "PrimeOrderGroup":
        return cls(_P_2048)

    @classmethod
    def test_group(cls) -> "PrimeOrderGroup":
        return cls(_P_768)

    def exp(self, base: int, e: int) -> int:
        return pow(base, e, self.p)

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        return pow(a, self.p - 2, self.p)

    def random_scalar(self, rng: Rng) -> int:
        return 1 + rng.randbelow(self.q - 1)

    def hash_to_element(self, data: bytes) -> int:
        counter = 0
        while True:
            h = int.from_bytes(
                hashlib.sha3_512(data + counter.to_bytes(4, "little")).digest(), "little"
            ) % self.p
            if h > 1:
                return self.exp(h, 2)  # square into the QR subgroup
            counter += 1

    def encode(self, el: int) -> bytes:
        return el.to_bytes(self.element_bytes, "little")

    def decode(self, raw: bytes) -> int:
        el = int.from_bytes(raw, "little")
        if not (1 <= el < self.p):
            raise ValueError("group element out of range")
        return el


def _kdf(group: PrimeOrderGroup, shared: int, index: int, which: int) -> bytes:
    material = group.encode(shared) + index.to_bytes(4, "little") + bytes([which])
    return hashlib.sha3_256(b"ot-kdf" + material).digest()[:16]


def _xor16(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


class OTDealer:
    """Trusted in-process dealer: the ideal functionality, for tests.
    choose() blocks until the matching offer arrives."""

    def __init__(self):
        import threading

        self._pairs = {}
        self._cond = threading.Condition()

    def offer(self, session_id: bytes, label_pairs: np.ndarray):
        with self._cond:
            self._pairs[session_id] = label_pairs
            self._cond.notify_all()

    def choose(self, session_id: bytes, choice_bits: np.ndarray) -> np.ndarray:
        with self._cond:
            if not self._cond.wait_for(lambda: session_id in self._pairs, timeout=60):
                raise TimeoutError("OT dealer: offer never arrived")
            pairs = self._pairs.pop(session_id)
        if len(choice_bits) != len(pairs):
            raise ValueError("one label pair per choice bit required")
        idx = np.asarray(choice_bits, dtype=np.int64)
        return pairs[np.arange(len(pairs)), idx]


class ObliviousTransferSession:
    """One batch of 1-out-of-2 OTs between a sender and a receiver."""

    def __init__(self, mode: str = "public_key", group: PrimeOrderGroup | None = None,
                 dealer: OTDealer | None = None, session_id: bytes = b""):
        if mode not in ("dealer", "public_key"):
            raise ValueError(f"unknown OT mode {mode!r}")
        self.mode = mode
        self.group = group or PrimeOrderGroup.default()
        self.dealer = dealer
        self.session_id = session_id

    # label_pairs: (n, 2, 2) uint64 -- n wires, two labels, two words each

    def send_labels(self, chan: Channel, label_pairs: np.ndarray, rng: Rng):
        n = len(label_pairs)
        if self.mode == "dealer":
            self.dealer.offer(self.session_id, label_pairs)
            return
        c = self.group.hash_to_element(b"ot-pin" + self.session_id)
        _, msg1 = chan.recv(expect=OT_MSG1)
        eb = self.group.element_bytes
        if len(msg1) != n * eb:
            raise ValueError("OT_MSG1 size mismatch")
        out = bytearray()
        for i in range(n):
            pk0 = self.group.decode(msg1[i * eb : (i + 1) * eb])
            pk1 = self.group.mul(c, self.group.inv(pk0))
            r = self.group.random_scalar(rng)
            gr = self.group.exp(self.group.g, r)
            e0 = _xor16(
                _kdf(self.group, self.group.exp(pk0, r), i, 0),
                labels_to_bytes(label_pairs[i, 0]),
            )
            e1 = _xor16(
                _kdf(self.group, self.group.exp(pk1, r), i, 1),
                labels_to_bytes(label_pairs[i, 1]),
            )
            out += self.group.encode(gr) + e0 + e1
        chan.send(OT_MSG2, bytes(out))

    def receive_labels(self, chan: Channel, choice_bits: np.ndarray, rng: Rng) -> np.ndarray:
        n = len(choice_bits)
        if self.mode == "dealer":
            return self.dealer.choose(self.session_id, choice_bits)
        c = self.group.hash_to_element(b"ot-pin" + self.session_id)
        secrets = []
        msg1 = bytearray()
        for i in range(n):
            x = self.group.random_scalar(rng)
            pk_mine = self.group.exp(self.group.g, x)
            if choice_bits[i]:
                pk0 = self.group.mul(c, self.group.inv(pk_mine))
            else:
                pk0 = pk_mine
            secrets.append(x)
            msg1 += self.group.encode(pk0)
        chan.send(OT_MSG1, bytes(msg1))
        _, msg2 = chan.recv(expect=OT_MSG2)
        eb = self.group.element_bytes
        stride = eb + 32
        labels = np.empty((n, 2), dtype=np.uint64)
        for i in range(n):
            rec = msg2[i * stride : (i + 1) * stride]
            gr = self.group.decode(rec[:eb])
            shared = self.group.exp(gr, secrets[i])
            which = int(choice_bits[i])
            enc = rec[eb + 16 * which : eb + 16 * (which + 1)]
            labels[i] = labels_from_bytes(_xor16(_kdf(self.group, shared, i, which), enc), 1)[0]
        return labels

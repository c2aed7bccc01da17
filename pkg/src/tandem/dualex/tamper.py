"""Fault-injection hooks for the adversarial test harness.

A TamperSpec mutates selected outgoing frames of one party; wrapping a
channel with TamperingChannel models a corrupted or malicious sender without
touching protocol code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..engine.channel import Channel


@dataclass
class TamperSpec:
    msg_type: int | None = None  # which frames to hit (None = any)
    mutate: object = None  # fn(msg_type, payload) -> payload
    max_hits: int = 1
    hits: int = field(default=0)

    def apply(self, msg_type: int, payload: bytes) -> bytes:
        if self.hits >= self.max_hits:
            return payload
        if self.msg_type is not None and msg_type != self.msg_type:
            return payload
        mutated = self.mutate(msg_type, payload)
        if mutated != payload:
            self.hits += 1
        return mutated


class TamperingChannel:
    """Channel proxy that applies a TamperSpec to outgoing frames."""

    def __init__(self, inner: Channel, spec: TamperSpec):
        self.inner = inner
        self.spec = spec

    @property
    def transcript(self):
        return self.inner.transcript

    def send(self, msg_type: int, payload: bytes = b""):
        self.inner.send(msg_type, self.spec.apply(msg_type, payload))

    def recv(self, expect=None):
        return self.inner.recv(expect)

    def close(self):
        self.inner.close()


def flip_byte(offset: int, mask: int = 0x01):
    """Mutator flipping one byte at a (payload-relative) offset."""

    def mutate(_msg_type, payload: bytes) -> bytes:
        if offset >= len(payload):
            return payload
        out = bytearray(payload)
        out[offset] ^= mask
        return bytes(out)

    return mutate


def flip_table_row(and_seq: int, slot: int, header_bytes: int = 8, row_bytes: int = 24):
    """Mutator corrupting one row (slot 0..3) of one AND gate's table inside a
    TABLES frame, if that gate is carried by the frame."""

    def mutate(_msg_type, payload: bytes) -> bytes:
        import struct

        start, count = struct.unpack_from("<II", payload, 0)
        if not (start <= and_seq < start + count):
            return payload
        off = header_bytes + (and_seq - start) * 4 * row_bytes + slot * row_bytes
        out = bytearray(payload)
        out[off] ^= 0xFF
        return bytes(out)

    return mutate

"""Party channel: length-prefixed message framing over in-process queues or
local TCP sockets.

Frame layout: [u8 msg_type][u32 len][payload], little-endian.  Both transports
produce byte-identical frame streams; the in-process transport still encodes
frames so transcripts and golden-stream comparisons are meaningful.
"""

from __future__ import annotations

import queue
import socket
import struct
import threading
from dataclasses import dataclass, field

TABLES = 1
GEN_INPUT_LABELS = 2
OT_MSG1 = 3
OT_MSG2 = 4
DECODE_RELEASE = 5
OUTPUT_SHARE = 6
EQ_COMMIT = 7
EQ_REVEAL = 8
ABORT = 9
CIRCUIT_DIGEST = 10
BLIND_DECODE = 11

MSG_NAMES = {
    TABLES: "TABLES",
    GEN_INPUT_LABELS: "GEN_INPUT_LABELS",
    OT_MSG1: "OT_MSG1",
    OT_MSG2: "OT_MSG2",
    DECODE_RELEASE: "DECODE_RELEASE",
    OUTPUT_SHARE: "OUTPUT_SHARE",
    EQ_COMMIT: "EQ_COMMIT",
    EQ_REVEAL: "EQ_REVEAL",
    ABORT: "ABORT",
    CIRCUIT_DIGEST: "CIRCUIT_DIGEST",
    BLIND_DECODE: "BLIND_DECODE",
}

_HEADER = struct.Struct("<BI")


class ChannelClosed(Exception):
    pass


class ProtocolError(Exception):
    """Unexpected message type or malformed frame; callers map this to ABORT."""


class AbortReceived(Exception):
    """The peer sent an explicit ABORT frame."""


@dataclass
class Transcript:
    """Append-only log of (direction, msg_type, byte length)."""

    entries: list = field(default_factory=list)
    capture_payloads: bool = False
    payloads: list = field(default_factory=list)

    def log(self, direction: str, msg_type: int, length: int, payload: bytes = b""):
        self.entries.append((direction, msg_type, length))
        if self.capture_payloads:
            self.payloads.append((direction, msg_type, payload))

    def bytes_by(self, direction: str, msg_type: int | None = None) -> int:
        return sum(
            n
            for d, t, n in self.entries
            if d == direction and (msg_type is None or t == msg_type)
        )

    def to_csv(self) -> str:
        lines = ["direction,msg_type,bytes"]
        for d, t, n in self.entries:
            lines.append(f"{d},{MSG_NAMES.get(t, t)},{n}")
        return "\n".join(lines) + "\n"


class Channel:
    """One endpoint of a duplex ordered reliable channel."""

    def __init__(self, send_fn, recv_fn, close_fn=None, transcript: Transcript | None = None):
        self._send = send_fn
        self._recv = recv_fn
        self._close = close_fn
        self.transcript = transcript if transcript is not None else Transcript()
        self._recv_buf = b""

    def send(self, msg_type: int, payload: bytes = b""):
        frame = _HEADER.pack(msg_type, len(payload)) + payload
        self.transcript.log("send", msg_type, len(payload), payload)
        self._send(frame)

    def _read_exact(self, n: int) -> bytes:
        while len(self._recv_buf) < n:
            chunk = self._recv()
            if not chunk:
                raise ChannelClosed("peer closed the channel")
            self._recv_buf += chunk
        out, self._recv_buf = self._recv_buf[:n], self._recv_buf[n:]
        return out

    def recv(self, expect: int | None = None) -> tuple:
        header = self._read_exact(_HEADER.size)
        msg_type, length = _HEADER.unpack(header)
        if msg_type not in MSG_NAMES:
            raise ProtocolError(f"unknown message type {msg_type}")
        payload = self._read_exact(length) if length else b""
        self.transcript.log("recv", msg_type, length, payload)
        if msg_type == ABORT:
            raise AbortReceived(payload.decode("utf-8", "replace") or "peer abort")
        if expect is not None and msg_type != expect:
            raise ProtocolError(
                f"expected {MSG_NAMES[expect]}, got {MSG_NAMES[msg_type]}"
            )
        return msg_type, payload

    def close(self):
        if self._close:
            self._close()


def channel_pair(capture_payloads: bool = False) -> tuple:
    """In-process duplex queue transport."""
    q_ab: queue.Queue = queue.Queue()
    q_ba: queue.Queue = queue.Queue()

    def make(qs, qr):
        def send(frame):
            qs.put(frame)

        def recv():
            item = qr.get()
            if item is None:
                return b""
            return item

        def close():
            qs.put(None)

        return Channel(send, recv, close, Transcript(capture_payloads=capture_payloads))

    return make(q_ab, q_ba), make(q_ba, q_ab)


def tcp_channel_pair(port: int = 0, capture_payloads: bool = False) -> tuple:
    """Local TCP transport; returns two connected Channel endpoints."""
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        server.bind(("127.0.0.1", port))
    except OSError as exc:
        server.close()
        raise BindFailed(str(exc)) from exc
    server.listen(1)
    actual_port = server.getsockname()[1]

    result = {}

    def accept():
        conn, _ = server.accept()
        result["conn"] = conn

    t = threading.Thread(target=accept)
    t.start()
    client = socket.create_connection(("127.0.0.1", actual_port))
    t.join()
    server.close()
    conn = result["conn"]

    def make(sock):
        def send(frame):
            sock.sendall(frame)

        def recv():
            try:
                return sock.recv(65536)
            except OSError:
                return b""

        def close():
            try:
                sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            sock.close()

        return Channel(send, recv, close, Transcript(capture_payloads=capture_payloads))

    return make(conn), make(client)


class BindFailed(Exception):
    pass

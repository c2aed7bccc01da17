"""Dual execution over two symmetric semi-honest runs.

Run A: party 1 generates, party 2 evaluates.  Run B: roles reversed, same
circuit, same party inputs.  Before any decoding is released the parties
compare the two runs' outputs through blinded decodings: each generator hands
the other run's evaluator a decoding that yields only masked bits, both
parties fold in their own mask and compare digests via commit/reveal.  Any
mismatch, bad label, or malformed frame ends in ABORT; only after the check
passes are real decodings released.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass

import numpy as np

from ..circuits.core import BooleanCircuit, InputGroup
from ..crypto.rng import DeterministicRng, Rng
from ..engine.channel import (
    ABORT,
    AbortReceived,
    CIRCUIT_DIGEST,
    EQ_COMMIT,
    EQ_REVEAL,
    Channel,
    ChannelClosed,
    ProtocolError,
    channel_pair,
)
from ..engine.garble import DecodeFailure, InvalidLabel
from ..engine.labels import LabelPlanMismatch
from ..engine.ot import ObliviousTransferSession, OTDealer
from ..engine.protocol import evaluator_session, generator_session


class DualExAbort(Exception):
    """Equality mismatch, tampering, or protocol failure; no output released."""


@dataclass
class BlindedOutput:
    party1_out: np.ndarray  # r1, party 1's uniform mask
    party2_out: np.ndarray  # f(x1,x2) ^ r1


def _digest(bits: np.ndarray) -> bytes:
    return hashlib.sha3_256(np.packbits(bits.astype(np.uint8)).tobytes()).digest()


def _commitment(nonce: bytes, digest: bytes) -> bytes:
    return hashlib.sha3_256(b"eq-commit" + nonce + digest).digest()


class _PartyState:
    def __init__(self, party: int, rng: Rng):
        self.party = party
        self.rng = rng
        self.gen_session = None
        self.eval_session = None
        self.eq_mask = None
        self.output_bits = None


def _abort_all(channels, reason: str):
    for ch in channels:
        try:
            ch.send(ABORT, reason.encode())
        except Exception:
            pass


def dualex_party(
    party: int,
    circuit: BooleanCircuit,
    my_inputs: dict,
    chan_gen: Channel,
    chan_eval: Channel,
    chan_ctl: Channel,
    rng: Rng,
    *,
    ot_send: ObliviousTransferSession,
    ot_recv: ObliviousTransferSession,
    gen_plan=None,
    eval_plan=None,
    equality: bool = True,
    release: bool = True,
    digest_check: bool = True,
) -> _PartyState:
    """One party's side of a DualEx stage.  Raises DualExAbort on any failure
    after notifying the peer."""
    state = _PartyState(party, rng)
    channels = (chan_gen, chan_eval, chan_ctl)
    try:
        if digest_check:
            digest = circuit.structural_digest()
            chan_ctl.send(CIRCUIT_DIGEST, digest)
            _, theirs = chan_ctl.recv(expect=CIRCUIT_DIGEST)
            if theirs != digest:
                raise DualExAbort("circuit digest mismatch")

        errors = []
        # the two role threads each get an independent stream; the shared rng
        # is not safe for concurrent use
        rng_gen = rng.fork(b"gen-role")
        rng_eval = rng.fork(b"eval-role")

        def gen_role():
            try:
                state.gen_session = generator_session(
                    circuit, party, my_inputs, chan_gen, rng_gen, plan=gen_plan, ot=ot_send
                )
                if equality:
                    state.eq_mask = state.gen_session.release_blinded(rng_gen)
            except Exception as exc:
                errors.append(exc)

        def eval_role():
            try:
                other = 2 if party == 1 else 1
                state.eval_session = evaluator_session(
                    circuit, other, my_inputs, chan_eval, rng_eval, plan=eval_plan, ot=ot_recv
                )
            except Exception as exc:
                errors.append(exc)

        tg = threading.Thread(target=gen_role)
        te = threading.Thread(target=eval_role)
        tg.start()
        te.start()
        tg.join()
        te.join()
        if errors:
            raise errors[0]

        if equality:
            masked = state.eval_session.recv_blind_decoded()
            check = masked ^ state.eq_mask
            digest = _digest(check)
            nonce = rng.bytes(16)
            chan_ctl.send(EQ_COMMIT, _commitment(nonce, digest))
            _, their_commit = chan_ctl.recv(expect=EQ_COMMIT)
            chan_ctl.send(EQ_REVEAL, nonce + digest)
            _, their_reveal = chan_ctl.recv(expect=EQ_REVEAL)
            their_nonce, their_digest = their_reveal[:16], their_reveal[16:]
            if _commitment(their_nonce, their_digest) != their_commit:
                raise DualExAbort("equality commitment does not open")
            if their_digest != digest:
                raise DualExAbort("output equality check failed")

        if release:
            state.gen_session.release_decoding()
            state.output_bits = state.eval_session.recv_decoded()
        return state
    except DualExAbort as exc:
        _abort_all(channels, str(exc))
        raise
    except (InvalidLabel, DecodeFailure, ProtocolError, LabelPlanMismatch,
            AbortReceived, ChannelClosed, ValueError) as exc:
        _abort_all(channels, exc.__class__.__name__)
        raise DualExAbort(f"{exc.__class__.__name__}: {exc}") from exc


class DualExPair:
    """Both parties of a DualEx instance in one process.

    Owns the two run channels and the control channel; each stage spawns the
    four role workers (2 runs x 2 roles).  Tamper specs wrap a party's
    outgoing frames for the fault-injection harness.
    """

    def __init__(self, seed: int = 0, ot_mode: str = "dealer",
                 capture_payloads: bool = False):
        self.rng1 = DeterministicRng(f"dualex-p1-{seed}")
        self.rng2 = DeterministicRng(f"dualex-p2-{seed}")
        self.ot_mode = ot_mode
        self.capture_payloads = capture_payloads
        self._fresh_channels()
        self._ot_seq = 0

    def _fresh_channels(self):
        self.chanA_1, self.chanA_2 = channel_pair(self.capture_payloads)
        self.chanB_2, self.chanB_1 = channel_pair(self.capture_payloads)
        self.ctl_1, self.ctl_2 = channel_pair(self.capture_payloads)

    def _ot_pair(self, run: str):
        self._ot_seq += 1
        sid = f"{run}-{self._ot_seq}".encode()
        if self.ot_mode == "dealer":
            dealer = OTDealer()
            return (
                ObliviousTransferSession(mode="dealer", dealer=dealer, session_id=sid),
                ObliviousTransferSession(mode="dealer", dealer=dealer, session_id=sid),
            )
        return (
            ObliviousTransferSession(mode="public_key", session_id=sid),
            ObliviousTransferSession(mode="public_key", session_id=sid),
        )

    def run(
        self,
        circuit: BooleanCircuit,
        x1: dict,
        x2: dict,
        *,
        equality: bool = True,
        release: bool = True,
        plans: dict | None = None,
        tamper1=None,
        tamper2=None,
        digest_check: bool = True,
    ):
        """Execute one stage; returns (party1 state, party2 state).
        Raises DualExAbort if either party aborted."""
        from .tamper import TamperingChannel

        otA_send, otA_recv = self._ot_pair("A")
        otB_send, otB_recv = self._ot_pair("B")
        plans = plans or {}

        chanA_1, chanB_1, ctl_1 = self.chanA_1, self.chanB_1, self.ctl_1
        chanA_2, chanB_2, ctl_2 = self.chanA_2, self.chanB_2, self.ctl_2
        if tamper1 is not None:
            chanA_1 = TamperingChannel(chanA_1, tamper1)
            chanB_1 = TamperingChannel(chanB_1, tamper1)
            ctl_1 = TamperingChannel(ctl_1, tamper1)
        if tamper2 is not None:
            chanA_2 = TamperingChannel(chanA_2, tamper2)
            chanB_2 = TamperingChannel(chanB_2, tamper2)
            ctl_2 = TamperingChannel(ctl_2, tamper2)

        results = {}
        errors = {}

        def party1():
            try:
                results[1] = dualex_party(
                    1, circuit, x1, chanA_1, chanB_1, ctl_1, self.rng1,
                    ot_send=otA_send, ot_recv=otB_recv,
                    gen_plan=plans.get("genA"), eval_plan=plans.get("evalB"),
                    equality=equality, release=release, digest_check=digest_check,
                )
            except Exception as exc:
                errors[1] = exc

        def party2():
            try:
                results[2] = dualex_party(
                    2, circuit, x2, chanB_2, chanA_2, ctl_2, self.rng2,
                    ot_send=otB_send, ot_recv=otA_recv,
                    gen_plan=plans.get("genB"), eval_plan=plans.get("evalA"),
                    equality=equality, release=release, digest_check=digest_check,
                )
            except Exception as exc:
                errors[2] = exc

        t1 = threading.Thread(target=party1)
        t2 = threading.Thread(target=party2)
        t1.start()
        t2.start()
        t1.join()
        t2.join()
        if errors:
            exc = errors.get(1) or errors.get(2)
            if isinstance(exc, DualExAbort):
                raise exc
            raise DualExAbort(f"party failure: {exc}") from exc
        return results[1], results[2]


def run_dualex(circuit: BooleanCircuit, x1: dict, x2: dict, *, seed: int = 0,
               ot_mode: str = "dealer", tamper1=None, tamper2=None):
    """Honest-pair convenience entry: returns (out1, out2) decoded bits or
    raises DualExAbort."""
    pair = DualExPair(seed=seed, ot_mode=ot_mode)
    s1, s2 = pair.run(circuit, x1, x2, tamper1=tamper1, tamper2=tamper2)
    return s1.output_bits, s2.output_bits


def append_xor_blinding(circuit: BooleanCircuit) -> BooleanCircuit:
    """Wrap a circuit for asymmetric output: each party contributes a fresh
    uniform mask the same width as the output, and the new output is
    f(x1,x2) ^ r1 ^ r2."""
    w = len(circuit.output_wires)
    n0 = circuit.n_wires
    r1 = list(range(n0, n0 + w))
    r2 = list(range(n0 + w, n0 + 2 * w))
    stage1 = list(range(n0 + 2 * w, n0 + 3 * w))
    stage2 = list(range(n0 + 3 * w, n0 + 4 * w))
    gate_op = np.concatenate([circuit.gate_op, np.zeros(2 * w, dtype=np.uint8)])
    gin0 = np.concatenate(
        [circuit.gin0, circuit.output_wires.astype(np.uint32), np.asarray(stage1, np.uint32)]
    )
    gin1 = np.concatenate(
        [circuit.gin1, np.asarray(r1, np.uint32), np.asarray(r2, np.uint32)]
    )
    gout = np.concatenate(
        [circuit.gout, np.asarray(stage1, np.uint32), np.asarray(stage2, np.uint32)]
    )
    groups = list(circuit.input_groups) + [
        InputGroup("blind_r1", 1, tuple(r1)),
        InputGroup("blind_r2", 2, tuple(r2)),
    ]
    return BooleanCircuit(
        n_wires=n0 + 4 * w,
        gate_op=gate_op,
        gin0=gin0,
        gin1=gin1,
        gout=gout,
        input_groups=groups,
        output_wires=np.asarray(stage2, dtype=np.uint32),
        output_groups={"blinded": (0, w)},
    )


def run_dualex_asymmetric(circuit: BooleanCircuit, x1: dict, x2: dict, *,
                          seed: int = 0, ot_mode: str = "dealer") -> BlindedOutput:
    """Compute y = f ^ r1 ^ r2 symmetrically; party1 outputs r1, party2
    outputs y ^ r2, so the XOR of the outputs is f(x1, x2)."""
    wrapped = append_xor_blinding(circuit)
    w = len(circuit.output_wires)
    rng1 = DeterministicRng(f"asym-r1-{seed}")
    rng2 = DeterministicRng(f"asym-r2-{seed}")
    r1 = np.unpackbits(
        np.frombuffer(rng1.bytes((w + 7) // 8), np.uint8), bitorder="little"
    )[:w].astype(bool)
    r2 = np.unpackbits(
        np.frombuffer(rng2.bytes((w + 7) // 8), np.uint8), bitorder="little"
    )[:w].astype(bool)
    out1, out2 = run_dualex(
        wrapped, {**x1, "blind_r1": r1}, {**x2, "blind_r2": r2},
        seed=seed, ot_mode=ot_mode,
    )
    assert (out1 == out2).all()  # symmetric functionality
    return BlindedOutput(party1_out=r1, party2_out=out2 ^ r2)

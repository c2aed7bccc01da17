"""Semi-honest garbled-circuit 2PC engine.

Garbling with free XOR and point-and-permute, a fixed-key AES hash for table
rows, oblivious transfer of evaluator inputs, streamed table delivery, and
explicit (withheld-by-default) output decoding release.
"""

from .channel import (
    ABORT,
    BLIND_DECODE,
    CIRCUIT_DIGEST,
    DECODE_RELEASE,
    EQ_COMMIT,
    EQ_REVEAL,
    GEN_INPUT_LABELS,
    OT_MSG1,
    OT_MSG2,
    OUTPUT_SHARE,
    TABLES,
    Channel,
    ChannelClosed,
    ProtocolError,
    Transcript,
    channel_pair,
    tcp_channel_pair,
)
from .garble import DecodeFailure, Garbling, InvalidLabel, evaluate_level_batch
from .labels import LabelPlanMismatch
from .ot import OTDealer, ObliviousTransferSession, PrimeOrderGroup
from .protocol import GcSession, evaluator_session, generator_session, run_semi_honest_2pc

__all__ = [
    "Channel",
    "ChannelClosed",
    "ProtocolError",
    "Transcript",
    "channel_pair",
    "tcp_channel_pair",
    "Garbling",
    "InvalidLabel",
    "DecodeFailure",
    "LabelPlanMismatch",
    "OTDealer",
    "ObliviousTransferSession",
    "PrimeOrderGroup",
    "GcSession",
    "generator_session",
    "evaluator_session",
    "run_semi_honest_2pc",
    "evaluate_level_batch",
    "TABLES",
    "GEN_INPUT_LABELS",
    "OT_MSG1",
    "OT_MSG2",
    "DECODE_RELEASE",
    "OUTPUT_SHARE",
    "EQ_COMMIT",
    "EQ_REVEAL",
    "ABORT",
    "CIRCUIT_DIGEST",
    "BLIND_DECODE",
]

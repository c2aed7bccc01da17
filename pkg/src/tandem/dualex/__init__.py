"""Dual execution: two role-swapped semi-honest GC runs plus an equality
check over blinded output encodings.  Actively secure up to one bit of
leakage; an asymmetric extension delivers authenticated shares of the result
to an analyst instead of revealing it to the parties."""

from .analyst import AnalystResult, mts_output_stage, verify_analyst_shares
from .pipeline import DualExPipeline
from .protocol import (
    BlindedOutput,
    DualExAbort,
    DualExPair,
    append_xor_blinding,
    run_dualex,
    run_dualex_asymmetric,
)
from .tamper import TamperSpec, TamperingChannel

__all__ = [
    "DualExAbort",
    "DualExPair",
    "BlindedOutput",
    "run_dualex",
    "run_dualex_asymmetric",
    "append_xor_blinding",
    "AnalystResult",
    "mts_output_stage",
    "verify_analyst_shares",
    "DualExPipeline",
    "TamperSpec",
    "TamperingChannel",
]

"""Boolean-circuit IR and gadget builders for data-oblivious computation.

Circuits have no control flow and fixed output sizes, so their structure never
depends on data values.  The cleartext evaluator here is the correctness
oracle for all secure evaluation layers.
"""

from .core import (
    CONST_WIRES,
    P1,
    P2,
    P_CARRIED,
    P_CONST,
    BooleanCircuit,
    CircuitBuilder,
    GateCountProfile,
    WidthMismatch,
    WireVec,
    eval_cleartext,
)

__all__ = [
    "BooleanCircuit",
    "CircuitBuilder",
    "GateCountProfile",
    "WidthMismatch",
    "WireVec",
    "eval_cleartext",
    "CONST_WIRES",
    "P_CONST",
    "P1",
    "P2",
    "P_CARRIED",
]

"""Multi-stage pipelines: carrying garbled state between circuits.

Within one pipeline each run keeps a single coherent labeling plan, so a
stage's output wires ARE the next stage's input wires; nothing is verified or
re-MACed between stages.  Intermediate stages skip the DualEx equality check;
only the final stage performs it.  The carried state costs two runs times 128
bits per data bit.
"""

from __future__ import annotations

import numpy as np

from ..engine.labels import EvalPlan, LabelPlan
from .protocol import DualExPair


class DualExPipeline:
    """A DualEx pair plus per-run labeling plans spanning stages."""

    def __init__(self, seed: int = 0, ot_mode: str = "dealer"):
        self.pair = DualExPair(seed=seed, ot_mode=ot_mode)
        self.plans = {
            "genA": LabelPlan(self.pair.rng1),
            "evalA": EvalPlan(),
            "genB": LabelPlan(self.pair.rng2),
            "evalB": EvalPlan(),
        }

    def run_stage(self, circuit, x1, x2, *, carry_out: dict | None = None,
                  final: bool = False, tamper1=None, tamper2=None):
        """Execute one stage.  carry_out maps carry-key -> output group name;
        the group's labels become available to later stages as carried inputs
        under that key.  Intermediate stages do not release or compare
        anything; the final stage runs the equality check and releases."""
        s1, s2 = self.pair.run(
            circuit, x1, x2,
            equality=final, release=final, plans=self.plans,
            tamper1=tamper1, tamper2=tamper2,
        )
        if carry_out:
            for key, group in carry_out.items():
                # run A: party1 generated, party2 evaluated
                s1.gen_session.register_carry(key, group)
                s2.eval_session.register_carry(key, group)
                # run B: party2 generated, party1 evaluated
                s2.gen_session.register_carry(key, group)
                s1.eval_session.register_carry(key, group)
        return s1, s2

    def carried_state_bytes(self, key: str) -> int:
        """Bytes of garbled state carried for one key across both runs."""
        width = len(self.plans["evalA"].registry[key])
        return 2 * 16 * width

    def tamper_carried(self, key: str, run: str = "A", bit: int = 0):
        """Corrupt one carried evaluator label (fault-injection hook)."""
        plan = self.plans["evalA" if run == "A" else "evalB"]
        arr = plan.registry[key]
        arr[bit % len(arr)] ^= np.uint64(0x1)

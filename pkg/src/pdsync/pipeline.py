"""End-to-end decision: lower to special-sync, solve, pull the witness back."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .aps import DEFAULT_STATE_BUDGET, nondet_special_sync
from .oracle import Bounds, Yes, bounded_game_solve
from .pda import complete, is_deterministic
from .reductions import (
    ADA, HOMING, SUBSET, SUBSET_HOMING, ProblemInstance, lower_to_special, pull_back_witness,
)
from .sparse import det_special_sync
from .witness import HomingWord, Node, Synchroniser, check_witness


# Sparse emptiness enumerates every structured tree with at most |I| leaves;
# past five leaves that count explodes, so larger instances use saturation.
SPARSE_MAX_LEAVES = 5


@dataclass
class Decision:
    answer: bool
    witness: Optional[Node] = None
    target: Optional[str] = None  # synchronising state, when the variant leaves it open
    solver: str = ""
    trace: list = field(default_factory=list)
    seconds: float = 0.0


def decide(instance: ProblemInstance, k=None, state_budget=DEFAULT_STATE_BUDGET,
           solver: Optional[str] = None) -> Decision:
    """Decide ``instance``; on YES the witness is validated against the source.

    ``solver`` forces "sparse" (deterministic only) or "saturation"; by
    default deterministic PDAs with a small initial set use sparse emptiness.
    """
    start = time.perf_counter()
    special, chain = lower_to_special(instance)
    trace = [red.tag for red in chain]
    pda = complete(special.pda)
    det = is_deterministic(pda)
    if solver is None:
        small = len(special.initial) <= SPARSE_MAX_LEAVES or k is not None
        solver = "sparse" if det and small else "saturation"
    if solver == "sparse":
        ok, witness = det_special_sync(pda, special.initial, special.target, k=k,
                                       state_budget=state_budget)
    elif solver == "saturation":
        ok, witness = nondet_special_sync(pda, special.initial, special.target,
                                          state_budget=state_budget)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    target = None
    if ok:
        for red in reversed(chain):
            witness, target = pull_back_witness(red, witness, target)
        if instance.variant not in (ADA, SUBSET, HOMING, SUBSET_HOMING):
            target = instance.target
    return Decision(ok, witness if ok else None, target, solver, trace,
                    time.perf_counter() - start)


def oracle_decide(instance: ProblemInstance, bounds: Bounds = Bounds()):
    """Bounded game search on the instance itself.

    Returns ``(Yes | NoWithinBounds, target)``.
    """
    pda = complete(instance.pda)
    root = instance.root
    if instance.variant in (HOMING, SUBSET_HOMING):
        return bounded_game_solve(pda, root, HomingWord(), bounds), None
    if instance.variant in (ADA, SUBSET):
        res = None
        for s in pda.states:
            res = bounded_game_solve(pda, root, Synchroniser(s), bounds)
            if isinstance(res, Yes):
                return res, s
        return res, None
    return bounded_game_solve(pda, root, instance.witness_kind(), bounds), instance.target


def verify(instance: ProblemInstance, decision: Decision) -> bool:
    """Re-check a positive decision's witness against the source instance."""
    if not decision.answer:
        return True
    kind = instance.witness_kind(decision.target)
    return bool(check_witness(complete(instance.pda), instance.root, kind, decision.witness))

"""Average-cost-per-cycle policy synthesis for labeled MDPs."""

from ._cyclesynth import (
    CycleValue,
    Dra,
    Error,
    Mdp,
    brute_force,
    cesaro_limit,
    deviation_matrix,
    evaluate,
    policy_iteration,
    run_cli,
    simulate,
    synthesize,
)

__all__ = [
    "CycleValue",
    "Dra",
    "Error",
    "Mdp",
    "brute_force",
    "cesaro_limit",
    "deviation_matrix",
    "evaluate",
    "policy_iteration",
    "run_cli",
    "simulate",
    "synthesize",
]

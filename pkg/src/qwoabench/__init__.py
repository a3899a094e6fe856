"""Statevector QWOA simulation and MaxCut benchmarking.

Three ways of training the quantum walk optimisation algorithm are compared:
randomly initialised QWOA, QWOA warm-started from a path-graph solution
(Lie-algebraic pretraining) and the three-hyperparameter NV-QWOA schedule.
"""

from qwoabench.graphs import (
    Graph,
    MaxcutSolution,
    QualityTable,
    approx_ratio,
    brute_force_maxcut,
    build_quality_table,
    gen_er,
    gen_regular,
    quality,
)
from qwoabench.optimize import OptimizerConfig, OptimizerTrace, minimize
from qwoabench.simulator import (
    CircuitSpec,
    Gate,
    Statevector,
    apply_mixer,
    apply_phase,
    expectation,
    gradient_adjoint,
    qwoa_circuit,
    run_pqc,
    uniform_state,
)

__version__ = "0.1.0"

__all__ = [
    "CircuitSpec",
    "Gate",
    "Graph",
    "MaxcutSolution",
    "OptimizerConfig",
    "OptimizerTrace",
    "QualityTable",
    "Statevector",
    "apply_mixer",
    "apply_phase",
    "approx_ratio",
    "brute_force_maxcut",
    "build_quality_table",
    "expectation",
    "gen_er",
    "gen_regular",
    "gradient_adjoint",
    "minimize",
    "quality",
    "qwoa_circuit",
    "run_pqc",
    "uniform_state",
]

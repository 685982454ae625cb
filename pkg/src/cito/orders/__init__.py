"""Class integration test order generation."""

from .graphs import CycleLimitError, CycleSet, enumerate_cycles, tarjan_scc, topological_order
from .strategies import (
    STRATEGIES,
    PriorityState,
    StuckCycleError,
    TestOrder,
    exhaustive_minimum,
    graph_based,
    is_protected,
    multilevel_feedback,
    ria,
    run_strategy,
)

__all__ = [
    "CycleLimitError",
    "CycleSet",
    "PriorityState",
    "STRATEGIES",
    "StuckCycleError",
    "TestOrder",
    "enumerate_cycles",
    "exhaustive_minimum",
    "graph_based",
    "is_protected",
    "multilevel_feedback",
    "ria",
    "run_strategy",
    "tarjan_scc",
    "topological_order",
]

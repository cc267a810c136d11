"""Discrete-time quantum walks with memory on regular graphs, in coined and Szegedy form."""

__version__ = "0.1.0"

from .analysis import (
    compare_distributions,
    dense_matrix,
    dense_operator,
    moments,
    operator_distance,
    qwm_equivalence_experiment,
)
from .bridge import coin_from_reflection, coined_to_szegedy, map_state, szegedy_to_coined
from .coined import CoinedWalk, CoinOperator, build_qwm1, build_qwm2, position_distribution
from .graph import RegularDigraph, cycle_graph, iterated_line_digraph, line_digraph
from .partition import (
    ArcSuccessor,
    CoinShiftFunction,
    VertexPartition,
    cycles_of,
    is_dicycle_partition,
    validate_arc_successor,
    validate_coin_shift,
    validate_vertex_partition,
)
from .szegedy import SzegedyWalk, TransitionAmplitudes, r_squared_check

__all__ = [
    "__version__",
    "ArcSuccessor",
    "CoinOperator",
    "CoinShiftFunction",
    "CoinedWalk",
    "RegularDigraph",
    "SzegedyWalk",
    "TransitionAmplitudes",
    "VertexPartition",
    "build_qwm1",
    "build_qwm2",
    "coin_from_reflection",
    "coined_to_szegedy",
    "compare_distributions",
    "cycle_graph",
    "cycles_of",
    "dense_matrix",
    "dense_operator",
    "is_dicycle_partition",
    "iterated_line_digraph",
    "line_digraph",
    "map_state",
    "moments",
    "operator_distance",
    "position_distribution",
    "qwm_equivalence_experiment",
    "r_squared_check",
    "szegedy_to_coined",
    "validate_arc_successor",
    "validate_coin_shift",
    "validate_vertex_partition",
]

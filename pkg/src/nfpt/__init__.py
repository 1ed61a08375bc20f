"""Treewidth dynamic programming with oracle advice for MIS, MVC and Max-Cut."""

from .exact import brute_force, reference_opt
from .generators import GenSpec, generate, mix
from .graph import (
    Graph,
    ProblemKind,
    VertexState,
    evaluate,
    format_edge_list,
    is_feasible,
    normalize,
    parse_edge_list,
)
from .meta import IclParams, RdParams, defer, icl_run, rd_run
from .modulator import Modulator, modulator_exact, modulator_greedy, select_modulator, verify_modulator
from .oracles import (
    ExternalOracle,
    OracleCall,
    OracleError,
    OracleResult,
    advice_from,
    oracle_external,
    oracle_random_greedy,
)
from .tdpa import AdviceInfeasible, DPOutcome, TdpaSolver, enumerate_bag_states, tdpa_solve
from .treedecomp import (
    RootedTD,
    TreeDecomposition,
    decompose,
    min_degree_td,
    prune_bags,
    root_and_order,
    validate_td,
)

__version__ = "0.1.0"

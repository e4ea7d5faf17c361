"""Minimum-cost survivable Steiner subgraphs with few terminals.

Exact solvers for unit costs (Steiner cycle, 2-node-connected and
2-edge-connected Steiner subgraphs, and trees surviving one unsafe-edge
failure), a scaling-based (1+eps) approximation for weighted costs,
brute-force oracles for desk-scale certification, and a file format,
generator, and CLI around them.
"""

from .blocktree import (
    BlockTree,
    CondensedBlockTree,
    block_tree,
    check_block_tree,
    check_condensed_block_tree,
    condensed_block_tree,
)
from .cycles import (
    CycleSolverParams,
    SolverKind,
    min_steiner_cycle,
    min_steiner_path,
)
from .ears import (
    Ear,
    EarDecomposition,
    check_ear_decomposition,
    ear_decomposition,
    terminal_ear_decomposition,
)
from .enumeration import (
    OrderedPartition,
    anchor_pairs,
    count_subsets_up_to,
    ordered_bell,
    ordered_partitions,
    subsets_up_to,
    tuples_with_replacement,
)
from .errors import (
    AlreadyModified,
    BudgetExceeded,
    Disconnected,
    Infeasible,
    InfiniteMst,
    NoCycle,
    NoPath,
    NoProtectedPath,
    NotModified,
    NotTwoConnected,
    ParseError,
    SemanticError,
    SpecInfeasible,
    SubcallFailed,
    SurvsteinerError,
    TerminalMissing,
    TooFewAnchors,
)
from .graph import (
    Block,
    Edge,
    Graph,
    blocks_and_cuts,
    connected_components,
    degree3_nodes,
    degrees,
    exact_fraction,
    is_2ec,
    is_2nc,
    is_connected,
    subgraph_nodes,
)
from .instance_io import (
    cost_text,
    emit_instance,
    generate_instance,
    instance_kind,
    parse_instance,
)
from .kfst import (
    AuxiliaryGraphK,
    FstInstance,
    ProtectedPathTable,
    apply_pendant_gadget,
    build_auxiliary_k,
    build_protected_table,
    min_protected_path,
    mst_join,
    solve_2ecs,
    solve_kfst_unweighted,
    solve_kfst_weighted,
    strip_pendant_gadget,
)
from .oracle import (
    OracleBudget,
    oracle_feasible,
    oracle_min_subgraph,
    oracle_min_subgraph_bb,
    oracle_protected_all_pairs,
)
from .report import (
    build_certificate,
    build_report,
    emit_report,
    validate_certificate,
    validate_report,
)
from .scaling import ScalingGadget, build_scaling_gadget, weighted_steiner_cycle
from .solution import ProblemKind, Solution, SolveStats
from .twonc import (
    MarkerConfiguration,
    assemble_candidate,
    solve_2ncs_unweighted,
    solve_2ncs_weighted,
)

__version__ = "0.1.0"

__all__ = [
    "AlreadyModified",
    "AuxiliaryGraphK",
    "Block",
    "BlockTree",
    "BudgetExceeded",
    "CondensedBlockTree",
    "CycleSolverParams",
    "Disconnected",
    "Ear",
    "EarDecomposition",
    "Edge",
    "FstInstance",
    "Graph",
    "Infeasible",
    "InfiniteMst",
    "MarkerConfiguration",
    "NoCycle",
    "NoPath",
    "NoProtectedPath",
    "NotModified",
    "NotTwoConnected",
    "OracleBudget",
    "OrderedPartition",
    "ParseError",
    "ProblemKind",
    "ProtectedPathTable",
    "ScalingGadget",
    "SemanticError",
    "Solution",
    "SolveStats",
    "SolverKind",
    "SpecInfeasible",
    "SubcallFailed",
    "SurvsteinerError",
    "TerminalMissing",
    "TooFewAnchors",
    "anchor_pairs",
    "apply_pendant_gadget",
    "assemble_candidate",
    "block_tree",
    "blocks_and_cuts",
    "build_auxiliary_k",
    "build_certificate",
    "build_protected_table",
    "build_report",
    "build_scaling_gadget",
    "check_block_tree",
    "check_condensed_block_tree",
    "check_ear_decomposition",
    "condensed_block_tree",
    "connected_components",
    "cost_text",
    "count_subsets_up_to",
    "degree3_nodes",
    "degrees",
    "ear_decomposition",
    "emit_instance",
    "emit_report",
    "exact_fraction",
    "generate_instance",
    "instance_kind",
    "is_2ec",
    "is_2nc",
    "is_connected",
    "min_protected_path",
    "min_steiner_cycle",
    "min_steiner_path",
    "mst_join",
    "oracle_feasible",
    "oracle_min_subgraph",
    "oracle_min_subgraph_bb",
    "oracle_protected_all_pairs",
    "ordered_bell",
    "ordered_partitions",
    "parse_instance",
    "solve_2ecs",
    "solve_2ncs_unweighted",
    "solve_2ncs_weighted",
    "solve_kfst_unweighted",
    "solve_kfst_weighted",
    "strip_pendant_gadget",
    "subgraph_nodes",
    "subsets_up_to",
    "terminal_ear_decomposition",
    "tuples_with_replacement",
    "validate_certificate",
    "validate_report",
    "weighted_steiner_cycle",
]

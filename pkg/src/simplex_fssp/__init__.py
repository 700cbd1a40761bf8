"""P systems with simplex channels and a firing squad synchronization program."""
from .engine import (
    CellState, GroundRule, Program, Rule, RuleMode, SystemConfiguration, Trace,
    apply_cell, instantiate, is_halted, run, step,
)
from .fssp import SyncReport, build_fssp_program, check_synchronization, initial_configuration
from .multiset import Multiset
from .symbols import Pattern, Plus, Symbol, Var, match, parse_pattern, parse_symbol, sym
from .topology import (
    Digraph, TopologyError, TopologyMetrics, depths, family, increasing_rings, is_strongly_connected,
    metrics, random_strongly_connected, ring, ring_of_rings, validate,
)

__version__ = "0.1.0"

__all__ = [
    "CellState", "GroundRule", "Program", "Rule", "RuleMode", "SystemConfiguration", "Trace",
    "apply_cell", "instantiate", "is_halted", "run", "step",
    "SyncReport", "build_fssp_program", "check_synchronization", "initial_configuration",
    "Multiset", "Pattern", "Plus", "Symbol", "Var", "match", "parse_pattern", "parse_symbol", "sym",
    "Digraph", "TopologyError", "TopologyMetrics", "depths", "family", "increasing_rings",
    "is_strongly_connected", "metrics", "random_strongly_connected", "ring", "ring_of_rings", "validate",
]

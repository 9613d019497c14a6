"""cexforge: critical-subsystem counterexamples for DTMC reachability properties."""

from .model import Comparison, Dtmc, ReachabilityProperty, validate_dtmc
from .reachability import check_property, compute_prob01, solve_reachability
from .scc import build_hierarchy, build_view, decompose_sccs
from .search import Budget, best_fragment, enumerate_paths, global_search, local_search
from .session import RefinementSession, SessionStatus, load_session
from .subsystem import Subsystem, induce, is_critical, probability, stats

__all__ = [
    "Budget",
    "Comparison",
    "Dtmc",
    "ReachabilityProperty",
    "RefinementSession",
    "SessionStatus",
    "Subsystem",
    "best_fragment",
    "build_hierarchy",
    "build_view",
    "check_property",
    "compute_prob01",
    "decompose_sccs",
    "enumerate_paths",
    "global_search",
    "induce",
    "is_critical",
    "load_session",
    "local_search",
    "probability",
    "solve_reachability",
    "stats",
    "validate_dtmc",
]

__version__ = "1.0.0"

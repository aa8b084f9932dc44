"""son-ot 参考实现层：求解器、基线与存储"""
from .solver import SonSolver, SolveReport, solve, jit_restrict, jit_scale
from .memory import MemoryStore
from .sampling import sample_term, sample_term_index, draw_terms
from .rounding import round_to_feasible
from .baselines import sinkhorn, exact_ot, SinkhornResult, ExactResult, EXACT_OT_MAX_ENTRIES

__all__ = [
    "SonSolver",
    "SolveReport",
    "solve",
    "jit_restrict",
    "jit_scale",
    "MemoryStore",
    "sample_term",
    "sample_term_index",
    "draw_terms",
    "round_to_feasible",
    "sinkhorn",
    "exact_ot",
    "SinkhornResult",
    "ExactResult",
    "EXACT_OT_MAX_ENTRIES",
]

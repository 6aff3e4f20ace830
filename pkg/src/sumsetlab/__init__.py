"""Finite-window sumset decomposition, Banach-Mazur plays and counting bounds."""

from .core import (
    CountingProfile,
    LimitExceeded,
    SetWindow,
    UsageError,
    pattern_frequency,
    sumset_window,
    sym_diff_count,
    z_alpha_profile,
)
from .decomposer import (
    BudgetedWitness,
    CensusResult,
    Decomposition,
    Inconclusive,
    SearchConfig,
    SearchResult,
    Verdict,
    census,
    decide_budgeted,
    decide_exact,
    is_in_E_n,
    oracle_decomposable_masks,
    search,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetedWitness", "CensusResult", "CountingProfile", "Decomposition", "Inconclusive", "LimitExceeded",
    "SearchConfig", "SearchResult", "SetWindow", "UsageError", "Verdict", "census", "decide_budgeted",
    "decide_exact", "is_in_E_n", "oracle_decomposable_masks", "pattern_frequency", "search", "sumset_window",
    "sym_diff_count", "z_alpha_profile",
]

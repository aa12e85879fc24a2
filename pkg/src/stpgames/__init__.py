"""Weighted potential games in semi-tensor-product form.

Verify and estimate weighted potential structure of finite games, find
closest weighted potential games, check near weighted potential games via
best-response dynamics, and design utilities for a prescribed potential.
"""

from .design import DesignProblem, DesignSolution, certify_gtc, design
from .dynamics import (
    NwpgReport,
    ProfileDynamics,
    Trajectory,
    evolutionary_equivalent,
    mbra_dynamics,
    nwpg_check,
    pure_nash,
    simulate,
)
from .errors import (
    DegenerateGameError,
    DimensionError,
    GameFormatError,
    NotASolutionError,
    SingularDesignError,
    StpGamesError,
)
from .estimator import AlsConfig, VerdictKind, WpgVerdict, estimate, weight_step
from .game import (
    FiniteGame,
    distance,
    from_payoff_table,
    game_from_document,
    potential_by_enumeration,
    satisfies_potential,
    zero_game,
)
from .potential import (
    WpeSolution,
    WpgBasis,
    build_B,
    build_Ei,
    build_EPw,
    build_Ew,
    potential_from_solution,
    project_closest_wpg,
    solve_wpe,
    wpg_subspace,
)
from .stp import (
    LogicalMatrix,
    delta,
    khatri_rao,
    profile_decode,
    profile_encode,
    stp,
    stp_chain,
    swap_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AlsConfig",
    "build_B",
    "build_Ei",
    "build_EPw",
    "build_Ew",
    "certify_gtc",
    "DegenerateGameError",
    "delta",
    "design",
    "DesignProblem",
    "DesignSolution",
    "DimensionError",
    "distance",
    "estimate",
    "evolutionary_equivalent",
    "FiniteGame",
    "from_payoff_table",
    "game_from_document",
    "GameFormatError",
    "khatri_rao",
    "LogicalMatrix",
    "mbra_dynamics",
    "NotASolutionError",
    "nwpg_check",
    "NwpgReport",
    "potential_by_enumeration",
    "potential_from_solution",
    "profile_decode",
    "profile_encode",
    "ProfileDynamics",
    "project_closest_wpg",
    "pure_nash",
    "satisfies_potential",
    "simulate",
    "SingularDesignError",
    "solve_wpe",
    "stp",
    "stp_chain",
    "StpGamesError",
    "swap_matrix",
    "Trajectory",
    "VerdictKind",
    "weight_step",
    "WpeSolution",
    "wpg_subspace",
    "WpgBasis",
    "WpgVerdict",
    "zero_game",
]

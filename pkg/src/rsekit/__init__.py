"""Robust Stackelberg equilibrium toolkit for bimatrix leader-follower games."""

from .baseline import (ActionInducibility, InducibilityReport, induce_strategy,
                       inducibility_gap, solve_maximin, solve_sse)
from .approx import (KUniformStrategy, SurrogateRegion, build_k, gap_approx,
                     make_region, qptas_solve, utility_verification)
from .errors import (BudgetExceeded, EnumerationCapExceeded, GameFormatError,
                     GapTooSmall, InvalidStrategyError, MalformedLpError,
                     PerturbationBoundError, RejectionCapExceeded, RsekitError,
                     SolverFailure)
from .exact import RegionTuple, RseCurve, RseSolution, rse_curve, solve_exact
from .game import (BimatrixGame, GameValueReport, MixedStrategy, ResponseSet,
                   attach_exact, br_delta, dumps_game, evaluate, exact_game,
                   exact_strategy, loads_game, normalize, pure_strategy)
from .lab import (CatalogEntry, X3CInstance, catalog, gen_random, gen_x3c_game,
                  grid_oracle, parse_x3c, x3c_brute_check, x3c_to_text)
from .learning import (LearnedOutcome, NoisyGameOracle, check_br_inclusion,
                       learn_rse, learn_sse, misidentification_report,
                       rse_from_estimate, sample_estimate, samples_per_pair)
from .lp import Constraint, LinearProgram, LpOutcome, feasibility, maximize

__all__ = [
    "ActionInducibility", "BimatrixGame", "BudgetExceeded", "CatalogEntry",
    "Constraint", "EnumerationCapExceeded", "GameFormatError",
    "GameValueReport", "GapTooSmall", "InducibilityReport",
    "InvalidStrategyError", "KUniformStrategy", "LearnedOutcome",
    "LinearProgram", "LpOutcome", "MalformedLpError", "MixedStrategy",
    "NoisyGameOracle", "PerturbationBoundError", "RegionTuple",
    "RejectionCapExceeded", "ResponseSet", "RseCurve", "RseSolution",
    "RsekitError", "SolverFailure", "SurrogateRegion", "X3CInstance",
    "attach_exact", "br_delta", "build_k", "catalog", "check_br_inclusion",
    "dumps_game", "evaluate", "exact_game", "exact_strategy", "feasibility",
    "gap_approx", "gen_random", "gen_x3c_game", "grid_oracle",
    "induce_strategy", "inducibility_gap", "learn_rse", "learn_sse",
    "loads_game", "make_region", "maximize", "misidentification_report",
    "normalize", "parse_x3c", "pure_strategy", "qptas_solve",
    "rse_from_estimate", "rse_curve", "sample_estimate", "samples_per_pair",
    "solve_exact", "solve_maximin", "solve_sse", "utility_verification",
    "x3c_brute_check", "x3c_to_text",
]

__version__ = "0.1.0"

"""Multi-objective gradient descent toolkit.

Unconstrained multi-objective minimization by descent along directions
obtained from small linear programs, with two direction subproblems, two
backtracking strategies, benchmark problems, Pareto-front metrics, and a
reproducible multi-start experiment harness.
"""

from .core import (
    EvaluationError,
    Evaluation,
    Problem,
    critical_oracle,
    dominates,
    evaluate,
)
from .descent import (
    BacktrackParams,
    BacktrackVariant,
    RunResult,
    SegmentKind,
    Termination,
    TraceRecord,
    armijo_holds,
    backtrack,
    classify_subsequences,
    run_mgd,
)
from .direction import (
    CriticalityCase,
    DirectionConfig,
    DirectionResult,
    DirectionVariant,
    build_lp_base,
    build_lp_new,
    gamma,
    normalize_rows,
    solve_blockwise,
    solve_direction,
    sum_gradient,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    VariantResult,
    emit_traces,
    run_experiment,
)
from .lp import (
    LpResult,
    LpSpec,
    LpStatus,
    OracleInfeasible,
    SolverFailure,
    enumerate_vertices_oracle,
    solve_lp,
)
from .metrics import (
    RunOutputSet,
    critical_region_scan,
    global_pareto_ratio,
    nondominated_filter,
    nondominated_mask,
)
from .problems import (
    PROBLEMS,
    StartSampler,
    finite_difference_jacobian,
    fonseca_fleming,
    get_problem,
    kursawe,
    sample_starts,
    viennet,
)

__version__ = "0.1.0"

__all__ = [
    "BacktrackParams",
    "BacktrackVariant",
    "CriticalityCase",
    "DirectionConfig",
    "DirectionResult",
    "DirectionVariant",
    "Evaluation",
    "EvaluationError",
    "ExperimentConfig",
    "ExperimentReport",
    "LpResult",
    "LpSpec",
    "LpStatus",
    "OracleInfeasible",
    "PROBLEMS",
    "Problem",
    "RunOutputSet",
    "RunResult",
    "SegmentKind",
    "SolverFailure",
    "StartSampler",
    "Termination",
    "TraceRecord",
    "VariantResult",
    "armijo_holds",
    "backtrack",
    "build_lp_base",
    "build_lp_new",
    "classify_subsequences",
    "critical_oracle",
    "critical_region_scan",
    "dominates",
    "emit_traces",
    "enumerate_vertices_oracle",
    "evaluate",
    "finite_difference_jacobian",
    "fonseca_fleming",
    "gamma",
    "get_problem",
    "global_pareto_ratio",
    "kursawe",
    "nondominated_filter",
    "nondominated_mask",
    "normalize_rows",
    "run_experiment",
    "run_mgd",
    "sample_starts",
    "solve_blockwise",
    "solve_direction",
    "solve_lp",
    "sum_gradient",
    "viennet",
]

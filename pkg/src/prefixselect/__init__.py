"""CEGAR model checker for a toy integer language, with refinement selection
over infeasible sliced prefixes."""

from .engine import Limits, RunStats, Verdict, cegar, extract_error_path, reach
from .frontend import (
    ControlFlowAutomaton,
    ParseError,
    build_cfa,
    cfa_to_dot,
    load_cfa,
    parse,
)
from .interpolation import (
    InterpolantSequence,
    InterpolationError,
    interpolant_sequence,
    interpolant_to_constraints,
    interpolate,
)
from .paths import (
    FeasiblePathError,
    Path,
    SlicedPrefix,
    extract_sliced_prefixes,
    is_feasible,
    sp_path,
    sp_seq,
)
from .refinement import (
    DomainType,
    Heuristic,
    Precision,
    choose_sliced_prefix,
    classify_domain_types,
    extract_precision,
    refine_classic,
    refine_selecting,
    score_interpolant_sequence,
)
from .values import (
    BOTTOM,
    TOP,
    Assignment,
    ThreeValued,
    conjoin,
    eval_expr,
    eval_pred,
    implies,
    render_assignment,
    restrict,
    sp,
)

__version__ = "0.1.0"

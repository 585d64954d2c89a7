"""Grossone numerals and ODE solvers built on infinitesimal Euler steps."""

from .grossnum import (
    RATIONAL,
    CapExceeded,
    Context,
    DivisionByZero,
    GrossError,
    GrossNumber,
    coefficient_at,
    compare,
    divide,
    grossone,
    is_purely_finite,
    normalize,
    parse,
    parts,
    render,
)
from .elemfun import DomainError, InfinitePartUnsupported, NotRepresentable, lift
from .rhs import Expression, ExprSyntaxError, UnknownIdentifier, parse_expr
from .taylor import (
    BACKWARD,
    FORWARD,
    ContaminatedDifference,
    ErrorLedger,
    InconsistentLedger,
    InsufficientNodes,
    RhsEvaluationError,
    StepTrace,
    TaylorModel,
    build_taylor,
    difference,
    euler_infinitesimal,
    extract_derivative,
    readoff_at_finite,
    recover_with_errors,
    refine_readoff,
)
from .methods import (
    IvpProblem,
    SolveResult,
    SolverConfig,
    backward_correction,
    solve_heun,
    solve_method_1_0,
    solve_method_1_1,
    solve_oneshot_taylor,
    solve_rk4,
)
from .problems import PROBLEMS, get_problem

__version__ = "0.1.0"

"""Solvers for scalar initial value problems ``y' = f(x, y)``, ``y(x0) = y0``.

The Taylor-type methods get their derivatives from infinitesimal Euler
steps (see :mod:`infinity_ode.taylor`) and then make ordinary finite steps
with the resulting polynomial.  Heun and classical RK4 are included as
baselines and work on purely finite scalars.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .grossnum import RATIONAL, Context, GrossNumber
from .taylor import BACKWARD, FORWARD, TaylorModel, build_taylor, readoff_at_finite

__all__ = [
    "IvpProblem",
    "SolverConfig",
    "SolveResult",
    "solve_oneshot_taylor",
    "solve_method_1_0",
    "solve_method_1_1",
    "backward_correction",
    "solve_heun",
    "solve_rk4",
    "ERROR_CONTEXT",
]

# error columns are computed against the exact solution at this precision
ERROR_CONTEXT = Context("decimal", 40)


@dataclass
class IvpProblem:
    rhs: Callable[[GrossNumber, GrossNumber], GrossNumber]
    x0: object
    y0: object
    x_end: object
    exact_solution: Optional[Callable[[GrossNumber], GrossNumber]] = None
    name: str = ""

    def __post_init__(self):
        if not self.x_end > self.x0:
            raise ValueError("x_end must be greater than x0")


@dataclass
class SolverConfig:
    h: object
    k: int = 2
    tau: object = Fraction(1, 2)
    ctx: Context = RATIONAL
    feedback: bool = False

    def __post_init__(self):
        self.h = self.ctx.scalar(self.h)
        self.tau = self.ctx.scalar(self.tau)
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if self.k < 1:
            raise ValueError("order k must be at least 1")
        if not 0 < self.tau < 1:
            raise ValueError("tau must lie strictly between 0 and 1")


@dataclass
class SolveResult:
    """Grid values of one solver run.

    ``corrections[n]`` is ``(c_n, y_c_n)`` for corrected methods and
    ``errors[n]`` is ``y(x_n)`` minus the reported estimate (the corrected
    one when there is one).  Derivatives stored in ``models`` belong to the
    local solution through ``(x_n, y_n)``, not to the true solution.
    """

    method: str
    points: list
    models: list = field(default_factory=list)
    corrections: Optional[list] = None
    f_evals: int = 0
    errors: Optional[list] = None

    @property
    def estimates(self) -> list:
        if self.corrections is not None:
            return [yc for _, yc in self.corrections]
        return [y for _, y in self.points]


class _Counted:
    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, x, y):
        self.calls += 1
        return self.f(x, y)


def _steps(p: IvpProblem, h, ctx: Context) -> int:
    span = ctx.sub(ctx.scalar(p.x_end), ctx.scalar(p.x0))
    n = ctx.div(span, h)
    if n != int(n):
        raise ValueError(f"interval length {span} is not a multiple of h = {h}")
    return int(n)


def _grid(p: IvpProblem, h, ctx: Context) -> list:
    x0 = ctx.scalar(p.x0)
    return [ctx.add(x0, ctx.mul(ctx.scalar(i), h)) for i in range(_steps(p, h, ctx) + 1)]


def _errors(p: IvpProblem, xs, estimates) -> Optional[list]:
    if p.exact_solution is None:
        return None
    ec = ERROR_CONTEXT
    out = []
    for x, y in zip(xs, estimates):
        u = p.exact_solution(GrossNumber.scalar(x, ec)).finite_part
        out.append(ec.sub(u, ec.scalar(y)))
    return out


def solve_oneshot_taylor(p: IvpProblem, k: int, ctx: Context = RATIONAL) -> SolveResult:
    """Order-``k`` Taylor model at ``x0`` followed by one finite step to ``x_end``."""
    f = _Counted(p.rhs)
    model = build_taylor(f, p.x0, p.y0, k, FORWARD, ctx)
    x0, x1 = ctx.scalar(p.x0), ctx.scalar(p.x_end)
    y1 = model.at_offset(ctx.sub(x1, x0))
    points = [(x0, ctx.scalar(p.y0)), (x1, y1)]
    return SolveResult(f"oneshot-{k}", points, [model], None, f.calls,
                       _errors(p, [x0, x1], [y for _, y in points]))


def solve_method_1_0(p: IvpProblem, cfg: SolverConfig) -> SolveResult:
    """Order-``cfg.k`` Taylor model at every grid point, stepped with ``h``."""
    ctx = cfg.ctx
    f = _Counted(p.rhs)
    xs = _grid(p, cfg.h, ctx)
    ys = [ctx.scalar(p.y0)]
    models = []
    for x in xs[:-1]:
        model = build_taylor(f, x, ys[-1], cfg.k, FORWARD, ctx)
        models.append(model)
        ys.append(model.at_offset(cfg.h))
    return SolveResult("method10", list(zip(xs, ys)), models, None, f.calls, _errors(p, xs, ys))


def backward_correction(model_fwd: TaylorModel, model_bwd: TaylorModel, tau=Fraction(1, 2)) -> TaylorModel:
    """Blend a forward model with one taken back from the end of the step.

    ``model_bwd`` is centered at the end of the step; it is re-expressed
    around ``model_fwd.center`` (the function ``ybar``) by reading its
    derivatives off at the negative offset.  The result, centered at
    ``model_fwd.center``, is::

        r(x) = y(0) + tau (y(0) - ybar(0))
               + [tau y'(0) + (1-tau) ybar'(0)] x
               + [tau y''(0) + (1-tau) ybar''(0)] x^2 / 2
    """
    ctx = model_fwd.ctx
    if model_fwd.order < 2 or model_bwd.order < 2:
        raise ValueError("backward correction needs models of order 2")
    tau = ctx.scalar(tau)
    rest = ctx.sub(ctx.one, tau)
    h = ctx.sub(model_bwd.center, model_fwd.center)
    ybar = readoff_at_finite(model_bwd, ctx.neg(h), 2)
    y = model_fwd.derivs
    r0 = ctx.add(y[0], ctx.mul(tau, ctx.sub(y[0], ybar[0])))
    r1 = ctx.add(ctx.mul(tau, y[1]), ctx.mul(rest, ybar[1]))
    r2 = ctx.add(ctx.mul(tau, y[2]), ctx.mul(rest, ybar[2]))
    return TaylorModel(model_fwd.center, [r0, r1, r2], ctx)


def solve_method_1_1(p: IvpProblem, cfg: SolverConfig) -> SolveResult:
    """Method 1.0 plus a backward-corrected global correction ``c_n``.

    At every new grid point a second order-2 model is built with backward
    infinitesimal steps, so ``f`` is never evaluated beyond ``x_end``.  Then
    ``c_n = c_{n-1} + r_n(x_n) - y_n`` and the estimate is ``y_n + c_n``.

    With ``cfg.feedback`` the corrected value ``r_n(x_n)`` replaces ``y_n``
    before the next step; ``c_n`` then holds the per-step correction only.
    """
    ctx = cfg.ctx
    if cfg.k != 2:
        raise ValueError("method 1.1 is defined for k = 2")
    f = _Counted(p.rhs)
    xs = _grid(p, cfg.h, ctx)
    ys = [ctx.scalar(p.y0)]
    c = ctx.zero
    corrections = [(c, ys[0])]
    models = []
    for x_next in xs[1:]:
        fwd = build_taylor(f, xs[len(ys) - 1], ys[-1], 2, FORWARD, ctx)
        models.append(fwd)
        y = fwd.at_offset(cfg.h)
        bwd = build_taylor(f, x_next, y, 2, BACKWARD, ctx)
        r = backward_correction(fwd, bwd, cfg.tau)
        local = ctx.sub(r.at_offset(cfg.h), y)
        if cfg.feedback:
            y = ctx.add(y, local)
            corrections.append((local, y))
        else:
            c = ctx.add(c, local)
            corrections.append((c, ctx.add(y, c)))
        ys.append(y)
    return SolveResult("method11", list(zip(xs, ys)), models, corrections, f.calls,
                       _errors(p, xs, [yc for _, yc in corrections]))


def _finite_rhs(f, ctx: Context):
    def g(x, y):
        return f(GrossNumber.scalar(x, ctx), GrossNumber.scalar(y, ctx)).finite_part
    return g


def solve_heun(p: IvpProblem, h, ctx: Context = RATIONAL) -> SolveResult:
    """Heun's method (explicit trapezoid), two evaluations per step."""
    counted = _Counted(p.rhs)
    f = _finite_rhs(counted, ctx)
    h = ctx.scalar(h)
    half = ctx.div(h, ctx.scalar(2))
    xs = _grid(p, h, ctx)
    ys = [ctx.scalar(p.y0)]
    for x, x_next in zip(xs, xs[1:]):
        y = ys[-1]
        k1 = f(x, y)
        k2 = f(x_next, ctx.add(y, ctx.mul(h, k1)))
        ys.append(ctx.add(y, ctx.mul(half, ctx.add(k1, k2))))
    return SolveResult("heun", list(zip(xs, ys)), [], None, counted.calls, _errors(p, xs, ys))


def solve_rk4(p: IvpProblem, h, ctx: Context = RATIONAL) -> SolveResult:
    """Classical fourth order Runge-Kutta, four evaluations per step."""
    counted = _Counted(p.rhs)
    f = _finite_rhs(counted, ctx)
    h = ctx.scalar(h)
    half = ctx.div(h, ctx.scalar(2))
    sixth = ctx.div(h, ctx.scalar(6))
    two = ctx.scalar(2)
    xs = _grid(p, h, ctx)
    ys = [ctx.scalar(p.y0)]
    for x in xs[:-1]:
        y = ys[-1]
        xm = ctx.add(x, half)
        k1 = f(x, y)
        k2 = f(xm, ctx.add(y, ctx.mul(half, k1)))
        k3 = f(xm, ctx.add(y, ctx.mul(half, k2)))
        k4 = f(ctx.add(x, h), ctx.add(y, ctx.mul(h, k3)))
        acc = ctx.add(ctx.add(k1, ctx.mul(two, k2)), ctx.add(ctx.mul(two, k3), k4))
        ys.append(ctx.add(y, ctx.mul(sixth, acc)))
    return SolveResult("rk4", list(zip(xs, ys)), [], None, counted.calls, _errors(p, xs, ys))

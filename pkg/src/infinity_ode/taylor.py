"""Derivatives of an ODE solution from Euler steps of length grossone^-1.

Running ``k`` Euler steps with the infinitesimal step ``#^-1`` and forming
the ``j``-th forward (or backward) difference of the visited values puts the
exact ``j``-th derivative of the solution in the grossdigit of ``#^-j``;
everything of lower order lands strictly below that power.  When ``f`` is
evaluated with errors, the error made for order ``j`` shows up one
difference later, at power ``-j`` of the ``(j+1)``-th difference, with an
alternating sign in later differences, and can be added back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Optional

from .grossnum import RATIONAL, Context, GrossError, GrossNumber, grossone

__all__ = [
    "StepTrace",
    "TaylorModel",
    "ErrorLedger",
    "euler_infinitesimal",
    "difference",
    "extract_derivative",
    "build_taylor",
    "recover_with_errors",
    "readoff_at_finite",
    "refine_readoff",
    "RhsEvaluationError",
    "InsufficientNodes",
    "ContaminatedDifference",
    "InconsistentLedger",
]

Rhs = Callable[[GrossNumber, GrossNumber], GrossNumber]

FORWARD = "forward"
BACKWARD = "backward"


class RhsEvaluationError(GrossError):
    def __init__(self, index: int, cause: Exception):
        super().__init__(f"right-hand side failed at node {index}: {cause}")
        self.index = index
        self.cause = cause


class InsufficientNodes(GrossError, ValueError):
    pass


class ContaminatedDifference(GrossError):
    """A difference carries terms above the power its derivative sits at."""


class InconsistentLedger(GrossError):
    pass


def _as_gross(v, ctx: Context) -> GrossNumber:
    if isinstance(v, GrossNumber):
        return v if v.ctx == ctx else v.with_context(ctx)
    return GrossNumber.scalar(v, ctx)


@dataclass
class StepTrace:
    """Nodes ``(x_i, y_i)`` visited by the infinitesimal Euler iteration.

    ``slopes[i]`` is the value of ``f`` returned at node ``i``.
    """

    direction: str
    nodes: list[tuple[GrossNumber, GrossNumber]]
    slopes: list[GrossNumber] = field(default_factory=list)

    @property
    def ys(self) -> list[GrossNumber]:
        return [y for _, y in self.nodes]

    def render(self) -> str:
        return "\n".join(f"{i}: x = {x} ; y = {y}" for i, (x, y) in enumerate(self.nodes))


def euler_infinitesimal(f: Rhs, x0, y0, k: int, direction: str = FORWARD,
                        ctx: Context = RATIONAL) -> StepTrace:
    """Run ``k`` Euler steps of length ``#^-1`` forward or backward from ``(x0, y0)``."""
    if k < 1:
        raise ValueError("need at least one step")
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"direction must be {FORWARD!r} or {BACKWARD!r}")
    step = grossone(-1, ctx, 1 if direction == FORWARD else -1)
    x, y = _as_gross(x0, ctx), _as_gross(y0, ctx)
    trace = StepTrace(direction, [(x, y)])
    for i in range(k):
        try:
            slope = f(x, y)
        except Exception as exc:
            raise RhsEvaluationError(i, exc) from exc
        if not isinstance(slope, GrossNumber):
            slope = _as_gross(slope, ctx)
        trace.slopes.append(slope)
        x, y = x + step, y + step * slope
        trace.nodes.append((x, y))
    return trace


def difference(trace: StepTrace, k: int) -> GrossNumber:
    """``k``-th forward difference (or backward, following ``trace.direction``)."""
    if k < 0:
        raise ValueError("order must be nonnegative")
    if len(trace.nodes) < k + 1:
        raise InsufficientNodes(f"order {k} needs {k + 1} nodes, trace has {len(trace.nodes)}")
    ys = trace.ys
    ctx = ys[0].ctx
    total = GrossNumber.scalar(0, ctx)
    for i in range(k + 1):
        c = comb(k, i) * (-1) ** i
        # forward: y_{k-i}; backward nodes are stored as y_0, y_-1, y_-2, ...
        node = ys[k - i] if trace.direction == FORWARD else ys[i]
        total = total + node * c
    return total


def _contamination(delta: GrossNumber, k: int) -> list:
    return [(p, c) for p, c in delta.terms if p > -k]


def extract_derivative(delta_k: GrossNumber, k: int, strict: bool = True):
    """Grossdigit of ``#^-k`` in a ``k``-th difference.

    With ``strict`` any term at a power above ``-k`` raises
    :class:`ContaminatedDifference`.
    """
    if strict:
        bad = _contamination(delta_k, k)
        if bad:
            shown = ", ".join(f"{c}*#^{p}" for p, c in bad[:3])
            raise ContaminatedDifference(f"difference of order {k} has terms above #^-{k}: {shown}")
    return delta_k.coefficient(-k)


@dataclass
class TaylorModel:
    """Truncated Taylor polynomial ``sum derivs[j]/j! (x - center)^j``."""

    center: object
    derivs: list
    ctx: Context = RATIONAL
    trace: Optional[StepTrace] = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.derivs) - 1

    @property
    def coefficients(self) -> list:
        ctx = self.ctx
        return [ctx.div(d, ctx.scalar(factorial(j))) for j, d in enumerate(self.derivs)]

    def at_offset(self, t):
        """Value at ``center + t``; ``t`` may be a scalar or a GrossNumber."""
        coefs = self.coefficients
        if isinstance(t, GrossNumber):
            r = GrossNumber.scalar(coefs[-1], self.ctx)
            for a in reversed(coefs[:-1]):
                r = r * t + a
            return r
        ctx = self.ctx
        t = ctx.scalar(t)
        r = coefs[-1]
        for a in reversed(coefs[:-1]):
            r = ctx.add(ctx.mul(r, t), a)
        return r

    def __call__(self, x):
        if isinstance(x, GrossNumber):
            return self.at_offset(x - self.center)
        return self.at_offset(self.ctx.sub(self.ctx.scalar(x), self.center))

    def polynomial_str(self, var: str = "x") -> str:
        parts = []
        for j, a in enumerate(self.coefficients):
            if not a:
                continue
            mono = "" if j == 0 else (var if j == 1 else f"{var}^{j}")
            body = f"{abs(a)}" + (f"*{mono}" if mono else "")
            parts.append(("-" if a < 0 else "+", body))
        if not parts:
            return "0"
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        return out + "".join(f" {s} {b}" for s, b in parts[1:])


def build_taylor(f: Rhs, x0, y0, k: int, direction: str = FORWARD,
                 ctx: Context = RATIONAL) -> TaylorModel:
    """Order-``k`` Taylor model at ``x0`` from ``k`` infinitesimal Euler steps.

    Exact in the rational backend; there, a difference with terms above
    its derivative's power means the hypotheses on ``f`` fail and
    :class:`ContaminatedDifference` is raised.
    """
    trace = euler_infinitesimal(f, x0, y0, k, direction, ctx)
    x0s = trace.nodes[0][0].finite_part
    slope0 = trace.slopes[0]
    if ctx.exact and any(p != 0 for p, _ in slope0.terms):
        raise ContaminatedDifference(f"f(x0, y0) = {slope0} is not purely finite")
    derivs = [trace.nodes[0][1].finite_part, slope0.finite_part]
    for j in range(2, k + 1):
        derivs.append(extract_derivative(difference(trace, j), j, strict=ctx.exact))
    return TaylorModel(x0s, derivs, ctx, trace)


@dataclass
class ErrorLedger:
    """Evaluation errors recovered per derivative order.

    ``eps[j-1]`` is the error of order ``j`` and ``approx[j-1]`` the
    uncorrected value read from the ``j``-th difference.
    """

    eps: list
    approx: list
    first_nonzero: Optional[int]

    def __len__(self):
        return len(self.eps)


def _is_zero(value, reference, ctx: Context) -> bool:
    if ctx.exact or not value:
        return not value
    return abs(value) < abs(reference) * ctx.scalar(10) ** (1 - ctx.digits)


def recover_with_errors(f: Rhs, x0, y0, k: int, ctx: Context = RATIONAL) -> tuple[TaylorModel, ErrorLedger]:
    """Order-``k`` model whose first ``k-1`` derivatives are corrected for evaluation errors.

    The top derivative ``derivs[k]`` stays uncorrected: its error would
    only appear in a difference of order ``k+1``.
    """
    if k < 2:
        raise ValueError("error recovery needs k >= 2")
    trace = euler_infinitesimal(f, x0, y0, k, FORWARD, ctx)
    deltas = [None] + [difference(trace, j) for j in range(1, k + 1)]
    for j in range(1, k + 1):
        above = [(p, c) for p, c in deltas[j].terms if p > -1]
        if above and (ctx.exact or any(p > 0 for p, _ in above)):
            raise ContaminatedDifference(f"difference of order {j} has non-infinitesimal terms")
    approx = [deltas[j].coefficient(-j) for j in range(1, k + 1)]
    eps = [deltas[j + 1].coefficient(-j) for j in range(1, k)]
    _check_ledger(trace, deltas, eps, k, ctx)

    first = None
    for j, e in enumerate(eps, start=1):
        if not _is_zero(e, approx[j - 1], ctx):
            first = j
            break
    derivs = [trace.nodes[0][1].finite_part]
    derivs += [ctx.add(a, e) for a, e in zip(approx, eps)]
    derivs.append(approx[-1])
    model = TaylorModel(trace.nodes[0][0].finite_part, derivs, ctx, trace)
    return model, ErrorLedger(eps, approx, first)


def _check_ledger(trace: StepTrace, deltas, eps, k: int, ctx: Context) -> None:
    # eps_j appears again in every later difference m with sign (-1)^(m-j-1)
    # rounding noise follows the largest magnitude the iteration handled,
    # which can exceed the coefficient at -j after cancellation inside f
    tol = 0
    if not ctx.exact:
        mags = [abs(c) for g in trace.ys + trace.slopes for _, c in g.terms]
        tol = max(mags + [abs(e) for e in eps]) * ctx.scalar(10) ** (2 - ctx.digits)
    for j, e in enumerate(eps, start=1):
        for m in range(j + 2, k + 1):
            seen = deltas[m].coefficient(-j)
            expected = e if (m - j - 1) % 2 == 0 else -e
            allowed = tol * 2 ** m if tol else 0
            if abs(seen - expected) > allowed:
                raise InconsistentLedger(
                    f"error of order {j}: {e} from difference {j + 1} but {seen} in difference {m}"
                )


def readoff_at_finite(model: TaylorModel, h, K: int) -> list:
    """``[s(h), s'(h), ..., s^(K)(h)]`` for the model polynomial ``s``.

    ``h`` is an offset from the model center.  The polynomial is evaluated
    once at ``h + #^-1`` and the j-th value is ``j!`` times the grossdigit
    of ``#^-j``.
    """
    if model.order < K:
        raise ValueError(f"model of order {model.order} cannot give {K} derivatives")
    ctx = model.ctx
    point = GrossNumber.scalar(h, ctx) + grossone(-1, ctx)
    value = model.at_offset(point)
    return [ctx.mul(ctx.scalar(factorial(j)), value.coefficient(-j)) for j in range(K + 1)]


def refine_readoff(previous: GrossNumber, new_deriv, order: int, h) -> GrossNumber:
    """Add the order-``order`` Taylor term, evaluated at ``h + #^-1``, to ``previous``."""
    ctx = previous.ctx
    point = GrossNumber.scalar(h, ctx) + grossone(-1, ctx)
    coef = ctx.div(ctx.scalar(new_deriv), ctx.scalar(factorial(order)))
    return previous + point ** order * coef

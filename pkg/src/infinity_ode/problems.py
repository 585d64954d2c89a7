"""Built-in initial value problems.

``ex3``
    ``y' = x - y``, ``y(0) = 1`` on ``[0, 1]``, solution ``x - 1 + 2 exp(-x)``.
``ex5``
    ``y' = -(x - c)/s^2 (y - 1)`` with ``c = 3``, ``s = 0.5``, solution
    ``u(x) = 1 + exp(-((x - c)/s)^2 / 2)`` and ``y(0) = u(0)``.
``ex5-expanded``
    Same problem behind a different black box, see :class:`ExpandedGaussianRhs`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .grossnum import RATIONAL, Context, GrossNumber, grossone
from .rhs import Expression

__all__ = ["ProblemDef", "PROBLEMS", "get_problem", "ExpandedGaussianRhs", "exact_initial_value"]

# digits used for y(0) = u(0) when the backend itself is exact
EXACT_Y0_DIGITS = 30


@dataclass(frozen=True)
class ProblemDef:
    name: str
    rhs: str
    exact: Optional[str]
    x0: Fraction
    x_end: Fraction
    y0: Optional[Fraction] = None
    description: str = ""
    procedure: Optional[Callable[[], Callable]] = None


class ExpandedGaussianRhs:
    """``y' = g(x) (y - 1)``, ``g(x) = -(x - c)/s^2``, evaluated as ``g*y - g``.

    At the initial abscissa the slope is ``g(x0)*y - g(x0)``.  At every later
    node the coefficient is taken one infinitesimal step ahead,
    ``g(x + #^-1)*y - g(x + #^-1)``.  In exact arithmetic this only perturbs
    the infinitesimal parts, which the error ledger then picks up; in decimal
    arithmetic the expanded form also makes the finite part of every slope
    round the same way, so the recovered first-order error is exactly zero.
    """

    def __init__(self, c=3, s=Fraction(1, 2), x0=0):
        self.c = Fraction(c)
        self.s2 = Fraction(s) ** 2
        self.x0 = Fraction(x0)

    def __call__(self, x: GrossNumber, y: GrossNumber) -> GrossNumber:
        ctx = x.ctx
        if x != self.x0:
            x = x + grossone(-1, ctx)
        g = -(x - self.c) / self.s2
        return g * y - g


PROBLEMS: dict[str, ProblemDef] = {
    "ex3": ProblemDef(
        "ex3", "x - y", "x - 1 + 2*exp(-x)", Fraction(0), Fraction(1), Fraction(1),
        "y' = x - y, y(0) = 1",
    ),
    "ex5": ProblemDef(
        "ex5", "-(x-3)/(0.5^2)*(y-1)", "1 + exp(-((x-3)/0.5)^2/2)", Fraction(0), Fraction(1), None,
        "Gaussian bump, c = 3, s = 0.5, y(0) = u(0)",
    ),
    "ex5-expanded": ProblemDef(
        "ex5-expanded", "-(x-3)/(0.5^2)*(y-1)", "1 + exp(-((x-3)/0.5)^2/2)", Fraction(0), Fraction(1), None,
        "ex5 evaluated as g*y - g with the abscissa advanced after the first node",
        ExpandedGaussianRhs,
    ),
}


def exact_initial_value(exact: str, x0, ctx: Context):
    """``u(x0)`` rounded to the backend's digits.

    In the exact backend ``u(x0)`` is generally irrational, so it is rounded
    to ``EXACT_Y0_DIGITS`` digits first and then kept as an exact rational.
    That makes rational and decimal runs start from the same value when the
    decimal backend has that many digits.
    """
    work = ctx if not ctx.exact else Context("decimal", EXACT_Y0_DIGITS)
    u = Expression(exact, ("x",))
    value = u(GrossNumber.scalar(x0, work)).finite_part
    return ctx.scalar(value)


def get_problem(name: str, ctx: Context = RATIONAL):
    """Instantiate a registered problem for the given context."""
    from .methods import IvpProblem

    try:
        d = PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}") from None
    rhs = d.procedure() if d.procedure else Expression(d.rhs)
    exact = Expression(d.exact, ("x",)) if d.exact else None
    y0 = ctx.scalar(d.y0) if d.y0 is not None else exact_initial_value(d.exact, d.x0, ctx)
    return IvpProblem(rhs, ctx.scalar(d.x0), y0, ctx.scalar(d.x_end), exact, name)

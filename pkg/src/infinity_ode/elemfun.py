"""Elementary functions of numbers without an infinite part.

For ``x = F + I`` with ``F`` purely finite and ``I`` infinitesimal,
``f(x)`` is expanded as ``sum_j f^(j)(F)/j! * I^j`` keeping powers down to
``-K`` where ``K`` is the context's ``lift_order``.

In the rational backend the finite values ``exp(F)``, ``sin(F)``, ... are
only available where they are rational (``exp(0)``, ``ln(1)``, ...); any
other argument raises :class:`NotRepresentable`.
"""

from __future__ import annotations

import decimal
from fractions import Fraction
from typing import Callable

import mpmath

from .grossnum import Context, GrossError, GrossNumber, parts

__all__ = ["lift", "FUNCTIONS", "DomainError", "NotRepresentable", "InfinitePartUnsupported"]


class DomainError(GrossError, ValueError):
    pass


class NotRepresentable(DomainError):
    """The finite value of the function is irrational but the backend is exact."""


class InfinitePartUnsupported(GrossError, ValueError):
    pass


def _mp_to_decimal(value, ctx: Context) -> decimal.Decimal:
    return ctx.decimal_context.create_decimal(mpmath.nstr(value, ctx.digits + 5, strip_zeros=False))


def _exp_derivs(F, ctx: Context, K: int) -> list:
    if ctx.exact:
        if F != 0:
            raise NotRepresentable(f"exp({F}) is irrational")
        v = ctx.one
    else:
        v = ctx.decimal_context.exp(F)
    return [v] * (K + 1)


def _ln_derivs(F, ctx: Context, K: int) -> list:
    if F <= 0:
        raise DomainError(f"ln of nonpositive finite part {F}")
    if ctx.exact:
        if F != 1:
            raise NotRepresentable(f"ln({F}) is irrational")
        v = ctx.zero
    else:
        v = ctx.decimal_context.ln(F)
    out = [v]
    # d^j/dF^j ln F = (-1)^(j-1) (j-1)! / F^j
    fact = 1
    for j in range(1, K + 1):
        if j > 1:
            fact *= j - 1
        num = ctx.scalar(fact if j % 2 else -fact)
        out.append(ctx.div(num, _spow(F, j, ctx)))
    return out


def _spow(F, j: int, ctx: Context):
    r = ctx.one
    for _ in range(j):
        r = ctx.mul(r, F)
    return r


def _trig(F, ctx: Context, K: int, shift: int) -> list:
    if ctx.exact:
        if F != 0:
            raise NotRepresentable(f"trigonometric value at {F} is irrational")
        s, c = ctx.zero, ctx.one
    else:
        with mpmath.workdps(ctx.digits + 10):
            arg = mpmath.mpf(str(F))
            s, c = _mp_to_decimal(mpmath.sin(arg), ctx), _mp_to_decimal(mpmath.cos(arg), ctx)
    # sin, cos, -sin, -cos, ...
    cycle = [s, c, ctx.neg(s), ctx.neg(c)]
    return [cycle[(j + shift) % 4] for j in range(K + 1)]


DERIVATIVES: dict[str, Callable] = {
    "exp": _exp_derivs,
    "ln": _ln_derivs,
    "sin": lambda F, ctx, K: _trig(F, ctx, K, 0),
    "cos": lambda F, ctx, K: _trig(F, ctx, K, 1),
}

FUNCTIONS = tuple(DERIVATIVES) + ("powi",)


def lift(name: str, x: GrossNumber, order: int | None = None, n: int | None = None) -> GrossNumber:
    """Evaluate the elementary function ``name`` at ``x``.

    ``powi`` needs the integer exponent ``n`` and is computed by repeated
    multiplication, so it also accepts infinite arguments.
    """
    ctx = x.ctx
    K = ctx.lift_order if order is None else order
    if name == "powi":
        if n is None:
            raise TypeError("powi needs an integer exponent")
        return x ** n
    try:
        derivs_of = DERIVATIVES[name]
    except KeyError:
        raise DomainError(f"unknown elementary function {name!r}") from None
    infinite, F, small = parts(x)
    if infinite:
        raise InfinitePartUnsupported(f"{name} of a number with infinite part {infinite}")
    derivs = derivs_of(F, ctx, K)
    floor = Fraction(-K)
    result = GrossNumber.scalar(derivs[0], ctx)
    if not small:
        return result
    power = GrossNumber.scalar(1, ctx)
    fact = 1
    for j in range(1, K + 1):
        power = (power * small).truncate(floor)
        if not power:
            break
        fact *= j
        coef = ctx.div(derivs[j], ctx.scalar(fact))
        result = result + power * coef
    return result

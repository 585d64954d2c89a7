"""Numerals written in the positional system with infinite radix grossone.

A :class:`GrossNumber` is a finite sum ``c_m*#^p_m + ... + c_0 + c_-1*#^-1 + ...``
where ``#`` stands for grossone, the grosspowers ``p_i`` are exact rationals
and the grossdigits ``c_i`` are purely finite scalars.  Scalars live in one
of two backends selected by a :class:`Context`:

* ``rational``: :class:`fractions.Fraction`, every operation is exact;
* ``decimal``: :class:`decimal.Decimal` rounded half-even to ``digits``
  significant digits after every elementary operation.

The context is carried explicitly by every number; there is no global state.
"""

from __future__ import annotations

import decimal
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Iterator, Union

__all__ = [
    "Context",
    "GrossNumber",
    "GrossError",
    "CapExceeded",
    "DivisionByZero",
    "RATIONAL",
    "normalize",
    "divide",
    "compare",
    "coefficient_at",
    "parts",
    "is_purely_finite",
    "grossone",
    "render",
    "parse",
]

Scalar = Union[Fraction, decimal.Decimal]
Power = Fraction


class GrossError(ArithmeticError):
    """Base class for numeral kernel errors."""


class CapExceeded(GrossError):
    pass


class DivisionByZero(GrossError, ZeroDivisionError):
    pass


@dataclass(frozen=True)
class Context:
    """Arithmetic settings shared by a family of numbers.

    ``lift_order`` is the number of infinitesimal orders kept when an
    elementary function is expanded, ``power_floor`` the lowest grosspower
    produced by a non-terminating division.
    """

    backend: str = "rational"
    digits: int = 30
    lift_order: int = 8
    power_floor: Fraction = Fraction(-32)
    max_terms: int = 10_000
    _dctx: decimal.Context = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.backend not in ("rational", "decimal"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "decimal" and self.digits < 2:
            raise ValueError("decimal backend needs at least 2 digits")
        if self.lift_order < 0:
            raise ValueError("lift_order must be nonnegative")
        object.__setattr__(self, "power_floor", Fraction(self.power_floor))
        object.__setattr__(
            self,
            "_dctx",
            decimal.Context(
                prec=self.digits,
                rounding=decimal.ROUND_HALF_EVEN,
                Emin=-999_999,
                Emax=999_999,
                traps=[decimal.InvalidOperation, decimal.DivisionByZero, decimal.Overflow],
            ),
        )

    @property
    def exact(self) -> bool:
        return self.backend == "rational"

    @property
    def decimal_context(self) -> decimal.Context:
        return self._dctx

    def replace(self, **changes) -> "Context":
        return replace(self, **changes)

    # -- scalar arithmetic -------------------------------------------------

    def scalar(self, value) -> Scalar:
        """Convert ``value`` to a scalar of this backend.

        Floats go through their shortest repr, so ``0.2`` means ``1/5``.
        """
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, float):
            value = Fraction(repr(value))
        elif isinstance(value, str):
            value = Fraction(value) if self.exact or "/" in value else decimal.Decimal(value)
        if self.exact:
            if isinstance(value, decimal.Decimal):
                return Fraction(value)
            return Fraction(value)
        if isinstance(value, decimal.Decimal):
            return self._dctx.plus(value)
        if isinstance(value, int):
            return self._dctx.plus(decimal.Decimal(value))
        if isinstance(value, Rational):
            return self._dctx.divide(decimal.Decimal(value.numerator), decimal.Decimal(value.denominator))
        raise TypeError(f"cannot make a scalar from {type(value).__name__}")

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return a + b if self.exact else self._dctx.add(a, b)

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return a - b if self.exact else self._dctx.subtract(a, b)

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return a * b if self.exact else self._dctx.multiply(a, b)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        if not b:
            raise DivisionByZero("division by a zero scalar")
        return a / b if self.exact else self._dctx.divide(a, b)

    def neg(self, a: Scalar) -> Scalar:
        return -a if self.exact else self._dctx.minus(a)

    @cached_property
    def zero(self) -> Scalar:
        return self.scalar(0)

    @cached_property
    def one(self) -> Scalar:
        return self.scalar(1)


RATIONAL = Context()


def _as_power(p) -> Power:
    if isinstance(p, float):
        return Fraction(repr(p))
    return Fraction(p)


def normalize(raw_terms: Iterable[tuple], ctx: Context = RATIONAL) -> "GrossNumber":
    """Canonicalize ``(digit, power)`` pairs into a :class:`GrossNumber`.

    Equal powers are merged, zero digits dropped and the rest sorted by
    decreasing power.
    """
    acc: dict[Power, Scalar] = {}
    for digit, power in raw_terms:
        power = _as_power(power)
        digit = ctx.scalar(digit)
        if power in acc:
            acc[power] = ctx.add(acc[power], digit)
        else:
            acc[power] = digit
    return GrossNumber._from_dict(acc, ctx)


class GrossNumber:
    """Immutable numeral; ``terms`` is a tuple of ``(power, digit)`` pairs."""

    __slots__ = ("terms", "ctx", "_hash")

    def __init__(self, terms: Iterable[tuple] = (), ctx: Context = RATIONAL):
        """Build from ``(digit, power)`` pairs, normalizing them."""
        other = normalize(terms, ctx)
        object.__setattr__(self, "terms", other.terms)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, terms: tuple, ctx: Context) -> "GrossNumber":
        if len(terms) > ctx.max_terms:
            raise CapExceeded(f"{len(terms)} terms exceed the cap of {ctx.max_terms}")
        obj = object.__new__(cls)
        object.__setattr__(obj, "terms", terms)
        object.__setattr__(obj, "ctx", ctx)
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def _from_dict(cls, acc: dict, ctx: Context) -> "GrossNumber":
        return cls._raw(tuple(sorted(((p, c) for p, c in acc.items() if c), reverse=True,
                                     key=lambda t: t[0])), ctx)

    @classmethod
    def scalar(cls, value, ctx: Context = RATIONAL) -> "GrossNumber":
        c = ctx.scalar(value)
        return cls._raw(((Fraction(0), c),) if c else (), ctx)

    def __setattr__(self, name, value):
        raise AttributeError("GrossNumber is immutable")

    # -- inspection --------------------------------------------------------

    def __iter__(self) -> Iterator[tuple[Power, Scalar]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def lead(self) -> tuple[Power, Scalar]:
        if not self.terms:
            raise ValueError("zero has no leading term")
        return self.terms[0]

    @property
    def powers(self) -> tuple[Power, ...]:
        return tuple(p for p, _ in self.terms)

    def coefficient(self, power) -> Scalar:
        power = _as_power(power)
        for p, c in self.terms:
            if p == power:
                return c
            if p < power:
                break
        return self.ctx.zero

    @property
    def finite_part(self) -> Scalar:
        return self.coefficient(0)

    def truncate(self, floor) -> "GrossNumber":
        """Drop every term whose power is below ``floor``."""
        floor = _as_power(floor)
        return GrossNumber._raw(tuple(t for t in self.terms if t[0] >= floor), self.ctx)

    def with_context(self, ctx: Context) -> "GrossNumber":
        return normalize(((c, p) for p, c in self.terms), ctx)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "GrossNumber":
        if isinstance(other, GrossNumber):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ValueError("operands live in different contexts")
            return other
        if isinstance(other, (int, Fraction, decimal.Decimal, float)):
            return GrossNumber.scalar(other, self.ctx)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        acc = dict(self.terms)
        for p, c in other.terms:
            acc[p] = ctx.add(acc[p], c) if p in acc else c
        return GrossNumber._from_dict(acc, ctx)

    __radd__ = __add__

    def __neg__(self):
        return GrossNumber._raw(tuple((p, self.ctx.neg(c)) for p, c in self.terms), self.ctx)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        acc: dict[Power, Scalar] = {}
        for p, c in self.terms:
            for q, d in other.terms:
                s = p + q
                prod = ctx.mul(c, d)
                acc[s] = ctx.add(acc[s], prod) if s in acc else prod
        return GrossNumber._from_dict(acc, ctx)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return divide(self, other, self.ctx.power_floor)[0]

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return divide(other, self, self.ctx.power_floor)[0]

    def __pow__(self, n):
        if not isinstance(n, int) or isinstance(n, bool):
            raise TypeError("only integer exponents are supported")
        if n < 0:
            return divide(GrossNumber.scalar(1, self.ctx), self ** (-n), self.ctx.power_floor)[0]
        result = GrossNumber.scalar(1, self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- ordering ----------------------------------------------------------

    def _cmp(self, other) -> int:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other)

    def __eq__(self, other):
        if isinstance(other, GrossNumber):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, decimal.Decimal)):
            if not other:
                return not self.terms
            return len(self.terms) == 1 and self.terms[0][0] == 0 and self.terms[0][1] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.terms))
        return self._hash

    def __lt__(self, other):
        r = self._cmp(other)
        return r if r is NotImplemented else r < 0

    def __le__(self, other):
        r = self._cmp(other)
        return r if r is NotImplemented else r <= 0

    def __gt__(self, other):
        r = self._cmp(other)
        return r if r is NotImplemented else r > 0

    def __ge__(self, other):
        r = self._cmp(other)
        return r if r is NotImplemented else r >= 0

    def __repr__(self):
        return f"GrossNumber({render(self)!r})"

    def __str__(self):
        return render(self)


def grossone(power=1, ctx: Context = RATIONAL, digit=1) -> GrossNumber:
    """The monomial ``digit * #^power``."""
    return normalize([(digit, power)], ctx)


def divide(a: GrossNumber, b: GrossNumber, power_floor=None) -> tuple[GrossNumber, bool]:
    """Long division by the leading term of ``b``.

    Returns ``(quotient, truncated)``.  The quotient is exact when the
    remainder vanishes (always the case for a single-term divisor);
    otherwise emission stops before the first quotient power below
    ``power_floor`` and ``truncated`` is True.
    """
    ctx = a.ctx
    if not b:
        raise DivisionByZero("division by zero")
    floor = ctx.power_floor if power_floor is None else _as_power(power_floor)
    bp, bc = b.lead
    if len(b) == 1:
        return GrossNumber._raw(tuple((p - bp, ctx.div(c, bc)) for p, c in a.terms), ctx), False
    rest = GrossNumber._raw(b.terms[1:], ctx)
    quotient: list[tuple[Power, Scalar]] = []
    r = a
    while r:
        rp, rc = r.lead
        qp = rp - bp
        if qp < floor:
            return GrossNumber._raw(tuple(quotient), ctx), True
        qc = ctx.div(rc, bc)
        quotient.append((qp, qc))
        if len(quotient) > ctx.max_terms:
            raise CapExceeded("quotient exceeds the term cap")
        # the leading term cancels by construction; drop it rather than
        # trusting a rounded subtraction to produce an exact zero
        tail = GrossNumber._raw(r.terms[1:], ctx)
        r = tail - rest * GrossNumber._raw(((qp, qc),), ctx)
    return GrossNumber._raw(tuple(quotient), ctx), False


def compare(a: GrossNumber, b: GrossNumber) -> int:
    """-1, 0 or 1 according to the sign of ``a - b``."""
    d = a - b
    if not d:
        return 0
    return 1 if d.lead[1] > 0 else -1


def coefficient_at(x: GrossNumber, p) -> Scalar:
    return x.coefficient(p)


def parts(x: GrossNumber) -> tuple[GrossNumber, Scalar, GrossNumber]:
    """Split into (infinite part, finite grossdigit, infinitesimal part)."""
    inf = tuple(t for t in x.terms if t[0] > 0)
    small = tuple(t for t in x.terms if t[0] < 0)
    return GrossNumber._raw(inf, x.ctx), x.finite_part, GrossNumber._raw(small, x.ctx)


def is_purely_finite(x: GrossNumber) -> bool:
    return all(p == 0 for p, _ in x.terms)


# -- text format -------------------------------------------------------------


def render(x: GrossNumber) -> str:
    """Canonical text, e.g. ``89089/1000*#^296/5 + 33642/1000*#^3 - 81/10*#^-41/10``."""
    if not x.terms:
        return "0"
    out = []
    for i, (p, c) in enumerate(x.terms):
        neg = c < 0
        body = str(-c if neg else c)
        if p != 0:
            body += f"*#^{p}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


_TERM = re.compile(
    r"""^(?P<digit>\d+(?:/\d+)?|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?
         (?:\*?\#(?:\^(?P<power>-?\d+(?:/\d+)?|-?\d*\.\d+))?)?$""",
    re.VERBOSE,
)


def parse(text: str, ctx: Context = RATIONAL) -> GrossNumber:
    """Inverse of :func:`render`; also accepts ``#``, ``3#`` and decimal powers."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty numeral")
    raw = []
    sign = 1
    expect_term = True
    for tok in tokens:
        if expect_term:
            if tok in "+-":
                if tok == "-":
                    sign = -sign
                continue
            if tok.startswith("-"):
                sign, tok = -sign, tok[1:]
            elif tok.startswith("+"):
                tok = tok[1:]
            m = _TERM.match(tok)
            if not m or not tok:
                raise ValueError(f"bad term {tok!r} in {text!r}")
            digit_s = m.group("digit")
            has_unit = "#" in tok
            if digit_s is None and not has_unit:
                raise ValueError(f"bad term {tok!r} in {text!r}")
            digit = ctx.scalar(digit_s) if digit_s is not None else ctx.one
            if sign < 0:
                digit = ctx.neg(digit)
            if has_unit:
                power = _as_power(m.group("power")) if m.group("power") else Fraction(1)
            else:
                power = Fraction(0)
            raw.append((digit, power))
            sign = 1
            expect_term = False
        else:
            if tok not in ("+", "-"):
                raise ValueError(f"expected '+' or '-' before {tok!r} in {text!r}")
            sign = -1 if tok == "-" else 1
            expect_term = True
    if expect_term:
        raise ValueError(f"dangling operator in {text!r}")
    return normalize(raw, ctx)

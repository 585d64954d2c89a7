"""Command line entry point ``infinity-ode``.

Exit status is 0 on success, 1 on a numeric failure or a reproduction
mismatch, and 2 on invalid usage.
"""

from __future__ import annotations

import argparse
import csv
import decimal
import inspect
import sys
from fractions import Fraction
from math import factorial
from typing import Optional

from .elemfun import DomainError
from .grossnum import Context, GrossError, GrossNumber, grossone
from .harness import TARGETS, reproduce
from .methods import (
    ERROR_CONTEXT,
    IvpProblem,
    SolverConfig,
    solve_heun,
    solve_method_1_0,
    solve_method_1_1,
    solve_oneshot_taylor,
    solve_rk4,
)
from .problems import PROBLEMS, exact_initial_value, get_problem
from .rhs import Expression, ExprSyntaxError
from .taylor import FORWARD, build_taylor, recover_with_errors

METHODS = ("oneshot", "method10", "method11", "heun", "rk4")

# values used when neither a flag nor the config file sets a key
DEFAULTS = {
    "backend": "rational",
    "digits": 30,
    "order": 2,
    "tau": "1/2",
    "format": "md",
    "method": "method10",
}
CONFIG_KEYS = set(DEFAULTS) | {"h", "x_end", "problem"}

# significant digits shown for exact rationals
SHOW_DIGITS = 20


class UsageError(Exception):
    pass


def _scalar_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infinity-ode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--backend", choices=("rational", "decimal"), default=None)
        p.add_argument("--digits", type=int, default=None, help="significant digits of the decimal backend")
        p.add_argument("--format", choices=("md", "csv"), default=None)
        p.add_argument("--config", help="file of key=value lines providing defaults")

    def problem(p):
        p.add_argument("--problem", choices=sorted(PROBLEMS), default=None)
        p.add_argument("--rhs", help="right-hand side f(x, y)")
        p.add_argument("--exact", help="exact solution u(x)")
        p.add_argument("--x0", type=_scalar_arg)
        p.add_argument("--y0", type=_scalar_arg)

    solve = sub.add_parser("solve", help="solve an initial value problem")
    problem(solve)
    solve.add_argument("--method", choices=METHODS, default=None)
    solve.add_argument("--order", type=int, default=None, help="derivative order k")
    solve.add_argument("--h", type=_scalar_arg, default=None, help="finite step")
    solve.add_argument("--x-end", type=_scalar_arg, default=None)
    solve.add_argument("--tau", type=_scalar_arg, default=None, help="mixing weight of method11")
    solve.add_argument("--feedback", action="store_true", help="method11: step on from corrected values")
    common(solve)

    rep = sub.add_parser("reproduce", help="recompute a reference experiment")
    rep.add_argument("target", choices=sorted(TARGETS) + ["all"])
    common(rep)

    der = sub.add_parser("derivs", help="derivatives of the solution at x0")
    problem(der)
    der.add_argument("--order", type=int, default=None)
    der.add_argument("--recover", action="store_true", help="recover evaluation errors")
    common(der)
    return parser


def read_config(path: str) -> dict:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for no, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{no}: expected key=value with key in {', '.join(sorted(CONFIG_KEYS))}")
        out[key] = value.strip()
    return out


def _settle(args) -> None:
    """Fill unset options from the config file, then from DEFAULTS.

    Asking for a number of digits without naming a backend selects the
    decimal backend.
    """
    cfg = read_config(args.config) if args.config else {}
    if getattr(args, "rhs", None):
        cfg.pop("problem", None)
    digits_given = args.digits is not None or "digits" in cfg
    for key in CONFIG_KEYS:
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        if key in cfg:
            value = cfg[key]
            try:
                if key in ("digits", "order"):
                    value = int(value)
                elif key in ("h", "x_end", "tau"):
                    value = _scalar_arg(value)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config value for {key}: {exc}") from None
            setattr(args, key, value)
        elif key in DEFAULTS:
            setattr(args, key, DEFAULTS[key])
    if args.backend == "rational" and "backend" not in cfg and digits_given and not args.backend_given:
        args.backend = "decimal"
    args.digits_given = digits_given


def _context(args) -> Context:
    if args.backend == "decimal" and args.digits < 2:
        raise UsageError("--digits must be at least 2")
    order = getattr(args, "order", None) or 0
    return Context(args.backend, args.digits, lift_order=max(order + 1, 8))


def _problem(args, ctx: Context, need_end: bool) -> IvpProblem:
    if args.problem and args.rhs:
        raise UsageError("give either --problem or --rhs, not both")
    if not args.problem and not args.rhs:
        raise UsageError("a problem is required: --problem NAME or --rhs EXPR")
    if args.problem:
        p = get_problem(args.problem, ctx)
        if args.exact:
            p.exact_solution = Expression(args.exact, ("x",))
    else:
        try:
            rhs = Expression(args.rhs)
            exact = Expression(args.exact, ("x",)) if args.exact else None
        except ExprSyntaxError as exc:
            raise UsageError(f"bad expression: {exc}") from None
        x0 = args.x0 if args.x0 is not None else Fraction(0)
        if args.y0 is None and not args.exact:
            raise UsageError("--y0 is required when no --exact solution is given")
        y0 = ctx.scalar(args.y0) if args.y0 is not None else exact_initial_value(args.exact, x0, ctx)
        x_end = getattr(args, "x_end", None)
        if x_end is None:
            if need_end:
                raise UsageError("--x-end is required with --rhs")
            x_end = x0 + 1
        return IvpProblem(rhs, ctx.scalar(x0), y0, ctx.scalar(x_end), exact, "inline")
    if args.x0 is not None:
        p.x0 = ctx.scalar(args.x0)
    if args.y0 is not None:
        p.y0 = ctx.scalar(args.y0)
    if getattr(args, "x_end", None) is not None:
        p.x_end = ctx.scalar(args.x_end)
    if not p.x_end > p.x0:
        raise UsageError("x_end must be greater than x0")
    return p


def fmt(v) -> str:
    """Plain decimal text for a scalar; exact rationals get SHOW_DIGITS digits."""
    if v is None:
        return ""
    if v == 0:
        return "0"
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        with decimal.localcontext() as dc:
            dc.prec = SHOW_DIGITS
            v = decimal.Decimal(v.numerator) / decimal.Decimal(v.denominator)
    if isinstance(v, decimal.Decimal):
        if len(v.as_tuple().digits) > SHOW_DIGITS + 10:
            v = decimal.Context(prec=SHOW_DIGITS).plus(v)
        return str(v)
    return str(v)


def emit(header: list, rows: list, fmt_name: str, out) -> None:
    if fmt_name == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    out.write("| " + " | ".join(h.ljust(w) for h, w in zip(header, widths)) + " |\n")
    out.write("|" + "|".join("-" * (w + 2) for w in widths) + "|\n")
    for r in cells[1:]:
        out.write("| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |\n")


def cmd_solve(args, out, err) -> int:
    ctx = _context(args)
    p = _problem(args, ctx, need_end=True)
    method = args.method
    if method != "oneshot" and args.h is None:
        raise UsageError(f"--h is required for method {method}")
    if method == "method11" and args.order != 2:
        raise UsageError("method11 works with order 2")
    if args.order < 1:
        raise UsageError("--order must be at least 1")
    if method == "oneshot":
        res = solve_oneshot_taylor(p, args.order, ctx)
    elif method in ("heun", "rk4"):
        res = (solve_heun if method == "heun" else solve_rk4)(p, args.h, ctx)
    else:
        try:
            cfg = SolverConfig(args.h, args.order, args.tau, ctx, args.feedback)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        res = (solve_method_1_0 if method == "method10" else solve_method_1_1)(p, cfg)
    header = ["n", "x_n", "y_n"] + (["y_c_n", "c_n"] if res.corrections else []) + ["eps_n"]
    rows = []
    for n, (x, y) in enumerate(res.points):
        row = [n, fmt(x), fmt(y)]
        if res.corrections:
            c, yc = res.corrections[n]
            row += [fmt(yc), fmt(c)]
        row.append(fmt(res.errors[n]) if res.errors else "")
        rows.append(row)
    emit(header, rows, args.format, out)
    note = f"f_evals: {res.f_evals}"
    if args.format == "csv":
        err.write(note + "\n")
    else:
        out.write(f"\n{note}\n")
    return 0


def exact_derivatives(u: Expression, x0, order: int, digits: int) -> list:
    """``u^(j)(x0)`` for ``j = 0..order`` from ``u`` evaluated at ``x0 + #^-1``."""
    ctx = Context("decimal", digits, lift_order=order)
    value = u(GrossNumber.scalar(x0, ctx) + grossone(-1, ctx)).truncate(-order)
    return [ctx.mul(ctx.scalar(factorial(j)), value.coefficient(-j)) for j in range(order + 1)]


def cmd_derivs(args, out, err) -> int:
    ctx = _context(args)
    p = _problem(args, ctx, need_end=False)
    k = args.order
    if k < 1:
        raise UsageError("--order must be at least 1")
    if args.recover:
        model, ledger = recover_with_errors(p.rhs, p.x0, p.y0, k + 1, ctx)
    else:
        model, ledger = build_taylor(p.rhs, p.x0, p.y0, k, FORWARD, ctx), None
    exact = None
    if p.exact_solution is not None:
        exact = exact_derivatives(p.exact_solution, p.x0, k, max(ctx.digits, 30) + 20)
    header = ["i"] + (["approx", "eps"] if ledger else []) + ["derivative"] + (["delta"] if exact else [])
    rows = []
    for i in range(k + 1):
        d = model.derivs[i]
        row = [i]
        if ledger:
            row += [fmt(ledger.approx[i - 1]) if i else fmt(d), fmt(ledger.eps[i - 1]) if i else "0"]
        row.append(fmt(d))
        if exact:
            row.append(fmt(ERROR_CONTEXT.sub(exact[i], ERROR_CONTEXT.scalar(d))))
        rows.append(row)
    emit(header, rows, args.format, out)
    if ledger and args.format == "md":
        out.write(f"\nfirst nonzero error at order {ledger.first_nonzero}\n")
    return 0


def cmd_reproduce(args, out, err) -> int:
    names = sorted(TARGETS) if args.target == "all" else [args.target]
    ok = True
    for name in names:
        kwargs = {}
        if "digits" in inspect.signature(TARGETS[name]).parameters and args.digits_given:
            kwargs["digits"] = args.digits
        report = reproduce(name, **kwargs)
        out.write(report.render(args.format) + "\n\n")
        ok = ok and report.ok
    return 0 if ok else 1


def main(argv: Optional[list] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.backend_given = args.backend is not None
        _settle(args)
        handler = {"solve": cmd_solve, "derivs": cmd_derivs, "reproduce": cmd_reproduce}[args.command]
        return handler(args, out, err)
    except UsageError as exc:
        err.write(f"infinity-ode: error: {exc}\n")
        return 2
    except (GrossError, DomainError, ArithmeticError, ValueError) as exc:
        err.write(f"infinity-ode: numeric failure: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

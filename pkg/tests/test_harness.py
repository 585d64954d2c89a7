from decimal import Decimal
from fractions import Fraction

import mpmath
import pytest

from infinity_ode.harness import TARGETS, Check, Report, gaussian_derivatives, printed_tolerance, reproduce


@pytest.mark.parametrize("target", sorted(TARGETS))
def test_every_target_reproduces(target):
    report = reproduce(target)
    failed = [c.line() for c in report.checks if not c.passed]
    assert report.checks and not failed, failed
    assert report.render().endswith(f"{len(report.checks)}/{len(report.checks)} checks passed in "
                                    f"{report.seconds:.3f} s")


def test_unknown_target():
    with pytest.raises(KeyError):
        reproduce("table9")


def test_printed_tolerance():
    assert printed_tolerance("0.740700") == pytest.approx(5e-7)
    assert printed_tolerance("0.609199190e-7") == pytest.approx(5e-17)
    assert printed_tolerance("12") == pytest.approx(0.5)
    assert printed_tolerance("0.7407", floor=1e-3) == 1e-3


def test_check_modes():
    assert Check("a", Fraction(1, 3), Fraction(1, 3)).passed
    assert not Check("b", 1, 2).passed
    close = Check("c", Decimal("0.3333"), Fraction(1, 3), 1e-4)
    assert close.passed and close.line().startswith("ok")
    assert Check("d", 1, 2, 0.5).line().startswith("FAIL")


def test_report_rendering():
    r = Report("demo", ["n", "y"], [[0, "1"], [10, "0.5"]], [Check("y0", 1, 1)], ["a note"])
    assert r.table("csv") == "n,y\n0,1\n10,0.5"
    md = r.table().splitlines()
    assert md[0] == "| n  | y   |" and md[1] == "|----|-----|"
    text = r.render()
    assert "note: a note" in text and "1/1 checks passed" in text


def test_gaussian_oracle_against_mpmath_diff():
    def u(x):
        return 1 + mpmath.exp(-((x - 3) / mpmath.mpf("0.5")) ** 2 / 2)

    got = gaussian_derivatives(4)
    with mpmath.workdps(40):
        for i in range(5):
            want = mpmath.diff(u, 0, i)
            assert abs(mpmath.mpf(str(got[i])) / want - 1) < mpmath.mpf("1e-25")

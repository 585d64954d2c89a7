import csv
import io

import pytest

from infinity_ode.cli import main, read_config


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_solve_method11_csv():
    code, out, err = run("solve", "--problem", "ex3", "--h", "0.2", "--method", "method11", "--format", "csv")
    assert code == 0
    table = rows(out)
    assert table[0] == ["n", "x_n", "y_n", "y_c_n", "c_n", "eps_n"]
    assert table[1][:5] == ["0", "0", "1", "1", "0"]
    assert table[2][:5] == ["1", "0.2", "0.84", "0.8392", "-0.0008"]
    assert len(table) == 7
    assert "f_evals: 20" in err


def test_solve_markdown_reports_evaluations():
    code, out, _ = run("solve", "--problem", "ex3", "--h", "0.2")
    assert code == 0
    assert out.startswith("| n | x_n | y_n")
    assert "f_evals: 10" in out


@pytest.mark.parametrize("method, evals", [("heun", 10), ("rk4", 20), ("method10", 10)])
def test_solve_finite_methods(method, evals):
    code, _, err = run("solve", "--problem", "ex3", "--h", "0.2", "--method", method, "--format", "csv")
    assert code == 0 and f"f_evals: {evals}" in err


def test_oneshot_needs_no_step():
    code, out, _ = run("solve", "--problem", "ex3", "--method", "oneshot", "--order", "5", "--format", "csv")
    assert code == 0
    assert rows(out)[-1][1] == "1"


def test_custom_rhs_and_decimal_digits():
    code, out, _ = run("solve", "--rhs", "x - y", "--exact", "x - 1 + 2*exp(-x)", "--x0", "0", "--y0", "1",
                       "--h", "0.5", "--x-end", "1", "--digits", "12", "--format", "csv")
    assert code == 0
    last = rows(out)[-1]
    assert last[0] == "2" and abs(float(last[2]) - 0.78125) < 1e-12


def test_derivs_output():
    code, out, _ = run("derivs", "--problem", "ex3", "--order", "4", "--format", "csv")
    assert code == 0
    assert [r[1] for r in rows(out)[1:]] == ["1", "-1", "2", "-2", "2"]


def test_derivs_recover_columns():
    code, out, _ = run("derivs", "--problem", "ex5-expanded", "--order", "3", "--recover", "--digits", "30",
                       "--format", "csv")
    assert code == 0
    table = rows(out)
    assert table[0] == ["i", "approx", "eps", "derivative", "delta"]
    assert float(table[2][2]) == 0
    assert abs(float(table[3][2]) - 6.09199190e-8) < 1e-15


def test_usage_errors_exit_2(capsys):
    assert run("solve", "--problem", "ex3", "--method", "rk4")[0] == 2
    code, _, err = run("solve", "--rhs", "x +", "--y0", "1", "--h", "0.1", "--x-end", "1")
    assert code == 2 and "error" in err
    assert run("solve", "--problem", "nope")[0] == 2
    assert run("frobnicate")[0] == 2
    capsys.readouterr()


def test_numeric_failure_exits_1():
    code, _, err = run("solve", "--problem", "ex3", "--h", "0.3")
    assert code == 1 and "numeric failure" in err


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for ex3\nproblem = ex3\nh = 0.5\nmethod = heun\nformat = csv\n")
    code, out, err = run("solve", "--config", str(cfg))
    assert code == 0
    assert len(rows(out)) == 4 and "f_evals: 4" in err
    # command line flags win over the file
    code, out, _ = run("solve", "--config", str(cfg), "--h", "0.25")
    assert code == 0 and len(rows(out)) == 6


def test_bad_config(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert run("solve", "--config", str(cfg))[0] == 2
    assert run("solve", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_read_config_strips_comments(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("x-end = 2  # longer run\n\ndigits=40\n")
    assert read_config(str(cfg)) == {"x_end": "2", "digits": "40"}


def test_reproduce_targets():
    code, out, _ = run("reproduce", "table2")
    assert code == 0
    assert out.startswith("# table2")
    assert run("reproduce", "no-such-table")[0] == 2

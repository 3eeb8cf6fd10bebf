import csv
import io
import subprocess
import sys

import pytest

from lpdist.cli import EXIT_NOT_UNIFORM, EXIT_OK, EXIT_USAGE, parse_number, run_cli
from lpdist.core import INF, SampleHistogram, read_distribution, write_histogram


def run(argv, capsys):
    code = run_cli(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_number():
    assert parse_number("inf") == INF
    assert parse_number("1/3") == 1 / 3
    assert parse_number("0.333333") == 1 / 3
    assert parse_number("1.3333333") == 4 / 3
    assert parse_number("0.1") == 0.1
    assert parse_number("0.12345") == 0.12345
    assert parse_number("2") == 2.0
    with pytest.raises(Exception):
        parse_number("abc")


def test_sample_size_prints_54(capsys):
    code, out, _ = run(
        ["sample-size", "--problem", "test", "--p", "2", "--n", "100", "--eps", "0.5", "--delta", "0.333333",
         "--kind", "sufficient"],
        capsys,
    )
    assert code == EXIT_OK and out == "54\n"


def test_sample_size_learn_and_necessary(capsys):
    code, out, _ = run(["sample-size", "--problem", "learn", "--p", "1.5", "--n", "1000000", "--eps", "0.2",
                        "--delta", "0.5"], capsys)
    assert out == "500\n"
    code, out, _ = run(["sample-size", "--problem", "test", "--p", "2", "--n", "4", "--eps", "0.1", "--delta",
                        "1/3", "--kind", "necessary", "--verbose"], capsys)
    assert out.splitlines()[0] == "17"
    assert "paired-family-small" in out


def test_curves_flat_at_four_thirds(capsys):
    code, out, _ = run(["curves", "--p", "1.3333333", "--eps", "0.1", "--delta", "0.333333", "--n-min", "2",
                        "--n-max", "10000"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9999
    assert {r["m_sufficient"] for r in rows} == {"2700"}


def test_curves_log_spaced(tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, _, _ = run(["curves", "--p", "2", "--eps", "0.1", "--delta", "0.333333", "--n-min", "2", "--n-max",
                      "10000", "--num", "20", "--out", str(path)], capsys)
    assert code == EXIT_OK
    assert 2 < len(path.read_text().splitlines()) <= 21


def test_linf_test_exit_codes(capsys):
    base = ["test", "--p", "inf", "--n", "100000", "--eps", "0.05", "--delta", "0.333333", "--seed", "7"]
    code, out, _ = run(base + ["--dist", "uniform"], capsys)
    assert code == EXIT_OK and out.startswith("uniform ")
    code, out, _ = run(base + ["--dist", "heavy"], capsys)
    assert code == EXIT_NOT_UNIFORM and out.startswith("not uniform ")


def test_test_from_histogram(tmp_path, capsys):
    path = tmp_path / "h.txt"
    write_histogram(SampleHistogram([20] + [0] * 9), path)
    code, out, _ = run(["test", "--p", "2", "--n", "10", "--eps", "0.2", "--delta", "1/3", "--hist", str(path)],
                       capsys)
    assert code == EXIT_NOT_UNIFORM and "statistic=190" in out


def test_majority_flag(capsys):
    code, out, _ = run(["test", "--p", "2", "--n", "50", "--eps", "0.3", "--delta", "0.001", "--majority"], capsys)
    assert code == EXIT_OK


def test_learn_writes_distribution(tmp_path, capsys):
    path = tmp_path / "est.txt"
    code, _, err = run(["learn", "--p", "2", "--n", "10", "--eps", "0.1", "--delta", "1/3", "--out", str(path)],
                       capsys)
    assert code == EXIT_OK and "m=300" in err
    assert read_distribution(path).n == 10


def test_experiment_csv(capsys):
    argv = ["experiment", "--p", "2", "--n", "100", "--eps", "0.2", "--delta", "0.333333", "--trials", "50",
            "--seed", "4"]
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "problem,p,n,eps,delta,m,trials,seed,adversary,failure_rate,ci_halfwidth"
    assert len(lines) == 2
    assert run(argv, capsys)[1] == out


def test_experiment_incompatible_adversary_is_usage_error(capsys):
    code, _, err = run(["experiment", "--p", "2", "--n", "100", "--eps", "0.2", "--delta", "1/3", "--adversary",
                        "paninski", "--trials", "5"], capsys)
    assert code == EXIT_USAGE and "paninski" in err


def test_verify_moments(capsys):
    code, out, _ = run(["verify-moments", "--n", "2", "--m", "2", "--eps", "0.1", "--delta", "0.3", "--trials",
                        "1000"], capsys)
    assert code == EXIT_OK
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["predicted_mean"]) == 0.5 and float(row["predicted_variance"]) == 0.25


def test_usage_errors(capsys):
    assert run(["test", "--bogus"], capsys)[0] == EXIT_USAGE
    assert run(["nope"], capsys)[0] == EXIT_USAGE
    assert run([], capsys)[0] == EXIT_USAGE
    code, _, err = run(["sample-size", "--problem", "test", "--p", "0.5", "--n", "10", "--eps", "0.1", "--delta",
                        "0.1"], capsys)
    assert code == EXIT_USAGE and "p >= 1" in err
    assert run(["curves", "--p", "2", "--eps", "0.1", "--delta", "0.1", "--n-min", "5", "--n-max", "3"],
               capsys)[0] == EXIT_USAGE


def test_runtime_failure_exit_code(tmp_path, capsys):
    code, _, _ = run(["test", "--p", "2", "--n", "10", "--eps", "0.2", "--delta", "1/3", "--hist",
                      str(tmp_path / "missing.txt")], capsys)
    assert code == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lpdist", "sample-size", "--problem", "test", "--p", "3", "--n", "100", "--eps", "0.5",
         "--delta", "0.333333"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "54\n"

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from burrecords import __version__
from burrecords.cli import EXAMPLES, SUBCOMMANDS, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def usage_error(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    return exc.value.code, capsys.readouterr().err


def test_quantile_example(capsys):
    code, doc = run_json(capsys, "quantile", "--member", "I", "--p", "0.3")
    assert code == 0 and doc["result"]["quantile"] == pytest.approx(0.3, abs=1e-15)
    assert doc["tool_version"] == __version__ and doc["config"]["member"] == "I"


def test_cdf_matches_closed_form(capsys):
    code, doc = run_json(capsys, "cdf", "--member", "XII", "--param", "r=2", "--param", "c=3",
                         "--x", "0.5", "--x", "2")
    F = [1 - (1 + x ** 3) ** -2 for x in (0.5, 2.0)]
    assert code == 0 and doc["result"]["cdf"] == pytest.approx(F, rel=1e-13)


def test_member_name_is_case_insensitive(capsys):
    _, a = run(capsys, "quantile", "--member", "xii", "--param", "r=1", "--param", "c=1", "--p", "0.5")
    _, b = run(capsys, "quantile", "--member", "XII", "--param", "r=1", "--param", "c=1", "--p", "0.5")
    assert a == b


def test_expand_reports_exact_and_remainder(capsys):
    code, doc = run_json(capsys, "expand", "--member", "XII", "--param", "r=2", "--param", "c=1",
                         "--u", "1e-4")
    res = doc["result"]
    assert code == 0
    assert res["exact"] == pytest.approx(99.0, rel=1e-12)
    assert res["remainder"] == pytest.approx(res["exact"] - res["value"], abs=1e-12)
    assert set(res) >= {"leading", "correction", "frame", "remainder_order"}


def test_classify_needs_only_the_shape_that_decides_the_domain(capsys):
    code, doc = run_json(capsys, "classify", "--member", "IV", "--param", "c=0.5")
    assert code == 0
    assert doc["result"]["gamma"] == -0.5 and doc["result"]["uep"] == 0.5
    code, doc = run_json(capsys, "classify", "--member", "II")
    assert doc["result"] == {"gamma": 1.0, "uep": "inf", "transform": "log"}


def test_classify_without_deciding_parameter_is_usage_error(capsys):
    code, err = usage_error(capsys, "classify", "--member", "IV")
    assert code == 2 and "c" in err.split("error:")[-1]


def test_classify_probe_csv(capsys):
    code, out = run(capsys, "classify", "--member", "IV", "--param", "c=0.5", "--param", "r=2",
                    "--u", "1e-6", "--u", "1e-8", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 2
    assert all(abs(float(r["estimate"]) + 0.5) < 1e-3 for r in rows)


def test_records_csv_has_header_and_rows(capsys):
    code, out = run(capsys, "records", "--member", "II", "--param", "r=1", "--n", "50", "--m", "10",
                    "--seed", "7", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "replication,n,s_n,s_star,value" and len(lines) == 11
    rows = list(csv.DictReader(io.StringIO(out)))
    for r in rows:
        s = float(r["s_n"])
        assert float(r["s_star"]) == pytest.approx((s - 50) / math.sqrt(50), rel=1e-12)
        # Burr II with r = 1 is the logistic: F^{-1}(1 - e^{-s}) = log(e^s - 1)
        assert float(r["value"]) == pytest.approx(math.log(math.expm1(s)), rel=1e-12)


def test_csv_header_present_even_for_single_value(capsys):
    _, out = run(capsys, "quantile", "--member", "I", "--p", "0.3", "--format", "csv")
    assert out.splitlines()[0] == "p,quantile"


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_threads_do_not_change_output_bytes(capsys, fmt):
    base = ("experiment", "--member", "II", "--param", "r=1", "--n", "100", "--m", "300",
            "--seed", "42", "--format", fmt)
    outs = {run(capsys, *base, "--threads", t)[1] for t in ("1", "3", "8")}
    assert len(outs) == 1


def test_records_replay_is_byte_identical(capsys):
    base = ("records", "--member", "VII", "--param", "r=3", "--n", "40", "--m", "30", "--seed", "5")
    a = run(capsys, *base, "--threads", "1")[1]
    b = run(capsys, *base, "--threads", "4")[1]
    c = run(capsys, *base)[1]
    assert a == b == c


def test_experiment_echo_and_seed(capsys):
    code, doc = run_json(capsys, "experiment", "--member", "II", "--param", "r=1", "--n", "100",
                         "--m", "200", "--seed", "42")
    assert code == 0 and doc["seed"] == 42
    assert doc["config"] == {"subcommand": "experiment", "member": "II", "params": {"r": 1.0},
                             "format": "json", "n": 100, "m": 200, "seed": 42, "variant": "canonical"}
    assert doc["result"]["target"] == {"shape": "normal", "mean": 0.0, "variance": 1.0}


def test_hypothesis_test_reports_rejection_with_exit_zero(capsys):
    code, doc = run_json(capsys, "test", "--member", "I", "--n", "10", "--observed", "1.5")
    assert code == 0
    assert doc["result"]["reject"] is True and doc["result"]["flag"] == "support-violation"
    assert doc["result"]["statistic"] is None


def test_hypothesis_test_on_log_scale(capsys):
    code, doc = run_json(capsys, "test", "--member", "XII", "--param", "r=1", "--param", "c=1",
                         "--n", "1000", "--log-observed", "1000")
    assert code == 0 and doc["result"]["reject"] is False
    assert doc["result"]["statistic"] == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("argv", [
    ("quantile", "--member", "XIII", "--p", "0.5"),
    ("quantile", "--member", "I", "--param", "x=1", "--p", "0.5"),
    ("quantile", "--member", "II", "--param", "r=1", "--param", "r=2", "--p", "0.5"),
    ("quantile", "--member", "II", "--param", "r", "--p", "0.5"),
    ("quantile", "--member", "II", "--param", "r=abc", "--p", "0.5"),
    ("quantile", "--member", "XII", "--param", "r=1", "--p", "0.5"),
    ("records", "--member", "I", "--n", "5", "--m", "2", "--seed", "18446744073709551616"),
    ("records", "--member", "I", "--n", "5", "--m", "2", "--seed", "-1"),
    ("records", "--member", "I", "--n", "0", "--m", "2", "--seed", "1"),
    ("records", "--member", "I", "--n", "5", "--m", "2", "--seed", "1", "--threads", "0"),
    ("test", "--member", "I", "--n", "5"),
    ("test", "--member", "I", "--n", "5", "--observed", "0.5", "--log-observed", "0.1"),
    ("quantile", "--p", "0.5"),
    (),
])
def test_usage_errors_exit_2(capsys, argv):
    code, err = usage_error(capsys, *argv)
    assert code == 2 and "usage:" in err


@pytest.mark.parametrize("argv", [
    ("expand", "--member", "II", "--param", "r=1", "--u", "0.5"),
    ("quantile", "--member", "II", "--param", "r=-1", "--p", "0.5"),
    ("quantile", "--member", "I", "--p", "1.5"),
    ("experiment", "--member", "II", "--param", "r=1", "--n", "5", "--m", "200", "--seed", "1"),
    ("experiment", "--member", "Dagum", "--param", "a=1", "--param", "b=2", "--param", "c=1",
     "--n", "100", "--m", "200", "--seed", "1"),
])
def test_runtime_errors_exit_1_with_json(capsys, argv):
    code, out = run(capsys, *argv)
    doc = json.loads(out)
    assert code == 1 and doc["error"] and doc["context"]["subcommand"] == argv[0]


def test_out_writes_file(tmp_path, capsys):
    path = tmp_path / "q.json"
    code = main(["quantile", "--member", "I", "--p", "0.25", "--out", str(path)])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(path.read_text())["result"]["quantile"] == pytest.approx(0.25)


def test_json_never_contains_nan_or_infinity(capsys):
    code, out = run(capsys, "records", "--member", "XII", "--param", "r=0.01", "--param", "c=0.01",
                    "--n", "2000", "--m", "3", "--seed", "1")
    assert code == 0 and "NaN" not in out and "Infinity" not in out
    doc = json.loads(out)
    assert all(r["overflow"] and r["value"] is None and r["log_value"] > 0 for r in doc["result"]["records"])


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_every_subcommand_help_shows_an_example(capsys, sub):
    with pytest.raises(SystemExit) as exc:
        main([sub, "--help"])
    out = capsys.readouterr().out
    assert exc.value.code == 0 and EXAMPLES[sub] in out


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_examples_run(capsys, sub):
    argv = EXAMPLES[sub].split()[1:]
    if sub == "experiment":  # keep the suite fast: same command at a smaller size
        argv = [a if a not in ("5000",) else "300" for a in argv]
    code, _ = run(capsys, *argv)
    assert code == 0


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "burrecords.cli", "quantile", "--member", "I",
                           "--p", "0.5", "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "p,quantile\n0.5,0.5\n"

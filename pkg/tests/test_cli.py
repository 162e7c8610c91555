import csv
import io
import json
import os
import subprocess
import sys
from fractions import Fraction as F

import pytest

from qzeta import cli, verify
from qzeta.qcore import scalar_from_json
from qzeta.verify import Case


def qzeta(*args, env=None):
    return subprocess.run([sys.executable, "-m", "qzeta", *args], capture_output=True, text=True, env=env)


def run_inproc(capsys, *args):
    code = cli.run(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestExitCodes:
    def test_success(self):
        res = qzeta("number", "--n", "1", "--q", "1/2", "--u", "1/3", "--mode", "exact")
        assert res.returncode == 0
        assert json.loads(res.stdout)["value"] == "2/5"

    def test_usage_error_for_bad_q(self):
        res = qzeta("number", "--n", "1", "--q", "3/2", "--u", "1/3")
        assert res.returncode == 2
        assert "q must satisfy 0<q<1 in exact mode" in res.stderr

    @pytest.mark.parametrize(
        "args",
        [
            ("number", "--n", "-1", "--q", "1/2", "--u", "1/3"),
            ("number", "--n", "x", "--q", "1/2", "--u", "1/3"),
            ("zeta", "--s", "1", "--x", "0", "--q", "1/2", "--u", "1/3"),
            ("lfun", "--s", "1", "--q", "1/2", "--u", "1/3"),
            ("lfun", "--s", "1", "--q", "1/2", "--u", "1/3", "--chi", "builtin:mod7"),
            ("zeta", "--s", "1", "--q", "1/2", "--u", "1/3", "--tol", "1e-9", "--terms", "4"),
            ("number", "--n", "1", "--q", "1/2", "--u", "1/3", "--prec", "20"),
            ("frobnicate",),
        ],
    )
    def test_other_usage_errors(self, capsys, args):
        code, _, _ = run_inproc(capsys, *args)
        assert code == 2

    def test_truncation_error(self):
        res = qzeta("zeta", "--s", "2", "--x", "1", "--q", "1/2", "--u", "0.99", "--max-terms", "5")
        assert res.returncode == 3
        assert "after 5 terms" in res.stderr

    def test_exact_mode_non_integer_x_is_domain_error(self, capsys):
        code, _, err = run_inproc(capsys, "poly", "--n", "2", "--x", "1/2", "--q", "1/2", "--u", "1/3")
        assert code == 3 and "error" in err

    def test_table_cell_error_gives_3_and_keeps_rows(self, capsys):
        code, out, _ = run_inproc(capsys, "table", "poly", "--n", "1", "--x", "1,1/2", "--q", "1/2", "--u", "1/3",
                                  "--format", "csv")
        assert code == 3
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[0]["value"] == "6/5" and rows[0]["error"] == ""
        assert rows[1]["value"] == "" and rows[1]["error"]

    def test_verification_failure(self, capsys, monkeypatch):
        monkeypatch.setitem(verify.SUITES, "interpolation",
                            lambda cfg: [Case({"n": "0"}, F(1), F(2), F(0), False, "forced")])
        code, out, _ = run_inproc(capsys, "verify", "interpolation", "--no-timing")
        assert code == 1
        assert json.loads(out)["summary"]["failed"] == 1


class TestVerify:
    def test_audit_reports_mismatch_without_failing(self):
        res = qzeta("verify", "classical-audit", "--format", "json", "--no-timing")
        assert res.returncode == 0
        report = json.loads(res.stdout)
        row = next(c for c in report["cases"] if c["inputs"]["n"] == "1")
        assert (row["lhs"], row["rhs"], row["note"]) == ("-1/2", "-1", "mismatch")

    def test_distribution_with_chosen_character(self, capsys):
        code, out, _ = run_inproc(capsys, "verify", "distribution", "--chi", "builtin:mod4", "--no-timing")
        assert code == 0
        rep = json.loads(out)
        assert rep["summary"]["failed"] == 0 and {c["inputs"]["chi"] for c in rep["cases"]} == {"quadratic mod 4"}

    def test_plain_output_has_timing_footer_only_when_asked(self, capsys):
        _, with_t, _ = run_inproc(capsys, "verify", "classical-audit", "--format", "plain")
        _, without, _ = run_inproc(capsys, "verify", "classical-audit", "--format", "plain", "--no-timing")
        assert with_t.splitlines()[-1].startswith("wall time:")
        assert with_t.splitlines()[:-1] == without.splitlines()


class TestDeterminism:
    @pytest.mark.parametrize(
        "args",
        [
            ("verify", "distribution", "--no-timing"),
            ("table", "zeta", "--s", "-3..3", "--x", "1", "--q", "1/2", "--u", "1/3", "--format", "csv"),
            ("zeta", "--s", "1.5+2j", "--x", "1", "--q", "0.5+0.3j", "--u", "0.4", "--mode", "certified"),
        ],
    )
    def test_repeated_runs_are_byte_identical(self, args):
        first, second = qzeta(*args), qzeta(*args)
        assert first.returncode == 0
        assert first.stdout == second.stdout and first.stdout

    def test_out_file_matches_stdout(self, tmp_path, capsys):
        target = tmp_path / "t.csv"
        args = ("table", "number", "--n", "0..4", "--q", "1/2", "--u", "1/3", "--format", "csv")
        run_inproc(capsys, *args, "--out", str(target))
        _, out, _ = run_inproc(capsys, *args)
        assert target.read_bytes() == out.encode()


class TestTable:
    def test_number_rows(self, capsys):
        code, out, _ = run_inproc(capsys, "table", "number", "--n", "0..2", "--q", "1/2", "--u", "1/3",
                                  "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["value"] for r in rows] == ["1", "2/5", "28/55"]
        assert list(rows[0]) == ["n", "q", "u", "value", "error"]

    def test_zeta_rows_are_ordered_and_certified(self, capsys):
        code, out, _ = run_inproc(capsys, "table", "zeta", "--s", "-3..3", "--x", "1", "--q", "1/2", "--u", "1/3")
        assert code == 0
        rows = json.loads(out)
        assert [r["s"] for r in rows] == [str(s) for s in range(-3, 4)]
        assert all({"tail_bound", "terms_used"} <= set(r) for r in rows)

    def test_json_values_round_trip(self, capsys):
        _, out, _ = run_inproc(capsys, "table", "zeta", "--s", "0,-1", "--x", "1", "--q", "1/2", "--u", "1/3",
                               "--tol", "1e-30")
        rows = json.loads(out)
        for row, exact in zip(rows, (F(3, 2), F(9, 5))):
            v = scalar_from_json(row["value"])
            assert abs(v - exact) <= float(row["tail_bound"])

    def test_lexicographic_in_declared_order(self, capsys):
        _, out, _ = run_inproc(capsys, "table", "poly", "--n", "0..1", "--x", "1,2", "--q", "1/2", "--u", "1/3",
                               "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [(r["n"], r["x"]) for r in rows] == [("0", "1"), ("0", "2"), ("1", "1"), ("1", "2")]
        assert rows[2]["value"] == "6/5" and rows[3]["value"] == "8/5"


class TestFormats:
    def test_complex_value_in_csv(self, capsys):
        code, out, _ = run_inproc(capsys, "zeta", "--s", "2", "--x", "1", "--q", "0.5+0.2j", "--u", "0.3j",
                                  "--mode", "certified", "--format", "csv")
        assert code == 0
        row = next(csv.DictReader(io.StringIO(out)))
        assert row["value"].endswith(" i") and "+" in row["value"]

    def test_default_precision_from_environment(self):
        env = dict(os.environ, QZETA_DEFAULT_PREC="200")
        res = qzeta("zeta", "--s", "0", "--x", "1", "--q", "1/2", "--u", "1/3", env=env)
        assert json.loads(res.stdout)["value"]["prec_bits"] == 200

    def test_negative_range_values(self, capsys):
        code, _, _ = run_inproc(capsys, "lfun", "--s", "-1", "--q", "1/2", "--u", "-1/2", "--chi", "builtin:mod4")
        assert code == 0

    def test_audit_plain(self, capsys):
        code, out, _ = run_inproc(capsys, "audit", "--n-max", "2", "--format", "plain")
        assert code == 0
        assert "n=1  lhs=-1/2  rhs=-1  equal=False" in out

"""Acceptance criteria, one test each.

The first docstring line of every test is the label printed in the
"acceptance criteria" section of the pytest summary.
"""

import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from qzeta.verify import VerifyConfig, run_suite

CFG = VerifyConfig(precision_bits=128, target_bound=F(1, 10**28))


def _failures(report):
    return [(c.inputs, c.note) for c in report.cases if not c.passed]


def test_criterion_1_interpolation():
    """1 interpolation: zeta_q(u|-n,x) brackets H_{n,q}(1/u,x)/(1-u), bound <= 1e-28, under 10 s"""
    rep = run_suite("interpolation", CFG)
    assert len(rep.cases) == 3 * 3 * 3 * 11
    assert not _failures(rep)
    assert rep.wall_time < 10


def test_criterion_2_higher_order():
    """2 higher order: r in 1..3, n <= 8, goldens 9/5 and 153/50"""
    rep = run_suite("higher-order", CFG)
    assert not _failures(rep)
    goldens = {c.inputs["golden"] for c in rep.cases if "golden" in c.inputs}
    assert goldens == {"9/5", "153/50"}


def test_criterion_3_distribution():
    """3 distribution relation: exact equality for mod3 and mod4, n <= 8"""
    rep = run_suite("distribution", CFG)
    assert len(rep.cases) == 2 * 2 * 2 * 9
    assert not _failures(rep)
    assert all(c.lhs == c.rhs for c in rep.cases)


def test_criterion_4_lfun():
    """4 l_q: special values for mod3 and mod4, principal mod 1 equals zeta_q(u|s) for s in -3..3"""
    rep = run_suite("lfun", CFG)
    assert sum("principal" in c.inputs["chi"] for c in rep.cases) == 9 * 7
    assert not _failures(rep)


def test_criterion_5_classical():
    """5 classical: H_n(-1) = E_n, recurrences vs series to order 20, audit mismatch at n=1 is reported"""
    rep = run_suite("classical", CFG)
    assert not _failures(rep)
    audit = run_suite("classical-audit", CFG)
    assert audit.ok and not audit.fatal
    row = next(c for c in audit.cases if c.inputs["n"] == "1")
    assert (row.lhs, row.rhs, row.note) == (F(-1, 2), F(-1), "mismatch")


def test_criterion_6_limits():
    """6 limits: deviation shrinks by 2^6 from k=4 to k=12 for H_n (n <= 6) and zeta_r (r = 1, 2)"""
    bad = _failures(run_suite("limits", CFG))
    assert not bad, f"cases without the required decay: {bad}"


def test_criterion_7_shift():
    """7 shift: zeta_{r,q}(u|s) = u^r zeta_{r,q}(u|s,r) for r = 1, 2, s in -3..3, and zeta_q(u|-1) = 3/5"""
    rep = run_suite("shift", CFG)
    assert not _failures(rep)
    assert any(c.inputs.get("golden") == "3/5" for c in rep.cases)


def test_criterion_8_tails():
    """8 tail soundness: doubling terms_used stays inside the reported bound on the criteria 1-4 grid"""
    rep = run_suite("tails", CFG)
    assert len(rep.cases) > 1000
    assert not _failures(rep)


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "qzeta", *args], capture_output=True, text=True)


def test_criterion_9_cli(monkeypatch, capsys):
    """9 CLI: exit codes 0, 1, 2, 3 and byte-identical repeated output with --no-timing"""
    ok = _cli("number", "--n", "1", "--q", "1/2", "--u", "1/3", "--mode", "exact")
    assert ok.returncode == 0 and json.loads(ok.stdout)["value"] == "2/5"

    usage = _cli("number", "--n", "1", "--q", "3/2", "--u", "1/3")
    assert usage.returncode == 2 and "q must satisfy 0<q<1 in exact mode" in usage.stderr

    trunc = _cli("zeta", "--s", "2", "--x", "1", "--q", "1/2", "--u", "0.99", "--max-terms", "5")
    assert trunc.returncode == 3

    from qzeta import cli, verify
    from qzeta.verify import Case

    monkeypatch.setitem(verify.SUITES, "shift", lambda cfg: [Case({}, F(0), F(1), F(0), False)])
    assert cli.run(["verify", "shift", "--no-timing"]) == 1
    capsys.readouterr()

    runs = [_cli("verify", "distribution", "--format", "csv", "--no-timing") for _ in range(2)]
    assert all(r.returncode == 0 for r in runs)
    assert runs[0].stdout == runs[1].stdout


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))

"""Named verification suites.

Each suite sweeps a fixed parameter grid, compares two independent routes
to the same quantity and returns a :class:`VerificationReport`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterator

from .characters import DirichletCharacter, principal, quadratic_mod3, quadratic_mod4
from .classical import bernoulli_euler_identity_audit, euler_number, frobenius_euler, sequence_table, series_oracle
from .qcore import (
    DEFAULT_PREC,
    CertifiedValue,
    QContext,
    QZetaError,
    TailPolicy,
    format_bound,
    scalar_to_json,
)
from .qeuler import distribution_relation_check, q_euler_number_limit_check
from .zeta import (
    l_q,
    l_q_special_value,
    q_to_1_limit_check,
    zeta_multiple_shift_check,
    zeta_q_hurwitz,
    zeta_q_multiple,
    zeta_q_riemann,
    zeta_special_value,
)

__all__ = ["Case", "VerificationReport", "VerifyConfig", "SUITES", "run_suite", "run_all"]

F = Fraction

GRID_Q = (F(1, 2), F(2, 3), F(9, 10))
GRID_U = (F(1, 3), F(-1, 2), F(1, 2))
EXACT_X = (F(1), F(2))
CERTIFIED_X = (F(5, 2),)
LIMIT_KS = tuple(range(4, 13))
LIMIT_FACTOR = 2**6


@dataclass
class Case:
    inputs: dict[str, str]
    lhs: Any
    rhs: Any
    bound: Any
    passed: bool
    note: str = ""

    def to_json(self, prec_bits: int) -> dict:
        def enc(v):
            if v is None:
                return None
            if isinstance(v, bool):
                return v
            return scalar_to_json(v, prec_bits)

        return {
            "inputs": self.inputs,
            "lhs": enc(self.lhs),
            "rhs": enc(self.rhs),
            "bound": None if self.bound is None else format_bound(self.bound),
            "pass": self.passed,
            "note": self.note,
        }


@dataclass
class VerificationReport:
    suite: str
    cases: list[Case] = field(default_factory=list)
    wall_time: float = 0.0
    fatal: bool = True
    prec_bits: int = DEFAULT_PREC

    @property
    def n_passed(self) -> int:
        return sum(c.passed for c in self.cases)

    @property
    def n_failed(self) -> int:
        return len(self.cases) - self.n_passed

    @property
    def ok(self) -> bool:
        return not self.fatal or self.n_failed == 0

    def summary(self) -> dict:
        return {"cases": len(self.cases), "passed": self.n_passed, "failed": self.n_failed, "ok": self.ok}

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "cases": [c.to_json(self.prec_bits) for c in self.cases],
            "summary": self.summary(),
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


@dataclass(frozen=True)
class VerifyConfig:
    precision_bits: int = 128
    target_bound: Fraction = F(1, 10**28)
    characters: tuple[DirichletCharacter, ...] | None = None
    audit_n_max: int = 10

    @property
    def policy(self) -> TailPolicy:
        return TailPolicy(target_bound=self.target_bound)

    def chars(self) -> tuple[DirichletCharacter, ...]:
        return self.characters or (quadratic_mod3(), quadratic_mod4())


def _fmt(v: Any) -> str:
    return str(v)


def _ctx(q, u, cfg: VerifyConfig, mode: str = "exact") -> QContext:
    return QContext(q, u, mode=mode, precision_bits=cfg.precision_bits)


# ---------------------------------------------------------------------------
# series jobs shared by the bracketing suites and the tail-soundness suite


@dataclass
class _SeriesJob:
    inputs: dict[str, str]
    evaluate: Callable[[TailPolicy], CertifiedValue]
    reference: Callable[[], Any]


def _grid_points() -> Iterator[tuple[Fraction, Fraction, Fraction, str]]:
    for q in GRID_Q:
        for u in GRID_U:
            for x in EXACT_X:
                yield q, u, x, "exact"
            for x in CERTIFIED_X:
                yield q, u, x, "certified"


def _interpolation_jobs(cfg: VerifyConfig) -> Iterator[_SeriesJob]:
    for q, u, x, mode in _grid_points():
        ctx = _ctx(q, u, cfg, mode)
        for n in range(11):
            yield _SeriesJob(
                {"q": _fmt(q), "u": _fmt(u), "x": _fmt(x), "n": _fmt(n), "mode": mode},
                lambda pol, ctx=ctx, x=x, n=n: zeta_q_hurwitz(-n, x, ctx, pol),
                lambda ctx=ctx, x=x, n=n: zeta_special_value(n, x, 1, ctx),
            )


def _higher_jobs(cfg: VerifyConfig) -> Iterator[_SeriesJob]:
    for q, u, x, mode in _grid_points():
        ctx = _ctx(q, u, cfg, mode)
        for r in (1, 2, 3):
            for n in range(9):
                yield _SeriesJob(
                    {"q": _fmt(q), "u": _fmt(u), "x": _fmt(x), "r": _fmt(r), "n": _fmt(n), "mode": mode},
                    lambda pol, ctx=ctx, x=x, r=r, n=n: zeta_q_multiple(-n, x, r, ctx, pol),
                    lambda ctx=ctx, x=x, r=r, n=n: zeta_special_value(n, x, r, ctx),
                )


def _lfun_jobs(cfg: VerifyConfig) -> Iterator[_SeriesJob]:
    for chi in cfg.chars():
        mode = "exact" if chi.is_rational else "certified"
        for q in GRID_Q:
            for u in GRID_U:
                ctx = _ctx(q, u, cfg, mode)
                for n in range(9):
                    yield _SeriesJob(
                        {"chi": chi.name or f"mod{chi.modulus}", "q": _fmt(q), "u": _fmt(u), "n": _fmt(n)},
                        lambda pol, ctx=ctx, chi=chi, n=n: l_q(-n, chi, ctx, pol),
                        lambda ctx=ctx, chi=chi, n=n: l_q_special_value(n, chi, ctx),
                    )


def _bracket_case(job: _SeriesJob, cfg: VerifyConfig) -> Case:
    value = job.evaluate(cfg.policy)
    ref = job.reference()
    inside = value.contains(ref)
    tight = value.tail_bound <= value.value.context.mpf(cfg.target_bound.numerator) / cfg.target_bound.denominator
    note = "" if inside and tight else ("outside bound" if not inside else "bound above target")
    return Case(job.inputs, value.value, ref, value.tail_bound, inside and tight, note)


def _guarded(inputs: dict[str, str], fn: Callable[[], Case]) -> Case:
    try:
        return fn()
    except QZetaError as exc:
        return Case(inputs, None, None, None, False, f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# suites


def suite_interpolation(cfg: VerifyConfig) -> list[Case]:
    """zeta_q(u|-n,x) series against H_{n,q}(u^{-1},x)/(1-u)."""
    return [_guarded(j.inputs, lambda j=j: _bracket_case(j, cfg)) for j in _interpolation_jobs(cfg)]


def suite_higher_order(cfg: VerifyConfig) -> list[Case]:
    cases = [_guarded(j.inputs, lambda j=j: _bracket_case(j, cfg)) for j in _higher_jobs(cfg)]
    # values derived by hand before the build, two routes each
    for r, golden in ((1, F(9, 5)), (2, F(153, 50))):
        ctx = _ctx(F(1, 2), F(1, 3), cfg)
        exact = zeta_special_value(1, 1, r, ctx)
        series = zeta_q_multiple(-1, 1, r, ctx, cfg.policy)
        ok = exact == golden and series.contains(golden)
        cases.append(
            Case({"golden": str(golden), "r": str(r), "n": "1", "x": "1", "q": "1/2", "u": "1/3"},
                 series.value, exact, series.tail_bound, ok)
        )
    return cases


def suite_distribution(cfg: VerifyConfig) -> list[Case]:
    cases = []
    for chi in cfg.chars():
        for q in (F(1, 2), F(2, 3)):
            for u in (F(1, 3), F(1, 2)):
                ctx = _ctx(q, u, cfg)
                for n in range(9):
                    inputs = {"chi": chi.name or f"mod{chi.modulus}", "q": _fmt(q), "u": _fmt(u), "n": _fmt(n)}

                    def run(ctx=ctx, chi=chi, n=n, inputs=inputs):
                        res = distribution_relation_check(n, chi, ctx)
                        return Case(inputs, res.lhs, res.rhs, F(0), res.equal)

                    cases.append(_guarded(inputs, run))
    return cases


def suite_lfun(cfg: VerifyConfig) -> list[Case]:
    cases = [_guarded(j.inputs, lambda j=j: _bracket_case(j, cfg)) for j in _lfun_jobs(cfg)]
    chi0 = principal(1)
    for q in GRID_Q:
        for u in GRID_U:
            ctx = _ctx(q, u, cfg, "certified")
            for s in range(-3, 4):
                a = l_q(s, chi0, ctx, cfg.policy)
                b = zeta_q_riemann(s, ctx, cfg.policy)
                delta = abs(a.value - b.value)
                bound = a.tail_bound + b.tail_bound
                cases.append(
                    Case({"chi": "principal mod 1", "q": _fmt(q), "u": _fmt(u), "s": _fmt(s)},
                         a.value, b.value, bound, bool(delta <= bound), "l_q vs zeta_q(u|s)")
                )
    return cases


def suite_limits(cfg: VerifyConfig) -> list[Case]:
    cases = []
    for u in (F(1, 3), F(-1, 2)):
        for n in range(7):
            rep = q_euler_number_limit_check(n, u, LIMIT_KS)
            cases.append(
                Case({"object": "H_n", "u": _fmt(u), "n": _fmt(n)}, rep.deviations[0], rep.deviations[-1],
                     None, rep.decays_by(LIMIT_FACTOR), f"deviation k={LIMIT_KS[0]} vs k={LIMIT_KS[-1]}")
            )
        for r in (1, 2):
            rep = q_to_1_limit_check(2, 1, r, u, LIMIT_KS, cfg.policy, cfg.precision_bits)
            cases.append(
                Case({"object": "zeta_r", "u": _fmt(u), "r": _fmt(r), "s": "2", "x": "1"},
                     rep.deviations[0], rep.deviations[-1], None, rep.decays_by(LIMIT_FACTOR),
                     f"deviation k={LIMIT_KS[0]} vs k={LIMIT_KS[-1]}")
            )
    return cases


def suite_shift(cfg: VerifyConfig) -> list[Case]:
    cases = []
    for q in GRID_Q:
        for u in GRID_U:
            ctx = _ctx(q, u, cfg, "certified")
            for r in (1, 2):
                for s in range(-3, 4):
                    chk = zeta_multiple_shift_check(s, r, ctx, cfg.policy)
                    cases.append(
                        Case({"q": _fmt(q), "u": _fmt(u), "r": _fmt(r), "s": _fmt(s)}, chk.lhs.value,
                             chk.rhs.value, chk.lhs.tail_bound + chk.rhs.tail_bound, chk.consistent)
                    )
    ctx = _ctx(F(1, 2), F(1, 3), cfg, "certified")
    v = zeta_q_riemann(-1, ctx, cfg.policy)
    cases.append(Case({"q": "1/2", "u": "1/3", "s": "-1", "golden": "3/5"}, v.value, F(3, 5), v.tail_bound,
                      v.contains(F(3, 5))))
    return cases


def suite_classical(cfg: VerifyConfig) -> list[Case]:
    cases = []
    for n in range(21):
        lhs, rhs = frobenius_euler(n, -1), euler_number(n)
        cases.append(Case({"check": "H_n(-1)=E_n", "n": str(n)}, lhs, rhs, F(0), lhs == rhs))
    for kind, u in (("bernoulli", None), ("euler", None), ("frobenius_euler", F(3)),
                    ("frobenius_euler", F(1, 3)), ("frobenius_euler", F(-1, 2)), ("frobenius_euler", F(-1))):
        rec = sequence_table(kind, 20, u).values
        ser = series_oracle(kind, 20, u)
        for n in range(21):
            inputs = {"check": f"{kind} recurrence vs series", "n": str(n)}
            if u is not None:
                inputs["u"] = str(u)
            cases.append(Case(inputs, rec[n], ser[n], F(0), rec[n] == ser[n]))
    return cases


def suite_classical_audit(cfg: VerifyConfig) -> list[Case]:
    return [
        Case({"n": str(row.n)}, row.lhs, row.rhs, None, True, "equal" if row.equal else "mismatch")
        for row in bernoulli_euler_identity_audit(cfg.audit_n_max)
    ]


def suite_tails(cfg: VerifyConfig) -> list[Case]:
    """Doubling the number of terms never leaves the reported bound."""
    cases = []
    jobs = [*_interpolation_jobs(cfg), *_higher_jobs(cfg), *_lfun_jobs(cfg)]
    for job in jobs:

        def run(job=job):
            first = job.evaluate(cfg.policy)
            again = job.evaluate(TailPolicy(fixed_terms=2 * first.terms_used))
            moved = abs(again.value - first.value)
            ok = bool(moved <= first.tail_bound)
            return Case(dict(job.inputs, terms=str(first.terms_used)), first.value, again.value,
                        first.tail_bound, ok)

        cases.append(_guarded(job.inputs, run))
    return cases


SUITES: dict[str, Callable[[VerifyConfig], list[Case]]] = {
    "interpolation": suite_interpolation,
    "higher-order": suite_higher_order,
    "distribution": suite_distribution,
    "lfun": suite_lfun,
    "limits": suite_limits,
    "shift": suite_shift,
    "classical": suite_classical,
    "classical-audit": suite_classical_audit,
    "tails": suite_tails,
}

NON_FATAL = frozenset({"classical-audit"})


def run_suite(name: str, cfg: VerifyConfig | None = None) -> VerificationReport:
    if name not in SUITES:
        raise KeyError(name)
    cfg = cfg or VerifyConfig()
    t0 = time.perf_counter()
    try:
        cases = SUITES[name](cfg)
    except QZetaError as exc:
        cases = [Case({"suite": name}, None, None, None, False, f"{type(exc).__name__}: {exc}")]
    return VerificationReport(name, cases, time.perf_counter() - t0, name not in NON_FATAL, cfg.precision_bits)


def run_all(cfg: VerifyConfig | None = None) -> list[VerificationReport]:
    return [run_suite(name, cfg) for name in SUITES]

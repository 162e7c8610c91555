"""q-Hurwitz, q-Riemann, r-ple and character-twisted q-zeta functions.

Because |u| < 1 every defining series converges geometrically for all
complex s, so evaluation is plain truncated summation with a certified
tail.  The values at s = -n are also available exactly through the
q-Euler closed forms (:func:`zeta_special_value`, :func:`l_q_special_value`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Sequence

from .characters import DirichletCharacter
from .qcore import (
    BracketPowers,
    CertifiedValue,
    DomainError,
    QContext,
    TailPolicy,
    _to_mp,
    certified_sum,
    tail_bound_geometric,
)
from .qeuler import generalized_q_euler, q_euler_higher

__all__ = [
    "ZetaQuery",
    "evaluate",
    "zeta_q_hurwitz",
    "zeta_q_riemann",
    "zeta_q_multiple",
    "zeta_q_multiple_riemann",
    "zeta_special_value",
    "zeta_multiple_shift_check",
    "l_q",
    "l_q_special_value",
    "classical_multiple_series",
    "q_to_1_limit_check",
    "ShiftCheck",
    "ZetaLimitReport",
]


def _check_r(r: int) -> None:
    if not isinstance(r, int) or r < 1:
        raise DomainError(f"order r must be a positive integer, got {r!r}")


def _check_shift(x: Any) -> None:
    re = x.real if hasattr(x, "real") else x
    if not re > 0:
        raise DomainError("x must satisfy Re(x) > 0")


def _composition_tail(abs_u, r: int, offset: int = 0):
    """Majorant for sum_{N >= M} C(N + r - 1 - offset, r - 1) |u|^N.

    Consecutive coefficients shrink in ratio, so from M on every term is at
    most ``|u| (M + r - offset)/(M + 1 - offset)`` times the previous one.
    """

    def tail(M: int):
        k = M - offset
        ratio = abs_u * (k + r) / (k + 1)
        if ratio >= 1:
            return None
        return tail_bound_geometric(comb(k + r - 1, r - 1) * abs_u**M, ratio)

    return tail


def _bracket_series(ctx: QContext, s: Any, x: Any, policy: TailPolicy | None, weight, weight_tail, start: int):
    """sum_{N >= start} weight(N) [x + N]_q^{-s} with a certified tail."""
    ctx = ctx.certified()
    mp = ctx.mp
    powers = BracketPowers(ctx, x, s)

    def term(N):
        w = weight(N)
        return w * powers.power(N) if w != 0 else mp.zero

    def tail(M):
        wt = weight_tail(M)
        if wt is None:
            return mp.inf
        return wt * powers.bound(M) if wt != 0 else mp.zero

    return certified_sum(term, tail, policy or ctx.policy, mp, ctx.precision_bits, start=start)


def zeta_q_multiple(s: Any, x: Any, r: int, ctx: QContext, policy: TailPolicy | None = None) -> CertifiedValue:
    """sum over n_1..n_r >= 0 of u^(n_1+...+n_r) / [x + n_1 + ... + n_r]_q^s.

    Summed as sum_N C(N+r-1, r-1) u^N [x+N]_q^{-s}.
    """
    _check_r(r)
    _check_shift(x)
    ctx = ctx.certified()
    u = ctx.uv
    return _bracket_series(
        ctx,
        s,
        x,
        policy,
        weight=lambda N: comb(N + r - 1, r - 1) * u**N,
        weight_tail=_composition_tail(abs(u), r),
        start=0,
    )


def zeta_q_hurwitz(s: Any, x: Any, ctx: QContext, policy: TailPolicy | None = None) -> CertifiedValue:
    """zeta_q(u|s,x) = sum_{n >= 0} u^n / [n + x]_q^s."""
    return zeta_q_multiple(s, x, 1, ctx, policy)


def zeta_q_multiple_riemann(s: Any, r: int, ctx: QContext, policy: TailPolicy | None = None) -> CertifiedValue:
    """sum over n_1..n_r >= 1 of u^(n_1+...+n_r) / [n_1 + ... + n_r]_q^s.

    Summed over the total K >= r, which arises from C(K-1, r-1) tuples.
    """
    _check_r(r)
    ctx = ctx.certified()
    u = ctx.uv
    return _bracket_series(
        ctx,
        s,
        0,
        policy,
        weight=lambda K: comb(K - 1, r - 1) * u**K,
        weight_tail=_composition_tail(abs(u), r, offset=r),
        start=r,
    )


def zeta_q_riemann(s: Any, ctx: QContext, policy: TailPolicy | None = None) -> CertifiedValue:
    """zeta_q(u|s) = sum_{l >= 1} u^l / [l]_q^s."""
    return zeta_q_multiple_riemann(s, 1, ctx, policy)


def l_q(s: Any, chi: DirichletCharacter, ctx: QContext, policy: TailPolicy | None = None) -> CertifiedValue:
    """l_q(s, chi) = sum_{n >= 1} chi(n) u^n / [n]_q^s."""
    ctx = ctx.certified()
    u = ctx.uv
    abs_u = abs(u)
    vals = [ctx.num(chi(a)) for a in range(chi.modulus)]
    return _bracket_series(
        ctx,
        s,
        0,
        policy,
        weight=lambda n: vals[n % chi.modulus] * u**n,
        weight_tail=lambda M: tail_bound_geometric(abs_u**M, abs_u),
        start=1,
    )


def zeta_special_value(n: int, x: Any, r: int, ctx: QContext):
    """zeta_{r,q}(u|-n, x) = H^{(r)}_{n,q}(u^{-1}, x) / (1-u)^r, in closed form."""
    _check_r(r)
    return q_euler_higher(n, r, x, ctx) / (1 - ctx.uv) ** r


def l_q_special_value(n: int, chi: DirichletCharacter, ctx: QContext):
    """l_q(-n, chi) = H_{n,chi,q}(u^{-1}) / (1-u), in closed form."""
    return generalized_q_euler(n, chi, ctx) / (1 - ctx.uv)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftCheck:
    lhs: CertifiedValue
    rhs: CertifiedValue
    delta: Any

    @property
    def consistent(self) -> bool:
        return bool(self.delta <= self.lhs.tail_bound + self.rhs.tail_bound)


def zeta_multiple_shift_check(s: Any, r: int, ctx: QContext, policy: TailPolicy | None = None) -> ShiftCheck:
    """zeta_{r,q}(u|s) two ways.

    ``lhs`` is the definition u^r * zeta_{r,q}(u|s, r); ``rhs`` sums the
    r-fold series over positive indices directly.
    """
    ctx = ctx.certified()
    lhs = zeta_q_multiple(s, r, r, ctx, policy).scaled(ctx.uv**r)
    rhs = zeta_q_multiple_riemann(s, r, ctx, policy)
    return ShiftCheck(lhs, rhs, abs(lhs.value - rhs.value))


def classical_multiple_series(
    s: Any, x: Any, r: int, u: Any, policy: TailPolicy, precision_bits: int
) -> CertifiedValue:
    """The q = 1 series sum_N C(N+r-1, r-1) u^N (x+N)^{-s} for real x > 0."""
    _check_r(r)
    ctx = QContext(Fraction(1, 2), u, mode="certified", precision_bits=precision_bits)
    mp = ctx.mp
    uu = ctx.uv
    abs_u = abs(uu)
    xv = _to_mp(mp, x)
    if hasattr(xv, "_mpc_") or not xv > 0:
        raise DomainError("the q = 1 series needs real x > 0")
    s_mp = _to_mp(mp, s)
    sigma = mp.re(s_mp)
    grow = max(-sigma, 0)

    def term(N):
        return comb(N + r - 1, r - 1) * uu**N * mp.power(xv + N, -s_mp)

    def tail(M):
        # |term| = C(N+r-1,r-1) |u|^N (x+N)^-sigma; the step ratio decreases in N
        ratio = abs_u * (M + r) / (M + 1) * ((xv + M + 1) / (xv + M)) ** grow
        if ratio >= 1:
            return mp.inf
        first = comb(M + r - 1, r - 1) * abs_u**M * mp.power(xv + M, -sigma)
        return tail_bound_geometric(first, ratio)

    return certified_sum(term, tail, policy, mp, precision_bits)


@dataclass(frozen=True)
class ZetaLimitReport:
    s: Any
    x: Any
    r: int
    u: Any
    ks: tuple[int, ...]
    values: tuple[CertifiedValue, ...]
    limit: CertifiedValue
    deviations: tuple[Any, ...]

    def decays_by(self, factor) -> bool:
        first, last = self.deviations[0], self.deviations[-1]
        noise = self.values[-1].tail_bound + self.limit.tail_bound
        return bool(last <= noise or first >= factor * last)


def q_to_1_limit_check(
    s: Any,
    x: Any,
    r: int,
    u: Any,
    ks: Sequence[int] = tuple(range(4, 13)),
    policy: TailPolicy | None = None,
    precision_bits: int = 128,
) -> ZetaLimitReport:
    """zeta_{r,q_k}(u|s,x) against the q = 1 series along q_k = 1 - 2^-k."""
    policy = policy or TailPolicy.default(precision_bits)
    limit = classical_multiple_series(s, x, r, u, policy, precision_bits)
    values, devs = [], []
    for k in ks:
        ctx = QContext(1 - Fraction(1, 2**k), u, mode="certified", precision_bits=precision_bits)
        v = zeta_q_multiple(s, x, r, ctx, policy)
        values.append(v)
        devs.append(abs(v.value - limit.value))
    return ZetaLimitReport(s, x, r, u, tuple(ks), tuple(values), limit, tuple(devs))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZetaQuery:
    """One evaluation request.

    ``x=None`` selects the Riemann-type sum over positive indices; a
    ``twist`` selects l_q and requires r = 1.
    """

    s: Any
    ctx: QContext
    x: Any = None
    r: int = 1
    twist: DirichletCharacter | None = None
    policy: TailPolicy | None = None

    def __post_init__(self):
        _check_r(self.r)
        if self.twist is not None:
            if self.r != 1:
                raise DomainError("a twisted query must have r = 1")
            if self.x is not None:
                raise DomainError("a twisted query takes no shift x")
        elif self.x is not None:
            _check_shift(self.x)


def evaluate(query: ZetaQuery) -> CertifiedValue:
    if query.twist is not None:
        return l_q(query.s, query.twist, query.ctx, query.policy)
    if query.x is None:
        return zeta_q_multiple_riemann(query.s, query.r, query.ctx, query.policy)
    return zeta_q_multiple(query.s, query.x, query.r, query.ctx, query.policy)

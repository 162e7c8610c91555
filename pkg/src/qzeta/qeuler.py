"""q-Euler (Frobenius-Euler) numbers and polynomials.

Closed forms are obtained by expanding ``[x + m]_q**n`` binomially and
summing each geometric index in closed form; they are finite sums and are
exact in exact mode.  :func:`egf_oracle_coefficient` recomputes the same
coefficients by truncated summation of the defining generating functions
and is the independent check on all of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Iterable, Sequence

from .characters import DirichletCharacter
from .qcore import (
    BracketPowers,
    CertifiedValue,
    DomainError,
    QContext,
    TailPolicy,
    certified_sum,
    geometric_sum,
    q_bracket,
    tail_bound_geometric,
)

__all__ = [
    "EgfSeries",
    "q_euler_number",
    "q_euler_polynomial",
    "q_euler_polynomial_direct",
    "q_euler_higher",
    "generalized_q_euler",
    "distribution_relation_check",
    "egf_oracle_coefficient",
    "egf_functional_equation_check",
    "q_euler_number_limit_check",
    "RelationCheck",
    "FunctionalEquationRow",
    "LimitReport",
]


class EgfSeries:
    """Truncated exponential generating function sum(c[n] t^n/n!, n <= order)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Any]):
        self.coeffs = tuple(coeffs)
        if not self.coeffs:
            raise DomainError("an EgfSeries needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def exponential(cls, c: Any, order: int) -> EgfSeries:
        """e^{c t}."""
        out, p = [], c**0
        for _ in range(order + 1):
            out.append(p)
            p = p * c
        return cls(out)

    def scaled(self, c: Any) -> EgfSeries:
        """F(c t)."""
        out, p = [], c**0
        for a in self.coeffs:
            out.append(a * p)
            p = p * c
        return EgfSeries(out)

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: EgfSeries) -> EgfSeries:
        n = min(self.order, other.order)
        return EgfSeries(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1]))

    def __mul__(self, other: EgfSeries) -> EgfSeries:
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        return EgfSeries(sum(comb(k, j) * a[j] * b[k - j] for j in range(k + 1)) for k in range(n + 1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EgfSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"EgfSeries({list(self.coeffs)!r})"


def _check_x(x: Any, ctx: QContext):
    x = ctx.num(x) if ctx.exact else x
    re = x.real if hasattr(x, "real") else x
    if re < 0:
        raise DomainError("x must satisfy Re(x) >= 0")
    return x


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")


def _inverse_factor(ctx: QContext, l: int):
    """1/(1 - u q^l), the closed form of sum_m u^m q^(l m)."""
    return geometric_sum(ctx.num(1), ctx.uv * ctx.qpow(l))


def q_euler_number(n: int, ctx: QContext):
    """H_{n,q}(u^{-1}) = (1-u)/(1-q)^n * sum_l C(n,l) (-1)^l / (1 - u q^l)."""
    _check_n(n)
    q, u = ctx.qv, ctx.uv
    total = sum((-1) ** l * comb(n, l) * _inverse_factor(ctx, l) for l in range(n + 1))
    return (1 - u) * total / (1 - q) ** n


def _q_euler_numbers(n: int, ctx: QContext) -> list:
    return [q_euler_number(l, ctx) for l in range(n + 1)]


def q_euler_polynomial(n: int, x: Any, ctx: QContext):
    """H_{n,q}(u^{-1}, x) = sum_l C(n,l) [x]_q^(n-l) q^(l x) H_{l,q}(u^{-1}).

    In exact mode q**x must be rational after exponent simplification,
    which in practice means integer x (or a context built by
    :meth:`QContext.with_power`).
    """
    _check_n(n)
    x = _check_x(x, ctx)
    bx = q_bracket(x, ctx)
    numbers = _q_euler_numbers(n, ctx)
    return sum(comb(n, l) * bx ** (n - l) * ctx.qpow(l * x) * numbers[l] for l in range(n + 1))


def q_euler_polynomial_direct(n: int, x: Any, ctx: QContext):
    """(1-u)/(1-q)^n * sum_l C(n,l) (-1)^l q^(l x) / (1 - u q^l).

    Same value as :func:`q_euler_polynomial`, reached without the
    convolution.  Note the denominator is (1-q)^n, not (1-q^n).
    """
    _check_n(n)
    x = _check_x(x, ctx)
    q, u = ctx.qv, ctx.uv
    total = sum((-1) ** l * comb(n, l) * ctx.qpow(l * x) * _inverse_factor(ctx, l) for l in range(n + 1))
    return (1 - u) * total / (1 - q) ** n


def q_euler_higher(n: int, r: int, x: Any, ctx: QContext):
    """Order-r polynomial H^{(r)}_{n,q}(u^{-1}, x).

    (1-u)^r/(1-q)^n * sum_l C(n,l) (-1)^l q^(l x) (1 - u q^l)^(-r)
    """
    _check_n(n)
    if not isinstance(r, int) or r < 1:
        raise DomainError(f"order r must be a positive integer, got {r!r}")
    x = _check_x(x, ctx)
    q, u = ctx.qv, ctx.uv
    total = sum((-1) ** l * comb(n, l) * ctx.qpow(l * x) * _inverse_factor(ctx, l) ** r for l in range(n + 1))
    return (1 - u) ** r * total / (1 - q) ** n


def _chi_value(chi: DirichletCharacter, a: int, ctx: QContext):
    v = chi(a)
    if ctx.exact and not isinstance(v, Fraction):
        raise DomainError("complex character values need certified mode")
    return ctx.num(v)


def generalized_q_euler(n: int, chi: DirichletCharacter, ctx: QContext, include_zero: bool = False):
    """H_{n,chi,q}(u^{-1}), coefficients of (1-u) sum_m chi(m) u^m e^{[m]_q t}.

    By default the sum runs over m >= 1, which makes
    l_q(-n, chi) = H_{n,chi,q}(u^{-1})/(1-u) hold for every n >= 0.  With
    ``include_zero=True`` the m = 0 term is kept as well; the two differ
    only when chi(0) != 0 (modulus 1) and n = 0.
    """
    _check_n(n)
    d = chi.modulus
    q, u = ctx.qv, ctx.uv
    residues = range(0, d) if include_zero else range(1, d + 1)
    ud = u**d
    weights = [(a, _chi_value(chi, a, ctx) * u**a) for a in residues]
    total = 0
    for l in range(n + 1):
        inner = sum(w * ctx.qpow(l * a) for a, w in weights if w != 0)
        inner = geometric_sum(inner, ud * ctx.qpow(l * d))
        total += (-1) ** l * comb(n, l) * inner
    return (1 - u) * total / (1 - q) ** n


@dataclass(frozen=True)
class RelationCheck:
    lhs: Any
    rhs: Any
    equal: bool


def distribution_relation_check(n: int, chi: DirichletCharacter, ctx: QContext) -> RelationCheck:
    """Both sides of the residue-class relation

        H_{n,chi,q}(u^{-1}) = (1-u)/(1-u^d) [d]_q^n sum_a chi(a) u^a H_{n,q^d}(u^{-d}, a/d)

    evaluated exactly.  The left side keeps the m = 0 term, matching the
    a = 0 term on the right.
    """
    if not ctx.exact:
        raise DomainError("the distribution relation is checked in exact mode")
    _check_n(n)
    d = chi.modulus
    u = ctx.uv
    lhs = generalized_q_euler(n, chi, ctx, include_zero=True)
    ctx_d = ctx.with_power(d)
    acc = Fraction(0)
    for a in range(d):
        c = _chi_value(chi, a, ctx)
        if c:
            acc += c * u**a * q_euler_polynomial(n, Fraction(a, d), ctx_d)
    rhs = (1 - u) / (1 - u**d) * q_bracket(d, ctx) ** n * acc
    return RelationCheck(lhs, rhs, lhs == rhs)


# ---------------------------------------------------------------------------
# generating-function oracle

_KINDS = ("plain", "poly", "higher", "twisted")


def egf_oracle_coefficient(
    kind: str,
    n: int,
    ctx: QContext,
    policy: TailPolicy | None = None,
    *,
    x: Any = 0,
    r: int = 1,
    chi: DirichletCharacter | None = None,
    include_zero: bool = False,
) -> CertifiedValue:
    """Coefficient of t^n/n! by direct summation of the defining series.

    plain    (1-u) sum_l u^l [l]^n
    poly     (1-u) sum_l u^l [x+l]^n
    higher   (1-u)^r sum_N C(N+r-1, r-1) u^N [x+N]^n
    twisted  (1-u) sum_m chi(m) u^m [m]^n      (m >= 1 unless include_zero)

    The r nested indices of the higher-order series are regrouped by their
    total N, each total occurring C(N+r-1, r-1) times.
    """
    if kind not in _KINDS:
        raise DomainError(f"kind must be one of {_KINDS}")
    _check_n(n)
    ctx = ctx.certified()
    policy = policy or ctx.policy
    mp = ctx.mp
    u = ctx.uv
    abs_u = abs(u)
    start = 0
    if kind == "plain":
        x, r = 0, 1
    elif kind == "poly":
        r = 1
    elif kind == "twisted":
        if chi is None:
            raise DomainError("the twisted oracle needs a character")
        x, r = 0, 1
        start = 0 if include_zero else 1
    if kind in ("poly", "higher"):
        _check_x(x, ctx)
    if r < 1:
        raise DomainError("order r must be positive")
    powers = BracketPowers(ctx, x, -n)

    if kind == "twisted":
        chi_vals = [ctx.num(chi(a)) for a in range(chi.modulus)]

        def weight(N):
            return chi_vals[N % chi.modulus] * u**N

        def weight_tail(M):
            return tail_bound_geometric(abs_u**M, abs_u)

    else:

        def weight(N):
            return comb(N + r - 1, r - 1) * u**N

        def weight_tail(M):
            ratio = abs_u * (M + r) / (M + 1)
            if ratio >= 1:
                return mp.inf
            return tail_bound_geometric(comb(M + r - 1, r - 1) * abs_u**M, ratio)

    def term(N):
        w = weight(N)
        return w * powers.power(N) if w != 0 else mp.zero

    def tail(M):
        wt = weight_tail(M)
        return wt * powers.bound(M) if wt != 0 else mp.zero

    raw = certified_sum(term, tail, policy, mp, ctx.precision_bits, start=start)
    return raw.scaled((1 - u) ** r)


# ---------------------------------------------------------------------------
# consistency reports


@dataclass(frozen=True)
class FunctionalEquationRow:
    n: int
    series: Any
    convolution: Any
    direct: Any
    equal: bool


def egf_functional_equation_check(n_max: int, x: Any, ctx: QContext) -> list[FunctionalEquationRow]:
    """Compare three routes to H_{n,q}(u^{-1}, x) for n <= n_max.

    ``series``       coefficients of e^{[x]_q t} * F(q^x t) as an EgfSeries product
    ``convolution``  :func:`q_euler_polynomial`
    ``direct``       :func:`q_euler_polynomial_direct`
    """
    _check_n(n_max)
    x = _check_x(x, ctx)
    base = EgfSeries(_q_euler_numbers(n_max, ctx))
    product = EgfSeries.exponential(q_bracket(x, ctx), n_max) * base.scaled(ctx.qpow(x))
    rows = []
    for n in range(n_max + 1):
        conv = q_euler_polynomial(n, x, ctx)
        direct = q_euler_polynomial_direct(n, x, ctx)
        if ctx.exact:
            equal = product[n] == conv == direct
        else:
            tol = _roundoff_scale(n, x, ctx)
            equal = abs(product[n] - conv) <= tol and abs(conv - direct) <= tol
        rows.append(FunctionalEquationRow(n, product[n], conv, direct, bool(equal)))
    return rows


def _roundoff_scale(n: int, x: Any, ctx: QContext):
    # crude cancellation estimate for the alternating closed forms
    mp = ctx.mp
    qx = abs(ctx.qpow(x))
    growth = (2 * max(mp.one, qx) / abs(1 - ctx.qv)) ** n
    return mp.ldexp(1, -ctx.precision_bits) * (n + 2) * growth / (1 - abs(ctx.uv))


@dataclass(frozen=True)
class LimitReport:
    n: int
    u: Fraction
    ks: tuple[int, ...]
    deviations: tuple[Fraction, ...]
    limit: Fraction

    def decay_ratio(self):
        first, last = self.deviations[0], self.deviations[-1]
        if last == 0:
            return None
        return first / last

    def decays_by(self, factor) -> bool:
        last = self.deviations[-1]
        return last == 0 or self.deviations[0] >= factor * last


def q_euler_number_limit_check(n: int, u: Any, ks: Sequence[int] = tuple(range(4, 13))) -> LimitReport:
    """|H_{n,q_k}(u^{-1}) - H_n(u^{-1})| along q_k = 1 - 2^-k, exactly.

    The classical value comes from :func:`qzeta.classical.frobenius_euler`
    with argument 1/u.
    """
    from .classical import frobenius_euler

    u = Fraction(u)
    if u == 0:
        raise DomainError("the q -> 1 comparison needs u != 0")
    limit = frobenius_euler(n, 1 / u)
    devs = []
    for k in ks:
        ctx = QContext(1 - Fraction(1, 2**k), u)
        devs.append(abs(q_euler_number(n, ctx) - limit))
    return LimitReport(n, u, tuple(ks), tuple(devs), limit)

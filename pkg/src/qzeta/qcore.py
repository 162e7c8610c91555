"""Scalar kernels shared by every evaluator.

Two arithmetic modes exist.  In ``exact`` mode all values are
:class:`fractions.Fraction`; q and u are rationals and every q-power has an
integer exponent.  In ``certified`` mode values are mpmath numbers carried at
``precision_bits + GUARD_BITS`` and every truncated series comes back as a
:class:`CertifiedValue` with a rigorous bound on what was left out.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Any, Callable

import mpmath
from mpmath.libmp import prec_to_dps, to_rational

__all__ = [
    "GUARD_BITS",
    "DEFAULT_PREC",
    "QZetaError",
    "DomainError",
    "NonRepresentableError",
    "TruncationError",
    "TailPolicy",
    "QContext",
    "CertifiedValue",
    "q_bracket",
    "qpow_exact",
    "geometric_sum",
    "tail_bound_geometric",
    "certified_sum",
    "BracketPowers",
    "to_fraction",
    "parse_scalar",
    "scalar_to_json",
    "scalar_from_json",
    "format_exact",
    "format_bound",
]

GUARD_BITS = 32


def _default_prec() -> int:
    raw = os.environ.get("QZETA_DEFAULT_PREC", "128")
    try:
        return max(53, int(raw))
    except ValueError:
        return 128


DEFAULT_PREC = _default_prec()


class QZetaError(Exception):
    """Base class for library errors."""


class DomainError(QZetaError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NonRepresentableError(DomainError):
    """An exact-mode q-power would be irrational."""


class TruncationError(QZetaError, ArithmeticError):
    """The requested tail bound was not reached within the term cap."""


# ---------------------------------------------------------------------------
# scalar conversion


def to_fraction(value: Any) -> Fraction:
    """Exact rational from int, Fraction, float or a "p/q" / decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"not a rational number: {value!r}") from None
    if isinstance(value, complex) or hasattr(value, "_mpc_"):
        if value.imag == 0:
            return to_fraction(value.real)
        raise DomainError(f"complex value {value!r} is not allowed in exact mode")
    if hasattr(value, "_mpf_"):
        if not mpmath.isfinite(value):
            raise DomainError(f"non-finite value {value!r}")
        p, q = to_rational(value._mpf_)
        return Fraction(int(p), int(q))
    raise DomainError(f"cannot interpret {value!r} as a rational")


def parse_scalar(text: str) -> Fraction | complex:
    """Parse a command-line scalar.

    Rationals and decimals become exact Fractions ("0.1" is exactly 1/10);
    anything Python's ``complex`` accepts with a nonzero imaginary part
    becomes a complex number, usable only in certified mode.
    """
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        z = complex(text.replace("i", "j") if "j" not in text else text)
    except ValueError:
        raise DomainError(f"cannot parse scalar {text!r}") from None
    if z.imag == 0:
        return Fraction(z.real)
    return z


def _to_mp(mp: mpmath.ctx_mp.MPContext, value: Any):
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, bool):
        return mp.mpf(int(value))
    if isinstance(value, int):
        return mp.mpf(value)
    if isinstance(value, complex):
        return mp.mpc(value)
    if hasattr(value, "_mpc_"):
        return mp.mpc(value)
    if hasattr(value, "_mpf_") or isinstance(value, float):
        return mp.mpf(value)
    if isinstance(value, str):
        return _to_mp(mp, parse_scalar(value))
    return mp.convert(value)


def _real_if_possible(mp, value):
    if hasattr(value, "_mpc_") and value.imag == 0:
        return mp.re(value)
    return value


def _is_real(value: Any) -> bool:
    if isinstance(value, (Fraction, int, float)):
        return True
    if hasattr(value, "_mpf_"):
        return True
    return value.imag == 0


# ---------------------------------------------------------------------------
# policies and contexts


@dataclass(frozen=True)
class TailPolicy:
    """How far to sum a series.

    Exactly one of ``target_bound`` (stop once the certified bound is below
    it) or ``fixed_terms`` (sum exactly this many terms) is set.
    """

    target_bound: Any = None
    fixed_terms: int | None = None
    term_cap: int = 10**6

    def __post_init__(self):
        if (self.target_bound is None) == (self.fixed_terms is None):
            raise DomainError("TailPolicy needs exactly one of target_bound or fixed_terms")
        if self.target_bound is not None and not self.target_bound > 0:
            raise DomainError("target_bound must be positive")
        if self.fixed_terms is not None and self.fixed_terms < 0:
            raise DomainError("fixed_terms must be nonnegative")
        if self.term_cap < 1:
            raise DomainError("term_cap must be positive")

    @classmethod
    def default(cls, precision_bits: int) -> TailPolicy:
        return cls(target_bound=Fraction(1, 2 ** (precision_bits // 2)))


_MODES = ("exact", "certified")


@dataclass(frozen=True)
class QContext:
    """Parameter bundle threaded through every evaluation.

    ``q_root`` records that ``q == base**k`` exactly, so that ``q**x`` can be
    evaluated as ``base**(k*x)``; this is what lets ``(q**d)**(a/d)`` stay
    rational.  Build it with :meth:`with_power` rather than by hand.
    """

    q: Any
    u: Any
    mode: str = "exact"
    precision_bits: int = DEFAULT_PREC
    truncation: TailPolicy | None = None
    q_root: tuple[Any, int] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode not in _MODES:
            raise DomainError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if int(self.precision_bits) < 53:
            raise DomainError("precision_bits must be at least 53")
        if self.mode == "exact":
            q = to_fraction(self.q)
            u = to_fraction(self.u)
            if not 0 < q < 1:
                raise DomainError("q must satisfy 0<q<1 in exact mode")
            if not abs(u) < 1:
                raise DomainError("u must satisfy |u|<1")
        else:
            q, u = (
                parse_scalar(v) if isinstance(v, str) else Fraction(v) if isinstance(v, int) else v
                for v in (self.q, self.u)
            )
            if q == 0:
                raise DomainError("q must be nonzero")
            if not abs(q) < 1:
                raise DomainError("q must satisfy 0<|q|<1")
            if not abs(u) < 1:
                raise DomainError("u must satisfy |u|<1")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "precision_bits", int(self.precision_bits))

    # -- derived views -----------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    @property
    def working_bits(self) -> int:
        return self.precision_bits + GUARD_BITS

    @cached_property
    def mp(self) -> mpmath.ctx_mp.MPContext:
        # private context with fixed precision: safe to share between threads
        ctx = mpmath.MPContext()
        ctx.prec = self.working_bits
        return ctx

    @property
    def policy(self) -> TailPolicy:
        return self.truncation or TailPolicy.default(self.precision_bits)

    @cached_property
    def qv(self):
        return self.num(self.q)

    @cached_property
    def uv(self):
        return self.num(self.u)

    def num(self, value: Any):
        """``value`` in this context's arithmetic (Fraction or mpmath)."""
        if self.exact:
            return to_fraction(value)
        return _to_mp(self.mp, value)

    def qpow(self, exponent: Any):
        """q**exponent, simplifying through ``q_root`` when present."""
        base, k = self.q_root if self.q_root is not None else (self.q, 1)
        if self.exact:
            return qpow_exact(to_fraction(base), to_fraction(exponent) * k)
        e = exponent * k if k != 1 else exponent
        if isinstance(e, Fraction) and e.denominator == 1:
            e = int(e)
        b = _to_mp(self.mp, base)
        if isinstance(e, int):
            return b**e
        return self.mp.power(b, _to_mp(self.mp, e))

    def certified(self) -> QContext:
        if not self.exact:
            return self
        return replace(self, mode="certified")

    def with_power(self, d: int) -> QContext:
        """Context for base ``q**d`` and weight ``u**d``."""
        base, k = self.q_root if self.q_root is not None else (self.q, 1)
        if self.exact:
            qd, ud = self.q**d, self.u**d
        else:
            qd = self.qpow(d)
            ud = self.uv**d
        return replace(self, q=qd, u=ud, q_root=(base, k * d))


# ---------------------------------------------------------------------------
# primitives


def qpow_exact(q: Fraction, x: Any) -> Fraction:
    """q**x for rational q in (0, 1) and integer x.

    Non-integer exponents are refused even when the root happens to be
    rational; callers are expected to simplify exponents first.
    """
    q = to_fraction(q)
    x = to_fraction(x)
    if not 0 < q < 1:
        raise DomainError("q must satisfy 0<q<1 in exact mode")
    if x.denominator != 1:
        raise NonRepresentableError(f"q**{x} is not representable exactly; use certified mode")
    return q ** int(x)


def q_bracket(x: Any, ctx: QContext):
    """The q-number (1 - q**x)/(1 - q)."""
    return (1 - ctx.qpow(x)) / (1 - ctx.qv)


def geometric_sum(a, ratio):
    """a/(1 - ratio), the value of sum(a * ratio**m for m >= 0)."""
    if not abs(ratio) < 1:
        raise DomainError(f"geometric ratio must satisfy |ratio|<1, got {ratio}")
    return a / (1 - ratio)


def tail_bound_geometric(first_omitted_magnitude, ratio_magnitude):
    """Upper bound for a tail whose terms shrink at least by ``ratio_magnitude``."""
    if ratio_magnitude < 0 or not ratio_magnitude < 1:
        raise DomainError(f"ratio magnitude must lie in [0, 1), got {ratio_magnitude}")
    if first_omitted_magnitude == 0:
        return first_omitted_magnitude
    return first_omitted_magnitude / (1 - ratio_magnitude)


# ---------------------------------------------------------------------------
# certified summation


@dataclass(frozen=True)
class CertifiedValue:
    """Approximate value with a rigorous bound on |value - true value|.

    ``tail_bound`` covers the omitted tail plus an allowance of
    ``2**-prec_bits`` relative to the sum of absolute terms for rounding.
    """

    value: Any
    tail_bound: Any
    terms_used: int
    prec_bits: int

    def error_to(self, other: Any):
        mp = self.value.context
        return abs(self.value - _to_mp(mp, other))

    def contains(self, other: Any, slack: Any = 0) -> bool:
        return bool(self.error_to(other) <= self.tail_bound + slack)

    def scaled(self, factor: Any) -> CertifiedValue:
        mp = self.value.context
        f = _to_mp(mp, factor)
        return CertifiedValue(self.value * f, self.tail_bound * abs(f), self.terms_used, self.prec_bits)

    def to_json(self) -> dict:
        return {
            "value": scalar_to_json(self.value, self.prec_bits),
            "tail_bound": format_bound(self.tail_bound),
            "terms_used": self.terms_used,
            "mode": "certified",
        }


def certified_sum(
    term: Callable[[int], Any],
    tail: Callable[[int], Any],
    policy: TailPolicy,
    mp: mpmath.ctx_mp.MPContext,
    prec_bits: int,
    start: int = 0,
) -> CertifiedValue:
    """Sum ``term(m)`` for m = start, start+1, ... until the policy is met.

    ``tail(M)`` must return an upper bound on ``sum(|term(m)| for m >= M)``
    (``mp.inf`` while no bound is available yet).  Terms are accumulated in
    ascending order and added with ``mp.fsum``, so the result is
    reproducible bit for bit at a given precision.
    """
    eps = mp.ldexp(1, -prec_bits)
    target = None if policy.target_bound is None else _to_mp(mp, policy.target_bound)
    terms = []
    abs_sum = mp.zero
    m = start
    while True:
        t = tail(m)
        if policy.fixed_terms is not None:
            if len(terms) >= policy.fixed_terms:
                break
        else:
            if t + abs_sum * eps <= target:
                break
            if len(terms) >= policy.term_cap:
                raise TruncationError(
                    f"tail bound {format_bound(t)} still above target after {len(terms)} terms"
                )
        v = term(m)
        terms.append(v)
        abs_sum += abs(v)
        m += 1
    value = mp.fsum(terms) if terms else mp.zero
    # (1 + eps) covers rounding inside the bound arithmetic itself
    bound = (t + abs_sum * eps) * (1 + eps)
    return CertifiedValue(value, bound, len(terms), prec_bits)


class BracketPowers:
    """Terms ``[m + x]_q ** -s`` and majorants for their tails.

    For real q in (0, 1) and real x the bracket is positive and increases
    from ``[M + x]_q`` towards ``1/(1 - q)``, so ``|[m + x]**-s|`` over
    m >= M is bounded by the larger of the two endpoint values.  Otherwise
    the bound comes from ``1 - rho <= |1 - q**(m+x)| <= 1 + rho`` with
    ``rho = |q|**M * |q**x|`` and ``|b**-s| <= |b|**-Re(s) * exp(pi*|Im(s)|)``.
    """

    def __init__(self, ctx: QContext, x: Any, s: Any):
        mp = ctx.mp
        self.mp = mp
        self.q = _real_if_possible(mp, ctx.qv)
        self.qx = _real_if_possible(mp, ctx.qpow(x))
        self.one_minus_q = 1 - self.q
        if isinstance(s, Fraction) and s.denominator == 1:
            s = int(s)
        if isinstance(s, float) and s.is_integer():
            s = int(s)
        self.int_power = -s if isinstance(s, int) else None
        self.neg_s = None if self.int_power is not None else -_to_mp(mp, s)
        s_mp = _to_mp(mp, s)
        self.sigma = mp.re(s_mp)
        self.abs_t = abs(mp.im(s_mp))
        self.real = _is_real(self.q) and self.q > 0 and _is_real(self.qx)
        self.abs_q = abs(self.q)
        self.abs_qx = abs(self.qx)
        self.abs_one_minus_q = abs(self.one_minus_q)

    def bracket(self, m: int):
        return (1 - self.q**m * self.qx) / self.one_minus_q

    def power(self, m: int):
        b = self.bracket(m)
        if self.int_power is not None:
            if b == 0:
                if self.int_power < 0:
                    raise DomainError(f"[{m} + x]_q vanishes and Re(s) > 0")
                return self.mp.one if self.int_power == 0 else self.mp.zero
            return b**self.int_power
        if b == 0:
            if self.sigma > 0:
                raise DomainError(f"[{m} + x]_q vanishes and Re(s) > 0")
            if self.sigma == 0:
                raise DomainError("0**s undefined for purely imaginary s")
            return self.mp.zero
        return self.mp.power(b, self.neg_s)

    def _endpoint(self, b):
        mp = self.mp
        if b == 0:
            if self.sigma > 0:
                return mp.inf
            return mp.one if self.sigma == 0 else mp.zero
        return mp.power(b, -self.sigma)

    def bound(self, M: int):
        """Upper bound of ``|[m + x]_q ** -s|`` over all integers m >= M."""
        mp = self.mp
        if self.real:
            lo = self.bracket(M)
            if lo < 0:
                return mp.inf
            hi = 1 / self.one_minus_q
            return max(self._endpoint(lo), self._endpoint(hi))
        rho = self.abs_q**M * self.abs_qx
        if rho >= 1:
            return mp.inf
        lo = (1 - rho) / self.abs_one_minus_q
        hi = (1 + rho) / self.abs_one_minus_q
        return max(self._endpoint(lo), self._endpoint(hi)) * mp.exp(mp.pi * self.abs_t)


# ---------------------------------------------------------------------------
# serialization


def format_exact(value: Fraction) -> str:
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_bound(bound: Any) -> str:
    """Decimal string that is never below ``bound``."""
    if isinstance(bound, Fraction):
        bound = _FMT.mpf(bound.numerator) / bound.denominator
    b = _FMT.mpf(bound)
    if b == 0:
        return "0"
    if _FMT.isinf(b):
        return "inf"
    # 64-bit conversion and 15-digit printing each lose < 1e-15 relative
    return _FMT.nstr(b * (1 + _FMT.mpf(10) ** -13), 15, min_fixed=1, max_fixed=0)


def _format_real(x: Any, prec_bits: int) -> str:
    return x.context.nstr(x, prec_to_dps(prec_bits), min_fixed=-6, max_fixed=20)


def scalar_to_json(value: Any, prec_bits: int = DEFAULT_PREC):
    """Exact scalars as "p/q" strings, approximate ones as re/im objects."""
    if isinstance(value, (Fraction, int)):
        return format_exact(value)
    if isinstance(value, (float, complex)):
        value = _FMT.mpc(value)
    mp = value.context
    return {
        "re": _format_real(mp.re(value), prec_bits),
        "im": _format_real(mp.im(value), prec_bits),
        "prec_bits": prec_bits,
    }


def scalar_from_json(obj: Any):
    """Inverse of :func:`scalar_to_json`."""
    if isinstance(obj, str):
        return to_fraction(obj)
    if isinstance(obj, dict) and {"re", "im", "prec_bits"} <= obj.keys():
        mp = mpmath.MPContext()
        mp.prec = int(obj["prec_bits"]) + GUARD_BITS
        return mp.mpc(mp.mpf(obj["re"]), mp.mpf(obj["im"]))
    raise DomainError(f"not a serialized scalar: {obj!r}")


# fixed-precision context used only for formatting; never reconfigured
_FMT = mpmath.MPContext()
_FMT.prec = 64

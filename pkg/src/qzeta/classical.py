"""Classical Bernoulli, Euler and Frobenius-Euler numbers (the q -> 1 anchors).

Conventions follow the exponential generating functions

    t/(e^t - 1)           -> B_n   (so B_1 = -1/2)
    2/(e^t + 1)           -> E_n   (so E_1 = -1/2; not the secant numbers)
    (1 - u)/(e^t - u)     -> H_n(u)

All values are exact :class:`fractions.Fraction`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable

from .qcore import DomainError, format_exact, to_fraction

__all__ = [
    "SequenceTable",
    "AuditRow",
    "bernoulli",
    "euler_number",
    "frobenius_euler",
    "sequence_table",
    "series_oracle",
    "bernoulli_euler_identity_audit",
]


class _RecurrenceCache:
    """Append-only memo for a sequence defined by a full-history recurrence."""

    def __init__(self, step: Callable[[list[Fraction], int], Fraction]):
        self._step = step
        self._values: list[Fraction] = [Fraction(1)]
        self._lock = threading.Lock()

    def upto(self, n: int) -> tuple[Fraction, ...]:
        if n < 0:
            raise DomainError("index must be nonnegative")
        if n >= len(self._values):
            with self._lock:
                vals = self._values
                while len(vals) <= n:
                    vals.append(self._step(vals, len(vals)))
        return tuple(self._values[: n + 1])

    def __getitem__(self, n: int) -> Fraction:
        if n < 0:
            raise DomainError("index must be nonnegative")
        if n < len(self._values):
            return self._values[n]
        return self.upto(n)[n]


def _bernoulli_step(b: list[Fraction], n: int) -> Fraction:
    # sum_{k=0}^{n} C(n+1, k) B_k = 0
    return -sum(comb(n + 1, k) * b[k] for k in range(n)) / (n + 1)


def _euler_step(e: list[Fraction], n: int) -> Fraction:
    # (e^t + 1) * E(t) = 2  =>  2 E_n + sum_{k<n} C(n, k) E_k = 0
    return -sum(comb(n, k) * e[k] for k in range(n)) / 2


def _frobenius_step(u: Fraction) -> Callable[[list[Fraction], int], Fraction]:
    def step(h: list[Fraction], n: int) -> Fraction:
        # (e^t - u) * H(t) = 1 - u  =>  (1 - u) H_n = -sum_{k<n} C(n, k) H_k
        return sum(comb(n, k) * h[k] for k in range(n)) / (u - 1)

    return step


_BERNOULLI = _RecurrenceCache(_bernoulli_step)
_EULER = _RecurrenceCache(_euler_step)
_FROBENIUS: dict[Fraction, _RecurrenceCache] = {}
_FROBENIUS_LOCK = threading.Lock()


def _frobenius_cache(u: Fraction) -> _RecurrenceCache:
    with _FROBENIUS_LOCK:
        cache = _FROBENIUS.get(u)
        if cache is None:
            cache = _FROBENIUS[u] = _RecurrenceCache(_frobenius_step(u))
        return cache


def bernoulli(n: int) -> Fraction:
    return _BERNOULLI[n]


def euler_number(n: int) -> Fraction:
    """E_n as the coefficient of t^n/n! in 2/(e^t + 1)."""
    return _EULER[n]


def frobenius_euler(n: int, u) -> Fraction:
    """H_n(u), the coefficient of t^n/n! in (1 - u)/(e^t - u)."""
    u = to_fraction(u)
    if u == 1:
        raise DomainError("Frobenius-Euler numbers need u != 1")
    return _frobenius_cache(u)[n]


@dataclass(frozen=True)
class SequenceTable:
    kind: str
    values: tuple[Fraction, ...]
    u: Fraction | None = None


def sequence_table(kind: str, n_max: int, u=None) -> SequenceTable:
    if kind == "bernoulli":
        return SequenceTable(kind, _BERNOULLI.upto(n_max))
    if kind == "euler":
        return SequenceTable(kind, _EULER.upto(n_max))
    if kind == "frobenius_euler":
        u = to_fraction(u)
        if u == 1:
            raise DomainError("Frobenius-Euler numbers need u != 1")
        return SequenceTable(kind, _frobenius_cache(u).upto(n_max), u)
    raise DomainError(f"unknown sequence kind {kind!r}")


# ---------------------------------------------------------------------------
# independent route: ordinary power series division


def _ps_divide(num: list[Fraction], den: list[Fraction], order: int) -> list[Fraction]:
    if den[0] == 0:
        raise DomainError("power series denominator has zero constant term")
    out: list[Fraction] = []
    for n in range(order + 1):
        acc = num[n] - sum(out[k] * den[n - k] for k in range(n))
        out.append(acc / den[0])
    return out


def series_oracle(kind: str, n_max: int, u=None) -> list[Fraction]:
    """Coefficients n! [t^n] of the defining generating function.

    Works with ordinary (not exponential) power series, so it shares no
    code path with the recurrences above.
    """
    exp_minus_const = [Fraction(1, factorial(k)) for k in range(n_max + 2)]
    if kind == "bernoulli":
        # t/(e^t - 1) = 1 / ((e^t - 1)/t)
        den = exp_minus_const[1:]
        num = [Fraction(1)] + [Fraction(0)] * n_max
    elif kind == "euler":
        den = [Fraction(2)] + exp_minus_const[1 : n_max + 1]
        num = [Fraction(2)] + [Fraction(0)] * n_max
    elif kind == "frobenius_euler":
        u = to_fraction(u)
        if u == 1:
            raise DomainError("Frobenius-Euler numbers need u != 1")
        den = [1 - u] + exp_minus_const[1 : n_max + 1]
        num = [1 - u] + [Fraction(0)] * n_max
    else:
        raise DomainError(f"unknown sequence kind {kind!r}")
    coeffs = _ps_divide(num, den, n_max)
    return [c * factorial(n) for n, c in enumerate(coeffs)]


# ---------------------------------------------------------------------------
# audit of H_n(-1) = sum_k C(n+1, k) 2^k B_k


@dataclass(frozen=True)
class AuditRow:
    n: int
    lhs: Fraction
    rhs: Fraction
    equal: bool

    def to_json(self) -> dict:
        return {"n": self.n, "lhs": format_exact(self.lhs), "rhs": format_exact(self.rhs), "equal": self.equal}


def bernoulli_euler_identity_audit(n_max: int) -> list[AuditRow]:
    """Both sides of H_n(-1) = sum_{k<=n} C(n+1, k) 2^k B_k for n <= n_max.

    This is a report, not a check: the identity does not hold as written
    (already at n = 1 the sides are -1/2 and -1).
    """
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    rows = []
    for n in range(n_max + 1):
        lhs = frobenius_euler(n, -1)
        rhs = sum(comb(n + 1, k) * 2**k * bernoulli(k) for k in range(n + 1))
        rows.append(AuditRow(n, lhs, Fraction(rhs), lhs == rhs))
    return rows

"""Dirichlet characters given as explicit value tables."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Any

from .qcore import DomainError, parse_scalar, to_fraction

__all__ = ["DirichletCharacter", "CharacterError", "principal", "quadratic_mod3", "quadratic_mod4", "builtin", "load_character"]

_TOL = 1e-12


class CharacterError(DomainError):
    """A value table violates one of the Dirichlet character axioms."""

    def __init__(self, axiom: str, detail: str):
        super().__init__(f"{axiom}: {detail}")
        self.axiom = axiom


def _close(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(complex(a) - complex(b)) <= _TOL


def _group_exponent(d: int) -> int:
    units = [a for a in range(d) if gcd(a, d) == 1]
    exponent = 1
    for a in units:
        k, x = 1, a % d
        while x != 1 % d:
            x = x * a % d
            k += 1
        exponent = exponent * k // gcd(exponent, k)
    return exponent


@dataclass(frozen=True)
class DirichletCharacter:
    """chi mod d stored as its values on 0, 1, ..., d-1.

    Rational values are kept as Fractions so that real characters work in
    exact mode; anything else is stored as a Python complex.
    """

    modulus: int
    values: tuple[Any, ...]
    name: str = ""

    def __post_init__(self):
        d = self.modulus
        if not isinstance(d, int) or d < 1:
            raise CharacterError("modulus", f"must be a positive integer, got {d!r}")
        if len(self.values) != d:
            raise CharacterError("length", f"expected {d} values, got {len(self.values)}")
        vals = tuple(_normalize(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        self._check_axioms()

    def _check_axioms(self) -> None:
        d, vals = self.modulus, self.values
        for a, v in enumerate(vals):
            unit = gcd(a, d) == 1
            if unit and _close(v, Fraction(0)):
                raise CharacterError("support", f"chi({a}) = 0 but gcd({a}, {d}) = 1")
            if not unit and not _close(v, Fraction(0)):
                raise CharacterError("support", f"chi({a}) = {v} but gcd({a}, {d}) > 1")
        if not _close(vals[1 % d], Fraction(1)):
            raise CharacterError("normalization", f"chi(1) = {vals[1 % d]}, expected 1")
        units = [a for a in range(d) if gcd(a, d) == 1]
        for a in units:
            for b in units:
                if not _close(vals[a * b % d], vals[a] * vals[b]):
                    raise CharacterError(
                        "multiplicativity", f"chi({a}*{b}) = {vals[a * b % d]} != chi({a})*chi({b})"
                    )
        exponent = _group_exponent(d)
        for a in units:
            v = vals[a]
            if not _close(v**exponent, Fraction(1)):
                raise CharacterError("root of unity", f"chi({a})**{exponent} = {v**exponent}, expected 1")

    def __call__(self, n: int):
        return self.values[n % self.modulus]

    @property
    def is_rational(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.values)

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v)
            return {"re": repr(v.real), "im": repr(v.imag)}

        return {"modulus": self.modulus, "values": [enc(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict, name: str = "") -> DirichletCharacter:
        try:
            d = obj["modulus"]
            raw = obj["values"]
        except (KeyError, TypeError):
            raise CharacterError("format", 'expected {"modulus": d, "values": [...]}') from None
        return cls(d, tuple(raw), name)


def _normalize(v: Any):
    if isinstance(v, dict):
        try:
            z = complex(float(Fraction(str(v["re"]))), float(Fraction(str(v["im"]))))
        except (KeyError, ValueError):
            raise CharacterError("format", f"bad complex value {v!r}") from None
        return _normalize(z)
    if isinstance(v, str):
        try:
            v = parse_scalar(v)
        except DomainError:
            raise CharacterError("format", f"bad value {v!r}") from None
    if isinstance(v, complex):
        if v.imag == 0:
            v = v.real
        else:
            return v
    if isinstance(v, float):
        # snap floating values that are exactly 0 or +-1
        if v in (0.0, 1.0, -1.0):
            return Fraction(int(v))
        return complex(v)
    try:
        return to_fraction(v)
    except DomainError:
        raise CharacterError("format", f"bad value {v!r}") from None


def principal(d: int) -> DirichletCharacter:
    vals = tuple(Fraction(1) if gcd(a, d) == 1 else Fraction(0) for a in range(d))
    return DirichletCharacter(d, vals, f"principal mod {d}")


def quadratic_mod3() -> DirichletCharacter:
    return DirichletCharacter(3, (0, 1, -1), "quadratic mod 3")


def quadratic_mod4() -> DirichletCharacter:
    return DirichletCharacter(4, (0, 1, 0, -1), "quadratic mod 4")


_BUILTINS = {"mod1": lambda: principal(1), "mod3": quadratic_mod3, "mod4": quadratic_mod4}


def builtin(name: str) -> DirichletCharacter:
    key = name.removeprefix("builtin:")
    try:
        return _BUILTINS[key]()
    except KeyError:
        raise DomainError(f"unknown builtin character {name!r}; choose from {sorted(_BUILTINS)}") from None


def load_character(spec: str) -> DirichletCharacter:
    """``builtin:modN`` or a path to a JSON value table."""
    if spec.startswith("builtin:"):
        return builtin(spec)
    path = Path(spec)
    try:
        obj = json.loads(path.read_text())
    except OSError as exc:
        raise DomainError(f"cannot read character file {spec}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CharacterError("format", f"{spec} is not valid JSON ({exc.msg})") from None
    return DirichletCharacter.from_json(obj, name=path.stem)

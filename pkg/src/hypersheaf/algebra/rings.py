"""Coefficient rings: the integers, the rationals and Z/m."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class CoefficientRing:
    """One of ``Z``, ``Q`` or ``Z/m`` (``m >= 2``).

    Elements are Python ints for ``Z`` and ``Z/m`` (reduced into ``[0, m)``).
    Rationals are stored as ints when integral and as
    :class:`fractions.Fraction` otherwise, which keeps the common
    integer-valued case fast.
    """

    kind: str
    modulus: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Zmod"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Zmod":
            if self.modulus < 2:
                raise ValueError("Z/m needs m >= 2")
        elif self.modulus != 0:
            raise ValueError(f"{self.kind} takes no modulus")

    @classmethod
    def parse(cls, text: str) -> "CoefficientRing":
        """Parse ``Z``, ``Q``, ``Zmod:<m>`` (also ``Z/<m>``)."""
        t = text.strip()
        if t in ("Z", "ZZ"):
            return INTEGERS
        if t in ("Q", "QQ"):
            return RATIONALS
        m = re.fullmatch(r"Z(?:mod:|/)(\d+)", t)
        if m:
            return cls("Zmod", int(m.group(1)))
        raise ValueError(f"cannot parse ring {text!r}; expected Z, Q or Zmod:<m>")

    @property
    def is_field(self) -> bool:
        if self.kind == "Q":
            return True
        if self.kind == "Zmod":
            return _is_prime(self.modulus)
        return False

    def reduce(self, value) -> Scalar:
        if type(value) is int:
            return value % self.modulus if self.kind == "Zmod" else value
        if self.kind == "Q":
            if isinstance(value, int):
                return value
            value = Fraction(value)
            return value.numerator if value.denominator == 1 else value
        if isinstance(value, Fraction):
            if value.denominator != 1:
                if self.kind == "Z":
                    raise ValueError(f"{value} is not an integer")
                # division by a unit of Z/m
                inv = pow(value.denominator, -1, self.modulus)
                return value.numerator * inv % self.modulus
            value = value.numerator
        if not isinstance(value, int):
            raise TypeError(f"not an exact scalar: {value!r}")
        if self.kind == "Zmod":
            return value % self.modulus
        return value

    def zero(self) -> Scalar:
        return 0

    def one(self) -> Scalar:
        return 1

    def __str__(self) -> str:
        if self.kind == "Zmod":
            return f"Z/{self.modulus}"
        return self.kind

    def selector(self) -> str:
        """Inverse of :meth:`parse`."""
        return f"Zmod:{self.modulus}" if self.kind == "Zmod" else self.kind


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            return False
        p += 1
    return True


INTEGERS = CoefficientRing("Z")
RATIONALS = CoefficientRing("Q")


def integers_mod(m: int) -> CoefficientRing:
    return CoefficientRing("Zmod", m)

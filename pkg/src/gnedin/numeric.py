"""Numeric backends.

Every quantity in the package is evaluated in one of two modes:

``"exact"``
    :class:`fractions.Fraction` arithmetic. Used by the oracles and for all
    small-instance identities, where equality is asserted exactly.
``"log"``
    :class:`LogReal`, a signed log-magnitude float. Used for large samples
    where the factorials involved overflow a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

EXACT = "exact"
LOG = "log"
MODES = (EXACT, LOG)


@dataclass(frozen=True)
class LogReal:
    """A real number stored as ``sign * exp(log_abs)``.

    ``sign`` is -1, 0 or +1. When ``sign == 0`` the value is exactly zero and
    ``log_abs`` is ``-inf``; it carries no information and should not be read.
    """

    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign == 0 and self.log_abs != -math.inf:
            object.__setattr__(self, "log_abs", -math.inf)

    @classmethod
    def from_value(cls, x) -> "LogReal":
        if isinstance(x, LogReal):
            return x
        if x == 0:
            return ZERO
        sign = 1 if x > 0 else -1
        if isinstance(x, Rational) and not isinstance(x, bool):
            # math.log on the integer parts avoids float overflow for huge rationals
            num, den = abs(x.numerator), x.denominator
            return cls(sign, math.log(num) - math.log(den))
        return cls(sign, math.log(abs(float(x))))

    def is_zero(self) -> bool:
        return self.sign == 0

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def to_float(self) -> float:
        return float(self)

    def representable(self) -> bool:
        """True when ``float(self)`` is finite and not flushed to zero."""
        return self.sign == 0 or -745.0 < self.log_abs < 709.7

    def __neg__(self) -> "LogReal":
        return LogReal(-self.sign, self.log_abs)

    def __mul__(self, other) -> "LogReal":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return LogReal(self.sign * other.sign, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogReal":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.sign == 0:
            raise ZeroDivisionError("LogReal division by zero")
        if self.sign == 0:
            return ZERO
        return LogReal(self.sign * other.sign, self.log_abs - other.log_abs)

    def __rtruediv__(self, other) -> "LogReal":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __add__(self, other) -> "LogReal":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return log_sum((self, other))

    __radd__ = __add__

    def __sub__(self, other) -> "LogReal":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return log_sum((self, -other))

    def __rsub__(self, other) -> "LogReal":
        return _coerce(other) - self

    def __pow__(self, p: int) -> "LogReal":
        if not isinstance(p, int):
            raise TypeError("LogReal only supports integer powers")
        if p == 0:
            return ONE
        if self.sign == 0:
            if p < 0:
                raise ZeroDivisionError("0 ** negative power")
            return ZERO
        sign = -1 if (self.sign < 0 and p % 2) else 1
        return LogReal(sign, self.log_abs * p)

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogReal(0)"
        return f"LogReal(sign={self.sign}, log_abs={self.log_abs!r})"


def _coerce(x):
    if isinstance(x, LogReal):
        return x
    if isinstance(x, (int, float, Fraction)):
        return LogReal.from_value(x)
    return NotImplemented


ZERO = LogReal(0, -math.inf)
ONE = LogReal(1, 0.0)


def log_sum(values: Iterable[LogReal]) -> LogReal:
    """Signed log-sum-exp of LogReal values."""
    values = [v for v in values if v.sign != 0]
    if not values:
        return ZERO
    top = max(v.log_abs for v in values)
    if top == math.inf:
        raise OverflowError("infinite LogReal magnitude")
    # math.fsum keeps cancellation between signed terms as accurate as possible
    acc = math.fsum(v.sign * math.exp(v.log_abs - top) for v in values)
    if acc == 0.0:
        return ZERO
    return LogReal(1 if acc > 0 else -1, top + math.log(abs(acc)))


ExtendedReal = Union[Fraction, LogReal]


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def scalar(x, mode: str):
    """Convert a parameter to the scalar type used inside ``mode``.

    Floats entering exact mode are read through their shortest repr, so
    ``0.3`` becomes ``3/10`` rather than its binary expansion.
    """
    check_mode(mode)
    if mode == EXACT:
        if isinstance(x, float):
            return Fraction(repr(x))
        return Fraction(x)
    return float(x)


def value(x, mode: str) -> ExtendedReal:
    """Lift a plain number into the ExtendedReal type of ``mode``."""
    if mode == EXACT:
        return scalar(x, mode)
    check_mode(mode)
    return LogReal.from_value(x)


def one(mode: str) -> ExtendedReal:
    return Fraction(1) if check_mode(mode) == EXACT else ONE


def zero(mode: str) -> ExtendedReal:
    return Fraction(0) if check_mode(mode) == EXACT else ZERO


def total(values: Iterable[ExtendedReal], mode: str) -> ExtendedReal:
    if check_mode(mode) == EXACT:
        return sum(values, Fraction(0))
    return log_sum(values)


def to_float(x: ExtendedReal) -> float:
    return float(x)


def is_zero(x: ExtendedReal) -> bool:
    if isinstance(x, LogReal):
        return x.sign == 0
    return x == 0

"""Generalized factorials, Lah numbers and generalized Stirling numbers.

All functions are pure. ``mode`` selects exact rational output or a signed
log-domain :class:`~gnedin.numeric.LogReal` (see :mod:`gnedin.numeric`).
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import numeric
from .numeric import EXACT, ExtendedReal, LogReal

# below this order the log-mode product is accumulated term by term
_DIRECT_LOG_TERMS = 64


class EnumerationCapError(ValueError):
    """An enumeration oracle was asked for an instance beyond its cap."""


def rising_factorial(x, n: int, h=1, mode: str = EXACT) -> ExtendedReal:
    """Factorial power ``x (x+h) ... (x+(n-1)h)``.

    ``n == 0`` gives exactly 1 and ``h == 0`` gives ``x**n``. Negative factors
    are allowed; the sign is tracked exactly in both modes.
    """
    if n < 0:
        raise ValueError(f"order n must be non-negative, got {n}")
    numeric.check_mode(mode)
    if mode == EXACT:
        x = numeric.scalar(x, EXACT)
        h = numeric.scalar(h, EXACT)
        out = Fraction(1)
        for i in range(n):
            out *= x + i * h
        return out
    return _rising_log(float(x), n, float(h))


def _rising_log(x: float, n: int, h: float) -> LogReal:
    if n == 0:
        return numeric.ONE
    if h == 0:
        return LogReal.from_value(x) ** n
    if n <= _DIRECT_LOG_TERMS:
        return _rising_log_direct(x, n, h)
    if abs(x) > 1000.0 * n * abs(h):
        # every factor x + ih = x (1 + ih/x) has the sign of x; lgamma would cancel here
        sign = -1 if (x < 0 and n % 2) else 1
        return LogReal(sign, n * math.log(abs(x)) + _sum_log1p(h / x, n))
    # peel off factors with (x + ih)/h <= 1 one at a time, then use
    # (x + ih)_{r|h} = h^r (y)_{r|1} with y = x/h + i > 1 and lgamma
    y = x / h
    sign, log_abs = 1, 0.0
    i = 0
    while i < n and y + i <= 1:
        f = x + i * h
        if f == 0:
            return numeric.ZERO
        if f < 0:
            sign = -sign
        log_abs += math.log(abs(f))
        i += 1
    out = LogReal(sign, log_abs)
    if i < n:
        y0, r = y + i, n - i
        out = out * LogReal.from_value(h) ** r * LogReal(1, math.lgamma(y0 + r) - math.lgamma(y0))
    return out


def _sum_log1p(t: float, n: int) -> float:
    """``sum_{i<n} log(1 + i t)`` for ``|n t| < 1e-3``."""
    if n <= 100_000:
        return math.fsum(math.log1p(i * t) for i in range(n))
    m = n - 1
    s1 = m * n / 2
    s2 = m * n * (2 * m + 1) / 6
    s3 = s1 * s1
    s4 = m * n * (2 * m + 1) * (3 * m * m + 3 * m - 1) / 30
    return s1 * t - s2 * t**2 / 2 + s3 * t**3 / 3 - s4 * t**4 / 4


def _rising_log_direct(x: float, n: int, h: float) -> LogReal:
    sign, log_abs = 1, 0.0
    for i in range(n):
        f = x + i * h
        if f == 0:
            return numeric.ZERO
        if f < 0:
            sign = -sign
        log_abs += math.log(abs(f))
    return LogReal(sign, log_abs)


def falling_factorial(x, n: int, h=1, mode: str = EXACT) -> ExtendedReal:
    """``x (x-h) ... (x-(n-1)h)``, i.e. the rising factorial with increment ``-h``."""
    return rising_factorial(x, n, -h, mode)


def factorial(n: int, mode: str = EXACT) -> ExtendedReal:
    if n < 0:
        raise ValueError("factorial of a negative integer")
    if mode == EXACT:
        return Fraction(math.factorial(n))
    numeric.check_mode(mode)
    return LogReal(1, math.lgamma(n + 1))


def binomial(a, j: int, mode: str = EXACT) -> ExtendedReal:
    """Generalized binomial coefficient ``(a)_{j, falling} / j!``; zero for ``j < 0``.

    ``a`` may be any real. For integer ``0 <= a < j`` the falling factorial
    vanishes and so does the coefficient.
    """
    if j < 0:
        return numeric.zero(mode)
    if mode == EXACT and isinstance(a, int) and a >= 0:
        return Fraction(math.comb(a, j))
    return falling_factorial(a, j, 1, mode) / factorial(j, mode)


def lah_number(n: int, k: int) -> int:
    """Unsigned Lah number ``C(n-1, k-1) n!/k!``.

    Zero outside ``1 <= k <= n``, except the convention ``L(0, 0) = 1``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 1 if k == 0 else 0
    if k < 1 or k > n:
        return 0
    return math.comb(n - 1, k - 1) * math.factorial(n) // math.factorial(k)


def lah_value(n: int, k: int, mode: str = EXACT) -> ExtendedReal:
    """:func:`lah_number` as an ExtendedReal; in log mode it never forms the integer."""
    if mode == EXACT:
        return Fraction(lah_number(n, k))
    numeric.check_mode(mode)
    if n == 0 or k < 1 or k > n:
        return LogReal.from_value(lah_number(n, k)) if n == 0 else numeric.ZERO
    # C(n-1, k-1) n!/k! with both factors written at their smallest order
    j = min(k - 1, n - k)
    return binomial(n - 1, j, mode) * rising_factorial(k + 1, n - k, 1, mode)


def noncentral_lah(n: int, k: int, r, mode: str = EXACT) -> ExtendedReal:
    """Non-central Lah number ``(n!/k!) C(n - r - 1, n - k)`` with real shift ``r``.

    These are the coefficients in ``(x)_{n, rising} = sum_k S(n, k; r) (x + r)_{k, falling}``;
    ``r = 0`` recovers :func:`lah_number` for ``k >= 1``. ``k = 0`` is accepted and
    gives ``(-r)_{n, rising}``.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    if k > n:
        return numeric.zero(mode)
    r = numeric.scalar(r, mode)
    return (factorial(n, mode) / factorial(k, mode)) * binomial(n - r - 1, n - k, mode)


def generalized_stirling_bell_oracle(n: int, k: int, alpha, cap: int = 12) -> Fraction:
    """Sum over all set partitions of ``[n]`` into ``k`` blocks of ``prod (1-alpha)_{n_i - 1}``.

    Brute force by exhaustive enumeration, so it is an independent check on
    closed forms. Raises :class:`EnumerationCapError` for ``n > cap``.
    """
    from .oracle import enumerate_set_partitions

    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap {cap}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    base = 1 - numeric.scalar(alpha, EXACT)
    weight_cache: dict[int, Fraction] = {}
    out = Fraction(0)
    for blocks in enumerate_set_partitions(n, max_n=cap):
        if len(blocks) != k:
            continue
        term = Fraction(1)
        for b in blocks:
            size = len(b)
            if size not in weight_cache:
                weight_cache[size] = rising_factorial(base, size - 1)
            term *= weight_cache[size]
        out += term
    return out


def stirling_to_gfc(n: int, k: int, alpha, stirling_value):
    """Generalized factorial coefficient ``C^alpha_{n,k} = alpha**k * S^{-1,-alpha}_{n,k}``."""
    if alpha == 0:
        raise ValueError("alpha must be non-zero")
    if isinstance(stirling_value, LogReal):
        return stirling_value * LogReal.from_value(alpha) ** k
    return stirling_value * numeric.scalar(alpha, EXACT) ** k


def gfc_to_stirling(n: int, k: int, alpha, gfc_value):
    """Inverse of :func:`stirling_to_gfc`."""
    if alpha == 0:
        raise ValueError("alpha must be non-zero")
    if isinstance(gfc_value, LogReal):
        return gfc_value / LogReal.from_value(alpha) ** k
    return gfc_value / numeric.scalar(alpha, EXACT) ** k

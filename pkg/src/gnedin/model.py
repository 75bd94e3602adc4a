"""Gnedin's partition model and its PD(-1, xi) extreme components.

Gnedin's model is the exchangeable Gibbs partition of type -1 whose weights are

    V(n, k) = (k-1)!/(n-1)! * (1-g)_{k-1} (g)_{n-k} / (1+g)_{n-1}

(rising factorials, ``g`` the parameter in (0, 1)). It is the mixture over
``xi`` of the partition with exactly ``xi`` types, PD(-1, xi), with mixing
weights ``g (1-g)_{xi-1} / xi!``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from . import numeric
from .combinatorics import factorial, falling_factorial, lah_number, rising_factorial
from .numeric import EXACT, ExtendedReal


@dataclass(frozen=True)
class ModelParams:
    """Parameter of Gnedin's model, ``0 < gamma < 1`` strictly."""

    gamma: Union[float, Fraction]

    def __post_init__(self):
        g = self.gamma
        if isinstance(g, bool) or not isinstance(g, (int, float, Fraction)):
            raise TypeError(f"gamma must be a real number, got {type(g).__name__}")
        if not 0 < g < 1:
            raise ValueError(f"gamma must lie in the open interval (0, 1), got {g}")

    def g(self, mode: str):
        return numeric.scalar(self.gamma, mode)


@dataclass(frozen=True)
class OccupancyVector:
    """Block sizes ``(n_1, ..., n_k)`` of a partition of ``[n]``, in any order."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(self.counts)
        if not counts:
            raise ValueError("an occupancy vector needs at least one block")
        for c in counts:
            if isinstance(c, bool) or int(c) != c or c < 1:
                raise ValueError(f"block sizes must be positive integers, got {c!r}")
        object.__setattr__(self, "counts", tuple(int(c) for c in counts))

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __len__(self):
        return len(self.counts)

    def __getitem__(self, i):
        return self.counts[i]


def as_occupancy(occ: Union[OccupancyVector, Iterable[int]]) -> OccupancyVector:
    if isinstance(occ, OccupancyVector):
        return occ
    return OccupancyVector(tuple(occ))


def _check_nk(n: int, k: int) -> None:
    if n < 1 or k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")


def gibbs_weight(n: int, k: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Weight ``V(n, k)`` of Gnedin's model."""
    _check_nk(n, k)
    g = params.g(mode)
    return (
        factorial(k - 1, mode)
        / factorial(n - 1, mode)
        * rising_factorial(1 - g, k - 1, 1, mode)
        * rising_factorial(g, n - k, 1, mode)
        / rising_factorial(1 + g, n - 1, 1, mode)
    )


def gibbs_weight_alt(n: int, k: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Second closed form ``(k-1)!/(n-1)! * g (1-g)_{k-1} / (g+n-k)_k``; equal to :func:`gibbs_weight`."""
    _check_nk(n, k)
    g = params.g(mode)
    return (
        factorial(k - 1, mode)
        / factorial(n - 1, mode)
        * numeric.value(g, mode)
        * rising_factorial(1 - g, k - 1, 1, mode)
        / rising_factorial(g + n - k, k, 1, mode)
    )


def _prod_factorials(counts: Sequence[int], mode: str) -> ExtendedReal:
    out = numeric.one(mode)
    for c in counts:
        out = out * factorial(c, mode)
    return out


def eppf_gnedin(occ, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Probability of one specific set partition with block sizes ``occ``."""
    occ = as_occupancy(occ)
    return gibbs_weight(occ.n, occ.k, params, mode) * _prod_factorials(occ.counts, mode)


def eppf_pd_minus1(occ, xi: int, mode: str = EXACT) -> ExtendedReal:
    """EPPF of the partition with exactly ``xi`` types: ``(xi)_{k, falling} / (xi)_{n, rising} * prod n_j!``.

    Exactly zero when ``k > xi``.
    """
    occ = as_occupancy(occ)
    _check_xi(xi)
    return (
        falling_factorial(xi, occ.k, 1, mode)
        / rising_factorial(xi, occ.n, 1, mode)
        * _prod_factorials(occ.counts, mode)
    )


def eppf_pd_minus1_alt(occ, xi: int, mode: str = EXACT) -> ExtendedReal:
    """Equivalent form ``(xi-1)_{k-1, increment -1} / (xi+1)_{n-1} * prod n_j!``."""
    occ = as_occupancy(occ)
    _check_xi(xi)
    return (
        rising_factorial(xi - 1, occ.k - 1, -1, mode)
        / rising_factorial(xi + 1, occ.n - 1, 1, mode)
        * _prod_factorials(occ.counts, mode)
    )


def _check_xi(xi: int) -> None:
    if isinstance(xi, bool) or int(xi) != xi or xi < 1:
        raise ValueError(f"the number of types must be a positive integer, got {xi!r}")


def mixing_pmf(xi: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Prior probability ``g (1-g)_{xi-1} / xi!`` that there are ``xi`` types."""
    _check_xi(xi)
    g = params.g(mode)
    return numeric.value(g, mode) * rising_factorial(1 - g, xi - 1, 1, mode) / factorial(xi, mode)


def mixing_sf(xi: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Prior tail mass ``P(number of types > xi) = (1-g)_xi / xi!``.

    The tail decays only like ``xi**(-g)``, so truncating a sum over the number
    of types by prior tail mass alone is hopeless for small ``g``; see
    :func:`gnedin.oracle.mixture_series_enclosure` for a certified alternative.
    """
    if xi < 0:
        raise ValueError("xi must be non-negative")
    g = params.g(mode)
    return rising_factorial(1 - g, xi, 1, mode) / factorial(xi, mode)


def pd_kn_pmf(n: int, k: int, xi: int, mode: str = EXACT) -> ExtendedReal:
    """``P(K_n = k)`` under PD(-1, xi): ``(xi)_{k, falling} L(n, k) / (xi)_{n, rising}``."""
    _check_nk(n, k)
    _check_xi(xi)
    return (
        falling_factorial(xi, k, 1, mode)
        * numeric.value(lah_number(n, k), mode)
        / rising_factorial(xi, n, 1, mode)
    )

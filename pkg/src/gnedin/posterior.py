"""Posterior predictive distributions for Gnedin's model.

A basic sample of ``n`` balls in ``k`` boxes is observed; ``m`` more balls are
to be drawn. Notation used throughout:

* ``kstar`` - number of new boxes opened by the additional balls (``K_m``),
* ``s`` - number of additional balls that land in new boxes (``S``),
* ``xi`` - the total number of types in the population.

Given the basic sample, every law here depends on it only through ``(n, k)``,
except :func:`avoid_subset_prob`, which needs the sizes of the boxes involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import numeric
from .combinatorics import (binomial, factorial, falling_factorial, lah_number, lah_value, noncentral_lah,
                            rising_factorial)
from .model import ModelParams, as_occupancy, gibbs_weight
from .numeric import EXACT, ExtendedReal, LogReal
from .oracle import hypergeometric_tail_enclosure
from .sampler import iter_allocation_outcomes, outcome_probability, weight_ratio


class UndefinedConditionalError(ValueError):
    """Conditioning on an event of probability zero."""


@dataclass
class DiscretePmf:
    """Probabilities on an integer (or integer-tuple) support.

    ``tail_bound`` is an upper bound on the mass outside ``support`` when the
    true support is infinite; it is 0 for finite supports. Probabilities are
    never renormalized after truncation.
    """

    support: list
    probs: list
    tail_bound: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ValueError("support and probs must align")

    def __getitem__(self, x) -> ExtendedReal:
        try:
            return self.probs[self.support.index(x)]
        except ValueError:
            raise KeyError(x) from None

    def get(self, x, default=0):
        try:
            return self[x]
        except KeyError:
            return default

    def items(self):
        return zip(self.support, self.probs)

    def total(self):
        if self.probs and isinstance(self.probs[0], LogReal):
            return numeric.log_sum(self.probs)
        return sum(self.probs, Fraction(0))

    def mean(self):
        terms = [p * x for x, p in self.items()]
        if terms and isinstance(terms[0], LogReal):
            return numeric.log_sum(terms)
        return sum(terms, Fraction(0))

    def as_floats(self) -> List[float]:
        return [float(p) for p in self.probs]


def _check_basic(n: int, k: int, m: int) -> None:
    if n < 1 or not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")


def kn_pmf(n: int, params: ModelParams, mode: str = EXACT) -> DiscretePmf:
    """Law of the number of boxes ``K_n``: ``P(K_n = k) = V(n, k) L(n, k)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    support = list(range(1, n + 1))
    return DiscretePmf(support, [kn_prob(n, k, params, mode) for k in support])


def kn_prob(n: int, k: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Single value ``P(K_n = k)``, cheap even for very large ``n`` in log mode."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    return gibbs_weight(n, k, params, mode) * lah_value(n, k, mode)


def new_config_pmf(n: int, k: int, m: int, new_blocks: Sequence[int], params: ModelParams,
                   mode: str = EXACT) -> ExtendedReal:
    """Probability that the additional balls landing in new boxes form one given
    set partition with block sizes ``new_blocks`` (old-box placements marginalized).
    """
    _check_basic(n, k, m)
    if not new_blocks or any(x < 1 for x in new_blocks):
        raise ValueError("new_blocks must be a non-empty list of positive sizes")
    s, kstar = sum(new_blocks), len(new_blocks)
    if s > m:
        raise ValueError(f"new blocks hold {s} balls but only m={m} are drawn")
    out = (weight_ratio(n, k, m, kstar, params, mode) * binomial(m, s, mode)
           * rising_factorial(n + k, m - s, 1, mode))
    for x in new_blocks:
        out = out * factorial(x, mode)
    return out


def _joint_term(n, k, m, kstar, s, params, mode):
    return (weight_ratio(n, k, m, kstar, params, mode) * binomial(m, s, mode)
            * rising_factorial(n + k, m - s, 1, mode) * numeric.value(lah_number(s, kstar), mode))


def joint_km_s_pmf(n: int, k: int, m: int, params: ModelParams, mode: str = EXACT) -> DiscretePmf:
    """Joint law of ``(kstar, s)`` on ``{(0, 0)} + {(j, s): 1 <= j <= s <= m}``."""
    _check_basic(n, k, m)
    support, probs = [], []
    for s in range(m + 1):
        for kstar in range(0 if s == 0 else 1, s + 1):
            support.append((kstar, s))
            probs.append(_joint_term(n, k, m, kstar, s, params, mode))
    return DiscretePmf(support, probs)


def s_pmf(n: int, k: int, m: int, params: ModelParams, mode: str = EXACT) -> DiscretePmf:
    """Law of ``s``, the number of additional balls in new boxes (marginal of the joint law)."""
    joint = joint_km_s_pmf(n, k, m, params, mode)
    by_s: Dict[int, list] = {s: [] for s in range(m + 1)}
    for (_, s), p in joint.items():
        by_s[s].append(p)
    return DiscretePmf(list(by_s), [numeric.total(v, mode) for v in by_s.values()])


def km_pmf(n: int, k: int, m: int, params: ModelParams, mode: str = EXACT) -> DiscretePmf:
    """Law of ``kstar``, the number of new boxes among ``m`` additional balls.

    Summing the joint law over ``s`` collapses to a non-central Lah number with
    shift ``-(n+k)``; that collapse is what is evaluated here.
    """
    _check_basic(n, k, m)
    support = list(range(m + 1))
    probs = [weight_ratio(n, k, m, j, params, mode) * noncentral_lah(m, j, -(n + k), mode)
             for j in support]
    return DiscretePmf(support, probs)


def km_mean(n: int, k: int, m: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Posterior mean of ``kstar`` (the Bayes estimate under squared loss)."""
    return km_pmf(n, k, m, params, mode).mean()


def s_given_km_pmf(n: int, k: int, m: int, kstar: int, params: ModelParams,
                   mode: str = EXACT) -> DiscretePmf:
    """Law of ``s`` given ``kstar`` new boxes: ratio of the joint law to its ``kstar`` marginal."""
    _check_basic(n, k, m)
    if not 0 <= kstar <= m:
        raise ValueError(f"need 0 <= kstar <= m, got kstar={kstar}, m={m}")
    marginal = km_pmf(n, k, m, params, mode)[kstar]
    if numeric.is_zero(marginal):
        raise UndefinedConditionalError(f"P(kstar = {kstar}) is zero")
    if kstar == 0:
        return DiscretePmf([0], [numeric.one(mode)])
    support = list(range(kstar, m + 1))
    probs = [_joint_term(n, k, m, kstar, s, params, mode) / marginal for s in support]
    return DiscretePmf(support, probs)


def s_mean(n: int, k: int, m: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Expected number of additional balls in new boxes: ``m k (k-g) / (n (n+g))``."""
    _check_basic(n, k, m)
    g = params.g(mode)
    return numeric.value(m * k * (k - g), mode) / numeric.value(n * (n + g), mode)


def avoid_subset_prob(occ, m: int, avoid: Sequence[int], params: ModelParams,
                      mode: str = EXACT, method: str = "definition") -> ExtendedReal:
    """Probability that none of the ``m`` additional balls lands in the old boxes ``avoid``.

    ``avoid`` lists 0-based box indices into ``occ``; ``r = k - len(avoid)``
    boxes stay available. ``method="definition"`` sums the group allocation
    law over every outcome that leaves the avoided boxes empty.
    ``method="closed"`` uses the collapsed sum
    ``sum_j V(n+m, k+j)/V(n, k) * C(m, j) (n_R + r + j)_{m-j}`` with ``n_R`` the
    number of basic-sample balls in the available boxes; it scales to large ``m``.
    """
    occ = as_occupancy(occ)
    avoid = sorted(set(avoid))
    if any(not 0 <= j < occ.k for j in avoid):
        raise ValueError(f"avoided box indices must lie in [0, {occ.k})")
    _check_basic(occ.n, occ.k, m)
    if not avoid or m == 0:
        return numeric.one(mode)
    if method == "definition":
        terms = []
        for outcome in iter_allocation_outcomes(occ.k, m):
            if any(outcome.old_adds[j] for j in avoid):
                continue
            terms.append(outcome_probability(occ, outcome, params, mode))
        return numeric.total(terms, mode)
    if method == "closed":
        keep = [c for j, c in enumerate(occ.counts) if j not in avoid]
        base = sum(keep) + len(keep)
        terms = [weight_ratio(occ.n, occ.k, m, j, params, mode) * binomial(m, j, mode)
                 * rising_factorial(base + j, m - j, 1, mode) for j in range(m + 1)]
        return numeric.total(terms, mode)
    raise ValueError(f"unknown method {method!r}")


def conditional_gibbs_pmf(n: int, k: int, m: int, new_blocks: Sequence[int], params: ModelParams,
                          mode: str = EXACT) -> ExtendedReal:
    """Probability of one set partition (block sizes ``new_blocks``) of the ``s`` balls
    known to fall in new boxes, given ``s`` and the basic sample."""
    s = sum(new_blocks)
    if s < 1:
        raise UndefinedConditionalError("need at least one ball in new boxes")
    marginal = s_pmf(n, k, m, params, mode).get(s, numeric.zero(mode))
    if numeric.is_zero(marginal):
        raise UndefinedConditionalError(f"P(s = {s}) is zero")
    return new_config_pmf(n, k, m, new_blocks, params, mode) / marginal


def discovery_prob(n: int, k: int, m: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Probability that ball ``n+m+1`` opens a new box, given ``K_n = k``.

    Averages the one-step new-box probability ``K(K-g)/(N(N+g))`` at
    ``N = n+m``, ``K = k + kstar`` over the law of ``kstar``.
    """
    pm = km_pmf(n, k, m, params, mode)
    g = params.g(mode)
    big_n = n + m
    denom = numeric.value(big_n * (big_n + g), mode)
    terms = [numeric.value((k + j) * (k + j - g), mode) / denom * p for j, p in pm.items()]
    return numeric.total(terms, mode)


# -- total number of types --------------------------------------------------------

def types_posterior_term(n: int, k: int, xi: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """``P(xi types | K_n = k)`` from its closed form
    ``(n-1)!/((k-1)!(xi+n-1)!) (xi-1)_{k-1, falling} (k-g)_{xi-k} (g+n-k)_k``.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if xi < k:
        return numeric.zero(mode)
    g = params.g(mode)
    return (factorial(n - 1, mode) / (factorial(k - 1, mode) * factorial(xi + n - 1, mode))
            * falling_factorial(xi - 1, k - 1, 1, mode)
            * rising_factorial(k - g, xi - k, 1, mode)
            * rising_factorial(g + n - k, k, 1, mode))


def km_limit_term(n: int, k: int, kstar: int, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """Large-``m`` limit of ``P(kstar | K_n = k)``:
    ``(n-1)!/(k-1)! (g+n-k)_k (k-g)_{kstar} (k+kstar-1)! / (kstar! (n+k+kstar-1)!)``.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if kstar < 0:
        return numeric.zero(mode)
    g = params.g(mode)
    return (factorial(n - 1, mode) / factorial(k - 1, mode)
            * rising_factorial(g + n - k, k, 1, mode)
            * rising_factorial(k - g, kstar, 1, mode)
            * factorial(k + kstar - 1, mode)
            / (factorial(kstar, mode) * factorial(n + k + kstar - 1, mode)))


@dataclass
class TypesPosterior:
    """Posterior of the total number of types, truncated with a certified tail bound.

    ``mean`` is ``math.inf`` when the posterior mean diverges, which happens
    when ``n - k + g <= 1`` (the posterior tail then decays too slowly).
    """

    pmf: DiscretePmf
    mean: object
    mean_bounds: Tuple[float, float]


def _ratio(num, den, mode):
    if mode == EXACT:
        return Fraction(num) / den
    return LogReal.from_value(float(num) / float(den))


def _tabulate(first, ratio_at, tail_at, mode, start, tail_tol, max_support):
    """Tabulate ``p(start), p(start+1), ...`` by ``p(x+1) = p(x) * ratio_at(x)``.

    Stops once the certified tail beyond the table is below ``tail_tol`` or the
    table holds ``max_support`` points. Returns ``(support, probs, next, tail)``
    where ``next`` is the first untabulated term.
    """
    support, probs = [start], [first]
    next_check = 64
    while True:
        x = support[-1]
        nxt = probs[-1] * ratio_at(x)
        if len(support) >= next_check or len(support) >= max_support:
            u = nxt if mode == EXACT else float(nxt)
            if u == 0:
                return support, probs, nxt, (0, 0)
            enc = tail_at(u, x + 1)
            if float(enc.hi) < tail_tol or len(support) >= max_support:
                return support, probs, nxt, (enc.lo, enc.hi)
            next_check = min(2 * next_check, max_support)
        support.append(x + 1)
        probs.append(nxt)


def _default_cap(mode: str, max_support: Optional[int]) -> int:
    if max_support is not None:
        return max_support
    return 2000 if mode == EXACT else 20000


def total_types_posterior(n: int, k: int, params: ModelParams, mode: str = EXACT,
                          tail_tol: float = 1e-10, max_support: Optional[int] = None) -> TypesPosterior:
    """Posterior of the total number of types given ``K_n = k``.

    The support ``xi = k, k+1, ...`` is extended until the certified tail
    mass falls below ``tail_tol`` or ``max_support`` points have been
    tabulated (default 2000 in exact mode, 20000 in log mode). The tail decays
    like ``xi**-(n-k+g)``, so for ``n == k`` and small ``g`` the cap is what
    stops the table; ``pmf.tail_bound`` then records the true leftover mass.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    cap = _default_cap(mode, max_support)
    g = params.g(mode)
    support, probs, nxt, tail = _tabulate(
        types_posterior_term(n, k, k, params, mode),
        # p(x+1)/p(x) = x (x-g) / ((x+1-k)(x+n))
        lambda x: _ratio(x * (x - g), (x + 1 - k) * (x + n), mode),
        lambda u, x0: hypergeometric_tail_enclosure(u, -g, 0, 1 - k, n, x0, levels=6),
        mode, k, tail_tol, cap)
    pmf = DiscretePmf(support, probs, tail_bound=float(tail[1]),
                      meta={"tail_lower": float(tail[0]), "tail_upper": float(tail[1]),
                            "tail_tol": tail_tol, "truncated_at": support[-1]})
    head = pmf.mean()
    if n - k + float(params.gamma) <= 1:
        return TypesPosterior(pmf, math.inf, (float(head), math.inf))
    x0 = support[-1] + 1
    u = nxt * x0
    u = u if mode == EXACT else float(u)
    if u == 0:
        return TypesPosterior(pmf, head, (float(head), float(head)))
    # x p(x): ratio (x+1)(x-g) / ((x+1-k)(x+n))
    enc = hypergeometric_tail_enclosure(u, 1, -g, 1 - k, n, x0, levels=6)
    mean = head + numeric.value(enc.mid, mode)
    return TypesPosterior(pmf, mean, (float(head) + float(enc.lo), float(head) + float(enc.hi)))


def km_pmf_limit(n: int, k: int, params: ModelParams, mode: str = EXACT, tail_tol: float = 1e-10,
                 max_support: Optional[int] = None) -> DiscretePmf:
    """Large-``m`` limit of the law of ``kstar``, tabulated from its own closed form.

    Same law as :func:`total_types_posterior` shifted by ``k``, computed along
    an independent route (first term from :func:`km_limit_term`, then the
    term ratio ``(j+k-g)(j+k) / ((j+1)(j+n+k))``).
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    cap = _default_cap(mode, max_support)
    g = params.g(mode)
    support, probs, _, tail = _tabulate(
        km_limit_term(n, k, 0, params, mode),
        lambda j: _ratio((j + k - g) * (j + k), (j + 1) * (j + n + k), mode),
        lambda u, j0: hypergeometric_tail_enclosure(u, k - g, k, 1, n + k, j0, levels=6),
        mode, 0, tail_tol, cap)
    return DiscretePmf(support, probs, tail_bound=float(tail[1]),
                       meta={"tail_lower": float(tail[0]), "tail_upper": float(tail[1]),
                             "tail_tol": tail_tol, "truncated_at": support[-1]})


def total_variation(p: DiscretePmf, q: DiscretePmf) -> float:
    """Total variation distance, counting each side's ``tail_bound`` as unmatched mass."""
    pa = dict(zip(p.support, p.as_floats()))
    qa = dict(zip(q.support, q.as_floats()))
    keys = set(pa) | set(qa)
    return 0.5 * (math.fsum(abs(pa.get(x, 0.0) - qa.get(x, 0.0)) for x in keys)
                  + p.tail_bound + q.tail_bound)

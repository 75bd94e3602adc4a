"""Independent ground truth for the closed forms.

* :func:`enumerate_set_partitions` - restricted-growth-string enumeration.
* :func:`connection_coefficients_oracle` - basis change by forward differences.
* :func:`exact_extension_oracle` - exact law of every labeled way the next
  ``m`` balls can land, from products of one-step rules along each path.
* :func:`mixture_series_enclosure` - certified two-sided bounds for the
  heavy-tailed series over the number of types.
* :func:`mc_estimate` - seeded Monte Carlo means with standard errors.

Everything that is compared against a closed form for equality runs in exact
rational arithmetic; a float comparison cannot tell a misprint from round-off.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np

from .combinatorics import falling_factorial, lah_number, rising_factorial
from .model import ModelParams, OccupancyVector, as_occupancy, mixing_pmf
from .numeric import EXACT
from .sampler import AllocationOutcome, extend_partition, one_step_gnedin, sample_partition, step


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed its configured budget."""


@dataclass(frozen=True)
class EnumerationBudget:
    """Ceilings for exhaustive enumeration. Exceeding one raises, never truncates."""

    max_partition_n: int = 12
    max_extension_m: int = 6
    max_paths: int = 2_000_000

    def __post_init__(self):
        if min(self.max_partition_n, self.max_extension_m, self.max_paths) < 1:
            raise ValueError("budgets must be positive")


DEFAULT_BUDGET = EnumerationBudget()


# -- set partitions -----------------------------------------------------------

def enumerate_set_partitions(n: int, max_n: int = DEFAULT_BUDGET.max_partition_n
                             ) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """Yield each set partition of ``{0, ..., n-1}`` once, as a tuple of blocks.

    Iterates restricted growth strings ``a`` (``a[0] = 0``,
    ``a[i] <= 1 + max(a[:i])``) in lexicographic order.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > max_n:
        raise BudgetExceededError(f"n={n} exceeds the partition budget {max_n}")
    a = [0] * n
    b = [1] * n  # b[i] = 1 + max(a[:i])
    while True:
        blocks: Dict[int, list] = defaultdict(list)
        for i, label in enumerate(a):
            blocks[label].append(i)
        yield tuple(tuple(blocks[j]) for j in range(len(blocks)))
        i = n - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0
            b[j] = max(b[j - 1], a[j - 1] + 1)


def bell_number(n: int) -> int:
    """Bell number by the Bell triangle; independent of the enumerator."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def integer_partitions(n: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Partitions of ``n`` as non-increasing tuples."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def set_partition_count(sizes) -> int:
    """Number of set partitions of ``[sum(sizes)]`` whose block sizes are the multiset ``sizes``."""
    count = math.factorial(sum(sizes))
    for x in sizes:
        count //= math.factorial(x)
    mult: Dict[int, int] = defaultdict(int)
    for x in sizes:
        mult[x] += 1
    for c in mult.values():
        count //= math.factorial(c)
    return count


def connection_coefficients_oracle(n: int, r) -> List[Fraction]:
    """Coefficients ``c_j`` in ``(x)_{n, rising} = sum_j c_j (x + r)_{j, falling}``, ``j = 0..n``.

    With ``y = x + r`` the left side is the polynomial ``P(y) = (y - r)_{n, rising}``
    and ``c_j`` is its ``j``-th forward difference at 0 divided by ``j!``
    (Newton's forward formula), so no Lah number is used.
    """
    r = Fraction(r) if not isinstance(r, float) else Fraction(repr(r))
    row = [rising_factorial(y - r, n) for y in range(n + 1)]
    coefs = []
    for j in range(n + 1):
        coefs.append(row[0] / math.factorial(j))
        row = [b - a for a, b in zip(row, row[1:])]
    return coefs


# -- exact extension law --------------------------------------------------------

@dataclass
class ExtensionLaw:
    """Exact law over labeled extension paths of ``m`` balls after ``occ``.

    A path is a tuple with one entry per new ball: ``j < k`` means old block
    ``j``; ``k + t`` means the ``t``-th new block in order of appearance.
    Paths are in one-to-one correspondence with labeled configurations.
    """

    occ: OccupancyVector
    m: int
    params: ModelParams
    paths: Dict[Tuple[int, ...], Fraction] = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.occ.k

    def total(self) -> Fraction:
        return sum(self.paths.values(), Fraction(0))

    def outcome(self, path) -> AllocationOutcome:
        k = self.k
        old = [0] * k
        new: List[int] = []
        for label in path:
            if label < k:
                old[label] += 1
            elif label - k == len(new):
                new.append(1)
            else:
                new[label - k] += 1
        return AllocationOutcome(tuple(old), tuple(new))

    def new_partition(self, path) -> Tuple[int, ...]:
        """Restricted growth string of the new-block balls, relabeled ``0..s-1`` by arrival."""
        return tuple(label - self.k for label in path if label >= self.k)

    def final_counts(self, path) -> Tuple[int, ...]:
        out = self.outcome(path)
        return tuple(c + a for c, a in zip(self.occ.counts, out.old_adds)) + out.new_blocks

    def law_of(self, statistic: Callable) -> Dict:
        law: Dict = defaultdict(Fraction)
        for path, p in self.paths.items():
            law[statistic(path)] += p
        return dict(law)

    def outcome_law(self) -> Dict[AllocationOutcome, Fraction]:
        return self.law_of(lambda path: self.outcome(path).canonical())

    def expectation(self, statistic: Callable) -> Fraction:
        return sum((p * statistic(path) for path, p in self.paths.items()), Fraction(0))


def exact_extension_oracle(occ, m: int, params: ModelParams,
                           budget: EnumerationBudget = DEFAULT_BUDGET) -> ExtensionLaw:
    """Enumerate every path of the next ``m`` balls with its exact probability."""
    occ = as_occupancy(occ)
    if m < 0:
        raise ValueError("m must be non-negative")
    if m > budget.max_extension_m:
        raise BudgetExceededError(f"m={m} exceeds the extension budget {budget.max_extension_m}")
    if (occ.k + m) ** m > budget.max_paths:
        raise BudgetExceededError(f"up to {(occ.k + m) ** m} paths exceed the budget {budget.max_paths}")
    law = ExtensionLaw(occ, m, params)

    def walk(counts, path, prob):
        if len(path) == m:
            law.paths[tuple(path)] = prob
            return
        probs = one_step_gnedin(counts, params, EXACT)
        for j, p in enumerate(probs):
            if p == 0:
                continue
            nxt = list(counts)
            if j == len(counts):
                nxt.append(1)
            else:
                nxt[j] += 1
            path.append(j)
            walk(nxt, path, prob * p)
            path.pop()

    walk(list(occ.counts), [], Fraction(1))
    return law


# -- certified series over the number of types ----------------------------------

@dataclass(frozen=True)
class Enclosure:
    """Rigorous bounds ``lo <= value <= hi`` (exact when built from Fractions)."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


def hypergeometric_tail_enclosure(u_start, a, b, c, d, start: int, levels: int = 8) -> Enclosure:
    """Bounds on ``sum_{j >= start} u(j)`` for a positive term with
    ``u(j+1)/u(j) = (j+a)(j+b) / ((j+c)(j+d))``.

    Requires ``c + d - a - b > 1`` (convergence), ``start + min(a, b) > 0`` and
    ``start + min(c, d) > 0`` so every term and denominator is positive.

    Method: with ``w(j) = u(j)(j+q)/delta`` and ``q`` chosen to cancel the
    linear term, ``w(j) - w(j+1) = u(j) (1 + eps / (delta (j+c)(j+d)))``
    exactly, so ``T = w(start) - (eps/delta) T'`` where ``T'`` is the tail of
    ``u(j)/((j+c)(j+d))``, a series of the same shape with ``c, d`` raised by
    one. Each level gains a factor ``O(start**-2)``; the deepest level is
    closed by ``0 <= T' <= T / ((start+c)(start+d))``.
    """
    if start + min(a, b) <= 0 or start + min(c, d) <= 0:
        raise ValueError("terms must be positive from the start index on")
    if c + d - a - b - 1 <= 0:
        raise ValueError("series diverges")
    ws, etas = [], []
    u = u_start
    for level in range(levels + 1):
        cl, dl = c + level, d + level
        delta = cl + dl - a - b - 1
        q = (delta * (cl + dl) - cl * dl + a * b + a + b) / (delta + 1)
        eps = q * (cl * dl - a * b) - a * b - delta * cl * dl
        ws.append(u * (start + q) / delta)
        etas.append(eps / delta)
        bl = (start + cl) * (start + dl)
        if level < levels:
            u = u / bl
    # deepest level: T_L = w - eta T_{L+1}, 0 <= T_{L+1} <= T_L / bl
    w, eta = ws[-1], etas[-1]
    if eta >= 0:
        lo, hi = w / (1 + eta / bl), w
    else:
        if -eta >= bl:
            raise ValueError("start index too small for the enclosure to close")
        lo, hi = w, w / (1 + eta / bl)
    for w, eta in zip(reversed(ws[:-1]), reversed(etas[:-1])):
        cands = (w - eta * lo, w - eta * hi)
        lo, hi = min(cands), max(cands)
    return Enclosure(lo, hi)


def mixture_term(n: int, k: int, xi: int, params: ModelParams, mode: str = EXACT):
    """``P(xi types) * (xi)_{k, falling} / (xi)_{n, rising}``: the mixture summand without ``prod n_j!``."""
    return (mixing_pmf(xi, params, mode) * falling_factorial(xi, k, 1, mode)
            / rising_factorial(xi, n, 1, mode))


def mixture_series_enclosure(n: int, k: int, params: ModelParams, start: Optional[int] = None,
                             levels: int = 8) -> Enclosure:
    """Certified bounds on ``sum_xi mixture_term(n, k, xi)`` over all ``xi >= 1``.

    Terms with ``xi < k`` vanish; ``xi = k .. start-1`` are summed exactly and
    the rest is bounded by :func:`hypergeometric_tail_enclosure`.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    g = params.g(EXACT)
    if start is None:
        start = max(k + 1, 256)
    head = sum((mixture_term(n, k, xi, params) for xi in range(k, start)), Fraction(0))
    u0 = mixture_term(n, k, start, params)
    # ratio in xi: (xi - g) xi / ((xi + 1 - k)(xi + n))
    tail = hypergeometric_tail_enclosure(u0, -g, Fraction(0), Fraction(1 - k), Fraction(n),
                                         start, levels)
    return Enclosure(head + tail.lo, head + tail.hi)


def bayes_types_posterior(n: int, k: int, params: ModelParams, support) -> Tuple[Dict[int, Enclosure], Enclosure]:
    """Posterior of the number of types by Bayes' rule with a certified normalizer.

    Returns per-``xi`` enclosures of ``prior(xi) P(K_n = k | xi) / Z`` and the
    enclosure of ``Z``, the marginal ``P(K_n = k)``.
    """
    lah = lah_number(n, k)
    series = mixture_series_enclosure(n, k, params)
    z = Enclosure(lah * series.lo, lah * series.hi)
    post = {}
    for xi in support:
        num = lah * mixture_term(n, k, xi, params) if xi >= k else Fraction(0)
        post[xi] = Enclosure(num / z.hi, num / z.lo)
    return post, z


# -- Monte Carlo ----------------------------------------------------------------

@dataclass(frozen=True)
class MCEstimate:
    estimate: np.ndarray
    stderr: np.ndarray
    paths: int

    def within(self, target, n_se: float = 4.0) -> np.ndarray:
        """Elementwise ``|estimate - target| <= n_se * stderr`` (exact match when stderr is 0)."""
        target = np.asarray(target, dtype=float)
        return np.abs(self.estimate - target) <= n_se * self.stderr + 1e-15


def mc_estimate(statistic: Callable[[np.random.Generator], object], paths: int, seed: int) -> MCEstimate:
    """Mean and standard error of ``statistic(rng)`` over ``paths`` independent runs.

    One generator seeded with ``seed`` drives all runs in order, so results
    are reproducible bit for bit for the same seed and path count.
    """
    if paths < 1:
        raise ValueError("paths must be at least 1")
    rng = np.random.default_rng(seed)
    first = np.atleast_1d(np.asarray(statistic(rng), dtype=float))
    acc = np.empty((paths, first.size))
    acc[0] = first
    for i in range(1, paths):
        acc[i] = np.asarray(statistic(rng), dtype=float)
    mean = acc.mean(axis=0)
    if paths > 1:
        se = acc.std(axis=0, ddof=1) / math.sqrt(paths)
    else:
        se = np.full_like(mean, np.inf)
    return MCEstimate(mean, se, paths)


def kn_indicator(n: int, params: ModelParams) -> Callable:
    """Statistic: one-hot vector of ``K_n`` (index ``k-1``) for a fresh sample of size ``n``."""
    def stat(rng):
        out = np.zeros(n)
        out[sample_partition(n, params, rng).k - 1] = 1.0
        return out
    return stat


def extension_statistics(occ, m: int, params: ModelParams) -> Callable:
    """Statistic: ``(K_m, S, new-block indicator of ball n+m+1)`` after the basic sample ``occ``."""
    occ = as_occupancy(occ)

    def stat(rng):
        out = extend_partition(occ, m, params, rng)
        counts = [c + a for c, a in zip(occ.counts, out.old_adds)] + list(out.new_blocks)
        before = len(counts)
        step(counts, params, rng)
        return (out.kstar, out.s, float(len(counts) > before))
    return stat

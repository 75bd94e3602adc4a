"""Sequential construction: one-step and m-step prediction rules, samplers.

Balls arrive one at a time. Given block sizes ``(n_1, ..., n_k)`` of the first
``n`` balls, Gnedin's model puts ball ``n+1`` into old block ``j`` with
probability ``(n-k+g)(n_j+1) / (n(n+g))`` and into a new block with
probability ``k(k-g) / (n(n+g))``.

Group allocation probabilities refer to one *labeled* configuration of the
group of ``m`` new balls, exactly as an EPPF refers to one set partition. Use
:func:`outcome_probability` for the probability of an unlabeled
:class:`AllocationOutcome`; it multiplies by :func:`outcome_multiplicity`.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from . import numeric
from .combinatorics import factorial, rising_factorial
from .model import ModelParams, OccupancyVector, as_occupancy
from .numeric import EXACT, ExtendedReal


def one_step_gnedin(occ, params: ModelParams, mode: str = EXACT) -> list:
    """Probabilities for ball ``n+1``: old blocks ``1..k`` first, then the new block."""
    occ = as_occupancy(occ)
    n, k = occ.n, occ.k
    g = params.g(mode)
    denom = numeric.value(n * (n + g), mode)
    old = numeric.value(n - k + g, mode)
    probs = [old * numeric.value(c + 1, mode) / denom for c in occ.counts]
    probs.append(numeric.value(k * (k - g), mode) / denom)
    return probs


def one_step_pd(occ, xi: int, mode: str = EXACT) -> list:
    """Prediction rule of PD(-1, xi): ``(n_j+1)/(n+xi)`` and ``(xi-k)/(n+xi)`` for a new block."""
    occ = as_occupancy(occ)
    n, k = occ.n, occ.k
    if k > xi:
        raise ValueError(f"state has k={k} blocks but the model has only xi={xi} types")
    denom = numeric.value(n + xi, mode)
    probs = [numeric.value(c + 1, mode) / denom for c in occ.counts]
    probs.append(numeric.value(xi - k, mode) / denom)
    return probs


@dataclass(frozen=True)
class AllocationOutcome:
    """How a group of ``m`` new balls lands.

    ``old_adds[j]`` balls join old block ``j``; the remaining ``s`` balls form
    new blocks with sizes ``new_blocks``. New blocks are unordered; their
    stored order is whatever the caller gave.
    """

    old_adds: tuple
    new_blocks: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "old_adds", tuple(int(x) for x in self.old_adds))
        object.__setattr__(self, "new_blocks", tuple(int(x) for x in self.new_blocks))
        if any(x < 0 for x in self.old_adds):
            raise ValueError("old-block additions must be non-negative")
        if any(x < 1 for x in self.new_blocks):
            raise ValueError("new blocks must hold at least one ball")

    @property
    def s(self) -> int:
        return sum(self.new_blocks)

    @property
    def m(self) -> int:
        return sum(self.old_adds) + self.s

    @property
    def kstar(self) -> int:
        return len(self.new_blocks)

    def canonical(self) -> "AllocationOutcome":
        """Same outcome with new blocks sorted in decreasing size."""
        return AllocationOutcome(self.old_adds, tuple(sorted(self.new_blocks, reverse=True)))


def _ratio_factor(n: int, k: int, m: int, kstar: int, g, mode: str) -> ExtendedReal:
    # V(n+m, k+kstar) / V(n, k)
    return (
        rising_factorial(k, kstar, 1, mode)
        / rising_factorial(n, m, 1, mode)
        * rising_factorial(k - g, kstar, 1, mode)
        * rising_factorial(g + n - k, m - kstar, 1, mode)
        / rising_factorial(g + n, m, 1, mode)
    )


def weight_ratio(n: int, k: int, m: int, kstar: int, params: ModelParams, mode: str = EXACT):
    """``V(n+m, k+kstar) / V(n, k)`` in product form."""
    if kstar > m:
        return numeric.zero(mode)
    return _ratio_factor(n, k, m, kstar, params.g(mode), mode)


def group_allocation_pmf(occ, outcome: AllocationOutcome, params: ModelParams,
                         mode: str = EXACT) -> ExtendedReal:
    """Probability of one labeled configuration of the next ``m`` balls.

    Covers all three cases: old blocks only (``kstar == 0``), new blocks only
    (every ``old_adds`` zero), and both.
    """
    occ = as_occupancy(occ)
    if len(outcome.old_adds) != occ.k:
        raise ValueError(
            f"outcome has {len(outcome.old_adds)} old-block entries but the state has {occ.k} blocks")
    out = weight_ratio(occ.n, occ.k, outcome.m, outcome.kstar, params, mode)
    for c, add in zip(occ.counts, outcome.old_adds):
        out = out * rising_factorial(c + 1, add, 1, mode)
    for size in outcome.new_blocks:
        out = out * factorial(size, mode)
    return out


def old_blocks_only_pmf(occ, old_adds, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """All ``m`` balls join old blocks: ``(g+n-k)_m / ((n)_m (g+n)_m) * prod (n_j+1)_{m_j}``."""
    occ = as_occupancy(occ)
    if len(old_adds) != occ.k:
        raise ValueError("old_adds must align with the occupancy vector")
    n, k, m = occ.n, occ.k, sum(old_adds)
    g = params.g(mode)
    out = (rising_factorial(g + n - k, m, 1, mode)
           / (rising_factorial(n, m, 1, mode) * rising_factorial(g + n, m, 1, mode)))
    for c, add in zip(occ.counts, old_adds):
        out = out * rising_factorial(c + 1, add, 1, mode)
    return out


def new_blocks_only_pmf(occ, new_blocks, params: ModelParams, mode: str = EXACT) -> ExtendedReal:
    """All ``m`` balls open ``kstar`` new blocks of the given sizes."""
    occ = as_occupancy(occ)
    n, k = occ.n, occ.k
    m, kstar = sum(new_blocks), len(new_blocks)
    if kstar < 1:
        raise ValueError("at least one new block required")
    g = params.g(mode)
    out = (rising_factorial(k, kstar, 1, mode) / rising_factorial(n, m, 1, mode)
           * rising_factorial(k - g, kstar, 1, mode) * rising_factorial(g + n - k, m - kstar, 1, mode)
           / rising_factorial(g + n, m, 1, mode))
    for size in new_blocks:
        out = out * factorial(size, mode)
    return out


def outcome_multiplicity(outcome: AllocationOutcome) -> int:
    """Number of labeled configurations of the ``m`` balls that realize ``outcome``."""
    count = math.factorial(outcome.m)
    for x in outcome.old_adds:
        count //= math.factorial(x)
    for x in outcome.new_blocks:
        count //= math.factorial(x)
    for mult in Counter(outcome.new_blocks).values():
        count //= math.factorial(mult)
    return count


def outcome_probability(occ, outcome: AllocationOutcome, params: ModelParams,
                        mode: str = EXACT) -> ExtendedReal:
    """Probability of the unlabeled outcome (sum over its labeled configurations)."""
    return numeric.value(outcome_multiplicity(outcome), mode) * group_allocation_pmf(
        occ, outcome, params, mode)


def _integer_partitions(s: int, largest: int = None) -> Iterator[tuple]:
    if largest is None:
        largest = s
    if s == 0:
        yield ()
        return
    for first in range(min(s, largest), 0, -1):
        for rest in _integer_partitions(s - first, first):
            yield (first,) + rest


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def iter_allocation_outcomes(k: int, m: int) -> Iterator[AllocationOutcome]:
    """Every unlabeled outcome for ``m`` balls and ``k`` old blocks, new blocks in canonical order."""
    for s in range(m + 1):
        for new_blocks in _integer_partitions(s):
            for old_adds in _compositions(m - s, k):
                yield AllocationOutcome(old_adds, new_blocks)


# -- sampling -----------------------------------------------------------------

Model = Union[ModelParams, int]


def _draw(rng: np.random.Generator, weights: list, total: float) -> int:
    u = rng.random() * total
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if u < acc:
            return i
    # guard against float round-off at the upper end
    for i in range(len(weights) - 1, -1, -1):
        if weights[i] > 0:
            return i
    raise RuntimeError("no positive weight to draw from")


def step(counts: list, model: Model, rng: np.random.Generator) -> int:
    """Seat one more ball in place (``counts`` is mutated). Returns the chosen index; ``len`` before the call means new."""
    n, k = sum(counts), len(counts)
    if isinstance(model, ModelParams):
        g = float(model.gamma)
        base = n - k + g
        weights = [base * (c + 1) for c in counts]
        weights.append(k * (k - g))
        total = n * (n + g)
    else:
        weights = [c + 1.0 for c in counts]
        weights.append(float(model - k))
        total = float(n + model)
    j = _draw(rng, weights, total)
    if j == k:
        counts.append(1)
    else:
        counts[j] += 1
    return j


def sample_partition(n: int, model: Model, rng: np.random.Generator) -> OccupancyVector:
    """Block sizes, in order of first appearance, after seating ``n`` balls sequentially.

    ``model`` is either :class:`ModelParams` (Gnedin's model) or a positive
    integer ``xi`` (the PD(-1, xi) model).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not isinstance(model, ModelParams) and (int(model) != model or model < 1):
        raise ValueError("a PD(-1, xi) model needs a positive integer xi")
    counts = [1]
    for _ in range(n - 1):
        step(counts, model, rng)
    return OccupancyVector(tuple(counts))


def extend_partition(occ, m: int, model: Model, rng: np.random.Generator) -> AllocationOutcome:
    """Seat ``m`` further balls after the basic sample ``occ`` and report how they landed."""
    occ = as_occupancy(occ)
    counts = list(occ.counts)
    k = occ.k
    for _ in range(m):
        step(counts, model, rng)
    old_adds = tuple(c - c0 for c, c0 in zip(counts[:k], occ.counts))
    return AllocationOutcome(old_adds, tuple(counts[k:]))


def stick_breaking_sample(xi: int, rng: np.random.Generator) -> np.ndarray:
    """Type frequencies of PD(-1, xi) by stick breaking with ``W_i ~ Beta(2, xi - i)``.

    ``W_xi`` is 1 (Beta(2, 0) is a point mass at 1), so the last piece takes
    whatever stick is left.
    """
    if int(xi) != xi or xi < 1:
        raise ValueError("xi must be a positive integer")
    xi = int(xi)
    freqs = np.empty(xi)
    remaining = 1.0
    for i in range(1, xi):
        w = rng.beta(2.0, xi - i)
        freqs[i - 1] = remaining * w
        remaining *= 1.0 - w
    freqs[xi - 1] = remaining
    return freqs

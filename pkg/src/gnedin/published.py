"""Closed forms transcribed literally, for side-by-side comparison.

Several predictive formulas circulate in a typeset form that is ambiguous or
inconsistent with the sequential construction. The functions here evaluate
each one as written, with the reading stated in its docstring, so that the
validation report can show how far the literal form is from the derived
quantity in :mod:`gnedin.posterior`. Nothing else in the package calls them.
"""

from __future__ import annotations

from . import numeric
from .combinatorics import binomial, factorial, lah_number, rising_factorial
from .model import ModelParams, as_occupancy
from .numeric import EXACT
from .posterior import total_types_posterior


def _rising_any_order(x, order: int, mode: str):
    """``Gamma(x + order) / Gamma(x)`` for any integer ``order`` (negative allowed)."""
    if order >= 0:
        return rising_factorial(x, order, 1, mode)
    return numeric.one(mode) / rising_factorial(x + order, -order, 1, mode)


def _lah_ratio(s: int, j: int, mode: str):
    """``C(s, j) (s-1)!/(j-1)!`` with the value 1 at ``s = j = 0`` and 0 for ``j = 0 < s``."""
    if j == 0:
        return numeric.one(mode) if s == 0 else numeric.zero(mode)
    return binomial(s, j, mode) * factorial(s - 1, mode) / factorial(j - 1, mode)


def noncentral_convolution_literal(n: int, k: int, r, mode: str = EXACT):
    """``sum_{s=0}^{n} C(n, k) L(s, k) (-r)_{n-s}`` with ``C(n, k)`` in place of ``C(n, s)``.

    The correct convolution for the non-central Lah number uses ``C(n, s)``
    and equals :func:`gnedin.combinatorics.noncentral_lah`.
    """
    r = numeric.scalar(r, mode)
    terms = [binomial(n, k, mode) * numeric.scalar(lah_number(s, k), mode)
             * rising_factorial(-r, n - s, 1, mode) for s in range(n + 1)]
    return numeric.total(terms, mode)


def kn_pmf_literal(n: int, k: int, params: ModelParams, mode: str = EXACT):
    """``C(n, k) (1-g)_{k-1} (g)_{n-k} / (1+g)_{n-1}``."""
    g = params.g(mode)
    return (binomial(n, k, mode) * rising_factorial(1 - g, k - 1, 1, mode)
            * rising_factorial(g, n - k, 1, mode) / rising_factorial(1 + g, n - 1, 1, mode))


def s_pmf_literal(n: int, k: int, m: int, s: int, params: ModelParams, mode: str = EXACT):
    """``C(m,s) (n+k)_{m-s} / ((n)_m (g+n)_m) * sum_{j=0}^{s} C(s,j) (s-1)!/(j-1)! (k)_j (k-g)_j (g+n-k)_{m-j}``."""
    g = params.g(mode)
    inner = numeric.total([
        _lah_ratio(s, j, mode) * rising_factorial(k, j, 1, mode) * rising_factorial(k - g, j, 1, mode)
        * rising_factorial(g + n - k, m - j, 1, mode)
        for j in range(s + 1)], mode)
    return (binomial(m, s, mode) * rising_factorial(n + k, m - s, 1, mode)
            / (rising_factorial(n, m, 1, mode) * rising_factorial(g + n, m, 1, mode)) * inner)


def km_pmf_literal(n: int, k: int, m: int, kstar: int, params: ModelParams, mode: str = EXACT):
    """``(k-g)_j (g+n-k)_{m-j} / (n+g)_m * C(m,j) (n+k+j)_{m-j} (k)_j / (n)_m`` at ``j = kstar``."""
    g = params.g(mode)
    j = kstar
    return (rising_factorial(k - g, j, 1, mode) * rising_factorial(g + n - k, m - j, 1, mode)
            / rising_factorial(n + g, m, 1, mode) * binomial(m, j, mode)
            * rising_factorial(n + k + j, m - j, 1, mode) * rising_factorial(k, j, 1, mode)
            / rising_factorial(n, m, 1, mode))


def km_mean_literal(n: int, k: int, m: int, params: ModelParams, mode: str = EXACT):
    """``(k)_{n+m} / (n+g)_m * sum_j C(m,j) j / (k+j)_n * (k-g)_j (g+n-k)_{m-j} / (n)_m``."""
    g = params.g(mode)
    inner = numeric.total([
        binomial(m, j, mode) * numeric.value(j, mode) / rising_factorial(k + j, n, 1, mode)
        * rising_factorial(k - g, j, 1, mode) * rising_factorial(g + n - k, m - j, 1, mode)
        / rising_factorial(n, m, 1, mode)
        for j in range(m + 1)], mode)
    return rising_factorial(k, n + m, 1, mode) / rising_factorial(n + g, m, 1, mode) * inner


def s_given_km_literal(n: int, k: int, m: int, kstar: int, s: int, mode: str = EXACT):
    """``C(s-1, j-1) C(n+k+m-s-1, m-s) / C(n+k+m-1, m-j)``; ``C(-1, -1)`` read as 1."""
    def c(a, b):
        if a == -1 and b == -1:
            return numeric.one(mode)
        return binomial(a, b, mode)
    return c(s - 1, kstar - 1) * c(n + k + m - s - 1, m - s) / c(n + k + m - 1, m - kstar)


def s_mean_literal(n: int, k: int, m: int, params: ModelParams, mode: str = EXACT):
    """``m k (k-g) / (n (n+g))``."""
    g = params.g(mode)
    return numeric.value(m, mode) * numeric.value(k, mode) * numeric.value(k - g, mode) / (
        numeric.value(n, mode) * numeric.value(n + g, mode))


def avoid_subset_literal(occ, m: int, avoid, params: ModelParams, mode: str = EXACT):
    """``sum_{j=1}^{m} (k)_j/(n)_m (k-g)_j (g+n-k)_{m-j}/(g+n)_m C(m,j) / (r + sum n_j + m)_{j-m}``.

    Read with ``r`` the number of boxes left available and ``sum n_j`` over
    those boxes; the rising factorial of negative order is
    ``Gamma(x + order)/Gamma(x)``. The sum starts at ``j = 1`` as written.
    """
    occ = as_occupancy(occ)
    avoid = set(avoid)
    keep = [c for i, c in enumerate(occ.counts) if i not in avoid]
    r, n_keep = len(keep), sum(keep)
    n, k = occ.n, occ.k
    g = params.g(mode)
    terms = [rising_factorial(k, j, 1, mode) / rising_factorial(n, m, 1, mode)
             * rising_factorial(k - g, j, 1, mode) * rising_factorial(g + n - k, m - j, 1, mode)
             / rising_factorial(g + n, m, 1, mode) * binomial(m, j, mode)
             / _rising_any_order(r + n_keep + m, j - m, mode)
             for j in range(1, m + 1)]
    return numeric.total(terms, mode)


def conditional_gibbs_literal(n: int, k: int, m: int, new_blocks, params: ModelParams, mode: str = EXACT):
    """Conditional probability of a new-block configuration, as typeset.

    Numerator ``G(k+j) G(k+j-g) G(g+n+m-k-j) prod s_i!`` and denominator
    ``sum_{i=1}^{m} C(s,i) (i)_k G(s) G(k+i-g) G(g+n+m-k-i)``, reading the
    unparseable ``Gamma(k^*)_k`` as the rising factorial ``(i)_k``. Gamma
    ratios are taken against ``G(g+n-k)`` and ``G(k-g)`` so exact mode stays
    rational.
    """
    s, j = sum(new_blocks), len(new_blocks)
    g = params.g(mode)

    def gam_k_minus_g(i):  # G(k+i-g) / G(k-g)
        return rising_factorial(k - g, i, 1, mode)

    def gam_rest(i):  # G(g+n+m-k-i) / G(g+n-k)
        return _rising_any_order(g + n - k, m - i, mode)

    num = factorial(k + j - 1, mode) * gam_k_minus_g(j) * gam_rest(j)
    for x in new_blocks:
        num = num * factorial(x, mode)
    den = numeric.total([
        binomial(s, i, mode) * rising_factorial(i, k, 1, mode) * factorial(s - 1, mode)
        * gam_k_minus_g(i) * gam_rest(i)
        for i in range(1, m + 1) if i <= s], mode)
    return num / den


def discovery_literal(n: int, k: int, m: int, params: ModelParams, mode: str = EXACT):
    """``sum_j (k)_{j+1}/(n)_{m+1} (k-g)_{j+1} (g+n-k)_{m-j}/(g+n)_{m+1} C(m,j) (m+n+j-1)!/(n-1)!``.

    The trailing factorial is read as ``(m+n+j-1)!``.
    """
    g = params.g(mode)
    terms = [rising_factorial(k, j + 1, 1, mode) / rising_factorial(n, m + 1, 1, mode)
             * rising_factorial(k - g, j + 1, 1, mode) * rising_factorial(g + n - k, m - j, 1, mode)
             / rising_factorial(g + n, m + 1, 1, mode) * binomial(m, j, mode)
             * factorial(m + n + j - 1, mode) / factorial(n - 1, mode)
             for j in range(m + 1)]
    return numeric.total(terms, mode)


def types_posterior_product_form(n: int, k: int, xi: int, params: ModelParams, mode: str = EXACT):
    """``(n-1)!/((k-1)!(xi+n-1)!) prod_{i<k}(xi-i) prod_{j<=k}(g+n-j) prod_{k<=l<xi}(l-g)``."""
    if xi < k:
        return numeric.zero(mode)
    g = params.g(mode)
    out = factorial(n - 1, mode) / (factorial(k - 1, mode) * factorial(xi + n - 1, mode))
    for i in range(1, k):
        out = out * numeric.value(xi - i, mode)
    for j in range(1, k + 1):
        out = out * numeric.value(g + n - j, mode)
    for l in range(k, xi):
        out = out * numeric.value(l - g, mode)
    return out


def types_mean_literal(n: int, k: int, params: ModelParams, mode: str = EXACT, max_support=None):
    """Typeset posterior mean of the number of types, as a truncated sum:

    ``(n-1)!/(k-1)! (n+g-1)_{k, falling} / (k-g-1)! * sum_{x>=k} (x-g-1)!/(x-k-1)! / (x)_n``

    with ``(x-g-1)!/(k-g-1)! = (k-g)_{x-k}`` and ``1/(-1)! = 0``. Summed over the
    same support as :func:`gnedin.posterior.total_types_posterior`.
    """
    g = params.g(mode)
    post = total_types_posterior(n, k, params, mode, max_support=max_support)
    lead = factorial(n - 1, mode) / factorial(k - 1, mode) * rising_factorial(g + n - k, k, 1, mode)
    terms = [rising_factorial(k - g, x - k, 1, mode) / factorial(x - k - 1, mode)
             / rising_factorial(x, n, 1, mode) for x in post.pmf.support if x > k]
    return lead * numeric.total(terms, mode)

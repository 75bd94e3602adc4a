"""Predictive laws: frozen values from the path-enumeration oracle, plus identities."""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnedin import posterior as post
from gnedin.model import ModelParams, gibbs_weight
from gnedin.numeric import LOG
from gnedin.oracle import bayes_types_posterior, exact_extension_oracle, integer_partitions
from gnedin.sampler import one_step_gnedin

# (n, k, m) grid where enumeration is cheap
GRID = [(n, k, m) for n in range(1, 6) for k in range(1, n + 1) for m in range(0, 5)]


def occ_with(n, k):
    return next(p for p in integer_partitions(n) if len(p) == k)


# -- frozen oracle values (gamma = 1/2) ------------------------------------------------

def test_kn_examples(half):
    assert post.kn_pmf(1, half).probs == [1]
    assert post.kn_pmf(2, half).probs == [Fraction(2, 3), Fraction(1, 3)]
    assert post.kn_pmf(8, ModelParams(Fraction(3, 10))).total() == 1


def test_new_config_examples(half):
    assert post.new_config_pmf(2, 1, 2, (1, 1), half) == Fraction(1, 35)
    assert post.new_config_pmf(2, 1, 2, (2,), half) == Fraction(1, 35)
    assert post.new_config_pmf(2, 1, 2, (1,), half) == Fraction(3, 35)
    for occ in [(1,), (2, 1)]:
        n, k = sum(occ), len(occ)
        assert post.new_config_pmf(n, k, 1, (1,), half) == one_step_gnedin(occ, half)[-1]


def test_joint_example(half):
    joint = dict(post.joint_km_s_pmf(2, 1, 3, half).items())
    assert joint == {
        (0, 0): Fraction(5, 6), (1, 1): Fraction(1, 14), (1, 2): Fraction(1, 28), (1, 3): Fraction(1, 84),
        (2, 2): Fraction(3, 140), (2, 3): Fraction(1, 70), (3, 3): Fraction(1, 84),
    }


def test_s_example(half):
    assert post.s_pmf(2, 1, 2, half).probs == [Fraction(6, 7), Fraction(3, 35), Fraction(2, 35)]


def test_km_example(half):
    assert post.km_pmf(3, 2, 3, half).probs == [Fraction(35, 66), Fraction(3, 11), Fraction(3, 22), Fraction(2, 33)]


def test_km_mean_example(half):
    assert post.km_mean(2, 1, 4, half) == Fraction(104, 385)


def test_avoid_example(half):
    assert post.avoid_subset_prob((2, 1), 2, [1], half) == Fraction(23, 42)


def test_discovery_example(half):
    assert post.discovery_prob(2, 1, 1, half) == Fraction(1, 14)
    km = post.km_pmf(2, 1, 1, half)
    hand = km[0] * one_step_gnedin((3,), half)[-1] + km[1] * one_step_gnedin((2, 1), half)[-1]
    assert hand == Fraction(1, 14)


def test_s_mean_example(half):
    assert post.s_mean(10, 3, 5, half) == Fraction(5, 14)


# -- one-step reductions --------------------------------------------------------------

@pytest.mark.parametrize("n,k", [(1, 1), (3, 2), (5, 5), (6, 1)])
def test_m_equals_one(n, k, params):
    g = params.gamma
    new = k * (k - g) / (n * (n + g))
    assert post.km_pmf(n, k, 1, params).probs == [(g + n - k) * (n + k) / ((n + g) * n), new]
    assert post.km_mean(n, k, 1, params) == new
    assert post.discovery_prob(n, k, 0, params) == new
    assert dict(post.joint_km_s_pmf(n, k, 1, params).items()) == {(0, 0): 1 - new, (1, 1): new}
    assert post.s_given_km_pmf(n, k, 1, 1, params).probs == [1]


def test_m_equals_zero(params):
    assert post.km_mean(3, 2, 0, params) == 0
    assert post.s_mean(3, 2, 0, params) == 0
    assert post.s_pmf(3, 2, 0, params).probs == [1]
    assert list(post.joint_km_s_pmf(3, 2, 0, params).items()) == [((0, 0), 1)]
    assert post.avoid_subset_prob((2, 1), 0, [0], params) == 1


def test_avoid_nothing_is_certain(params):
    assert post.avoid_subset_prob((2, 1, 1), 3, [], params) == 1


def test_conditional_gibbs(half):
    assert post.conditional_gibbs_pmf(3, 2, 2, (1,), half) == 1
    two = post.conditional_gibbs_pmf(2, 1, 2, (2,), half)
    pair = post.conditional_gibbs_pmf(2, 1, 2, (1, 1), half)
    assert two + pair == 1
    assert two / pair == post.new_config_pmf(2, 1, 2, (2,), half) / post.new_config_pmf(2, 1, 2, (1, 1), half)
    with pytest.raises(post.UndefinedConditionalError):
        post.conditional_gibbs_pmf(2, 1, 0, (), half)


def test_s_given_km_point_masses(half):
    assert list(post.s_given_km_pmf(2, 1, 3, 3, half).items()) == [(3, 1)]
    assert post.s_given_km_pmf(2, 1, 3, 0, half).probs == [1]
    with pytest.raises(ValueError):
        post.s_given_km_pmf(2, 1, 3, 4, half)


# -- exhaustive oracle agreement --------------------------------------------------------

@pytest.mark.parametrize("n,k,m", GRID)
@pytest.mark.parametrize("gamma", [Fraction(3, 10), Fraction(7, 10)])
def test_every_law_matches_path_enumeration(n, k, m, gamma):
    params = ModelParams(gamma)
    law = exact_extension_oracle(occ_with(n, k), m, params)
    km_o = law.law_of(lambda p: law.outcome(p).kstar)
    s_o = law.law_of(lambda p: law.outcome(p).s)
    joint_o = law.law_of(lambda p: (law.outcome(p).kstar, law.outcome(p).s))

    assert {x: p for x, p in post.km_pmf(n, k, m, params).items() if p} == km_o
    assert {x: p for x, p in post.s_pmf(n, k, m, params).items() if p} == s_o
    assert {x: p for x, p in post.joint_km_s_pmf(n, k, m, params).items() if p} == joint_o
    assert post.km_mean(n, k, m, params) == law.expectation(lambda p: law.outcome(p).kstar)
    assert post.s_mean(n, k, m, params) == law.expectation(lambda p: law.outcome(p).s)
    assert post.discovery_prob(n, k, m, params) == law.expectation(
        lambda p: one_step_gnedin(law.final_counts(p), params)[-1])
    for kstar, pk in km_o.items():
        cond = dict(post.s_given_km_pmf(n, k, m, kstar, params).items())
        assert cond == {s: p / pk for (a, s), p in joint_o.items() if a == kstar}
    for rgs, p in law.law_of(law.new_partition).items():
        if rgs:
            sizes = [rgs.count(b) for b in range(max(rgs) + 1)]
            assert post.new_config_pmf(n, k, m, sizes, params) == p
            assert post.conditional_gibbs_pmf(n, k, m, sizes, params) == p / s_o[len(rgs)]


@pytest.mark.parametrize("occ", [(1,), (2, 1), (1, 1, 1), (3, 1), (2, 2), (2, 1, 1)])
@pytest.mark.parametrize("m", range(5))
def test_avoid_subset_matches_paths(occ, m, params):
    law = exact_extension_oracle(occ, m, params)
    for r in range(len(occ) + 1):
        avoid = list(range(r, len(occ)))
        expected = sum((p for path, p in law.paths.items() if not set(path) & set(avoid)), Fraction(0))
        assert post.avoid_subset_prob(occ, m, avoid, params) == expected
        assert post.avoid_subset_prob(occ, m, avoid, params, method="closed") == expected


def test_avoid_depends_on_sizes_not_just_count(half):
    a = post.avoid_subset_prob((3, 1), 2, [0], half)
    b = post.avoid_subset_prob((3, 1), 2, [1], half)
    assert a != b


@pytest.mark.parametrize("n", range(1, 6))
def test_laws_depend_on_n_k_only(n, half):
    for k in range(1, n + 1):
        vectors = [p for p in integer_partitions(n) if len(p) == k]
        laws = []
        for occ in vectors:
            law = exact_extension_oracle(occ, 2, half)
            laws.append(law.law_of(lambda p: (law.outcome(p).kstar, law.outcome(p).s)))
        assert all(x == laws[0] for x in laws)


# -- marginalization lattice --------------------------------------------------------------

@pytest.mark.parametrize("n,k,m", GRID)
@pytest.mark.parametrize("gamma", [Fraction(3, 10), Fraction(7, 10)])
def test_lattice(n, k, m, gamma):
    params = ModelParams(gamma)
    joint = dict(post.joint_km_s_pmf(n, k, m, params).items())
    s = post.s_pmf(n, k, m, params)
    km = post.km_pmf(n, k, m, params)
    for x in range(m + 1):
        assert sum(p for (a, b), p in joint.items() if b == x) == s[x]
        assert sum(p for (a, b), p in joint.items() if a == x) == km[x]
    assert km.total() == 1 and s.total() == 1
    assert sum(x * p for x, p in s.items()) == post.s_mean(n, k, m, params)
    g = params.gamma
    assert post.s_mean(n, k, m, params) == m * k * (k - g) / (n * (n + g))
    assert post.s_mean(n, k, m, params) == m * gibbs_weight(n + 1, k + 1, params) / gibbs_weight(n, k, params)


@given(st.integers(1, 40), st.data(), st.integers(0, 30),
       st.fractions(Fraction(1, 50), Fraction(49, 50), max_denominator=50))
def test_km_normalized_property(n, data, m, g):
    k = data.draw(st.integers(1, n))
    pmf = post.km_pmf(n, k, m, ModelParams(g))
    assert pmf.total() == 1
    assert all(p >= 0 for p in pmf.probs)


def test_log_mode_matches_exact(params):
    for n, k, m in [(5, 2, 8), (12, 7, 20)]:
        ex = post.km_pmf(n, k, m, params).as_floats()
        lg = post.km_pmf(n, k, m, params, LOG).as_floats()
        assert lg == pytest.approx(ex, rel=1e-10, abs=1e-300)
        assert float(post.discovery_prob(n, k, m, params, LOG)) == pytest.approx(
            float(post.discovery_prob(n, k, m, params)), rel=1e-10)


def test_large_m_in_log_mode(half):
    pmf = post.km_pmf(5, 3, 10_000, half, LOG)
    assert math.fsum(pmf.as_floats()) == pytest.approx(1.0, abs=1e-9)


# -- total number of types -----------------------------------------------------------------

def test_types_posterior_one_ball_is_prior(params):
    from gnedin.model import mixing_pmf
    tp = post.total_types_posterior(1, 1, params, max_support=40)
    for xi, p in tp.pmf.items():
        assert p == mixing_pmf(xi, params)


def test_types_posterior_example(half):
    tp = post.total_types_posterior(2, 2, half, max_support=10)
    assert tp.pmf[2] == Fraction(1, 8)


@pytest.mark.parametrize("n", range(1, 7))
def test_types_posterior_matches_bayes(n, params):
    for k in range(1, n + 1):
        tp = post.total_types_posterior(n, k, params, max_support=30)
        bayes, _ = bayes_types_posterior(n, k, params, tp.pmf.support)
        for xi, p in tp.pmf.items():
            enc = bayes[xi]
            slack = Fraction(1, 10**12) * enc.hi
            assert enc.lo - slack <= p <= enc.hi + slack


@pytest.mark.parametrize("n,k", [(3, 1), (5, 2), (6, 6), (8, 3)])
def test_types_posterior_mass_with_tail(n, k, params):
    tp = post.total_types_posterior(n, k, params, LOG)
    total = math.fsum(tp.pmf.as_floats())
    assert total <= 1 + 1e-12
    assert 1 - total <= tp.pmf.tail_bound + 1e-10
    assert tp.pmf.meta["tail_lower"] <= tp.pmf.meta["tail_upper"]


def test_types_mean_divergent_case():
    tp = post.total_types_posterior(3, 3, ModelParams(Fraction(1, 2)), max_support=20)
    assert tp.mean == math.inf


def test_types_mean_finite(half):
    tp = post.total_types_posterior(4, 1, half, max_support=64)
    lo, hi = tp.mean_bounds
    assert lo <= float(tp.mean) <= hi
    exact = post.total_types_posterior(4, 1, half, LOG)
    assert float(exact.mean) == pytest.approx(float(tp.mean), rel=1e-10)


def test_limit_shift_identity(params):
    for n, k in [(2, 1), (5, 3), (7, 7)]:
        lim = post.km_pmf_limit(n, k, params, max_support=51)
        tp = post.total_types_posterior(n, k, params, max_support=51)
        for j in range(51):
            assert abs(lim[j] - tp.pmf[k + j]) <= Fraction(1, 10**12) * tp.pmf[k + j]


def test_limit_example(half):
    lim = post.km_pmf_limit(2, 1, half, max_support=5)
    bayes, _ = bayes_types_posterior(2, 1, half, [1])
    assert lim[0] in bayes[1]


def test_total_variation_counts_tails():
    p = post.DiscretePmf([0, 1], [0.5, 0.5])
    q = post.DiscretePmf([0, 1], [0.5, 0.4], tail_bound=0.1)
    assert post.total_variation(p, q) == pytest.approx(0.1)


def test_pmf_container():
    p = post.DiscretePmf([1, 2], [Fraction(1, 4), Fraction(3, 4)])
    assert p.mean() == Fraction(7, 4)
    assert p.get(3) == 0
    with pytest.raises(KeyError):
        p[3]
    with pytest.raises(ValueError):
        post.DiscretePmf([1], [])

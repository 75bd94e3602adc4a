"""Reconciliation of every predictive closed form against independent oracles.

For each configuration ``(occupancy, m, gamma)`` the report holds one record
per formula. A record carries three evaluations of the same table:

``derived``
    the package's implementation in :mod:`gnedin.posterior`;
``published``
    the literal typeset form from :mod:`gnedin.published` (``null`` when no
    separate typeset form exists);
``oracle``
    an independent ground truth: path enumeration of the sequential rule,
    set-partition enumeration, or Bayes' rule with a certified normalizer.

The verdict compares ``derived`` with ``oracle`` only. It is ``PASS`` when
every entry agrees exactly in rational arithmetic (or, for the infinite
series over the number of types, lies inside the certified enclosure up to a
relative slack of ``1e-12``), ``FAIL`` otherwise, and ``N/A`` when the table
is empty for this configuration. Published-vs-derived deviations are
recorded, never judged.

JSON schema (``schema_version`` 1)::

    {"schema_version": 1,
     "summary": {"configs": int, "records": int, "pass": int, "fail": int, "not_applicable": int},
     "records": [
        {"formula_id": str, "description": str,
         "config": {"occupancy": [int], "n": int, "k": int, "m": int, "gamma": str},
         "comparison": "exact" | "certified",
         "derived": {key: float}, "published": {key: float} | null, "oracle": {key: float},
         "derived_vs_oracle": {"max_abs": float, "max_rel": float},
         "published_vs_derived": {"max_abs": float, "max_rel": float} | null,
         "published_error": str | null,
         "verdict": "PASS" | "FAIL" | "N/A"}]}

Non-finite values (a divergent mean) are written as ``null``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import posterior, published
from .combinatorics import noncentral_lah
from .model import ModelParams, as_occupancy, eppf_gnedin
from .oracle import (DEFAULT_BUDGET, BudgetExceededError, EnumerationBudget, bayes_types_posterior,
                     connection_coefficients_oracle,
                     enumerate_set_partitions, exact_extension_oracle, hypergeometric_tail_enclosure,
                     integer_partitions, mixture_term)

SCHEMA_VERSION = 1
CERTIFIED_REL_SLACK = Fraction(1, 10**12)
#: Support of the number-of-types posterior checked per configuration.
TYPES_SUPPORT = 60

FORMULAS: Dict[str, str] = {
    "kn_pmf": "law of the number of boxes K_n in the basic sample",
    "new_config_pmf": "probability that the balls in new boxes form a given set partition",
    "joint_km_s_pmf": "joint law of (K_m, S)",
    "s_pmf": "law of S, additional balls in new boxes",
    "km_pmf": "law of K_m, new boxes among the additional balls",
    "noncentral_lah": "non-central Lah numbers S(m, j; -(n+k)) entering the law of K_m",
    "km_mean": "posterior mean of K_m",
    "s_given_km_pmf": "law of S given K_m",
    "s_mean": "posterior mean of S",
    "avoid_subset_prob": "probability that no additional ball joins the last old box",
    "conditional_gibbs_pmf": "law of the new-box partition given S",
    "discovery_prob": "probability that ball n+m+1 opens a new box",
    "total_types_posterior": "posterior of the total number of types",
    "total_types_mean": "posterior mean of the total number of types",
    "km_pmf_limit": "large-m limit of the law of K_m",
}

Config = Tuple[Tuple[int, ...], int, Fraction]


@dataclass
class Record:
    formula_id: str
    config: dict
    comparison: str
    derived: Dict[str, object]
    oracle: Dict[str, object]
    published: Optional[Dict[str, object]] = None
    published_error: Optional[str] = None
    verdict: str = "N/A"
    derived_vs_oracle: dict = field(default_factory=dict)
    published_vs_derived: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "formula_id": self.formula_id,
            "description": FORMULAS[self.formula_id],
            "config": self.config,
            "comparison": self.comparison,
            "derived": _floats(self.derived),
            "published": None if self.published is None else _floats(self.published),
            "oracle": _floats(self.oracle),
            "derived_vs_oracle": self.derived_vs_oracle,
            "published_vs_derived": self.published_vs_derived,
            "published_error": self.published_error,
            "verdict": self.verdict,
        }


@dataclass
class ValidationReport:
    records: List[Record]
    n_configs: int

    @property
    def failures(self) -> List[Record]:
        return [r for r in self.records if r.verdict == "FAIL"]

    @property
    def ok(self) -> bool:
        return not self.failures

    def find(self, formula_id: str) -> List[Record]:
        return [r for r in self.records if r.formula_id == formula_id]

    def to_json(self) -> dict:
        verdicts = [r.verdict for r in self.records]
        return {
            "schema_version": SCHEMA_VERSION,
            "summary": {
                "configs": self.n_configs,
                "records": len(self.records),
                "pass": verdicts.count("PASS"),
                "fail": verdicts.count("FAIL"),
                "not_applicable": verdicts.count("N/A"),
            },
            "records": [r.to_json() for r in self.records],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False, allow_nan=False)


# -- helpers --------------------------------------------------------------------

def _finite_or_none(x) -> Optional[float]:
    if x is None:
        return None
    f = float(x)
    return f if math.isfinite(f) else None


def _floats(table: Dict[str, object]) -> Dict[str, Optional[float]]:
    return {key: _finite_or_none(v) for key, v in table.items()}


def _deviation(a: Dict[str, object], b: Dict[str, object]) -> dict:
    """Largest absolute and relative gap over the keys of ``b`` (missing keys of ``a`` count as 0)."""
    max_abs, max_rel = Fraction(0), Fraction(0)
    for key, vb in b.items():
        va = a.get(key, Fraction(0))
        if isinstance(va, float) or isinstance(vb, float):
            if va == vb:
                continue
            if not (math.isfinite(float(va)) and math.isfinite(float(vb))):
                return {"max_abs": None, "max_rel": None}
            va, vb = Fraction(float(va)), Fraction(float(vb))
        gap = abs(va - vb)
        max_abs = max(max_abs, gap)
        if vb != 0:
            max_rel = max(max_rel, gap / abs(vb))
        elif gap:
            return {"max_abs": _finite_or_none(max_abs), "max_rel": None}
    return {"max_abs": float(max_abs), "max_rel": float(max_rel)}


def _exact_verdict(derived: Dict[str, object], oracle: Dict[str, object]) -> str:
    if not oracle and not derived:
        return "N/A"
    keys = set(derived) | set(oracle)
    same = all(derived.get(key, Fraction(0)) == oracle.get(key, Fraction(0)) for key in keys)
    return "PASS" if same else "FAIL"


def _within(x, lo, hi) -> bool:
    slack = CERTIFIED_REL_SLACK * max(abs(lo), abs(hi))
    return lo - slack <= x <= hi + slack


def _config_json(occ, m, gamma) -> dict:
    return {"occupancy": list(occ.counts), "n": occ.n, "k": occ.k, "m": m, "gamma": str(gamma)}


def _rgs_sizes(rgs: Sequence[int]) -> Tuple[int, ...]:
    sizes = [0] * (max(rgs) + 1)
    for label in rgs:
        sizes[label] += 1
    return tuple(sizes)


def _rgs_key(rgs: Sequence[int]) -> str:
    return "rgs=" + "".join(str(x) for x in rgs)


# -- oracles shared across formulas -------------------------------------------

@lru_cache(maxsize=None)
def _kn_oracle(n: int, gamma: Fraction) -> Dict[int, Fraction]:
    params = ModelParams(gamma)
    law: Dict[int, Fraction] = {}
    for blocks in enumerate_set_partitions(n):
        k = len(blocks)
        law[k] = law.get(k, Fraction(0)) + eppf_gnedin([len(b) for b in blocks], params)
    return law


@lru_cache(maxsize=None)
def _types_oracle(n: int, k: int, gamma: Fraction):
    params = ModelParams(gamma)
    post, _ = bayes_types_posterior(n, k, params, range(k, k + TYPES_SUPPORT + 1))
    return post


@lru_cache(maxsize=None)
def _types_mean_oracle(n: int, k: int, gamma: Fraction):
    """Certified bounds on ``E[xi | K_n = k]`` as a ratio of two mixture series; ``None`` if it diverges."""
    params = ModelParams(gamma)
    if n - k + gamma <= 1:
        return None
    start = max(k + 1, 256)
    num_head = sum((xi * mixture_term(n, k, xi, params) for xi in range(k, start)), Fraction(0))
    den_head = sum((mixture_term(n, k, xi, params) for xi in range(k, start)), Fraction(0))
    u = mixture_term(n, k, start, params)
    num_tail = hypergeometric_tail_enclosure(u * start, Fraction(1), -gamma, Fraction(1 - k),
                                             Fraction(n), start)
    den_tail = hypergeometric_tail_enclosure(u, -gamma, Fraction(0), Fraction(1 - k), Fraction(n), start)
    return ((num_head + num_tail.lo) / (den_head + den_tail.hi),
            (num_head + num_tail.hi) / (den_head + den_tail.lo))


@lru_cache(maxsize=None)
def _types_derived(n: int, k: int, gamma: Fraction) -> posterior.TypesPosterior:
    return posterior.total_types_posterior(n, k, ModelParams(gamma), max_support=TYPES_SUPPORT + 4)


@lru_cache(maxsize=None)
def _limit_derived(n: int, k: int, gamma: Fraction) -> posterior.DiscretePmf:
    return posterior.km_pmf_limit(n, k, ModelParams(gamma), max_support=TYPES_SUPPORT + 4)


# -- per-formula builders ------------------------------------------------------
# Each returns (derived, published-or-None, oracle, comparison) for one config.

def _published_table(fn: Callable[[], Dict[str, object]]):
    try:
        return fn(), None
    except (ZeroDivisionError, ValueError, OverflowError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _build(occ, m, params, law, budget):
    n, k, g = occ.n, occ.k, params.gamma
    out = {}

    # K_n
    kn = posterior.kn_pmf(n, params)
    oracle = _kn_oracle(n, g)
    out["kn_pmf"] = (
        {f"k={x}": p for x, p in kn.items()},
        lambda: {f"k={x}": published.kn_pmf_literal(n, x, params) for x in kn.support},
        {f"k={x}": oracle.get(x, Fraction(0)) for x in kn.support},
        "exact")

    # set partition formed by the balls in new boxes
    rgs_law = law.law_of(law.new_partition)
    rgs_law.pop((), None)
    out["new_config_pmf"] = (
        {_rgs_key(r): posterior.new_config_pmf(n, k, m, _rgs_sizes(r), params) for r in rgs_law},
        None,
        {_rgs_key(r): p for r, p in rgs_law.items()},
        "exact")

    joint_o = law.law_of(lambda path: (law.outcome(path).kstar, law.outcome(path).s))
    joint = posterior.joint_km_s_pmf(n, k, m, params)
    out["joint_km_s_pmf"] = (
        {f"kstar={a},s={b}": p for (a, b), p in joint.items()},
        None,
        {f"kstar={a},s={b}": p for (a, b), p in joint_o.items()},
        "exact")

    s_o = law.law_of(lambda path: law.outcome(path).s)
    sp = posterior.s_pmf(n, k, m, params)
    out["s_pmf"] = (
        {f"s={x}": p for x, p in sp.items()},
        lambda: {f"s={x}": published.s_pmf_literal(n, k, m, x, params) for x in sp.support},
        {f"s={x}": p for x, p in s_o.items()},
        "exact")

    km_o = law.law_of(lambda path: law.outcome(path).kstar)
    kmp = posterior.km_pmf(n, k, m, params)
    out["km_pmf"] = (
        {f"kstar={x}": p for x, p in kmp.items()},
        lambda: {f"kstar={x}": published.km_pmf_literal(n, k, m, x, params) for x in kmp.support},
        {f"kstar={x}": p for x, p in km_o.items()},
        "exact")

    shift = -(n + k)
    coefs = connection_coefficients_oracle(m, shift)
    out["noncentral_lah"] = (
        {f"j={j}": noncentral_lah(m, j, shift) for j in range(m + 1)},
        lambda: {f"j={j}": published.noncentral_convolution_literal(m, j, shift) for j in range(m + 1)},
        {f"j={j}": c for j, c in enumerate(coefs)},
        "exact")

    out["km_mean"] = (
        {"mean": posterior.km_mean(n, k, m, params)},
        lambda: {"mean": published.km_mean_literal(n, k, m, params)},
        {"mean": law.expectation(lambda path: law.outcome(path).kstar)},
        "exact")

    derived, pub, orc = {}, {}, {}
    for kstar in sorted(km_o):
        cond = posterior.s_given_km_pmf(n, k, m, kstar, params)
        for s, p in cond.items():
            derived[f"kstar={kstar},s={s}"] = p
            pub[f"kstar={kstar},s={s}"] = (kstar, s)
        for (a, s), p in joint_o.items():
            if a == kstar:
                orc[f"kstar={kstar},s={s}"] = p / km_o[kstar]
    out["s_given_km_pmf"] = (
        derived,
        lambda: {key: published.s_given_km_literal(n, k, m, a, s) for key, (a, s) in pub.items()},
        orc, "exact")

    out["s_mean"] = (
        {"mean": posterior.s_mean(n, k, m, params)},
        lambda: {"mean": published.s_mean_literal(n, k, m, params)},
        {"mean": law.expectation(lambda path: law.outcome(path).s)},
        "exact")

    last = k - 1
    out["avoid_subset_prob"] = (
        {"avoid_last": posterior.avoid_subset_prob(occ, m, [last], params)},
        lambda: {"avoid_last": published.avoid_subset_literal(occ, m, [last], params)},
        {"avoid_last": sum((p for path, p in law.paths.items() if last not in path), Fraction(0))},
        "exact")

    derived, orc, sizes = {}, {}, {}
    for r, p in rgs_law.items():
        key = _rgs_key(r)
        sizes[key] = _rgs_sizes(r)
        derived[key] = posterior.conditional_gibbs_pmf(n, k, m, sizes[key], params)
        orc[key] = p / s_o[len(r)]
    out["conditional_gibbs_pmf"] = (
        derived,
        lambda: {key: published.conditional_gibbs_literal(n, k, m, sz, params) for key, sz in sizes.items()},
        orc, "exact")

    out["discovery_prob"] = (
        {"prob": posterior.discovery_prob(n, k, m, params)},
        lambda: {"prob": published.discovery_literal(n, k, m, params)},
        {"prob": law.expectation(lambda path: _one_step_new(law.final_counts(path), params))},
        "exact")

    # number of types: Bayes' rule with a certified normalizer
    tp = _types_derived(n, k, g)
    bayes = _types_oracle(n, k, g)
    support = [x for x in tp.pmf.support if x <= k + TYPES_SUPPORT]
    out["total_types_posterior"] = (
        {f"xi={x}": tp.pmf[x] for x in support},
        lambda: {f"xi={x}": published.types_posterior_product_form(n, k, x, params) for x in support},
        {f"xi={x}": bayes[x] for x in support},
        "certified")

    mean_enc = _types_mean_oracle(n, k, g)
    out["total_types_mean"] = (
        {"mean": tp.mean},
        lambda: {"mean": k + published.types_mean_literal(n, k, params, max_support=TYPES_SUPPORT + 4)},
        {"mean": math.inf if mean_enc is None else mean_enc},
        "certified")

    lim = _limit_derived(n, k, g)
    out["km_pmf_limit"] = (
        {f"kstar={j}": lim[j] for j in range(TYPES_SUPPORT + 1)},
        None,
        {f"kstar={j}": bayes[k + j] for j in range(TYPES_SUPPORT + 1)},
        "certified")
    return out


def _one_step_new(counts, params) -> Fraction:
    n, k, g = sum(counts), len(counts), params.g("exact")
    return k * (k - g) / (n * (n + g))


def _certified_verdict(derived: Dict[str, object], oracle: Dict[str, object]) -> Tuple[str, Dict[str, object]]:
    """Check each derived value against an enclosure; also returns oracle midpoints for display."""
    mids: Dict[str, object] = {}
    ok = True
    for key, enc in oracle.items():
        d = derived.get(key)
        if enc is math.inf or (isinstance(enc, float) and math.isinf(enc)):
            mids[key] = math.inf
            ok = ok and d is not None and float(d) == math.inf
            continue
        lo, hi = (enc.lo, enc.hi) if hasattr(enc, "lo") else enc
        mids[key] = (lo + hi) / 2
        ok = ok and d is not None and not (isinstance(d, float) and math.isinf(d)) and _within(d, lo, hi)
    if not oracle:
        return "N/A", mids
    return ("PASS" if ok else "FAIL"), mids


def _record(formula_id, cfg, derived, pub_fn, oracle, comparison) -> Record:
    if comparison == "exact":
        verdict = _exact_verdict(derived, oracle)
        oracle_vals = oracle
    else:
        verdict, oracle_vals = _certified_verdict(derived, oracle)
    rec = Record(formula_id, cfg, comparison, derived, oracle_vals, verdict=verdict,
                 derived_vs_oracle=_deviation(derived, oracle_vals))
    if pub_fn is not None:
        pub, err = _published_table(pub_fn)
        rec.published, rec.published_error = pub, err
        if pub is not None:
            rec.published_vs_derived = _deviation(pub, derived)
    return rec


# -- public entry points -------------------------------------------------------

def default_configs(max_n: int = 4, max_m: int = 4,
                    gammas: Iterable = (Fraction(3, 10), Fraction(7, 10))) -> List[Config]:
    """Every occupancy vector with ``n <= max_n``, every ``m <= max_m``, each ``gamma``."""
    configs = []
    for g in gammas:
        for n in range(1, max_n + 1):
            for occ in integer_partitions(n):
                for m in range(max_m + 1):
                    configs.append((occ, m, Fraction(g) if not isinstance(g, float) else Fraction(repr(g))))
    return configs


def reconcile(configs: Optional[Sequence[Config]] = None,
              budget: EnumerationBudget = DEFAULT_BUDGET) -> ValidationReport:
    """Evaluate every formula on every configuration against its oracle.

    Raises :class:`gnedin.oracle.BudgetExceededError` when a configuration is
    too large to enumerate.
    """
    if configs is None:
        configs = default_configs()
    records: List[Record] = []
    for occ, m, gamma in configs:
        occ = as_occupancy(occ)
        params = ModelParams(gamma)
        if occ.n > budget.max_partition_n:
            raise BudgetExceededError(f"n={occ.n} exceeds the partition budget {budget.max_partition_n}")
        law = exact_extension_oracle(occ, m, params, budget)
        cfg = _config_json(occ, m, params.gamma)
        built = _build(occ, m, params, law, budget)
        for formula_id in FORMULAS:
            derived, pub_fn, oracle, comparison = built[formula_id]
            records.append(_record(formula_id, cfg, derived, pub_fn, oracle, comparison))
    return ValidationReport(records, len(configs))


__all__ = ["FORMULAS", "Record", "SCHEMA_VERSION", "ValidationReport", "default_configs", "reconcile"]

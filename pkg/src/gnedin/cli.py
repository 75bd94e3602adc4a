"""Command line front end.

Every subcommand writes JSON to stdout by default; ``--format csv`` writes the
main table instead. The model parameter ``--gamma`` is never defaulted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import posterior, published
from .io import AbundanceDataset, IngestError, ingest
from .model import ModelParams, eppf_gnedin
from .numeric import EXACT, LOG, LogReal
from .oracle import BudgetExceededError, EnumerationBudget
from .report import default_configs, reconcile
from .sampler import sample_partition

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2
EXIT_BAD_PARAMETER = 3
EXIT_BAD_INPUT = 4
EXIT_BUDGET = 5

#: Largest ``n + m`` evaluated in exact arithmetic under ``--mode auto``.
AUTO_EXACT_LIMIT = 200

EPILOG = f"""\
exit codes:
  {EXIT_OK}  success
  {EXIT_VALIDATION_FAILED}  validate: at least one derived-vs-oracle check failed
  {EXIT_USAGE}  usage error (unknown subcommand or flag, missing argument)
  {EXIT_BAD_PARAMETER}  invalid parameter (gamma outside (0, 1), negative m, ...)
  {EXIT_BAD_INPUT}  unreadable or invalid abundance file
  {EXIT_BUDGET}  validate: enumeration budget exceeded
"""


class ParameterError(ValueError):
    pass


# -- value encoding ------------------------------------------------------------

def encode(x):
    """JSON-safe number: a float when representable, else ``{"sign", "log_abs"}``."""
    if isinstance(x, LogReal):
        if x.representable():
            return float(x)
        return {"sign": x.sign, "log_abs": x.log_abs}
    if isinstance(x, Fraction):
        if x == 0:
            return 0.0
        try:
            f = float(x)
        except OverflowError:
            f = math.inf
        if f == 0.0 or math.isinf(f):
            return encode(LogReal.from_value(x))
        return f
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _csv_cell(v):
    if isinstance(v, dict):
        return f"{'-' if v['sign'] < 0 else ''}exp({v['log_abs']!r})"
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else str(v)


def _emit(payload: dict, table: Optional[List[dict]], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, indent=2, allow_nan=False))
        out.write("\n")
        return
    rows = table if table is not None else [{"field": k, "value": v} for k, v in _flatten(payload).items()]
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    out.write(buf.getvalue())


def _flatten(d: dict, prefix: str = "") -> Dict[str, object]:
    flat: Dict[str, object] = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict) and set(v) != {"sign", "log_abs"}:
            flat.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            flat[key] = " ".join(str(x) for x in v)
        else:
            flat[key] = v
    return flat


# -- argument handling ---------------------------------------------------------

def _gamma(text: str) -> ModelParams:
    try:
        g = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"gamma must be a number, got {text!r}") from None
    if not 0 < g < 1:
        raise ParameterError(f"gamma must lie strictly between 0 and 1, got {text}")
    return ModelParams(g)


def _nonneg(name: str, value: int) -> int:
    if value < 0:
        raise ParameterError(f"{name} must be non-negative, got {value}")
    return value


def _mode(requested: str, size: int) -> str:
    if requested == "auto":
        return EXACT if size <= AUTO_EXACT_LIMIT else LOG
    return requested


def _dataset_json(data: AbundanceDataset) -> dict:
    return {"n": data.n, "k": data.k, "occupancy": list(data.counts)}


def _header(command: str, params: ModelParams, mode: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command,
            "gamma": str(params.gamma), "mode": mode}


# -- subcommands ----------------------------------------------------------------

def cmd_describe(args, params: ModelParams, out) -> int:
    data = ingest(args.data)
    mode = _mode(args.mode, data.n)
    payload = _header("describe", params, mode)
    payload.update(_dataset_json(data))
    payload["kn_pmf_at_k"] = encode(posterior.kn_prob(data.n, data.k, params, mode))
    payload["eppf"] = encode(eppf_gnedin(data.counts, params, mode))
    _emit(payload, None, args.format, out)
    return EXIT_OK


def cmd_predict_species(args, params: ModelParams, out) -> int:
    data = ingest(args.data)
    m = _nonneg("m", args.m)
    mode = _mode(args.mode, data.n + m)
    n, k = data.n, data.k
    pmf = posterior.km_pmf(n, k, m, params, mode)
    rows = [{"kstar": j,
             "probability": encode(p),
             "published_probability": encode(published.km_pmf_literal(n, k, m, j, params, mode))}
            for j, p in pmf.items()]
    payload = _header("predict-species", params, mode)
    payload.update(_dataset_json(data))
    payload["m"] = m
    payload["km_pmf"] = rows
    payload["km_mean"] = encode(posterior.km_mean(n, k, m, params, mode))
    payload["published_km_mean"] = encode(published.km_mean_literal(n, k, m, params, mode))
    _emit(payload, rows, args.format, out)
    return EXIT_OK


def cmd_predict_observations(args, params: ModelParams, out) -> int:
    data = ingest(args.data)
    m = _nonneg("m", args.m)
    mode = _mode(args.mode, data.n + m)
    n, k = data.n, data.k
    pmf = posterior.s_pmf(n, k, m, params, mode)
    rows = [{"s": s,
             "probability": encode(p),
             "published_probability": encode(published.s_pmf_literal(n, k, m, s, params, mode))}
            for s, p in pmf.items()]
    payload = _header("predict-observations", params, mode)
    payload.update(_dataset_json(data))
    payload["m"] = m
    payload["s_pmf"] = rows
    payload["s_mean"] = encode(posterior.s_mean(n, k, m, params, mode))
    _emit(payload, rows, args.format, out)
    return EXIT_OK


def cmd_posterior_total(args, params: ModelParams, out) -> int:
    data = ingest(args.data)
    # the support runs to thousands of points; exact arithmetic only on request
    mode = LOG if args.mode == "auto" else args.mode
    post = posterior.total_types_posterior(data.n, data.k, params, mode,
                                           tail_tol=args.tail_tol, max_support=args.max_support)
    rows = [{"xi": x, "probability": encode(p)} for x, p in post.pmf.items()]
    payload = _header("posterior-total", params, mode)
    payload.update(_dataset_json(data))
    payload["posterior"] = rows
    finite = not (isinstance(post.mean, float) and math.isinf(post.mean))
    payload["mean"] = encode(post.mean) if finite else None
    payload["mean_finite"] = finite
    payload["mean_bounds"] = [encode(b) for b in post.mean_bounds]
    payload["tail"] = {
        "truncated_at": post.pmf.meta["truncated_at"],
        "tail_lower": post.pmf.meta["tail_lower"],
        "tail_upper": post.pmf.meta["tail_upper"],
        "tail_tol": post.pmf.meta["tail_tol"],
    }
    _emit(payload, rows, args.format, out)
    return EXIT_OK


def cmd_discovery(args, params: ModelParams, out) -> int:
    data = ingest(args.data)
    m = _nonneg("m", args.m)
    mode = _mode(args.mode, data.n + m)
    payload = _header("discovery", params, mode)
    payload.update(_dataset_json(data))
    payload["m"] = m
    payload["discovery_prob"] = encode(posterior.discovery_prob(data.n, data.k, m, params, mode))
    payload["published_discovery_prob"] = encode(
        published.discovery_literal(data.n, data.k, m, params, mode))
    _emit(payload, None, args.format, out)
    return EXIT_OK


def cmd_sample(args, params: ModelParams, out) -> int:
    if args.n < 1:
        raise ParameterError(f"n must be at least 1, got {args.n}")
    if args.paths < 1:
        raise ParameterError(f"paths must be at least 1, got {args.paths}")
    rng = np.random.default_rng(args.seed)
    samples = [sample_partition(args.n, params, rng).counts for _ in range(args.paths)]
    payload = {"schema_version": SCHEMA_VERSION, "command": "sample", "gamma": str(params.gamma),
               "n": args.n, "paths": args.paths, "seed": args.seed}
    ks = np.array([len(c) for c in samples], dtype=float)
    if args.summary:
        freq = np.bincount(ks.astype(int), minlength=args.n + 1)[1:] / args.paths
        rows = [{"k": k, "frequency": float(f)} for k, f in enumerate(freq, start=1)]
        payload["k_mean"] = float(ks.mean())
        payload["k_stderr"] = float(ks.std(ddof=1) / math.sqrt(args.paths)) if args.paths > 1 else None
        payload["k_frequencies"] = rows
    else:
        rows = [{"path": i, "k": len(c), "occupancy": " ".join(map(str, c))}
                for i, c in enumerate(samples)]
        payload["samples"] = [list(c) for c in samples]
    _emit(payload, rows, args.format, out)
    return EXIT_OK


def cmd_validate(args, params, out) -> int:
    gammas = [_gamma(g).gamma for g in (args.gamma or ["0.3", "0.7"])]
    budget = EnumerationBudget(max_partition_n=args.budget_n, max_extension_m=args.budget_m,
                               max_paths=args.budget_paths)
    configs = default_configs(max_n=args.max_n, max_m=args.max_m, gammas=gammas)
    report = reconcile(configs, budget)
    if args.format == "json":
        out.write(report.dumps())
        out.write("\n")
    else:
        rows = []
        for rec in report.records:
            pv = rec.published_vs_derived or {}
            rows.append({
                "formula_id": rec.formula_id,
                "occupancy": " ".join(map(str, rec.config["occupancy"])),
                "m": rec.config["m"],
                "gamma": rec.config["gamma"],
                "verdict": rec.verdict,
                "derived_vs_oracle_max_abs": rec.derived_vs_oracle.get("max_abs"),
                "published_vs_derived_max_abs": pv.get("max_abs"),
                "published_vs_derived_max_rel": pv.get("max_rel"),
            })
        _emit({}, rows, "csv", out)
    return EXIT_OK if report.ok else EXIT_VALIDATION_FAILED


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnedin",
        description="Predictive inference for species sampling under Gnedin's model.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, help_text, func, data=True, gamma=True, m=False, mode=True):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        if data:
            p.add_argument("--data", required=True, help="CSV file with header 'species,count' or 'count'")
        if gamma:
            p.add_argument("--gamma", required=True, help="model parameter, strictly between 0 and 1")
        if m:
            p.add_argument("-m", type=int, required=True, help="number of additional observations")
        if mode:
            p.add_argument("--mode", choices=["auto", EXACT, LOG], default="auto",
                           help="arithmetic: exact rationals or log-domain floats (default: auto)")
        p.add_argument("--format", choices=["json", "csv"], default="json", help="output format")
        p.set_defaults(func=func)
        return p

    add("describe", "summarize an abundance file under the model", cmd_describe)
    add("predict-species", "law and mean of the number of new species in m more draws",
        cmd_predict_species, m=True)
    add("predict-observations", "law and mean of the number of m more draws that are new species",
        cmd_predict_observations, m=True)
    p = add("posterior-total", "posterior of the total number of species", cmd_posterior_total)
    p.add_argument("--tail-tol", type=float, default=1e-10, help="certified tail mass target")
    p.add_argument("--max-support", type=int, default=None, help="cap on tabulated support points")
    add("discovery", "probability that draw n+m+1 is a new species", cmd_discovery, m=True)

    p = add("sample", "simulate basic samples from the sequential construction", cmd_sample,
            data=False, mode=False)
    p.add_argument("-n", type=int, required=True, help="sample size")
    p.add_argument("--paths", type=int, default=1, help="number of independent samples")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--summary", action="store_true", help="report the law of K_n instead of samples")

    p = add("validate", "reconcile every closed form against exact oracles", cmd_validate,
            data=False, gamma=False, mode=False)
    p.add_argument("--gamma", action="append", help="parameter to test (repeatable; default 0.3 and 0.7)")
    p.add_argument("--max-n", type=int, default=4, help="largest basic sample size on the grid")
    p.add_argument("--max-m", type=int, default=4, help="largest number of additional draws")
    p.add_argument("--budget-n", type=int, default=12, help="set-partition enumeration budget")
    p.add_argument("--budget-m", type=int, default=6, help="extension-path length budget")
    p.add_argument("--budget-paths", type=int, default=2_000_000, help="extension-path count budget")
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        params = _gamma(args.gamma) if args.command != "validate" else None
        return args.func(args, params, out)
    except ParameterError as exc:
        print(f"gnedin: error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMETER
    except (IngestError, OSError) as exc:
        print(f"gnedin: error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except BudgetExceededError as exc:
        print(f"gnedin: error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"gnedin: error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMETER


if __name__ == "__main__":
    sys.exit(main())

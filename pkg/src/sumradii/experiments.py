"""Batch runs over instance/algorithm grids with a flat CSV sink.

One row per (instance, algorithm, trial) plus an aggregate row per
pair.  The ``bound`` column carries the competitive guarantee where
one exists: ``3 (2 + log2 n)`` for the primal-dual algorithm,
``2 (5 + log2 n)`` in expectation for the randomized one, and for the
fractional runs the trend ``a + b log2 log2 n`` fitted across the
batch itself (descriptive, not a guarantee).  Deterministic algorithms
get their single result repeated per trial seed only if asked.
"""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .fractional import FracSumRad, PhasedFrac
from .model import solution_cost
from .offline import ExactSizeError, exact_opt
from .online import ALGORITHMS
from .serialize import TOOL_TAG

CSV_COLUMNS = [
    "instance_id",
    "n",
    "algorithm",
    "seed",
    "alg_cost",
    "opt_cost",
    "ratio",
    "bound",
    "bound_ok",
]

FRAC_ALGS = ("frac", "frac-phased")


def pd_bound(n):
    return 3.0 * (2.0 + math.log2(max(1, n)))


def simple_bound(n):
    return 2.0 * (5.0 + math.log2(max(1, n)))


def bound_for(algorithm, n):
    if algorithm == "pd":
        return pd_bound(n)
    if algorithm == "simple":
        return simple_bound(n)
    return None


def run_algorithm(name, inst, seed=0):
    """Instantiate and run one algorithm over an instance; returns the
    runner object (carrying events and costs)."""
    if name == "frac":
        alg = FracSumRad(inst.metric, inst.f, n=inst.n)
    elif name == "frac-phased":
        alg = PhasedFrac(inst.metric, inst.f)
    elif name == "simple":
        alg = ALGORITHMS["simple"](inst.metric, inst.f, n=inst.n, seed=seed)
    elif name in ALGORITHMS:
        alg = ALGORITHMS[name](inst.metric, inst.f)
    else:
        raise ValueError(f"unknown algorithm {name!r}")
    alg.run(inst.demands)
    return alg


def instance_opt(inst):
    try:
        return solution_cost(exact_opt(inst), inst.f)
    except ExactSizeError:
        return None


def run_batch(instances, algorithms, seed=0, trials=1):
    """Rows for every instance x algorithm x trial, plus aggregates.

    Per-trial seeds are ``seed + trial``; deterministic algorithms run
    once and reuse the result.
    """
    rows = []
    for idx, inst in enumerate(instances):
        iid = inst.name or f"instance-{idx}"
        opt = instance_opt(inst)
        for name in algorithms:
            deterministic = name != "simple"
            costs = []
            for t in range(trials):
                trial_seed = seed + t
                if deterministic and costs:
                    cost = costs[-1]
                else:
                    cost = float(run_algorithm(name, inst, seed=trial_seed).total_cost())
                costs.append(cost)
                rows.append(
                    _row(iid, inst.n, name, trial_seed, cost, opt)
                )
            if trials > 1:
                mean = float(np.mean(costs))
                agg = _row(iid, inst.n, name, "agg", mean, opt)
                if opt and name == "simple" and trials >= 2:
                    se = float(np.std(costs, ddof=1)) / math.sqrt(len(costs))
                    agg["bound_ok"] = (mean + 3 * se) / opt <= simple_bound(inst.n)
                rows.append(agg)
    _fit_frac_trend(rows)
    rows.sort(key=lambda r: (r["instance_id"], r["algorithm"], str(r["seed"])))
    return rows


def _row(iid, n, algorithm, seed, cost, opt):
    bound = bound_for(algorithm, n)
    ratio = (cost / opt) if opt else None
    bound_ok = None
    if bound is not None and ratio is not None:
        bound_ok = ratio <= bound
    return {
        "instance_id": iid,
        "n": n,
        "algorithm": algorithm,
        "seed": seed,
        "alg_cost": cost,
        "opt_cost": opt,
        "ratio": ratio,
        "bound": bound,
        "bound_ok": bound_ok,
    }


def fit_loglog_trend(pairs):
    """Least squares of ratio against log2 log2 n; returns (a, b)."""
    xs = np.array([math.log2(max(2.0, math.log2(max(4.0, n)))) for n, _ in pairs])
    ys = np.array([r for _, r in pairs])
    if len(pairs) < 2 or np.ptp(xs) == 0:
        return float(ys.mean()) if len(pairs) else 0.0, 0.0
    coeffs = np.polyfit(xs, ys, 1)
    return float(coeffs[1]), float(coeffs[0])


def _fit_frac_trend(rows):
    pts = [
        (r["n"], r["ratio"])
        for r in rows
        if r["algorithm"] in FRAC_ALGS and r["ratio"] is not None
    ]
    if not pts:
        return
    a, b = fit_loglog_trend(pts)
    for r in rows:
        if r["algorithm"] in FRAC_ALGS and r["ratio"] is not None:
            x = math.log2(max(2.0, math.log2(max(4.0, r["n"]))))
            r["bound"] = a + b * x
            r["bound_ok"] = r["ratio"] <= r["bound"] + 1e-9


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows, path=None, header=True):
    buf = io.StringIO()
    if header:
        buf.write(f"# {TOOL_TAG}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_cell(r[c]) for c in CSV_COLUMNS])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def rows_from_csv(path):
    rows = []
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    for rec in csv.DictReader(lines):
        row = dict(rec)
        row["n"] = int(row["n"])
        for key in ("alg_cost", "opt_cost", "ratio", "bound"):
            row[key] = float(row[key]) if row[key] else None
        row["bound_ok"] = {"true": True, "false": False, "": None}[row["bound_ok"]]
        rows.append(row)
    return rows

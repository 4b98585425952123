"""JSON forms for instances, solutions, permits, and run transcripts.

Exact rationals travel as ``"p/q"`` strings so round trips lose
nothing; plain integers and floats stay native.  Every document gets a
``tool`` header, the one field deliberately outside the byte-for-byte
determinism contract.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .metric import FiniteMetric, PlaneMetric, StrictHst
from .model import Cluster, Instance, Solution
from .reductions import PermitInstance

TOOL_TAG = "sumradii 0.1.0"


def num_out(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def num_in(v):
    if isinstance(v, str):
        return Fraction(v)
    return v


def jsonable(x):
    """Recursive cleanup: tuples to lists, rationals to strings."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, int, float)) or x is None:
        return num_out(x)
    return num_out(x) if isinstance(x, (Fraction, np.integer, np.floating)) else x


def _point_out(metric, p):
    return list(p) if metric.kind == "hst" else p


def _point_in(metric, p):
    return tuple(p) if metric.kind == "hst" else p


def metric_to_dict(metric):
    if metric.kind == "finite":
        return {"kind": "finite", "dists": [[num_out(v) for v in row] for row in metric.dists]}
    if metric.kind == "plane":
        return {"kind": "plane", "coords": [list(c) for c in metric.coords]}
    if metric.kind == "hst":
        return {
            "kind": "hst",
            "alpha": num_out(metric.alpha),
            "fanouts": list(metric.fanouts),
        }
    raise ValueError(f"unknown metric kind {metric.kind!r}")


def metric_from_dict(d):
    kind = d["kind"]
    if kind == "finite":
        return FiniteMetric([[num_in(v) for v in row] for row in d["dists"]])
    if kind == "plane":
        return PlaneMetric([tuple(c) for c in d["coords"]])
    if kind == "hst":
        return StrictHst(num_in(d["alpha"]), d["fanouts"])
    raise ValueError(f"unknown metric kind {kind!r}")


def instance_to_dict(inst):
    return {
        "schema": "sumradii/instance@1",
        "tool": TOOL_TAG,
        "name": inst.name,
        "metric": metric_to_dict(inst.metric),
        "f": num_out(inst.f),
        "demands": [_point_out(inst.metric, u) for u in inst.demands],
    }


def instance_from_dict(d):
    metric = metric_from_dict(d["metric"])
    demands = [_point_in(metric, u) for u in d["demands"]]
    return Instance(metric, demands, f=num_in(d.get("f", 1)), name=d.get("name", ""))


def solution_to_dict(sol, metric=None, f=None):
    def center_out(c):
        if metric is not None:
            return _point_out(metric, c)
        return list(c) if isinstance(c, tuple) else c

    doc = {
        "schema": "sumradii/solution@1",
        "tool": TOOL_TAG,
        "clusters": [
            {
                "center": center_out(c.center),
                "radius": num_out(c.radius),
                "opened_at": c.opened_at,
            }
            for c in sol.clusters
        ],
        "assignment": list(sol.assignment),
    }
    if f is not None:
        doc["f"] = num_out(f)
        doc["cost"] = num_out(sum(f + c.radius for c in sol.clusters))
    return doc


def solution_from_dict(d, metric=None):
    def center_in(c):
        if metric is not None and metric.kind == "hst":
            return tuple(c)
        return tuple(c) if isinstance(c, list) else c

    clusters = [
        Cluster(center_in(c["center"]), num_in(c["radius"]), c.get("opened_at"))
        for c in d["clusters"]
    ]
    return Solution(clusters, list(d["assignment"]))


def permit_to_dict(p):
    return {
        "schema": "sumradii/permit@1",
        "tool": TOOL_TAG,
        "K": p.types,
        "c": [num_out(v) for v in p.c],
        "d": list(p.d),
        "horizon": p.horizon,
        "driving": list(p.driving),
    }


def permit_from_dict(d):
    return PermitInstance(
        c=[num_in(v) for v in d["c"]],
        d=list(d["d"]),
        horizon=d["horizon"],
        driving=list(d["driving"]),
    )


def run_to_dict(alg, inst):
    doc = {
        "schema": "sumradii/run@1",
        "tool": TOOL_TAG,
        "algorithm": getattr(alg, "name", type(alg).__name__),
        "instance": inst.name,
        "f": num_out(inst.f),
        "events": jsonable(alg.events),
        "total_cost": num_out(alg.total_cost()),
    }
    sol = getattr(alg, "solution", None)
    if callable(sol):
        doc["solution"] = solution_to_dict(alg.solution(), metric=inst.metric)
    if hasattr(alg, "dual_sum"):
        doc["dual_sum"] = num_out(alg.dual_sum())
    if hasattr(alg, "ops"):
        doc["ops"] = list(alg.ops)
    return doc


def adversary_to_dict(res):
    cert = res.certificate()
    return {
        "schema": "sumradii/adversary@1",
        "tool": TOOL_TAG,
        "metric": res.metric_kind,
        "algorithm": res.alg_name,
        "alpha": num_out(res.alpha if isinstance(res.alpha, Fraction) else res.alpha),
        "K": res.K,
        "f": num_out(res.f),
        "n": res.n,
        "padded": res.padded,
        "demands": jsonable(res.demands),
        "alg_cost": num_out(res.alg_cost),
        "opt_cost": num_out(res.opt_cost),
        "opt_mode": res.opt_mode,
        "ratio": cert["measured"],
        "floor": cert["floor"],
        "certificate_ok": cert["ok"],
    }


def dump_json(doc, path=None):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_json(path):
    with open(path) as fh:
        return json.load(fh)

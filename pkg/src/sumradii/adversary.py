"""Adversarial demand streams on ternary trees.

The drill: keep feeding the leftmost leaf not yet covered by the
algorithm's open clusters; if everything is covered early, repeat the
last demand until 3**K arrivals are spent.  Deterministic algorithms
only; the stream depends on the algorithm's own choices, so replaying
a randomized one makes no sense.

The certificate divides the measured cost ratio against the floor
``(K + 1) / (alpha + alpha / (3 - alpha))``, valid for alpha in
[2, 3).  The optimum denominator is exact when the leaf count permits,
and otherwise the cheapest single-level subtree cover, which is a
feasible solution and can only make the reported ratio smaller.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .metric import PlaneMetric, StrictHst, as_fraction, embed_hst
from .model import Instance, solution_cost
from .offline import exact_opt, max_distinct_locations

EXACT_PLANE_OPT_MAX = 12


def certificate_floor(alpha, K):
    """Lower-bound ratio promised by the drill; exact for exact alpha."""
    a = as_fraction(alpha)
    if not 2 <= a < 3:
        raise ValueError("certificate needs alpha in [2, 3)")
    return (K + 1) / (a + a / (3 - a))


@dataclass
class AdversaryResult:
    metric_kind: str
    alpha: object
    K: int
    f: object
    demands: list
    padded: int
    alg_name: str
    alg_cost: object
    opt_cost: object
    opt_mode: str
    floor: object
    solution: object = None

    @property
    def n(self):
        return len(self.demands)

    @property
    def ratio(self):
        return self.alg_cost / self.opt_cost

    def certificate(self):
        """Measured ratio against the promised floor."""
        measured, floor = self.ratio, self.floor
        try:
            ok = measured >= floor
        except TypeError:
            ok = float(measured) >= float(floor) - 1e-12
        return {"measured": float(measured), "floor": float(floor), "ok": bool(ok)}


def _drill(alg, leaves):
    fed, padded, ptr = [], 0, 0
    n = len(leaves)
    for _ in range(n):
        while ptr < n and alg.covering_cluster(leaves[ptr]) is not None:
            ptr += 1
        if ptr < n:
            u = leaves[ptr]
        else:
            u = fed[-1]
            padded += 1
        alg.on_demand(u)
        fed.append(u)
    return fed, padded


def _structural_tree_opt(tree, fed_leaves, f):
    """Cheapest one-level subtree cover of the fed leaves; a feasible
    solution, hence an upper bound on the true optimum."""
    distinct = sorted(set(fed_leaves))
    best = None
    for k in range(tree.levels + 1):
        radius = tree.climb_distance(0, k) if k else 0
        owners = {tree.ancestor_at(leaf, k) for leaf in distinct}
        cost = len(owners) * (f + radius)
        if best is None or cost < best:
            best = cost
    return best


def run_hst_adversary(make_alg, alpha, K, f=1, opt_mode="auto"):
    """Drill a deterministic algorithm on the ternary strict HST with
    K levels and report costs, optimum, and the certificate floor."""
    tree = StrictHst(alpha, [3] * K)
    alg = make_alg(tree, f)
    if not getattr(alg, "deterministic", False):
        raise ValueError("the drill only replays deterministic algorithms")
    fed, padded = _drill(alg, tree.leaves)
    inst = Instance(tree, fed, f, name=f"hst-adversary-a{alpha}-K{K}")
    mode = opt_mode
    if mode == "auto":
        mode = "exact" if len(set(fed)) <= max_distinct_locations() else "structural"
    if mode == "exact":
        opt = solution_cost(exact_opt(inst), f)
    elif mode == "structural":
        opt = _structural_tree_opt(tree, fed, f)
    else:
        raise ValueError(f"unknown opt mode {opt_mode!r}")
    return AdversaryResult(
        metric_kind="hst",
        alpha=tree.alpha,
        K=K,
        f=f,
        demands=fed,
        padded=padded,
        alg_name=getattr(alg, "name", type(alg).__name__),
        alg_cost=alg.total_cost(),
        opt_cost=opt,
        opt_mode=mode,
        floor=certificate_floor(alpha, K),
        solution=alg.solution(),
    )


def run_plane_adversary(make_alg, alpha, K, f=1, opt_mode="auto"):
    """Same drill on the plane embedding of the K-level ternary tree.

    Needs alpha strictly inside (2, 3) so the embedding keeps distinct
    nodes apart.  The floor is reported for reference; the embedding
    only contracts distances, so the certificate is an HST statement.
    """
    a = as_fraction(alpha)
    if not 2 < a < 3:
        raise ValueError("plane drill needs alpha strictly inside (2, 3)")
    tree = StrictHst(alpha, [3] * K)
    pos = embed_hst(tree)
    metric = PlaneMetric([pos[p] for p in tree.points])
    leaves = [metric.points[i] for i in range(len(tree.leaves))]
    alg = make_alg(metric, f)
    if not getattr(alg, "deterministic", False):
        raise ValueError("the drill only replays deterministic algorithms")
    fed, padded = _drill(alg, leaves)
    inst = Instance(metric, fed, f, name=f"plane-adversary-a{alpha}-K{K}")
    mode = opt_mode
    distinct = len(set(fed))
    if mode == "auto":
        if distinct <= EXACT_PLANE_OPT_MAX:
            mode = "exact-plane"
        elif distinct <= max_distinct_locations():
            mode = "exact"
        else:
            mode = "structural"
    if mode == "exact-plane":
        opt = solution_cost(exact_opt(inst, centers="exact-plane"), f)
    elif mode == "exact":
        opt = solution_cost(exact_opt(inst, centers="demands"), f)
    elif mode == "structural":
        # tree-side cover cost; distances only shrank, so still feasible
        tree_fed = [tree.points[i] for i in fed]
        opt = _structural_tree_opt(tree, tree_fed, f)
    else:
        raise ValueError(f"unknown opt mode {opt_mode!r}")
    return AdversaryResult(
        metric_kind="plane",
        alpha=tree.alpha,
        K=K,
        f=f,
        demands=fed,
        padded=padded,
        alg_name=getattr(alg, "name", type(alg).__name__),
        alg_cost=alg.total_cost(),
        opt_cost=opt,
        opt_mode=mode,
        floor=certificate_floor(alpha, K),
        solution=alg.solution(),
    )

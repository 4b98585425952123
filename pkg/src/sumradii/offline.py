"""Exact offline optima.

Sum-of-radii optima are computed as weighted set cover over canonical
candidate clusters (center fixed, radius either zero or the distance to
some demand location) with a bitmask dynamic program over distinct
demand locations.  Demands sharing a location collapse to one bit, so
long repetitive streams stay tractable.  The permit-scheduling optimum
is a separate bottom-up pass over the laminar window tree.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .metric import min_enclosing_circle
from .model import Cluster, Solution

DEFAULT_MAX_DISTINCT = 20
EXACT_PLANE_MAX = 15


class ExactSizeError(ValueError):
    """Instance exceeds the exact-solver cap (RADII_MAX_N overrides it)."""


def max_distinct_locations():
    env = os.environ.get("RADII_MAX_N", "").strip()
    return int(env) if env else DEFAULT_MAX_DISTINCT


def distinct_locations(inst):
    """Distinct demand points in first-arrival order, plus the map
    from demand position to location index."""
    locs, seen, loc_of = [], {}, []
    for u in inst.demands:
        if u not in seen:
            seen[u] = len(locs)
            locs.append(u)
        loc_of.append(seen[u])
    return locs, loc_of


@dataclass(frozen=True)
class CandidateCluster:
    center: object  # point id, or raw coordinates in exact-plane mode
    radius: object
    cover: int  # bitmask over distinct demand locations
    cost: object


def _center_pool(inst, centers):
    if centers == "auto":
        centers = "demands" if inst.metric.kind == "plane" else "all"
    if centers == "all":
        return list(inst.metric.points), centers
    if centers == "demands":
        return distinct_locations(inst)[0], centers
    if centers == "exact-plane":
        return None, centers
    raise ValueError(f"unknown center policy {centers!r}")


def candidate_clusters(inst, centers="auto", pow2=False):
    """Canonical clusters with their location-coverage bitmasks.

    Radii are either every relevant center-to-demand distance (with
    zero), or the power-of-two menu ``{0} u {f, 2f, 4f, ...}``.  The
    result is deduplicated per coverage mask and pruned of dominated
    entries (same or larger coverage at same or lower cost).
    """
    metric, f = inst.metric, inst.f
    locs, _ = distinct_locations(inst)
    m = len(locs)
    pool, policy = _center_pool(inst, centers)

    by_cover = {}

    def offer(center, radius, cover):
        if cover == 0:
            return
        cost = f + radius
        cur = by_cover.get(cover)
        if cur is None or cost < cur.cost:
            by_cover[cover] = CandidateCluster(center, radius, cover, cost)

    if policy == "exact-plane":
        if metric.kind != "plane":
            raise ValueError("exact-plane centers need a plane metric")
        if m > EXACT_PLANE_MAX:
            raise ExactSizeError(
                f"{m} distinct locations exceed the exact-plane cap {EXACT_PLANE_MAX}"
            )
        coords = [metric.coords[p] for p in locs]
        for subset in range(1, 1 << m):
            chosen = [coords[i] for i in range(m) if subset >> i & 1]
            center, radius = min_enclosing_circle(chosen)
            cover = 0
            for i, c in enumerate(coords):
                if math.hypot(c[0] - center[0], c[1] - center[1]) <= radius + metric.tol:
                    cover |= 1 << i
            offer(center, radius, cover)
    else:
        for z in pool:
            dists = [metric.distance(z, u) for u in locs]
            if pow2:
                radii = [0]
                r = f
                top = max(dists)
                while True:
                    radii.append(r)
                    if r >= top:
                        break
                    r = r * 2
            else:
                radii = sorted(set(dists) | {0})
            for r in radii:
                cover = 0
                for i, d in enumerate(dists):
                    if d <= r + metric.tol:
                        cover |= 1 << i
                offer(z, r, cover)

    # dominance prune: cheaper-or-equal superset coverage wins
    ranked = sorted(
        by_cover.values(), key=lambda c: (float(c.cost), -bin(c.cover).count("1"))
    )
    kept = []
    for c in ranked:
        if not any(
            k.cover | c.cover == k.cover and k.cost <= c.cost for k in kept
        ):
            kept.append(c)
    return kept, locs


def _solve_cover(inst, cands, locs, limit):
    m = len(locs)
    cap = limit if limit is not None else max_distinct_locations()
    if m > cap:
        raise ExactSizeError(
            f"{m} distinct demand locations exceed the exact cap {cap};"
            " set RADII_MAX_N to raise it"
        )
    if m == 0:
        return Solution([], [])
    cover_arr = np.array([c.cover for c in cands], dtype=np.int64)
    cost_arr = np.array([float(c.cost) for c in cands])
    best = np.full(1 << m, np.inf)
    best[0] = 0.0
    choice = np.full(1 << m, -1, dtype=np.int32)
    by_bit = [np.nonzero(cover_arr & (1 << j))[0] for j in range(m)]
    for j in range(m - 1, -1, -1):
        if by_bit[j].size == 0:
            raise RuntimeError("some demand location has no covering candidate")
        high = np.arange(1 << (m - 1 - j), dtype=np.int64)
        states = (high << (j + 1)) | (1 << j)
        cur = np.full(states.shape, np.inf)
        pick = np.full(states.shape, -1, dtype=np.int32)
        for ci in by_bit[j]:
            val = cost_arr[ci] + best[states & ~cover_arr[ci]]
            better = val < cur
            cur[better] = val[better]
            pick[better] = ci
        best[states] = cur
        choice[states] = pick
    chosen = []
    state = (1 << m) - 1
    while state:
        ci = int(choice[state])
        chosen.append(ci)
        state &= ~int(cover_arr[ci])
    clusters = [Cluster(cands[ci].center, cands[ci].radius, "offline") for ci in chosen]
    _, loc_of = distinct_locations(inst)
    cluster_of_loc = {}
    for slot, ci in enumerate(chosen):
        for i in range(m):
            if cands[ci].cover >> i & 1 and i not in cluster_of_loc:
                cluster_of_loc[i] = slot
    assignment = [cluster_of_loc[loc_of[pos]] for pos in range(len(inst.demands))]
    return Solution(clusters, assignment)


def exact_opt(inst, centers="auto", limit=None):
    """Optimal solution over canonical clusters; exact radii survive
    into the returned clusters, so recomputing the cost stays exact."""
    cands, locs = candidate_clusters(inst, centers=centers, pow2=False)
    return _solve_cover(inst, cands, locs, limit)


def exact_opt_pow2(inst, centers="auto", limit=None):
    """Optimum restricted to the radius menu ``{0} u {2**k * f}``."""
    cands, locs = candidate_clusters(inst, centers=centers, pow2=True)
    return _solve_cover(inst, cands, locs, limit)


# --- permit scheduling --------------------------------------------------------


def permit_opt(p):
    """Minimum-cost permit purchase covering every driving day.

    Bottom-up over the laminar window tree: a window is bought whenever
    its own cost beats the best cover by smaller windows.  Driving days
    carry an infinite sentinel so something above them is always bought
    (type costs are finite, so the total is too).

    Returns ``(cost, purchases)`` with purchases as ``(type, window)``
    pairs, types numbered from 1.
    """
    driving = set(p.driving)
    K = len(p.c)

    def solve(k, i):
        if k == 0:
            return (math.inf if i in driving else 0, [])
        d_k = p.d[k - 1]
        lower = 1 if k == 1 else p.d[k - 2]
        total, bought = 0, []
        for child in range(i * (d_k // lower), (i + 1) * (d_k // lower)):
            c_total, c_bought = solve(k - 1, child)
            total += c_total
            bought.extend(c_bought)
        if p.c[k - 1] <= total:
            return (p.c[k - 1], [(k, i)])
        return (total, bought)

    grand, purchases = 0, []
    for i in range(p.horizon // p.d[-1]):
        c_total, c_bought = solve(K, i)
        grand += c_total
        purchases.extend(c_bought)
    return grand, purchases


def permit_cover_ok(p, purchases):
    """True when every driving day falls inside some purchased window."""
    for day in p.driving:
        if not any(
            day // p.d[k - 1] == i for k, i in purchases
        ):
            return False
    return True

"""Instances, clusters, solutions, and power-of-two radius rounding.

A cluster fixes its center and radius the moment it opens and costs
``f + radius``.  Solutions assign every demand, in arrival order, to a
cluster that covers it.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Cluster:
    center: object
    radius: object
    opened_at: object = None  # arrival index of the opening demand, or "offline"


@dataclass
class Instance:
    metric: object
    demands: list
    f: object = 1
    name: str = ""

    @property
    def n(self):
        return len(self.demands)


@dataclass
class Solution:
    clusters: list
    assignment: list  # demand position -> index into clusters


def covers(metric, cluster, p):
    return metric.distance(cluster.center, p) <= cluster.radius + metric.tol


def solution_cost(sol, f):
    return sum(f + c.radius for c in sol.clusters)


def feasibility_violations(inst, sol):
    """One dict per broken assignment; empty list means feasible."""
    out = []
    if len(sol.assignment) != len(inst.demands):
        out.append(
            {
                "kind": "assignment-length",
                "detail": f"{len(sol.assignment)} assignments for {len(inst.demands)} demands",
            }
        )
        return out
    for pos, (u, ci) in enumerate(zip(inst.demands, sol.assignment)):
        if ci is None or not 0 <= ci < len(sol.clusters):
            out.append({"kind": "unassigned", "demand": pos})
        elif not covers(inst.metric, sol.clusters[ci], u):
            out.append(
                {
                    "kind": "uncovered",
                    "demand": pos,
                    "cluster": ci,
                    "detail": f"d={inst.metric.distance(sol.clusters[ci].center, u)}"
                    f" > r={sol.clusters[ci].radius}",
                }
            )
    return out


def is_feasible(inst, sol):
    return not feasibility_violations(inst, sol)


def ceil_log2_ratio(radius, f):
    """Smallest k >= 0 with ``2**k * f >= radius``; exact on Fractions."""
    k = 0
    scale = f
    while scale < radius:
        scale *= 2
        k += 1
    return k


def round_radii_pow2(sol, f):
    """Round every radius up to the nearest ``2**k * f`` with k >= 0.

    Zero radii round up to ``f`` as well, so the result stays feasible
    and costs at most twice the original.
    """
    rounded = [
        Cluster(c.center, f * 2 ** ceil_log2_ratio(c.radius, f), c.opened_at)
        for c in sol.clusters
    ]
    return Solution(rounded, list(sol.assignment))

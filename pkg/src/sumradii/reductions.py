"""Reductions between permit scheduling and clustering on trees.

A permit instance has K permit types with costs ``c_1 <= ... <= c_K``
and durations ``d_1 | d_2 | ... | d_K``; driving days must be covered
by purchased windows (type k splits the horizon into aligned windows
of d_k days).  In normal form (``c_1 = 1`` and ``c_k >= 3 c_{k-1}``)
the laminar windows become a tree pseudo-metric: days are leaves,
type-k windows are level-k nodes, and the edge up from level k-1 costs
``c_k - c_{k-1}`` (so level-1 edges cost zero, which is why distance
zero between distinct points is legal).  Every leaf then sits exactly
``c_k - 1`` from its level-k ancestor, purchases of cost ``c_k``
correspond to clusters of radius ``c_k - 1``, and optima coincide.

A horizon of W > 1 top windows makes the windows a forest; a virtual
root joins them, priced at ``max(W, 3) * c_K`` so that any cluster
reaching across top windows costs at least as much as simply buying
every top window.  Such clusters canonicalize to exactly that
purchase, which keeps the optimum correspondence exact.

The opposite direction turns a uniform strict HST with unit opening
cost into permits: one type per node level (the root included, else a
single cluster covering everything has no permit counterpart), plus a
day type for zero-radius clusters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .metric import FiniteMetric
from .model import Cluster, Instance, Solution


@dataclass
class PermitInstance:
    c: list  # cost per type, types numbered 1..K
    d: list  # duration per type; each divides the next
    horizon: int
    driving: list  # day indices needing coverage, in arrival order

    @property
    def types(self):
        return len(self.c)

    def validate(self):
        """One dict per structural violation; empty means well formed."""
        out = []
        if len(self.c) != len(self.d) or not self.c:
            out.append({"kind": "shape", "detail": "c and d must align, nonempty"})
            return out
        if any(x <= 0 for x in self.d) or any(x <= 0 for x in self.c):
            out.append({"kind": "positivity", "detail": "costs and durations > 0"})
        for k in range(1, len(self.d)):
            if self.d[k] % self.d[k - 1] != 0:
                out.append(
                    {"kind": "nesting", "detail": f"d[{k}] not a multiple of d[{k - 1}]"}
                )
            if self.c[k] < self.c[k - 1]:
                out.append({"kind": "cost-order", "detail": f"c[{k}] < c[{k - 1}]"})
        if self.horizon <= 0 or self.horizon % self.d[-1] != 0:
            out.append(
                {"kind": "horizon", "detail": "horizon must be a positive multiple of d_K"}
            )
        if any(not 0 <= day < self.horizon for day in self.driving):
            out.append({"kind": "driving-range", "detail": "driving day off-horizon"})
        return out

    def is_normal_form(self):
        if self.validate():
            return False
        if self.c[0] != 1:
            return False
        return all(self.c[k] >= 3 * self.c[k - 1] for k in range(1, len(self.c)))


class PermitTree:
    """Laminar window tree of a normal-form permit instance.

    Nodes are ``(level, index)``: level 0 holds the days, level k the
    type-k windows.  Cumulative node costs are ``cvals[level]`` with
    ``cvals[0] = 1``, and the distance between nodes meeting at level m
    is ``(cvals[m] - cvals[a]) + (cvals[m] - cvals[b])``.
    """

    def __init__(self, permit):
        bad = permit.validate()
        if bad:
            raise ValueError(f"malformed permit instance: {bad[0]}")
        if not permit.is_normal_form():
            raise ValueError("permit instance must be in normal form")
        self.permit = permit
        self.levels = permit.types
        self.windows = permit.horizon // permit.d[-1]
        self.cvals = [1] + list(permit.c)
        self.dvals = [1] + list(permit.d)
        self.top_level = self.levels
        if self.windows > 1:
            self.top_level += 1
            self.cvals.append(max(self.windows, 3) * self.cvals[self.levels])
            self.dvals.append(permit.horizon)
        self.nodes = []
        for lvl in range(self.top_level + 1):
            for i in range(permit.horizon // self.dvals[lvl]):
                self.nodes.append((lvl, i))
        self.node_index = {nd: i for i, nd in enumerate(self.nodes)}

    def parent(self, node):
        lvl, i = node
        if lvl >= self.top_level:
            return None
        ratio = self.dvals[lvl + 1] // self.dvals[lvl]
        return (lvl + 1, i // ratio)

    def ancestor_at(self, node, level):
        while node[0] < level:
            node = self.parent(node)
        return node

    def meet_level(self, a, b):
        while a[0] < b[0]:
            a = self.parent(a)
        while b[0] < a[0]:
            b = self.parent(b)
        while a != b:
            a, b = self.parent(a), self.parent(b)
        return a[0]

    def node_distance(self, a, b):
        if a == b:
            return 0
        m = self.meet_level(a, b)
        return (self.cvals[m] - self.cvals[a[0]]) + (self.cvals[m] - self.cvals[b[0]])

    def separation_violations(self):
        """Edge-growth checks: each level's edge should be at least
        twice the previous one (the tree is then a 2-HST)."""
        out = []
        prev = None
        for lvl in range(1, self.top_level + 1):
            edge = self.cvals[lvl] - self.cvals[lvl - 1]
            if prev is not None and prev > 0 and edge < 2 * prev:
                out.append({"level": lvl, "edge": edge, "below": 2 * prev})
            prev = edge
        return out

    def to_instance(self):
        """Finite-metric clustering instance over all tree nodes with
        driving-day leaves as demands and f = 1."""
        n = len(self.nodes)
        dists = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                v = self.node_distance(self.nodes[i], self.nodes[j])
                dists[i][j] = dists[j][i] = v
        metric = FiniteMetric(dists)
        demands = [self.node_index[(0, day)] for day in self.permit.driving]
        return Instance(metric, demands, f=1, name="permit-tree")

    def node_of_point(self, p):
        return self.nodes[p]

    def point_of_node(self, nd):
        return self.node_index[nd]


def permit_to_cluster(permit):
    """Normal-form permit instance -> (clustering instance, window tree)."""
    tree = PermitTree(permit)
    return tree.to_instance(), tree


def canonicalize_cluster(tree, cluster):
    """Snap a cluster on the window tree to a list of window purchases.

    Leaf centers move to their parent across the zero-length edge.  A
    cluster whose radius cannot reach even the nearest leaf covers no
    demand and is dropped (empty list).  Otherwise radius r maps to
    the level-j ancestor with the largest ``cvals[j] - 1 <= r``.  A
    cluster wide enough to reach leaves of other top windows (only
    possible across the virtual root) maps to a purchase of every top
    window, which it cannot undercut by the root's pricing.  The
    purchases always cover every leaf the original cluster did, at no
    more cost.
    """
    node = tree.node_of_point(cluster.center)
    if node[0] == 0:
        node = tree.parent(node)
    if tree.windows > 1:
        root_c = tree.cvals[tree.top_level]
        cross = (root_c - tree.cvals[node[0]]) + (root_c - 1)
        if cluster.radius >= cross:
            return [(tree.levels, i) for i in range(tree.windows)]
        if node[0] == tree.top_level:
            return []
    k = node[0]
    if cluster.radius < tree.cvals[k] - 1:
        return []
    j = k
    while j + 1 <= tree.levels and tree.cvals[j + 1] - 1 <= cluster.radius:
        j += 1
    window = tree.ancestor_at(node, j)
    return [(j, window[1])]


def cluster_sol_to_permit_sol(tree, sol):
    """Cluster solution on the window tree -> permit purchases of no
    greater cost (duplicates collapse)."""
    purchases = []
    for cl in sol.clusters:
        for snapped in canonicalize_cluster(tree, cl):
            if snapped not in purchases:
                purchases.append(snapped)
    return purchases


def permit_sol_to_cluster_sol(tree, purchases):
    """Permit purchases -> equal-cost cluster solution on the window
    tree (cluster of radius ``c_j - 1`` at each purchased window)."""
    clusters = [
        Cluster(tree.point_of_node((j, i)), tree.cvals[j] - 1, "offline")
        for j, i in purchases
    ]
    assignment = []
    for day in tree.permit.driving:
        hit = None
        for ci, (j, i) in enumerate(purchases):
            if tree.ancestor_at((0, day), j) == (j, i):
                hit = ci
                break
        if hit is None:
            raise ValueError(f"purchases leave driving day {day} uncovered")
        assignment.append(hit)
    return Solution(clusters, assignment)


def permit_cost(permit, purchases):
    return sum(permit.c[j - 1] for j, _ in purchases)


def hst_to_permit(tree, demands):
    """Uniform strict HST with unit opening cost -> permit instance.

    Leaves become days in left-to-right order and the demands' leaves
    become driving days.  Type k + 1 covers one level-k subtree per
    window at cost ``1 + (alpha**k - 1)/(alpha - 1)`` (opening plus the
    subtree radius); type 1 is the single-day permit at cost 1.  All
    node levels up to and including the root get a type: dropping the
    root type would leave the all-leaves cluster without a permit
    counterpart and break the optimum correspondence.
    """
    for u in demands:
        if u[0] != 0:
            raise ValueError("demands must sit at leaves")
    alpha = tree.alpha
    c, d = [Fraction(1)], [1]
    width = 1
    for lvl in range(1, tree.levels + 1):
        width *= tree.fanout_at(lvl)
        c.append(1 + tree.climb_distance(0, lvl))
        d.append(width)
    driving = [u[1] for u in demands]
    c = [v if v.denominator > 1 else int(v) for v in map(Fraction, c)]
    return PermitInstance(c=c, d=d, horizon=len(tree.leaves), driving=driving)

"""Online clustering algorithms.

Everything here honors the same irrevocability contract: a cluster
fixes its center and radius when it opens, demands are assigned on
arrival to an open cluster covering them, and nothing is ever closed
or moved.  Each ``on_demand`` call appends one event dict to
``events`` so runs can be replayed or audited afterwards.
"""

from __future__ import annotations

import numpy as np

from .metric import enclosing_ball
from .model import Cluster, Solution, covers, solution_cost


class InvariantViolation(RuntimeError):
    """An internal consistency check failed mid-run."""


class OnlineClusterer:
    deterministic = True
    name = "base"

    def __init__(self, metric, f=1):
        self.metric = metric
        self.f = f
        self.clusters = []
        self.demands = []
        self.assignment = []
        self.events = []
        self._extra = None

    # -- shared bookkeeping ----------------------------------------------

    def covering_cluster(self, u):
        for i, c in enumerate(self.clusters):
            if covers(self.metric, c, u):
                return i
        return None

    def _open(self, center, radius):
        self.clusters.append(
            Cluster(center, radius, opened_at=len(self.demands) - 1)
        )
        return len(self.clusters) - 1

    def on_demand(self, u):
        """Feed one demand; returns indices of any clusters opened."""
        self.demands.append(u)
        covered = self.covering_cluster(u) is not None
        before = len(self.clusters)
        assigned = self._place(u)
        self.assignment.append(assigned)
        if not covers(self.metric, self.clusters[assigned], u):
            raise InvariantViolation(
                f"demand {u} assigned to non-covering cluster {assigned}"
            )
        opened = list(range(before, len(self.clusters)))
        event = {
            "t": len(self.demands) - 1,
            "demand": u,
            "covered": covered,
            "opened": opened,
            "assigned": assigned,
            "cost": self.total_cost(),
        }
        if self._extra:
            event.update(self._extra)
            self._extra = None
        self.events.append(event)
        return opened

    def run(self, demands):
        for u in demands:
            self.on_demand(u)
        return self.solution()

    def solution(self):
        return Solution(list(self.clusters), list(self.assignment))

    def total_cost(self):
        return solution_cost(self.solution(), self.f)

    def _place(self, u):
        raise NotImplementedError


class NaiveOnline(OnlineClusterer):
    """Opens a zero-radius cluster at every uncovered demand."""

    name = "naive"

    def _place(self, u):
        hit = self.covering_cluster(u)
        if hit is not None:
            return hit
        return self._open(u, 0 * self.f)


class PDSumRad(OnlineClusterer):
    """Deterministic primal-dual online clustering.

    Each uncovered demand raises its dual value to f.  A center/scale
    pair ``(z, k)`` is tight once exactly ``1 + 2**k`` positive-dual
    demands sit within ``2**k * f`` of z (one within distance zero for
    k = -1, which the uncovered demand itself always satisfies).  The
    arrival that makes a pair tight opens a cluster at z with three
    times that scale's radius; ties prefer the largest scale, then the
    smallest center identifier.

    Tightness is decided by integer counting, never by summing float
    duals.  The default counting path compares distances as float64,
    which is exact for the integer and dyadic metrics this package
    generates; pass ``exact=True`` to count with native Fraction/int
    comparisons instead.  Candidate centers are all points of finite
    metrics and trees, and the demand locations seen so far on the
    plane.
    """

    name = "pd"

    def __init__(self, metric, f=1, exact=False):
        super().__init__(metric, f)
        self.exact = exact
        self.duals = []  # per-demand dual value, 0 or f
        self.positives = []  # point ids holding a positive dual
        self.opened_scales = []  # (center, k) per opened cluster
        if metric.kind == "plane":
            self._candidates = []
            self._cand_seen = set()
        else:
            self._candidates = list(metric.points)
            self._cand_seen = None
        self._M = None
        self._cand_idx = None

    def _note_candidate(self, u):
        if self._cand_seen is not None and u not in self._cand_seen:
            self._cand_seen.add(u)
            self._candidates.append(u)
            self._cand_idx = None

    def _count_positive_within(self, z, r):
        d, tol = self.metric.distance, self.metric.tol
        return sum(1 for p in self.positives if d(z, p) <= r + tol)

    def _scales_down_from(self, j):
        return range(j.bit_length() - 1, -2, -1)

    def _tight_center_exact(self, u, r, target):
        d, tol = self.metric.distance, self.metric.tol
        hits = [
            z
            for z in self._candidates
            if d(u, z) <= r + tol and self._count_positive_within(z, r) == target
        ]
        return min(hits) if hits else None

    def _tight_center_fast(self, u, r, target):
        if self._M is None:
            self._M = self.metric.matrix()
        if self._cand_idx is None:
            self._cand_idx = np.array(
                [self.metric.index_of(z) for z in self._candidates], dtype=np.intp
            )
        bound = float(r) + self.metric.tol
        row = self._M[self.metric.index_of(u), self._cand_idx]
        elig = np.nonzero(row <= bound)[0]
        if elig.size == 0:
            return None
        pos_idx = np.array(
            [self.metric.index_of(p) for p in self.positives], dtype=np.intp
        )
        counts = (
            self._M[np.ix_(self._cand_idx[elig], pos_idx)] <= bound
        ).sum(axis=1)
        hits = np.nonzero(counts == target)[0]
        if hits.size == 0:
            return None
        return min(self._candidates[elig[h]] for h in hits)

    def _place(self, u):
        self._note_candidate(u)
        hit = self.covering_cluster(u)
        if hit is not None:
            self.duals.append(0 * self.f)
            self._extra = {"dual": 0}
            return hit
        self.duals.append(self.f)
        self.positives.append(u)
        find = self._tight_center_exact if self.exact else self._tight_center_fast
        j = len(self.demands)  # 1-based arrival index, current included
        for k in self._scales_down_from(j):
            r = self.f * 2 ** k if k >= 0 else 0 * self.f
            target = 1 + 2 ** k if k >= 0 else 1
            z = find(u, r, target)
            if z is not None:
                idx = self._open(z, 3 * r)
                self.opened_scales.append((z, k))
                self._extra = {"dual": self.f, "tight": (z, k)}
                return idx
        raise InvariantViolation(f"no tight pair found for uncovered demand {u}")

    # -- dual-state introspection ------------------------------------------

    def dual_sum(self):
        return sum(self.duals)

    def _scale_sweep(self):
        top = max(1, len(self.positives))
        return range(-1, top.bit_length() + 1)

    def tight_pairs(self):
        """Currently tight (center, scale) pairs over the candidate set."""
        out = []
        for z in self._candidates:
            for k in self._scale_sweep():
                r = self.f * 2 ** k if k >= 0 else 0 * self.f
                target = 1 + 2 ** k if k >= 0 else 1
                if self._count_positive_within(z, r) == target:
                    out.append((z, k))
        return out

    def dual_violations(self):
        """Constraints whose positive-dual count exceeds the budget
        ``1 + 2**k``.  Scales with ``2**k`` at least the positive count
        cannot be violated, so the sweep stops there.
        """
        out = []
        for z in self._candidates:
            for k in self._scale_sweep():
                r = self.f * 2 ** k if k >= 0 else 0 * self.f
                target = 1 + 2 ** k if k >= 0 else 1
                got = self._count_positive_within(z, r)
                if got > target:
                    out.append(
                        {"center": z, "scale": k, "count": got, "budget": target}
                    )
        return out


class SimpleSumRad(OnlineClusterer):
    """Randomized memoryless clustering.

    An uncovered demand opens a menu of clusters around itself: for
    every k from 0 up to ``1 + ceil(log2 n)`` a cluster of radius
    ``2**k * f`` opens with probability ``2**-k`` (k = 0 always fires
    and takes the assignment).  With no declared n, an internal
    estimate doubles whenever the arrival count passes it, which only
    widens the menu used by later demands; open clusters stay put.
    """

    deterministic = False
    name = "simple"

    def __init__(self, metric, f=1, n=None, seed=0, rng=None):
        super().__init__(metric, f)
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.declared_n = n
        self._estimate = 2

    def _menu_top(self):
        n = self.declared_n
        if n is None:
            while len(self.demands) > self._estimate:
                self._estimate *= 2
            n = self._estimate
        return 1 + max(0, (n - 1).bit_length())

    def _place(self, u):
        hit = self.covering_cluster(u)
        if hit is not None:
            return hit
        assigned = None
        for k in range(self._menu_top() + 1):
            if self.rng.random() < 2.0 ** -k:
                idx = self._open(u, self.f * 2 ** k)
                if assigned is None:
                    assigned = idx
        if assigned is None:  # k = 0 draws below 1.0 with certainty
            raise InvariantViolation("unit-scale cluster failed to open")
        return assigned


def expected_uncovered_cost(n, f=1):
    """Expected menu cost per uncovered demand, ``(4 + log2 n - 1/(2n)) f``
    for powers of two; computed from the menu itself for any n."""
    top = 1 + max(0, (n - 1).bit_length())
    return sum(2.0 ** -k * (f + f * 2 ** k) for k in range(top + 1))


# --- adapters between cluster models -----------------------------------------


class FixedRadiusAdapter(OnlineClusterer):
    """Wraps an algorithm whose clusters fix a radius budget at opening
    while members keep fitting inside *some* ball of that radius.

    Whenever the inner algorithm opens a budget-r cluster on demand u,
    this opens ``C(u, 2r)``: any later member v shares a ball of radius
    r with u, so it sits within 2r of u.  The wrapped cost is at most
    doubled, prefix by prefix.
    """

    name = "fixed-adapter"

    def __init__(self, metric, f=1, inner_factory=None):
        super().__init__(metric, f)
        factory = inner_factory if inner_factory is not None else BudgetFixedRadius
        self.inner = factory(metric, f)
        self.deterministic = getattr(self.inner, "deterministic", True)
        self._outer_of = {}

    def _place(self, u):
        event = self.inner.on_demand(u)
        if event[0] == "open":
            _, cid, budget = event
            self._outer_of[cid] = self._open(u, 2 * budget)
            return self._outer_of[cid]
        _, cid = event
        idx = self._outer_of[cid]
        if not covers(self.metric, self.clusters[idx], u):
            raise InvariantViolation(
                "inner cluster member escaped its doubled-radius cover"
            )
        return idx

    def inner_cost(self):
        return self.inner.total_cost()


class FlexibleAdapter(OnlineClusterer):
    """Wraps an algorithm whose clusters are bare demand sets costing
    ``f`` plus their enclosing radius, with no committed center.

    The first demand u of each inner cluster anchors a base cluster
    ``C(u, f)``; a later member at distance d > f opens the ring
    ``C(u, 2**ceil(log2(d/f)) * f)`` once per scale.  Only rings around
    the anchor are ever consulted, so per inner cluster the spend stays
    within ``max(2f, 5 * diam)``.
    """

    name = "flexible-adapter"

    def __init__(self, metric, f=1, inner_factory=None):
        super().__init__(metric, f)
        factory = inner_factory if inner_factory is not None else GreedyFlexible
        self.inner = factory(metric, f)
        self.deterministic = getattr(self.inner, "deterministic", True)
        self._anchor = {}
        self._rings = {}  # inner cid -> {scale k: outer cluster index}

    def _place(self, u):
        event = self.inner.on_demand(u)
        cid = event[1]
        if event[0] == "open":
            self._anchor[cid] = u
            self._rings[cid] = {0: self._open(u, self.f)}
            return self._rings[cid][0]
        anchor = self._anchor[cid]
        dist = self.metric.distance(anchor, u)
        if dist <= self.f + self.metric.tol:
            return self._rings[cid][0]
        k = 0
        scale = self.f
        while scale < dist:  # smallest k with 2**k f >= d; lands at k >= 1
            scale *= 2
            k += 1
        rings = self._rings[cid]
        if k not in rings:
            rings[k] = self._open(anchor, scale)
        return rings[k]

    def rings_of(self, cid):
        return dict(self._rings[cid])

    def inner_members(self, cid):
        return list(self.inner.members[cid])


class BudgetFixedRadius:
    """Toy fixed-radius algorithm: every cluster takes budget f, and a
    demand joins the first cluster whose member set still fits in some
    ball of that budget."""

    deterministic = True
    name = "budget-fixed"

    def __init__(self, metric, f=1):
        self.metric = metric
        self.f = f
        self.members = []
        self.budgets = []

    def total_cost(self):
        return sum(self.f + b for b in self.budgets)

    def on_demand(self, u):
        for cid, group in enumerate(self.members):
            _, r = enclosing_ball(self.metric, group + [u])
            if r <= self.budgets[cid] + self.metric.tol:
                group.append(u)
                return ("assign", cid)
        self.members.append([u])
        self.budgets.append(self.f)
        return ("open", len(self.members) - 1, self.f)


class GreedyFlexible:
    """Toy flexible algorithm: join the cluster whose enclosing radius
    grows the least, unless every growth exceeds f, then open fresh."""

    deterministic = True
    name = "greedy-flexible"

    def __init__(self, metric, f=1):
        self.metric = metric
        self.f = f
        self.members = []
        self._radii = []

    def total_cost(self):
        return sum(self.f + r for r in self._radii)

    def on_demand(self, u):
        best, best_growth, best_r = None, None, None
        for cid, group in enumerate(self.members):
            _, r = enclosing_ball(self.metric, group + [u])
            growth = r - self._radii[cid]
            if growth <= self.f and (best is None or growth < best_growth):
                best, best_growth, best_r = cid, growth, r
        if best is not None:
            self.members[best].append(u)
            self._radii[best] = best_r
            return ("assign", best)
        self.members.append([u])
        self._radii.append(0 * self.f)
        return ("open", len(self.members) - 1)


ALGORITHMS = {
    "pd": PDSumRad,
    "simple": SimpleSumRad,
    "naive": NaiveOnline,
    "fixed-adapter": FixedRadiusAdapter,
    "flexible-adapter": FlexibleAdapter,
}

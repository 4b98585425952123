"""Fractional online clustering.

Cluster mass lives only at demand locations, in ``K + 1`` radius types
``2**k * f`` (k = 1..K+1, K = ceil(log2 n)) costing ``c_k = f (1 +
2**k)``.  While an arriving demand's coverage sits below one, two-step
operations repeat: a uniform raise of the demand's own variables that
costs exactly one, then a multiplicative ``(1 + 1/c_k)`` boost of every
variable whose ball reaches the demand, whose cost equals the coverage
right after the raise.  Those two identities are asserted on every
operation, either exactly (Fraction state) or to 1e-9 (float state).

``PhasedFrac`` stacks restarts for unknown stream length: phase l
plans for ``2**2**2**l`` demands, freezes its table when the total
arrival count reaches that, and hands off to a fresh, wider table.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .offline import ExactSizeError
from .online import InvariantViolation

IDENTITY_SLACK = 1e-9
OPS_SAFETY_FACTOR = 64


def radius_types(n, f=1):
    """Scales k = 1..K+1 with radii and costs, K = ceil(log2 n)."""
    K = max(0, (int(n) - 1).bit_length())
    ks = list(range(1, K + 2))
    radii = [f * 2 ** k for k in ks]
    costs = [f * (1 + 2 ** k) for k in ks]
    return ks, radii, costs


class FracSumRad:
    """Fractional clustering over a declared horizon of n demands.

    ``exact=True`` keeps every variable a Fraction and asserts the
    per-operation identities exactly; the default float path asserts
    them to 1e-9 and is vectorized over demands.
    """

    def __init__(self, metric, f=1, n=None, exact=False):
        if n is None:
            raise ValueError("FracSumRad needs the demand count up front")
        self.metric = metric
        self.f = f
        self.n = int(n)
        self.exact = exact
        self.ks, self.radii, self.costs = radius_types(self.n, f)
        self.demands = []  # point ids in arrival order
        self.ops = []  # operations spent per demand
        self.events = []
        self.cost = Fraction(0) if exact else 0.0
        # float path state
        self._x = np.zeros((0, len(self.ks))) if not exact else None
        self._loc_of = []  # demand -> location registry index
        self._loc_arr = np.zeros(0, dtype=np.intp)
        self._locs = []  # registry of distinct point ids
        self._loc_index = {}
        self._within = None  # (types, locs, locs) boolean, grown lazily
        # exact path state
        self._xf = [] if exact else None
        self._ops_cap = (1 + self.costs[-1]) * (len(self.ks)) * OPS_SAFETY_FACTOR

    # -- location registry (float path works per distinct location) --------

    def _register(self, u):
        if u not in self._loc_index:
            self._loc_index[u] = len(self._locs)
            self._locs.append(u)
            if not self.exact:
                self._grow_within()
        self._loc_of.append(self._loc_index[u])
        if not self.exact:
            self._loc_arr = np.append(self._loc_arr, self._loc_index[u])

    def _grow_within(self):
        m = len(self._locs)
        d = self.metric.distance
        tol = self.metric.tol
        fresh = np.zeros((len(self.ks), m, m), dtype=bool)
        if self._within is not None and m > 1:
            fresh[:, : m - 1, : m - 1] = self._within
        z = self._locs[-1]
        row = np.array([float(d(z, w)) for w in self._locs])
        for t, r in enumerate(self.radii):
            hit = row <= float(r) + tol
            fresh[t, m - 1, :] = hit
            fresh[t, :, m - 1] = hit
        self._within = fresh

    # -- coverage ----------------------------------------------------------

    def _coverage_float(self, j):
        lj = self._loc_of[j]
        total = 0.0
        per_type = []
        for t in range(len(self.ks)):
            mask = self._within[t, lj, self._loc_arr]
            s = float(self._x[mask, t].sum())
            per_type.append(s)
            total += s
        return total, per_type

    def _coverage_exact(self, j):
        d, tol = self.metric.distance, self.metric.tol
        uj = self.demands[j]
        total = Fraction(0)
        per_type = []
        for t, r in enumerate(self.radii):
            s = Fraction(0)
            for i, ui in enumerate(self.demands):
                if d(ui, uj) <= r + tol:
                    s += self._xf[i][t]
            per_type.append(s)
            total += s
        return total, per_type

    def coverage(self, j):
        """Total fractional coverage of demand j, summed over types."""
        if self.exact:
            return self._coverage_exact(j)[0]
        return self._coverage_float(j)[0]

    def coverage_by_type(self, j):
        if self.exact:
            return self._coverage_exact(j)[1]
        return self._coverage_float(j)[1]

    def table_cost(self):
        """From-scratch cost of the current table, sum of x * c."""
        if self.exact:
            return sum(
                row[t] * self.costs[t] for row in self._xf for t in range(len(self.ks))
            )
        return float(
            self._x.sum(axis=0) @ np.array([float(c) for c in self.costs])
        )

    # -- the two-step operation --------------------------------------------

    def _operate_float(self, j):
        K1 = len(self.ks)
        raise_cost = 0.0
        for t, c in enumerate(self.costs):
            bump = 1.0 / (float(c) * K1)
            self._x[j, t] += bump
            raise_cost += float(c) * bump
        if abs(raise_cost - 1.0) > IDENTITY_SLACK:
            raise InvariantViolation(f"raise step cost {raise_cost} != 1")
        mid, _ = self._coverage_float(j)
        lj = self._loc_of[j]
        boost_cost = 0.0
        for t, c in enumerate(self.costs):
            mask = self._within[t, lj, self._loc_arr]
            boost_cost += float(self._x[mask, t].sum())
            self._x[mask, t] *= 1.0 + 1.0 / float(c)
        if abs(boost_cost - mid) > IDENTITY_SLACK:
            raise InvariantViolation(
                f"boost step cost {boost_cost} != post-raise coverage {mid}"
            )
        if self.f == 1 and not boost_cost < 1.0 + 1.0 / K1 + IDENTITY_SLACK:
            raise InvariantViolation(
                f"boost step cost {boost_cost} at or above 1 + 1/(K+1)"
            )
        self.cost += 1.0 + boost_cost

    def _operate_exact(self, j):
        K1 = len(self.ks)
        raise_cost = Fraction(0)
        for t, c in enumerate(self.costs):
            bump = Fraction(1, 1) / (c * K1)
            self._xf[j][t] += bump
            raise_cost += c * bump
        if raise_cost != 1:
            raise InvariantViolation(f"raise step cost {raise_cost} != 1")
        mid, _ = self._coverage_exact(j)
        d, tol = self.metric.distance, self.metric.tol
        uj = self.demands[j]
        boost_cost = Fraction(0)
        for t, (r, c) in enumerate(zip(self.radii, self.costs)):
            for i, ui in enumerate(self.demands):
                if d(ui, uj) <= r + tol:
                    boost_cost += self._xf[i][t]
                    self._xf[i][t] *= 1 + Fraction(1, 1) / c
        if boost_cost != mid:
            raise InvariantViolation(
                f"boost step cost {boost_cost} != post-raise coverage {mid}"
            )
        if self.f == 1 and not boost_cost < 1 + Fraction(1, K1):
            raise InvariantViolation(
                f"boost step cost {boost_cost} at or above 1 + 1/(K+1)"
            )
        self.cost += 1 + boost_cost

    def on_demand(self, u):
        """Feed one demand; operate until its coverage reaches one."""
        j = len(self.demands)
        self.demands.append(u)
        self._register(u)
        if self.exact:
            self._xf.append([Fraction(0)] * len(self.ks))
        else:
            self._x = np.vstack([self._x, np.zeros((1, len(self.ks)))])
        spent = 0
        cov = self.coverage(j)
        while cov < 1:
            if spent >= self._ops_cap:
                raise InvariantViolation(
                    f"demand {j} exceeded the operation cap {self._ops_cap}"
                )
            if self.exact:
                self._operate_exact(j)
            else:
                self._operate_float(j)
            spent += 1
            cov = self.coverage(j)
        self.ops.append(spent)
        self.events.append(
            {
                "t": j,
                "demand": u,
                "ops": spent,
                "coverage": float(cov),
                "cost": float(self.cost),
            }
        )
        audit = self.table_cost()
        drift = abs(float(audit) - float(self.cost))
        if self.exact:
            if audit != self.cost:
                raise InvariantViolation("incremental cost drifted from the table")
        elif drift > IDENTITY_SLACK * max(1.0, float(self.cost)):
            raise InvariantViolation(
                f"incremental cost {self.cost} vs table {audit}"
            )
        return spent

    def run(self, demands):
        for u in demands:
            self.on_demand(u)
        return self.cost

    def total_cost(self):
        return self.cost

    def variables(self):
        """Snapshot of the fractional table as {(demand, type): value}."""
        out = {}
        if self.exact:
            for j, row in enumerate(self._xf):
                for t, v in enumerate(row):
                    if v:
                        out[(j, self.ks[t])] = v
        else:
            nz = np.nonzero(self._x)
            for j, t in zip(*nz):
                out[(int(j), self.ks[int(t)])] = float(self._x[j, t])
        return out


def phase_plan(max_phases=4):
    """Planned horizons 2**2**2**l per phase, capped at 2**62."""
    plan = []
    for level in range(1, max_phases + 1):
        exponent = 2 ** 2 ** level
        if exponent > 62:
            break
        plan.append(2 ** exponent)
    return plan


class PhasedFrac:
    """Unknown-horizon fractional clustering via doubly exponential
    restarts.  Frozen phase tables keep their spent cost; coverage is
    tracked only within the live phase."""

    def __init__(self, metric, f=1, exact=False):
        self.metric = metric
        self.f = f
        self.exact = exact
        self.plan = phase_plan()
        self.phase = 0
        self.frozen_cost = Fraction(0) if exact else 0.0
        self.total_seen = 0
        self.events = []
        self._live = None
        self._next_phase()

    def _next_phase(self):
        if self.phase >= len(self.plan):
            raise ExactSizeError(
                f"phase {self.phase + 1} horizon exceeds the 2**62 cap"
            )
        horizon = self.plan[self.phase]
        self.phase += 1
        if self._live is not None:
            self.frozen_cost += self._live.cost
        self._live = FracSumRad(self.metric, self.f, n=horizon, exact=self.exact)

    def on_demand(self, u):
        if self.total_seen >= self.plan[self.phase - 1]:
            self._next_phase()
        self.total_seen += 1
        spent = self._live.on_demand(u)
        ev = dict(self._live.events[-1])
        ev["phase"] = self.phase
        ev["t"] = self.total_seen - 1
        ev["cost"] = float(self.total_cost())
        self.events.append(ev)
        return spent

    def run(self, demands):
        for u in demands:
            self.on_demand(u)
        return self.total_cost()

    def total_cost(self):
        return self.frozen_cost + self._live.cost

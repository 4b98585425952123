"""Seeded instance generators.

Everything draws from a ``numpy.random.Generator`` so batches replay
byte-for-byte from a seed.  Exact kinds (finite, HST, integer line)
keep integer or dyadic distances, which float64 represents exactly;
the DP oracles and the primal-dual counting rely on that.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .metric import FiniteMetric, PlaneMetric, StrictHst
from .model import Instance
from .reductions import PermitInstance

DYADIC_ALPHAS = (Fraction(2), Fraction(5, 2), Fraction(3))


def rng_from(seed):
    return np.random.default_rng(seed)


def gen_finite(rng, n_points=10, n_demands=8, wmax=8, name=""):
    """Shortest-path closure of a complete graph with integer weights."""
    w = rng.integers(1, wmax + 1, size=(n_points, n_points))
    w = np.minimum(w, w.T)
    np.fill_diagonal(w, 0)
    d = w.astype(np.int64)
    for k in range(n_points):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    metric = FiniteMetric([[int(v) for v in row] for row in d])
    demands = [int(p) for p in rng.integers(0, n_points, size=n_demands)]
    return Instance(metric, demands, f=1, name=name or f"finite-{n_points}p")


def gen_hst(rng, n_demands=8, alpha=None, levels=None, name=""):
    """Random uniform-per-level tree with a dyadic separation factor."""
    if alpha is None:
        alpha = DYADIC_ALPHAS[rng.integers(0, len(DYADIC_ALPHAS))]
    if levels is None:
        levels = int(rng.integers(2, 4))
    fanouts = [int(rng.integers(2, 4)) for _ in range(levels)]
    tree = StrictHst(alpha, fanouts)
    picks = rng.integers(0, len(tree.leaves), size=n_demands)
    demands = [tree.leaves[int(i)] for i in picks]
    return Instance(tree, demands, f=1, name=name or f"hst-a{alpha}-L{levels}")


def gen_plane_uniform(rng, n=8, box=8.0, name=""):
    coords = rng.uniform(0.0, box, size=(n, 2))
    metric = PlaneMetric([tuple(c) for c in coords])
    order = [int(i) for i in rng.permutation(n)]
    return Instance(metric, order, f=1, name=name or f"plane-{n}")


def gen_line_uniform(rng, n=8, length=32, as_finite=False, name=""):
    """Integer points on a segment; optionally wrapped as a finite
    metric so distances stay integers end to end."""
    xs = sorted(int(x) for x in rng.integers(0, length + 1, size=n))
    if as_finite:
        metric = FiniteMetric([[abs(a - b) for b in xs] for a in xs])
    else:
        metric = PlaneMetric([(float(x), 0.0) for x in xs])
    order = [int(i) for i in rng.permutation(n)]
    return Instance(metric, order, f=1, name=name or f"line-{n}")


def gen_planted_plane(rng, n_demands, n_sites=12, box=64.0, name=""):
    """Long demand stream over a few fixed sites; repeats collapse in
    the exact solver, so these scale to thousands of arrivals."""
    sites = rng.uniform(0.0, box, size=(n_sites, 2))
    metric = PlaneMetric([tuple(s) for s in sites])
    picks = [int(i) for i in rng.integers(0, n_sites, size=n_demands)]
    return Instance(metric, picks, f=1, name=name or f"planted-{n_demands}")


def gen_permit(rng, types=3, normal_form=True, max_driving=10, name=""):
    """Random permit instance; in normal form costs start at one and
    at least triple per type."""
    c, d = [1], [int(rng.integers(1, 4))]
    for _ in range(types - 1):
        if normal_form:
            c.append(3 * c[-1] + int(rng.integers(0, c[-1] + 1)))
        else:
            c.append(c[-1] + int(rng.integers(1, 4)))
        d.append(d[-1] * int(rng.integers(2, 4)))
    horizon = d[-1] * int(rng.integers(1, 4))
    count = min(max_driving, horizon)
    days = sorted(int(x) for x in rng.choice(horizon, size=count, replace=False))
    return PermitInstance(c=c, d=d, horizon=horizon, driving=days)

"""Metric spaces for sum-of-radii clustering.

Three kinds share one small surface: an ordered ``points`` list of
hashable identifiers, ``distance(p, q)`` in exact arithmetic wherever
the underlying data is exact, a float ``matrix()`` aligned with the
``points`` order, and an absolute coverage slack ``tol`` (zero on exact
metrics, 1e-9 in the plane).  Distance zero between distinct points is
deliberately allowed; the permit reduction trees rely on it.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

COVER_SLACK = 1e-9


def as_fraction(x):
    """Exact coercion: int, Fraction, float (its binary value), or 'p/q' string."""
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(str(x))


class FiniteMetric:
    """Explicit symmetric distance matrix over points ``0..n-1``."""

    kind = "finite"
    tol = 0.0

    def __init__(self, dists):
        n = len(dists)
        if any(len(row) != n for row in dists):
            raise ValueError("distance matrix must be square")
        self.dists = [list(row) for row in dists]
        self.points = list(range(n))
        self._mat = None

    @property
    def n_points(self):
        return len(self.points)

    def index_of(self, p):
        return p

    def distance(self, p, q):
        return self.dists[p][q]

    def matrix(self):
        if self._mat is None:
            self._mat = np.array([[float(v) for v in row] for row in self.dists])
        return self._mat


class PlaneMetric:
    """Euclidean distances between fixed coordinates; points are indices.

    ``distance`` also accepts raw ``(x, y)`` pairs in either slot, so
    clusters centered at free coordinates (minimum enclosing circles)
    can be checked against demand points.
    """

    kind = "plane"
    tol = COVER_SLACK

    def __init__(self, coords):
        self.coords = [(float(x), float(y)) for x, y in coords]
        self.points = list(range(len(self.coords)))
        self._mat = None

    @property
    def n_points(self):
        return len(self.points)

    def index_of(self, p):
        return p

    def _xy(self, p):
        return self.coords[p] if isinstance(p, int) else (float(p[0]), float(p[1]))

    def distance(self, p, q):
        (px, py), (qx, qy) = self._xy(p), self._xy(q)
        return math.hypot(px - qx, py - qy)

    def matrix(self):
        if self._mat is None:
            c = np.array(self.coords)
            diff = c[:, None, :] - c[None, :, :]
            self._mat = np.sqrt((diff * diff).sum(axis=2))
        return self._mat


class StrictHst:
    """Strict hierarchically separated tree.

    ``fanouts`` lists children counts top-down: the root sits at level
    ``len(fanouts)`` and has ``fanouts[0]`` children; leaves sit at
    level 0.  The edge joining a level-k node to its parent has length
    ``alpha**k``, so climbing from level a to an ancestor at level b
    telescopes to ``(alpha**b - alpha**a) / (alpha - 1)``.

    Nodes are ``(level, index)`` pairs; leaves are ordered left to
    right by index, and ``points`` sorts all nodes in tuple order so
    leaves come first.
    """

    kind = "hst"
    tol = 0.0

    def __init__(self, alpha, fanouts):
        self.alpha = as_fraction(alpha)
        if self.alpha <= 1:
            raise ValueError("separation alpha must exceed 1")
        self.fanouts = tuple(int(c) for c in fanouts)
        if not self.fanouts or any(c < 2 for c in self.fanouts):
            raise ValueError("every internal level needs fanout >= 2")
        self.levels = len(self.fanouts)
        width = {self.levels: 1}
        for depth, c in enumerate(self.fanouts):
            width[self.levels - depth - 1] = width[self.levels - depth] * c
        self._width = width
        self.points = [
            (lvl, i) for lvl in range(self.levels + 1) for i in range(width[lvl])
        ]
        self.index = {p: i for i, p in enumerate(self.points)}
        self.leaves = [(0, i) for i in range(width[0])]
        self._pow = {}
        self._mat = None

    @property
    def n_points(self):
        return len(self.points)

    @property
    def root(self):
        return (self.levels, 0)

    def index_of(self, p):
        return self.index[p]

    def fanout_at(self, level):
        """Children count of nodes at ``level`` (level >= 1)."""
        return self.fanouts[self.levels - level]

    def children(self, node):
        lvl, i = node
        if lvl == 0:
            return []
        c = self.fanout_at(lvl)
        return [(lvl - 1, i * c + t) for t in range(c)]

    def parent(self, node):
        lvl, i = node
        if lvl >= self.levels:
            return None
        return (lvl + 1, i // self.fanout_at(lvl + 1))

    def ancestor_at(self, node, level):
        if level < node[0]:
            raise ValueError("ancestor level below the node's own level")
        while node[0] < level:
            node = self.parent(node)
        return node

    def _alpha_pow(self, k):
        if k not in self._pow:
            self._pow[k] = self.alpha ** k
        return self._pow[k]

    def climb_distance(self, low, high):
        """Path length from a level-``low`` node up to a level-``high`` ancestor."""
        return (self._alpha_pow(high) - self._alpha_pow(low)) / (self.alpha - 1)

    def meet_level(self, p, q):
        a, b = p, q
        while a[0] < b[0]:
            a = self.parent(a)
        while b[0] < a[0]:
            b = self.parent(b)
        while a != b:
            a, b = self.parent(a), self.parent(b)
        return a[0]

    def distance(self, p, q):
        if p == q:
            return Fraction(0)
        m = self.meet_level(p, q)
        return self.climb_distance(p[0], m) + self.climb_distance(q[0], m)

    def matrix(self):
        if self._mat is None:
            n = self.n_points
            mat = np.zeros((n, n))
            for i in range(n):
                for j in range(i + 1, n):
                    d = float(self.distance(self.points[i], self.points[j]))
                    mat[i, j] = mat[j, i] = d
            self._mat = mat
        return self._mat


def build_strict_hst(alpha, fanouts):
    return StrictHst(alpha, fanouts)


def validate_metric(metric, slack=1e-9, limit=200):
    """Check symmetry, zero self-distance, nonnegativity, and the triangle
    inequality on a metric's float matrix; returns one dict per violation.

    Zero distance between distinct points is not flagged: quotient
    (pseudo)metrics are legal inputs everywhere in this package.
    """
    D = metric.matrix()
    pts = metric.points
    out = []

    def push(axiom, witness, detail):
        if len(out) < limit:
            out.append({"axiom": axiom, "points": witness, "detail": detail})

    for i, j in zip(*np.nonzero(np.abs(D - D.T) > slack)):
        if i < j:
            push("symmetry", (pts[i], pts[j]), f"{D[i, j]} vs {D[j, i]}")
    for i in np.nonzero(np.abs(np.diag(D)) > slack)[0]:
        push("identity", (pts[i],), f"self-distance {D[i, i]}")
    for i, j in zip(*np.nonzero(D < -slack)):
        push("nonnegativity", (pts[i], pts[j]), f"{D[i, j]}")
    n = len(pts)
    for mid in range(n):
        bad = D > D[:, [mid]] + D[[mid], :] + slack
        for i, k in zip(*np.nonzero(bad)):
            push(
                "triangle",
                (pts[i], pts[mid], pts[k]),
                f"{D[i, k]} > {D[i, mid]} + {D[mid, k]}",
            )
        if len(out) >= limit:
            break
    return out


# --- plane geometry helpers -------------------------------------------------


def _circle_two(a, b):
    cx = (a[0] + b[0]) / 2.0
    cy = (a[1] + b[1]) / 2.0
    return (cx, cy), math.hypot(a[0] - cx, a[1] - cy)


def _circle_three(a, b, c):
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-14:
        return None
    ux = (
        (ax * ax + ay * ay) * (by - cy)
        + (bx * bx + by * by) * (cy - ay)
        + (cx * cx + cy * cy) * (ay - by)
    ) / d
    uy = (
        (ax * ax + ay * ay) * (cx - bx)
        + (bx * bx + by * by) * (ax - cx)
        + (cx * cx + cy * cy) * (bx - ax)
    ) / d
    return (ux, uy), math.hypot(ax - ux, ay - uy)


def _in_circle(circle, p, tol):
    (cx, cy), r = circle
    return math.hypot(p[0] - cx, p[1] - cy) <= r + tol


def min_enclosing_circle(points, tol=1e-9):
    """Smallest circle covering the points: ``((cx, cy), radius)``.

    Welzl's move-to-front algorithm over a fixed shuffle, so repeated
    calls are deterministic.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if not pts:
        return (0.0, 0.0), 0.0
    rnd = random.Random(0x5EED)
    rnd.shuffle(pts)

    def trivial(boundary):
        if not boundary:
            return (pts[0][0], pts[0][1]), 0.0
        if len(boundary) == 1:
            return (boundary[0][0], boundary[0][1]), 0.0
        if len(boundary) == 2:
            return _circle_two(*boundary)
        c = _circle_three(*boundary)
        if c is None:
            # collinear triple: widest pair decides
            best = None
            for i in range(3):
                for j in range(i + 1, 3):
                    cand = _circle_two(boundary[i], boundary[j])
                    if best is None or cand[1] > best[1]:
                        best = cand
            return best
        return c

    def welzl(n, boundary):
        if n == 0 or len(boundary) == 3:
            return trivial(boundary)
        p = pts[n - 1]
        circle = welzl(n - 1, boundary)
        if _in_circle(circle, p, tol):
            return circle
        return welzl(n - 1, boundary + [p])

    return welzl(len(pts), [])


def enclosing_ball(metric, members):
    """Smallest ball holding ``members``: ``(center, radius)``.

    On the plane the center is a free coordinate pair from the minimum
    enclosing circle; on finite metrics and trees it is the best point
    of the space (minimax), so the radius is exact there.
    """
    members = list(members)
    if not members:
        raise ValueError("empty member set")
    if metric.kind == "plane":
        return min_enclosing_circle([metric.coords[p] for p in members])
    best = None
    for z in metric.points:
        r = max(metric.distance(z, p) for p in members)
        if best is None or r < best[1]:
            best = (z, r)
    return best


def set_diameter(metric, members):
    members = list(members)
    if len(members) < 2:
        return 0
    return max(
        metric.distance(p, q) for i, p in enumerate(members) for q in members[i + 1 :]
    )


# --- ternary embedding in the plane ------------------------------------------


def embed_hst(tree):
    """Map a ternary strict HST into the plane.

    The root goes to the origin with its children on the left, up,
    and right axes; every other node sends children along the three
    axis directions that do not point back at its parent.  Each edge
    becomes an axis-aligned segment of exactly its tree length, so the
    plane can only contract distances.
    """
    if any(c != 3 for c in tree.fanouts):
        raise ValueError("embedding is defined for ternary trees only")
    alpha = float(tree.alpha)
    pos = {tree.root: (0.0, 0.0)}
    heading = {tree.root: None}
    stack = [tree.root]
    while stack:
        node = stack.pop()
        lvl = node[0]
        if lvl == 0:
            continue
        step = alpha ** (lvl - 1)
        d = heading[node]
        if d is None:
            child_dirs = [(-1, 0), (0, 1), (1, 0)]
        else:
            child_dirs = [(-d[1], d[0]), d, (d[1], -d[0])]
        x, y = pos[node]
        for child, cd in zip(tree.children(node), child_dirs):
            pos[child] = (x + cd[0] * step, y + cd[1] * step)
            heading[child] = cd
            stack.append(child)
    return pos


def embed_ternary_hst(alpha, K):
    """Ternary strict HST whose root children sit at distance alpha**K,
    together with its plane embedding.

    The distortion bound sqrt(2) * alpha / (alpha - 2) only makes sense
    for alpha strictly between 2 and 3, so other scales are rejected.
    """
    a = as_fraction(alpha)
    if not 2 < a < 3:
        raise ValueError("embedding needs alpha strictly inside (2, 3)")
    tree = StrictHst(a, [3] * (K + 1))
    return tree, embed_hst(tree)


def embedding_coords(tree, pos):
    """Coordinates array aligned with ``tree.points`` order."""
    return np.array([pos[p] for p in tree.points])


def contraction_violations(tree, pos, slack=1e-9):
    """Node pairs whose plane distance exceeds their tree distance."""
    DT = tree.matrix()
    c = embedding_coords(tree, pos)
    diff = c[:, None, :] - c[None, :, :]
    DP = np.sqrt((diff * diff).sum(axis=2))
    out = []
    for i, j in zip(*np.nonzero(DP > DT + slack)):
        if i < j:
            out.append((tree.points[i], tree.points[j], DP[i, j] - DT[i, j]))
    return out


def distortion(tree, pos):
    """Worst tree/plane distance ratio over all node pairs: ``(ratio, pair)``.

    The embedding is contracting, so this is the classical distortion.
    """
    DT = tree.matrix()
    c = embedding_coords(tree, pos)
    diff = c[:, None, :] - c[None, :, :]
    DP = np.sqrt((diff * diff).sum(axis=2))
    n = len(tree.points)
    iu = np.triu_indices(n, k=1)
    with np.errstate(divide="ignore"):
        ratios = DT[iu] / DP[iu]
    at = int(np.argmax(ratios))
    return float(ratios[at]), (tree.points[iu[0][at]], tree.points[iu[1][at]])

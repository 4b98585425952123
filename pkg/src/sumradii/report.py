"""Figures rendered from batch rows, written next to the CSV output.

Kept separate from the batch sink itself: the delimited output stays
plot-free and byte-stable, and this module turns it into pictures
after the fact.
"""

from __future__ import annotations

import math
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

import numpy as np

from .experiments import FRAC_ALGS, fit_loglog_trend, pd_bound, simple_bound

plt.rcParams.update({"figure.dpi": 140, "font.size": 9})

_MARKERS = ["o", "s", "^", "v", "D", "x", "*", "P"]


def render_report(rows, outdir):
    """Write ratio figures for a batch; returns the created paths."""
    os.makedirs(outdir, exist_ok=True)
    made = []
    made.append(_ratio_vs_n(rows, os.path.join(outdir, "ratio_vs_n.png")))
    frac_rows = [
        r for r in rows if r["algorithm"] in FRAC_ALGS and r["ratio"] is not None
    ]
    if frac_rows:
        made.append(_frac_trend(frac_rows, os.path.join(outdir, "frac_trend.png")))
    return [p for p in made if p]


def _ratio_vs_n(rows, path):
    per_alg = defaultdict(list)
    for r in rows:
        if r["ratio"] is not None and r["seed"] != "agg":
            per_alg[r["algorithm"]].append((r["n"], r["ratio"]))
    if not per_alg:
        return None
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, (alg, pts) in enumerate(sorted(per_alg.items())):
        xs, ys = zip(*pts)
        ax.scatter(xs, ys, s=14, alpha=0.6, marker=_MARKERS[i % len(_MARKERS)], label=alg)
    ns = sorted({r["n"] for r in rows})
    if any(a == "pd" for a in per_alg):
        ax.plot(ns, [pd_bound(n) for n in ns], "k--", lw=1, label="3(2+log2 n)")
    if any(a == "simple" for a in per_alg):
        ax.plot(ns, [simple_bound(n) for n in ns], "k:", lw=1, label="2(5+log2 n)")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("demands n")
    ax.set_ylabel("cost / optimum")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _frac_trend(frac_rows, path):
    pts = [(r["n"], r["ratio"]) for r in frac_rows]
    xs = [math.log2(max(2.0, math.log2(max(4.0, n)))) for n, _ in pts]
    ys = [r for _, r in pts]
    a, b = fit_loglog_trend(pts)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(xs, ys, s=16, alpha=0.7)
    grid = np.linspace(min(xs), max(xs), 50)
    ax.plot(grid, a + b * grid, "r-", lw=1, label=f"fit {a:.2f} + {b:.2f} x")
    ax.set_xlabel("log2 log2 n")
    ax.set_ylabel("fractional cost / optimum")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path

"""Acceptance gate: every advertised guarantee re-measured end to end.

One test per guarantee.  Each test prints a single summary line with
the measured numbers before asserting, so a failing check still shows
what was observed.  Tolerances are the advertised ones; none were
re-tuned after seeing results, and the seed blocks are fixed literals.
"""

import math
import time
from fractions import Fraction

import numpy as np

from sumradii.adversary import certificate_floor, run_hst_adversary
from sumradii.experiments import fit_loglog_trend, pd_bound, simple_bound
from sumradii.fractional import FracSumRad, PhasedFrac
from sumradii.generators import (
    DYADIC_ALPHAS,
    gen_finite,
    gen_hst,
    gen_line_uniform,
    gen_permit,
    gen_planted_plane,
    gen_plane_uniform,
    rng_from,
)
from sumradii.metric import StrictHst, distortion, embed_ternary_hst, embedding_coords, set_diameter
from sumradii.model import Instance, is_feasible, round_radii_pow2, solution_cost
from sumradii.offline import exact_opt, exact_opt_pow2, permit_cover_ok, permit_opt
from sumradii.online import (
    ALGORITHMS,
    FixedRadiusAdapter,
    FlexibleAdapter,
    PDSumRad,
    SimpleSumRad,
)
from sumradii.reductions import (
    cluster_sol_to_permit_sol,
    hst_to_permit,
    permit_cost,
    permit_sol_to_cluster_sol,
    permit_to_cluster,
)

EPS = 1e-9
SIZES = (4, 8, 16)


def _verdict(label, ok, detail):
    print(f"[acceptance] {label}: {'PASS' if ok else 'FAIL'} ({detail})")


def _mixed(base, i, kinds=("finite", "hst", "plane")):
    n = SIZES[i % 3]
    kind = kinds[(i // 3) % len(kinds)]
    rng = rng_from(base + i)
    if kind == "finite":
        return gen_finite(rng, max(6, n), n)
    if kind == "hst":
        return gen_hst(rng, n)
    if kind == "line":
        return gen_line_uniform(rng, n, as_finite=True)
    return gen_plane_uniform(rng, n)


def test_pd_competitive_envelope_and_duality():
    ratio_bad = envelope_bad = duality_bad = total = 0
    t0 = time.monotonic()
    for kind in ("finite", "hst", "plane"):
        for i in range(500):
            n = SIZES[i % 3]
            rng = rng_from(10_000 + i)
            if kind == "finite":
                inst = gen_finite(rng, max(6, n), n)
            elif kind == "hst":
                inst = gen_hst(rng, n)
            else:
                inst = gen_plane_uniform(rng, n)
            alg = PDSumRad(inst.metric, inst.f)
            alg.run(inst.demands)
            opt = solution_cost(exact_opt(inst), inst.f)
            cost, dual, bound = alg.total_cost(), alg.dual_sum(), pd_bound(n)
            total += 1
            if float(cost) > bound * float(opt) + EPS:
                ratio_bad += 1
            if float(cost) > bound * float(dual) + EPS:
                envelope_bad += 1
            if float(dual) > float(opt) + EPS:
                duality_bad += 1
    elapsed = time.monotonic() - t0
    ok = ratio_bad == envelope_bad == duality_bad == 0 and elapsed < 60
    _verdict(
        "pd cost within 3(2+log2 n) of optimum, dual-checked",
        ok,
        f"ratio {ratio_bad}/{total}, cost-vs-dual {envelope_bad}/{total}, "
        f"weak duality {duality_bad}/{total}, {elapsed:.1f}s",
    )
    assert ratio_bad == 0, f"cost/optimum above 3(2+log2 n) on {ratio_bad} runs"
    assert envelope_bad == 0, f"cost above 3(2+log2 n) x dual sum on {envelope_bad} runs"
    assert duality_bad == 0, (
        f"dual sum exceeded the unrestricted optimum on {duality_bad}/{total} runs; "
        "the dual packs against power-of-two-radius covers only"
    )
    assert elapsed < 60


def test_pd_dual_feasibility_after_every_demand():
    bad = runs = 0
    for i in range(1000):
        inst = _mixed(20_000, i, kinds=("finite", "hst", "line"))
        alg = PDSumRad(inst.metric, inst.f, exact=True)
        for u in inst.demands:
            alg.on_demand(u)
            bad += len(alg.dual_violations())
        runs += 1
    _verdict(
        "pd duals feasible after every demand (exact arithmetic)",
        bad == 0,
        f"{bad} violations over {runs} runs",
    )
    assert bad == 0


def test_simple_expected_cost_envelope():
    t0 = time.monotonic()
    worst = 0.0
    bad = 0
    for i in range(20):
        n = SIZES[i % 3]
        kind = ("finite", "hst", "plane")[(i // 3) % 3]
        rng = rng_from(30_000 + i)
        if kind == "finite":
            inst = gen_finite(rng, max(6, n), n)
        elif kind == "hst":
            inst = gen_hst(rng, n)
        else:
            inst = gen_plane_uniform(rng, n)
        opt = float(solution_cost(exact_opt(inst), inst.f))
        costs = []
        for seed in range(2000):
            alg = SimpleSumRad(inst.metric, inst.f, n=inst.n, seed=seed)
            alg.run(inst.demands)
            costs.append(float(alg.total_cost()))
        mean = float(np.mean(costs))
        se = float(np.std(costs, ddof=1)) / math.sqrt(len(costs))
        margin = (mean + 3 * se) / (simple_bound(inst.n) * opt)
        worst = max(worst, margin)
        if margin > 1:
            bad += 1
    elapsed = time.monotonic() - t0
    ok = bad == 0 and elapsed < 120
    _verdict(
        "simple mean cost within 2(5+log2 n) of optimum",
        ok,
        f"worst (mean+3se)/bound = {worst:.3f}, {bad}/20 instances over, {elapsed:.1f}s",
    )
    assert bad == 0
    assert elapsed < 120


def test_frac_operation_identities_and_growth():
    # the per-operation identities (raise costs exactly 1, boost costs
    # the post-raise coverage, pre-operation coverage < 1) are enforced
    # inside every operation and raise InvariantViolation when off
    ratios = []
    ops_total = 0
    for idx, n in enumerate((4, 16, 256, 4096)):
        inst = gen_planted_plane(rng_from(40_000 + idx), n)
        alg = FracSumRad(inst.metric, inst.f, n=inst.n)
        alg.run(inst.demands)
        ops_total += sum(alg.ops)
        opt = float(solution_cost(exact_opt(inst), inst.f))
        ratios.append((n, float(alg.total_cost()) / opt))
    exact_alg = FracSumRad(
        gen_planted_plane(rng_from(40_010), 16).metric, 1, n=16, exact=True
    )
    exact_alg.run(gen_planted_plane(rng_from(40_010), 16).demands)
    ops_total += sum(exact_alg.ops)
    a, b = fit_loglog_trend(ratios)
    shown = ", ".join(f"n={n}:{r:.2f}" for n, r in ratios)
    _verdict(
        "frac identities hold; ratio grows like log log n",
        b <= 6,
        f"{shown}; fitted ratio ~ {a:.2f} + {b:.2f} log2 log2 n over {ops_total} operations",
    )
    assert b <= 6, f"fitted slope {b:.2f} against log2 log2 n"


def test_pow2_rounding_stays_within_factor_two():
    round_bad = opt_bad = 0
    for i in range(1000):
        inst = _mixed(50_000, i)
        alg = SimpleSumRad(inst.metric, inst.f, n=inst.n, seed=i)
        alg.run(inst.demands)
        sol = alg.solution()
        rounded = round_radii_pow2(sol, inst.f)
        if not is_feasible(inst, rounded):
            round_bad += 1
        elif float(solution_cost(rounded, inst.f)) > 2 * float(
            solution_cost(sol, inst.f)
        ) + EPS:
            round_bad += 1
    for i in range(200):
        inst = _mixed(50_000, i)
        o1 = float(solution_cost(exact_opt(inst), inst.f))
        o2 = float(solution_cost(exact_opt_pow2(inst), inst.f))
        if o2 > 2 * o1 + EPS or o2 < o1 - EPS:
            opt_bad += 1
    ok = round_bad == 0 and opt_bad == 0
    _verdict(
        "power-of-two radii cost at most 2x",
        ok,
        f"rounding {round_bad}/1000, restricted optimum {opt_bad}/200",
    )
    assert round_bad == 0
    assert opt_bad == 0


def test_adapter_overhead_factors():
    fixed_bad = flex_bad = 0
    for i in range(200):
        inst = _mixed(60_000, i)
        alg = FixedRadiusAdapter(inst.metric, inst.f)
        for u in inst.demands:
            alg.on_demand(u)
            if float(alg.total_cost()) > 2 * float(alg.inner_cost()) + EPS:
                fixed_bad += 1
                break
    for i in range(200):
        inst = _mixed(61_000, i)
        alg = FlexibleAdapter(inst.metric, inst.f)
        alg.run(inst.demands)
        for cid in range(len(alg.inner.members)):
            ring_ids = set(alg.rings_of(cid).values())
            spent = sum(inst.f + alg.clusters[j].radius for j in ring_ids)
            diam = set_diameter(inst.metric, alg.inner_members(cid))
            if float(spent) > max(2 * inst.f, 5 * float(diam)) + EPS:
                flex_bad += 1
                break
    ok = fixed_bad == 0 and flex_bad == 0
    _verdict(
        "adapters: fixed radius 2x per prefix, flexible max(2f, 5 diam)",
        ok,
        f"fixed {fixed_bad}/200 traces, flexible {flex_bad}/200 traces",
    )
    assert fixed_bad == 0
    assert flex_bad == 0


def test_permit_and_cluster_optima_coincide():
    permit_bad = map_bad = tree_bad = 0
    for i in range(100):
        p = gen_permit(rng_from(62_000 + i), types=1 + (i % 4))
        cost, purchases = permit_opt(p)
        inst, tree = permit_to_cluster(p)
        sol = exact_opt(inst)
        if solution_cost(sol, inst.f) != cost:
            permit_bad += 1
            continue
        fwd = permit_sol_to_cluster_sol(tree, purchases)
        back = cluster_sol_to_permit_sol(tree, sol)
        if (
            solution_cost(fwd, 1) != cost
            or not permit_cover_ok(p, back)
            or permit_cost(p, back) != cost
        ):
            map_bad += 1
    for i in range(100):
        rng = rng_from(63_000 + i)
        K = 1 + (i % 3)
        alpha = DYADIC_ALPHAS[int(rng.integers(0, len(DYADIC_ALPHAS)))]
        tree = StrictHst(alpha, [3] * K)
        picks = rng.integers(0, len(tree.leaves), size=int(rng.integers(1, 7)))
        demands = [tree.leaves[int(x)] for x in picks]
        p = hst_to_permit(tree, demands)
        cost, purchases = permit_opt(p)
        inst = Instance(tree, demands, f=1)
        if not permit_cover_ok(p, purchases) or solution_cost(exact_opt(inst), 1) != cost:
            tree_bad += 1
    ok = permit_bad == map_bad == tree_bad == 0
    _verdict(
        "permit optimum = window-tree cluster optimum, maps cost-exact",
        ok,
        f"optima {permit_bad}/100, maps {map_bad}/100, tree direction {tree_bad}/100",
    )
    assert permit_bad == 0
    assert map_bad == 0
    assert tree_bad == 0


def test_adversary_certificate_floor():
    alpha = Fraction(5, 2)
    bad, results = 0, []
    for name in sorted(ALGORITHMS):
        if name == "simple":
            continue
        for K in (1, 2, 3):
            res = run_hst_adversary(ALGORITHMS[name], alpha, K)
            floor = certificate_floor(alpha, K)
            assert floor == Fraction(2 * (K + 1), 15)
            good = res.certificate()["ok"]
            bad += 0 if good else 1
            results.append(f"{name},K={K}:{float(res.ratio):.2f}>={float(floor):.2f}")
    _verdict(
        "drill ratio at least (K+1)/7.5 for every deterministic clusterer",
        bad == 0,
        "; ".join(results),
    )
    assert bad == 0


def test_embedding_contraction_and_distortion():
    expanded = 0
    over_bound = 0
    measured_ref = None
    for alpha in (Fraction(11, 5), Fraction(5, 2), Fraction(29, 10)):
        bound = math.sqrt(2) * float(alpha) / (float(alpha) - 2)
        for K in (1, 2, 3, 4):
            tree, pos = embed_ternary_hst(alpha, K)
            dt = tree.matrix()
            c = embedding_coords(tree, pos)
            diff = c[:, None, :] - c[None, :, :]
            dp = np.sqrt((diff * diff).sum(axis=2))
            expanded += int((dp > dt + 1e-9).sum())
            ratio, _ = distortion(tree, pos)
            if ratio > bound + 1e-9:
                over_bound += 1
            if alpha == Fraction(5, 2) and K == 2:
                measured_ref = ratio
    ok = expanded == 0 and over_bound == 0 and abs(measured_ref - 5.014) <= 1e-3
    _verdict(
        "plane embedding never expands; distortion within sqrt(2) a/(a-2)",
        ok,
        f"expansions {expanded}, cells over bound {over_bound}/12, "
        f"reference distortion {measured_ref:.6f}",
    )
    assert expanded == 0
    assert over_bound == 0
    assert abs(measured_ref - 5.014) <= 1e-3


def test_phased_frac_overhead_envelope():
    ratios = []
    for idx, n in enumerate((16, 17, 256, 4096)):
        inst = gen_planted_plane(rng_from(64_000 + idx), n)
        known = FracSumRad(inst.metric, inst.f, n=inst.n)
        known.run(inst.demands)
        phased = PhasedFrac(inst.metric, inst.f)
        phased.run(inst.demands)
        ratios.append((n, float(phased.total_cost()) / float(known.total_cost())))
    worst = max(r for _, r in ratios)
    soft = [f"n={n}:{r:.2f}" for n, r in ratios]
    note = " (over the 4x envelope, reported)" if worst > 4 else ""
    _verdict(
        "phased restarts cost at most a constant factor over known-n",
        worst <= 16,
        ", ".join(soft) + note,
    )
    assert worst <= 16, f"phased/known ratio {worst:.2f}"

"""JSON round trips for every document schema."""

import json
from fractions import Fraction

from sumradii.adversary import run_hst_adversary
from sumradii.fractional import FracSumRad
from sumradii.generators import gen_finite, gen_hst, gen_permit, gen_plane_uniform, rng_from
from sumradii.metric import StrictHst
from sumradii.model import Cluster, Solution, solution_cost
from sumradii.online import PDSumRad
from sumradii.serialize import (
    dump_json,
    instance_from_dict,
    instance_to_dict,
    load_json,
    metric_from_dict,
    metric_to_dict,
    num_in,
    num_out,
    permit_from_dict,
    permit_to_dict,
    run_to_dict,
    solution_from_dict,
    solution_to_dict,
)


class TestNumbers:
    def test_rationals_travel_as_strings(self):
        assert num_out(Fraction(2, 3)) == "2/3"
        assert num_in("2/3") == Fraction(2, 3)
        assert num_in(num_out(Fraction(-7, 4))) == Fraction(-7, 4)

    def test_whole_rationals_collapse_to_int(self):
        assert num_out(Fraction(6, 3)) == 2
        assert num_out(5) == 5
        assert num_out(1.5) == 1.5


class TestMetricRoundTrip:
    def test_finite_with_fractions(self):
        inst = gen_finite(rng_from(50_000), 5, 5)
        m2 = metric_from_dict(metric_to_dict(inst.metric))
        assert m2.kind == "finite"
        for p in inst.metric.points:
            for q in inst.metric.points:
                assert m2.distance(p, q) == inst.metric.distance(p, q)

    def test_plane(self):
        inst = gen_plane_uniform(rng_from(50_001), 6)
        m2 = metric_from_dict(metric_to_dict(inst.metric))
        assert m2.coords == inst.metric.coords

    def test_hst_keeps_exact_alpha(self):
        tree = StrictHst(Fraction(5, 2), [3, 2])
        m2 = metric_from_dict(metric_to_dict(tree))
        assert m2.alpha == Fraction(5, 2)
        assert list(m2.fanouts) == [3, 2]
        assert m2.distance((0, 0), (0, 5)) == tree.distance((0, 0), (0, 5))


class TestInstanceRoundTrip:
    def test_hst_demand_tuples_survive(self):
        inst = gen_hst(rng_from(50_002), 7)
        d2 = instance_from_dict(json.loads(dump_json(instance_to_dict(inst))))
        assert d2.demands == inst.demands
        assert d2.f == inst.f
        assert d2.name == inst.name

    def test_fraction_f(self):
        inst = gen_finite(rng_from(50_003), 4, 6)
        inst.f = Fraction(3, 7)
        d2 = instance_from_dict(instance_to_dict(inst))
        assert d2.f == Fraction(3, 7)


class TestSolutionRoundTrip:
    def test_cost_and_centers_survive(self):
        inst = gen_hst(rng_from(50_004), 6)
        alg = PDSumRad(inst.metric, inst.f)
        alg.run(inst.demands)
        sol = alg.solution()
        doc = solution_to_dict(sol, metric=inst.metric, f=inst.f)
        s2 = solution_from_dict(doc, metric=inst.metric)
        assert [c.center for c in s2.clusters] == [c.center for c in sol.clusters]
        assert [c.radius for c in s2.clusters] == [c.radius for c in sol.clusters]
        assert s2.assignment == sol.assignment
        assert solution_cost(s2, inst.f) == solution_cost(sol, inst.f)

    def test_offline_tag_survives(self):
        sol = Solution([Cluster(0, Fraction(1, 2), "offline")], [0])
        s2 = solution_from_dict(solution_to_dict(sol))
        assert s2.clusters[0].opened_at == "offline"
        assert s2.clusters[0].radius == Fraction(1, 2)


class TestPermitRoundTrip:
    def test_fields_survive(self):
        p = gen_permit(rng_from(50_005))
        p2 = permit_from_dict(permit_to_dict(p))
        assert (p2.c, p2.d, p2.horizon, p2.driving) == (p.c, p.d, p.horizon, p.driving)


class TestRunDocument:
    def test_pd_run_carries_duals(self):
        inst = gen_finite(rng_from(50_006), 5, 8)
        alg = PDSumRad(inst.metric, inst.f)
        alg.run(inst.demands)
        doc = run_to_dict(alg, inst)
        assert doc["schema"] == "sumradii/run@1"
        assert doc["algorithm"] == "pd"
        assert doc["dual_sum"] == num_out(alg.dual_sum())
        assert len(doc["events"]) == inst.n
        assert "solution" in doc

    def test_frac_run_carries_ops(self):
        inst = gen_finite(rng_from(50_007), 4, 5)
        alg = FracSumRad(inst.metric, inst.f, n=inst.n)
        alg.run(inst.demands)
        doc = run_to_dict(alg, inst)
        assert doc["ops"] == alg.ops
        assert "solution" not in doc


class TestAdversaryDocument:
    def test_document_fields(self):
        from sumradii.serialize import adversary_to_dict

        res = run_hst_adversary(PDSumRad, Fraction(5, 2), 2)
        doc = adversary_to_dict(res)
        assert doc["schema"] == "sumradii/adversary@1"
        assert doc["certificate_ok"] is True
        assert doc["n"] == 9
        assert doc["demands"][0] == [0, 0]


class TestDumpDeterminism:
    def test_bytes_stable_and_sorted(self, tmp_path):
        inst = gen_hst(rng_from(50_008), 6)
        doc = instance_to_dict(inst)
        a = dump_json(doc)
        b = dump_json(json.loads(a))
        assert a == b
        assert a.endswith("\n")
        path = tmp_path / "inst.json"
        dump_json(doc, path)
        assert load_json(path) == json.loads(a)

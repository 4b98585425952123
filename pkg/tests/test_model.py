from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumradii.generators import gen_finite, gen_hst, gen_plane_uniform, rng_from
from sumradii.metric import FiniteMetric
from sumradii.model import (
    Cluster,
    Instance,
    Solution,
    ceil_log2_ratio,
    covers,
    feasibility_violations,
    is_feasible,
    round_radii_pow2,
    solution_cost,
)
from sumradii.online import SimpleSumRad

TWO_POINTS = FiniteMetric([[0, 3], [3, 0]])


def test_covers_is_boundary_inclusive():
    c = Cluster(center=0, radius=3, opened_at=0)
    assert covers(TWO_POINTS, c, 1)
    assert covers(TWO_POINTS, Cluster(0, 2, 0), 1) is False


def test_solution_cost_sums_opening_plus_radius():
    sol = Solution([Cluster(0, 2, 0), Cluster(1, 0, 1)], [0, 1])
    assert solution_cost(sol, 1) == 4
    assert solution_cost(sol, Fraction(1, 2)) == 3


def test_feasibility_violations():
    inst = Instance(TWO_POINTS, [0, 1], 1)
    good = Solution([Cluster(0, 0, 0), Cluster(1, 0, 1)], [0, 1])
    assert is_feasible(inst, good)
    bad = Solution([Cluster(0, 0, 0)], [0, 0])
    problems = feasibility_violations(inst, bad)
    assert problems and any(v["kind"] == "uncovered" for v in problems)


def test_assignment_length_checked():
    inst = Instance(TWO_POINTS, [0, 1], 1)
    short = Solution([Cluster(0, 3, 0)], [0])
    assert any(
        v["kind"] == "assignment-length" for v in feasibility_violations(inst, short)
    )


class TestCeilLog2Ratio:
    def test_boundary_r_equals_f(self):
        # r = f lands on k = 0, radius f, cost 2f against original 2f
        assert ceil_log2_ratio(2, 2) == 0

    def test_rounds_up(self):
        assert ceil_log2_ratio(3, 1) == 2
        assert ceil_log2_ratio(4, 1) == 2
        assert ceil_log2_ratio(5, 1) == 3

    def test_small_radii_clamp_to_zero(self):
        assert ceil_log2_ratio(Fraction(1, 3), 1) == 0

    def test_exact_fractions(self):
        assert ceil_log2_ratio(Fraction(5, 2), Fraction(1, 2)) == 3


def _random_solution(i):
    kind = ("finite", "hst", "plane")[i % 3]
    rng = rng_from(70_000 + i)
    n = 4 + i % 8
    if kind == "finite":
        inst = gen_finite(rng, max(6, n), n)
    elif kind == "hst":
        inst = gen_hst(rng, n)
    else:
        inst = gen_plane_uniform(rng, n)
    alg = SimpleSumRad(inst.metric, inst.f, n=inst.n, seed=i)
    alg.run(inst.demands)
    return inst, alg.solution()


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_round_radii_pow2_feasible_and_within_double(i):
    inst, sol = _random_solution(i)
    rounded = round_radii_pow2(sol, inst.f)
    assert feasibility_violations(inst, rounded) == []
    assert solution_cost(rounded, inst.f) <= 2 * solution_cost(sol, inst.f) + 1e-9


def test_round_radii_pow2_zero_radius_hits_factor_two_exactly():
    sol = Solution([Cluster(0, 0, 0)], [0])
    rounded = round_radii_pow2(sol, 1)
    assert rounded.clusters[0].radius == 1
    assert solution_cost(rounded, 1) == 2 * solution_cost(sol, 1)


def test_round_radii_pow2_is_exact_on_fractions():
    sol = Solution([Cluster(0, Fraction(3, 2), 0)], [0])
    rounded = round_radii_pow2(sol, Fraction(1, 2))
    # ceil(log2(3)) = 2 -> radius 4 * f = 2
    assert rounded.clusters[0].radius == Fraction(2)
    assert isinstance(rounded.clusters[0].radius, Fraction)


def test_instance_n_counts_demands():
    inst = Instance(TWO_POINTS, [0, 1, 0], 1)
    assert inst.n == 3

from fractions import Fraction

import numpy as np
import pytest

from aquafill.core import LoadVector
from aquafill.errors import (
    ExactUnavailable,
    InvalidParameter,
    PolicyInfeasibleOutput,
    UnsupportedDimension,
)
from aquafill.policies import (
    ExpectationMode,
    GreedyLowestIndexPolicy,
    Policy,
    ProportionalPolicy,
    RandomSplitPolicy,
    ThresholdGuardPolicy,
    WaterFillingPolicy,
    expected_loads,
    final_load_distribution,
    make_policy,
    run_policy,
)
from aquafill.sequences import InstanceParams, check_feasible, random_instance
from aquafill.waterfill import run_waterfill
from conftest import seq

BUILTINS = [WaterFillingPolicy(), ProportionalPolicy(), GreedyLowestIndexPolicy(),
            RandomSplitPolicy()]


def test_wf_policy_matches_runner(running):
    assert run_policy(running, WaterFillingPolicy()) == run_waterfill(running)


def test_proportional_running_example(running):
    loads = run_policy(running, ProportionalPolicy()).final_loads
    assert loads == (Fraction(5, 3), Fraction(19, 6), Fraction(14, 3), Fraction(5, 2))


def test_proportional_by_hand(running):
    # independent recomputation: add q_t/|N_t| to each neighbor
    expect = [Fraction(0)] * 4
    for a in running.arrivals:
        for i in a.neighbors:
            expect[i - 1] += a.quantity / len(a.neighbors)
    assert run_policy(running, ProportionalPolicy()).final_loads == tuple(expect)


def test_greedy_lowest_forced(two_node):
    assert run_policy(two_node, GreedyLowestIndexPolicy()).final_loads == (1, 1)


def test_threshold_guard_branches(two_node):
    assert run_policy(two_node, ThresholdGuardPolicy(1)).final_loads == (
        Fraction(3, 4), Fraction(5, 4))
    assert run_policy(two_node, ThresholdGuardPolicy(2)).final_loads == (
        Fraction(1, 4), Fraction(7, 4))


def test_threshold_guard_singletons_are_forced():
    E = seq(2, [({1}, 1), ({2}, 1)])
    for u in (1, 2):
        assert run_policy(E, ThresholdGuardPolicy(u)).final_loads == (1, 1)


def test_threshold_guard_expected_loads(two_node):
    res = expected_loads(two_node, ThresholdGuardPolicy())
    assert res.final == (Fraction(1, 2), Fraction(3, 2))
    assert res.samples is None


def test_threshold_guard_needs_two_nodes():
    with pytest.raises(UnsupportedDimension):
        run_policy(seq(3, [({1, 2}, 1)]), ThresholdGuardPolicy())
    with pytest.raises(InvalidParameter):
        ThresholdGuardPolicy(3)


def test_threshold_guard_seeded_primary(two_node):
    seen = {run_policy(two_node, ThresholdGuardPolicy(), seed=s).final_loads for s in range(20)}
    assert seen == {LoadVector(["3/4", "5/4"]), LoadVector(["1/4", "7/4"])}
    assert (run_policy(two_node, ThresholdGuardPolicy(), seed=4)
            == run_policy(two_node, ThresholdGuardPolicy(), seed=4))


def test_deterministic_expectation_equals_run(running):
    for P in (WaterFillingPolicy(), ProportionalPolicy(), GreedyLowestIndexPolicy()):
        assert expected_loads(running, P).steps == run_policy(running, P).loads


def test_monte_carlo_single_sample_equals_seeded_run(running):
    res = expected_loads(running, RandomSplitPolicy(), ExpectationMode.monte_carlo(1, seed=9))
    assert res.steps == run_policy(running, RandomSplitPolicy(), seed=9).loads
    assert res.samples == 1


def test_monte_carlo_close_to_exact(two_node):
    # 10,000 samples; entrywise tolerance 0.05
    mc = expected_loads(two_node, ThresholdGuardPolicy(), ExpectationMode.monte_carlo(10000))
    assert np.allclose(mc.final.to_floats(), [0.5, 1.5], atol=0.05)
    assert mc.stderr is not None and mc.stderr.max() < 0.01


def test_exact_refused_for_infinite_support(running):
    with pytest.raises(ExactUnavailable):
        expected_loads(running, RandomSplitPolicy())


def test_branch_distribution(two_node):
    dist = final_load_distribution(two_node, ThresholdGuardPolicy())
    assert [w for w, _ in dist] == [Fraction(1, 2), Fraction(1, 2)]


def test_broken_policy_is_caught(running):
    class Leaky(Policy):
        def step(self, history, arrival, loads, rng):
            return LoadVector([arrival.quantity] + [0] * (len(loads) - 1))

    with pytest.raises(PolicyInfeasibleOutput):
        run_policy(running, Leaky())


def test_history_is_visible_to_policies(running):
    lengths = []

    class Recorder(WaterFillingPolicy):
        def step(self, history, arrival, loads, rng):
            lengths.append(len(history))
            return super().step(history, arrival, loads, rng)

    run_policy(running, Recorder())
    assert lengths == [0, 1, 2, 3, 4]


def test_builtins_always_feasible():
    for s in range(500):
        E = random_instance(InstanceParams(n=int(s % 6) + 1, m=int(s % 8) + 1, seed=s))
        for P in BUILTINS:
            tr = run_policy(E, P, seed=s)
            assert check_feasible(E, tr.allocations)


def test_wf_policy_bit_for_bit_on_random_instances():
    for s in range(100):
        E = random_instance(InstanceParams(n=5, m=6, seed=s))
        assert run_policy(E, WaterFillingPolicy()) == run_waterfill(E)


def test_make_policy():
    assert isinstance(make_policy("greedy-lowest"), GreedyLowestIndexPolicy)
    with pytest.raises(InvalidParameter):
        make_policy("nope")
    with pytest.raises(InvalidParameter):
        ExpectationMode.monte_carlo(0)

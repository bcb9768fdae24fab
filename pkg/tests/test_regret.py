import math
from fractions import Fraction

import numpy as np
import pytest

from aquafill.errors import InvalidParameter, NotHomogeneous, UnknownObjective
from aquafill.hindsight import opt_hindsight
from aquafill.objectives import objective
from aquafill.policies import ThresholdGuardPolicy, WaterFillingPolicy
from aquafill.regret import (
    SearchConfig,
    alpha_regret,
    closed_form_cr,
    cr_table,
    fm_sequence,
    harmonic_apply,
    numeric_competitive_ratio,
    numeric_minimax_regret,
    sorted_simplex_point,
)
from aquafill.sequences import InstanceParams, random_instance
from aquafill.waterfill import waterfill_loads


def test_matching_regret_running_example(running):
    r = alpha_regret(running, WaterFillingPolicy(), objective("matching:1"), 1.0)
    assert (r.hindsight_value, r.policy_value, r.regret) == (4.0, 4.0, 0.0)


def test_nsw_regret_running_example(running):
    r = alpha_regret(running, WaterFillingPolicy(), objective("nsw"), 1.0)
    assert r.regret == pytest.approx(3 - 64 ** 0.25, abs=1e-12)
    assert r.regret == pytest.approx(0.1716, abs=1e-4)


@pytest.mark.parametrize("alpha", [0.6, 1.0, 2.5])
def test_indicator_regret_of_water_filling(two_node, alpha):
    r = alpha_regret(two_node, WaterFillingPolicy(), objective("indicator-half"), alpha)
    assert r.hindsight_value == 1.0 and r.policy_value == 0.0
    assert r.regret == pytest.approx(alpha)


def test_threshold_guard_regret(two_node):
    r = alpha_regret(two_node, ThresholdGuardPolicy(), objective("indicator-half"), 1.0)
    assert r.policy_value == 0.5 and r.regret == 0.5


def test_minimization_sign(running):
    r = alpha_regret(running, WaterFillingPolicy(), objective("makespan"), 1.0)
    assert r.regret == pytest.approx(4 - 3)


def test_alpha_must_be_positive(running):
    with pytest.raises(InvalidParameter):
        alpha_regret(running, WaterFillingPolicy(), objective("nsw"), 0)


def test_fm_sequence_values():
    assert [fm_sequence(k) for k in (1, 2, 3)] == [1, Fraction(3, 4), Fraction(13, 18)]
    with pytest.raises(InvalidParameter):
        fm_sequence(0)


def test_fm_minimum_nonincreasing():
    mins, best = [], Fraction(2)
    for k in range(1, 51):
        best = min(best, fm_sequence(k))
        mins.append(best)
    assert all(a >= b for a, b in zip(mins, mins[1:]))


def test_closed_forms():
    assert float(closed_form_cr("nsw", 3)) == pytest.approx(6 ** (-1 / 3))
    assert float(closed_form_cr("nsw", 3)) == pytest.approx(0.55032, abs=1e-5)
    assert closed_form_cr("matching", 3).value == Fraction(13, 18)
    assert closed_form_cr("makespan", 1).value == 1
    assert closed_form_cr("makespan", 3).value == Fraction(11, 6)
    assert closed_form_cr("maximin", 5).value == Fraction(1, 5)
    sep = closed_form_cr("separable-concave", 3)
    assert sep.lower_bound and sep.value == Fraction(13, 18)
    with pytest.raises(UnknownObjective):
        closed_form_cr("gini", 3)


def test_numeric_cr_examples():
    assert numeric_competitive_ratio(2, objective("nsw")) == pytest.approx(2 ** -0.5, abs=1e-3)
    assert numeric_competitive_ratio(3, objective("makespan")) == pytest.approx(11 / 6, abs=1e-3)
    assert numeric_competitive_ratio(5, objective("egalitarian")) == pytest.approx(0.2, abs=1e-6)


def test_numeric_cr_needs_homogeneity():
    with pytest.raises(NotHomogeneous):
        numeric_competitive_ratio(2, objective("indicator-half"))


def test_numeric_cr_is_deterministic():
    cfg = SearchConfig(seed=3)
    a = numeric_competitive_ratio(4, objective("nsw"), cfg)
    assert a == numeric_competitive_ratio(4, objective("nsw"), cfg)


def test_minimax_regret_makespan():
    r = numeric_minimax_regret(2, objective("makespan"), 1.0, 1)
    assert r.regret == pytest.approx(0.25, abs=1e-9)
    assert r.best_loads == pytest.approx((0.5, 0.5), abs=1e-6)
    assert r.lower_bound


def test_minimax_regret_makespan_grid_oracle():
    # max over l1 in [0, 1/2] of (l1/2 + l2) - l2
    grid = np.linspace(0, 0.5, 10001)
    assert max(g / 2 for g in grid) == pytest.approx(0.25)


@pytest.mark.parametrize("n", range(1, 7))
def test_minimax_regret_maximin_vanishes(n):
    r = numeric_minimax_regret(n, objective("maximin"), 1 / n, 1)
    assert abs(r.regret) <= 1e-9


def test_minimax_regret_nsw_at_its_ratio():
    r = numeric_minimax_regret(2, objective("nsw"), 2 ** -0.5, 1)
    assert r.regret <= 1e-9


def test_sorted_simplex_point():
    rng = np.random.default_rng(0)
    for _ in range(50):
        w = rng.uniform(0, 1, size=5)
        l = sorted_simplex_point(w, 3.0)
        assert l.sum() == pytest.approx(3.0)
        assert np.all(np.diff(l) >= 0)


def test_cr_table_rows():
    rows = cr_table("nsw", [2, 3, 4], "both")
    expect = [0.70711, 0.55032, 0.45180]
    for row, e in zip(rows, expect):
        assert row["closed"] == pytest.approx(e, abs=1e-3)
        assert row["numeric"] == pytest.approx(e, abs=1e-3)


def test_wf_respects_its_ratio_on_random_instances():
    names = {"nsw": "nsw", "maximin": "egalitarian", "matching": "matching:1",
             "makespan": "makespan"}
    for s in range(60):
        E = random_instance(InstanceParams(n=1 + s % 6, m=1 + s % 8, seed=s))
        wf, opt = waterfill_loads(E), opt_hindsight(E)
        for key, name in names.items():
            spec = objective(name)
            alpha = float(closed_form_cr(key, E.n))
            if spec.maximize:
                assert alpha * spec(opt) - spec(wf) <= 1e-9
            else:
                assert spec(wf) - alpha * spec(opt) <= 1e-9

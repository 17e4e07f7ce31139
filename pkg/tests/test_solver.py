from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from feasibility.core import FeasibilityProblem, SlaterCertificate
from feasibility.errors import DimensionMismatchError, InputError, NoViolatedConstraintError, ScheduleExhaustedError
from feasibility.functions import LinearFunctional
from feasibility.schedules import Constant, Explicit, Harmonic, Normalized
from feasibility.solver import (
    BudgetExhausted,
    CycleDetected,
    Feasible,
    IterationRecord,
    MonitorFlag,
    SelectionKind,
    SelectionRule,
    detect_cycle,
    find_period,
    monitor_one_step,
    solve,
    step,
)


def test_negative_identity_reaches_zero(neg_x):
    out = solve(neg_x, [-5.0], SelectionRule(), Constant(1.0))
    assert isinstance(out.verdict, Feasible)
    assert out.steps == 5
    assert_array_equal(out.verdict.x, [0.0])
    assert out.bound_used == 12
    assert out.budget == 22
    assert [r.x_k[0] for r in out.trace] == [-5.0, -4.0, -3.0, -2.0, -1.0]
    assert all(r.i_k == 0 and r.delta_k == 7.0 for r in out.trace)
    assert out.verdict.exit_code == 0


def test_feasible_start_takes_no_step(neg_x):
    out = solve(neg_x, [3.0], sched=Constant(1.0))
    assert out.steps == 0
    assert out.trace == []


def test_strict_rule_moves_off_the_boundary(neg_x):
    assert solve(neg_x, [0.0], sched=Constant(1.0)).steps == 0
    out = solve(neg_x, [0.0], sched=Constant(1.0), strict=True)
    assert out.steps == 1
    assert_array_equal(out.verdict.x, [1.0])


def test_budget_exhausted(neg_x):
    out = solve(neg_x, [-5.0], sched=Constant(1.0), budget=3)
    assert isinstance(out.verdict, BudgetExhausted)
    assert out.steps == 3
    assert_array_equal(out.verdict.x, [-2.0])
    assert out.verdict.exit_code == 2
    assert out.final_residual.tolist() == [2.0]


def test_opposed_halflines_cycle(opposed):
    out = solve(opposed, [0.5], SelectionRule(), Constant(1.0))
    assert isinstance(out.verdict, CycleDetected)
    assert out.verdict.period == 2
    assert out.verdict.exit_code == 3
    assert out.bound_used is None
    assert {float(r.x_k[0]) for r in out.trace} == {0.5, -0.5}


def test_cycle_watch_only_for_constant_steps(opposed):
    out = solve(opposed, [0.3], sched=Harmonic(1.0), budget=50)
    assert isinstance(out.verdict, BudgetExhausted)
    out = solve(opposed, [0.5], sched=Constant(1.0), budget=50, cycle_window=0)
    assert isinstance(out.verdict, BudgetExhausted)


def test_tolerance(neg_x):
    out = solve(neg_x, [-5.0], sched=Constant(1.0), tolerance=2.5)
    assert out.steps == 3


@pytest.mark.parametrize(
    ("kind", "expected"),
    [(SelectionKind.first_violated, 0), (SelectionKind.most_violated, 1)],
)
def test_selection_on_first_step(kind, expected):
    p = FeasibilityProblem((LinearFunctional([1.0], -3.0), LinearFunctional([2.0], 0.0)), 1)
    _, record = step(p, np.array([5.0]), SelectionRule(kind), Constant(0.1), 0)
    assert record.i_k == expected
    assert record.f_value == (2.0 if expected == 0 else 10.0)


def test_cyclic_selection_skips_satisfied():
    selector = SelectionRule(SelectionKind.cyclic).selector()
    values = np.array([1.0, -1.0, 1.0])
    mask = values > 0
    assert [selector.choose(values, mask) for _ in range(4)] == [0, 2, 0, 2]


def test_random_selection_is_seeded():
    values = np.ones(10)
    mask = np.ones(10, dtype=bool)
    a = SelectionRule(SelectionKind.random, seed=5).selector()
    b = SelectionRule(SelectionKind.random, seed=5).selector()
    picks = [a.choose(values, mask) for _ in range(20)]
    assert picks == [b.choose(values, mask) for _ in range(20)]
    assert len(set(picks)) > 1


def test_selection_parse():
    assert SelectionRule.parse("most-violated").kind == SelectionKind.most_violated
    assert SelectionRule.parse("random", seed=3) == SelectionRule(SelectionKind.random, 3)
    with pytest.raises(InputError):
        SelectionRule.parse("largest")


def test_step_at_feasible_point(neg_x):
    with pytest.raises(NoViolatedConstraintError):
        step(neg_x, np.array([1.0]), SelectionRule(), Constant(1.0), 0)


def test_bad_inputs(neg_x):
    with pytest.raises(InputError):
        solve(neg_x, [-5.0])
    with pytest.raises(InputError):
        solve(neg_x, [-5.0], sched=Constant(1.0), tolerance=-1.0)
    with pytest.raises(InputError):
        solve(neg_x, [-5.0], sched=Constant(1.0), budget=0)
    with pytest.raises(DimensionMismatchError):
        solve(neg_x, [-5.0, 1.0], sched=Constant(1.0))


def test_monitors_stay_quiet_under_admissible_steps(neg_x):
    out = solve(neg_x, [-5.0], sched=Constant(1.0), monitors=True)
    assert sum(out.flag_counts.values()) == 0
    assert all(v == 0 for v in out.summary()["monitor_flags"].values())


def test_negative_delta_is_flagged(neg_x):
    out = solve(neg_x, [-5.0], sched=Constant(10.0))
    assert out.feasible
    assert out.bound_used is None
    assert out.flag_counts[MonitorFlag.NEGATIVE_DELTA] == 1
    assert out.trace[0].delta_k == -20.0


def test_monitor_one_step_catches_overclaimed_sigma():
    cert = SlaterCertificate(s=[4.0], sigma=10.0, L=1.0)
    x = np.array([-5.0])
    g = np.array([-1.0])
    record = IterationRecord(k=0, x_k=x, i_k=0, f_value=5.0, g_k=g, g_norm=1.0, alpha_k=1.0, delta_k=None, x_next=x - g)
    flags = monitor_one_step(record, cert)
    assert MonitorFlag.SLATER_SUBGRADIENT in flags
    assert MonitorFlag.SUBGRADIENT_BOUND not in flags
    assert MonitorFlag.SUBGRADIENT_BOUND in monitor_one_step(record, SlaterCertificate(s=[4.0], sigma=1.0, L=0.5))


def test_monitors_without_certificate_are_skipped(opposed):
    out = solve(opposed, [0.5], sched=Constant(1.0), monitors=True)
    assert sum(out.flag_counts.values()) == 0


def test_explicit_schedule_runs_out(neg_x):
    with pytest.raises(ScheduleExhaustedError) as info:
        solve(neg_x, [-5.0], sched=Explicit((0.5,)))
    partial = info.value.outcome
    assert partial.steps == 1
    assert_array_equal(partial.verdict.x, [-4.5])


def test_normalized_schedule():
    p = FeasibilityProblem((LinearFunctional([-4.0], 0.0),), 1, SlaterCertificate(s=[1.0], sigma=4.0, L=4.0))
    out = solve(p, [-3.5], sched=Normalized(Constant(1.0)))
    assert out.feasible
    assert out.bound_used is None
    assert [r.alpha_k for r in out.trace] == [0.25] * 4


def test_find_period():
    assert find_period([b"a", b"b", b"a", b"b"], 8) == 2
    assert find_period([b"c", b"a", b"a"], 8) == 1
    assert find_period([b"a", b"b", b"c"], 8) is None
    assert find_period([b"a", b"b", b"c", b"a", b"b", b"c"], 2) is None
    assert find_period([b"a", b"b", b"c", b"a", b"b", b"c"], 3) == 3


def test_detect_cycle_on_trace(opposed):
    out = solve(opposed, [0.5], sched=Constant(1.0), budget=10, cycle_window=0)
    assert detect_cycle(out.trace, 8) == 2
    assert detect_cycle([], 8) is None


def test_same_trace(neg_x):
    a = solve(neg_x, [-5.0], sched=Constant(1.0))
    b = solve(neg_x, [-5.0], sched=Constant(1.0))
    c = solve(neg_x, [-5.0], sched=Constant(0.5))
    assert a.same_trace(b)
    assert not a.same_trace(c)


def test_same_trace_tells_signed_zeros_apart(neg_x):
    record = solve(neg_x, [-5.0], sched=Constant(1.0)).trace[0]
    assert replace(record, f_value=0.0).same_as(replace(record, f_value=0.0))
    assert not replace(record, f_value=0.0).same_as(replace(record, f_value=-0.0))
    assert not replace(record, x_k=np.array([0.0])).same_as(replace(record, x_k=np.array([-0.0])))


def test_slater_subgradient_flags_equality_off_the_boundary():
    # f(x) = -x at x = -5: <x - s, g> = 9 for s = 4
    x = np.array([-5.0])
    g = np.array([-1.0])
    record = IterationRecord(k=0, x_k=x, i_k=0, f_value=5.0, g_k=g, g_norm=1.0, alpha_k=1.0, delta_k=None, x_next=x - g)
    assert MonitorFlag.SLATER_SUBGRADIENT in monitor_one_step(record, SlaterCertificate(s=[4.0], sigma=9.0, L=1.0))
    assert MonitorFlag.SLATER_SUBGRADIENT not in monitor_one_step(record, SlaterCertificate(s=[4.0], sigma=8.5, L=1.0))


def test_slater_subgradient_allows_equality_at_the_boundary():
    x = np.array([0.0])
    g = np.array([-1.0])
    record = IterationRecord(k=0, x_k=x, i_k=0, f_value=0.0, g_k=g, g_norm=1.0, alpha_k=1.0, delta_k=None, x_next=x - g)
    assert MonitorFlag.SLATER_SUBGRADIENT not in monitor_one_step(record, SlaterCertificate(s=[4.0], sigma=4.0, L=1.0))
    assert MonitorFlag.SLATER_SUBGRADIENT in monitor_one_step(record, SlaterCertificate(s=[4.0], sigma=4.5, L=1.0))

"""
Self-checking reproductions of three failure modes without a slater point:

  huber-nonfinite         single Huber constraint, iterates 1/(k+1) approach C = {0} but never reach it
  truncated-huber-limit   truncated Huber plus x + 1 <= 0, first-violated selection converges to 0, outside C
  opposed-halflines-cycle <x, 1> >= 0 and <x, -1> >= 0 with a constant step cycle with period 2
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from TPTBox import Log_Type, No_Logger, Print_Logger

from feasibility.core import FeasibilityProblem, Vector, residual
from feasibility.errors import PreconditionError
from feasibility.functions import HuberFunction, LinearFunctional, TruncatedHuberFunction
from feasibility.perceptron import LinearDataset, build_problem
from feasibility.schedules import Constant, Harmonic
from feasibility.solver import BudgetExhausted, CycleDetected, Feasible, SelectionKind, SelectionRule, detect_cycle, solve, step

HARMONIC_RTOL = 1e-12


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ReproReport:
    name: str
    checks: list[Check] = field(default_factory=list)
    observations: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_dict(self) -> dict:
        return {
            "case": self.name,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "observations": self.observations,
        }

    def log(self, logger: No_Logger | Print_Logger) -> None:
        for c in self.checks:
            logger.print(f"{'PASS' if c.passed else 'FAIL'} {c.name}", c.detail, Log_Type.OK if c.passed else Log_Type.FAIL)


def huber_problem() -> FeasibilityProblem:
    return FeasibilityProblem((HuberFunction(dimension=1),), 1)


def truncated_huber_problem() -> FeasibilityProblem:
    return FeasibilityProblem((TruncatedHuberFunction(dimension=1), LinearFunctional([1.0], 1.0)), 1)


def opposed_halflines_dataset() -> LinearDataset:
    return LinearDataset(rows=np.array([[1.0], [-1.0]]))


def opposed_halflines_problem() -> FeasibilityProblem:
    return build_problem(opposed_halflines_dataset())


def _worst_relative_error(xs: list[float]) -> tuple[float, int]:
    expected = 1.0 / (np.arange(len(xs), dtype=np.float64) + 1.0)
    err = np.abs(np.asarray(xs) - expected) / expected
    worst = int(np.argmax(err))
    return float(err[worst]), worst


def _iterates(trace, final: Vector) -> list[float]:
    return [float(r.x_k[0]) for r in trace] + [float(final[0])]


def run_huber_nonfinite(steps: int = 1000) -> ReproReport:
    if steps < 1:
        raise PreconditionError(f"steps must be >= 1, got {steps}")
    report = ReproReport("huber-nonfinite")
    p = huber_problem()
    out = solve(p, [1.0], SelectionRule(), Harmonic(2.0), budget=steps, cycle_window=0)
    xs = _iterates(out.trace, out.verdict.x)

    report.check("starting point unchanged", xs[0] == 1.0, f"x_0 = {xs[0]!r}")
    worst, at = _worst_relative_error(xs)
    report.check(
        "iterates follow 1/(k+1)",
        len(xs) == steps + 1 and worst <= HARMONIC_RTOL,
        f"{len(xs)} iterates, worst relative error {worst:.3e} at k = {at}",
    )
    never_feasible = all(r.f_value > 0 for r in out.trace) and float(out.final_residual[0]) > 0
    report.check("no iterate is feasible", never_feasible, f"final H(x) = {float(out.final_residual[0])!r}")
    report.check("verdict is budget exhausted", isinstance(out.verdict, BudgetExhausted), repr(out.verdict))
    report.observations = {"x_last": xs[-1], "distance_to_C": abs(xs[-1]), "steps": out.steps}
    return report


def run_truncated_huber_limit(steps: int = 1000, contrast_budget: int = 10_000) -> ReproReport:
    if steps < 1:
        raise PreconditionError(f"steps must be >= 1, got {steps}")
    report = ReproReport("truncated-huber-limit")
    p = truncated_huber_problem()
    out = solve(p, [1.0], SelectionRule(SelectionKind.first_violated), Harmonic(2.0), budget=steps, cycle_window=0)
    xs = _iterates(out.trace, out.verdict.x)

    report.check(
        "first constraint always selected",
        all(r.i_k == 0 for r in out.trace),
        f"selected indices {sorted({r.i_k for r in out.trace})}",
    )
    worst, at = _worst_relative_error(xs)
    report.check("iterates follow 1/(k+1)", worst <= HARMONIC_RTOL, f"worst relative error {worst:.3e} at k = {at}")
    both = all(p.constraints[1].value(r.x_k) > r.f_value > 0 for r in out.trace)
    report.check("second constraint more violated at every step", both)
    limit = residual(p, np.zeros(1))
    report.check("residual at the limit 0 is [0, 1]", limit.tolist() == [0.0, 1.0], f"residual(0) = {limit.tolist()}")
    report.check(
        "method stalls outside C",
        isinstance(out.verdict, BudgetExhausted) and float(out.final_residual[1]) > 0,
        f"final residual {out.final_residual.tolist()}",
    )

    contrast = solve(p, [1.0], SelectionRule(SelectionKind.most_violated), Harmonic(2.0), budget=contrast_budget, cycle_window=0)
    exact_steps = all(r.i_k == 1 and r.x_next[0] == r.x_k[0] - r.alpha_k for r in contrast.trace)
    report.check(
        "most-violated selection reaches C",
        isinstance(contrast.verdict, Feasible) and float(contrast.verdict.x[0]) <= -1.0 and exact_steps,
        f"{contrast.verdict!r}",
    )
    report.observations = {"x_last": xs[-1], "f2_at_x_last": float(out.final_residual[1]), "contrast_steps": contrast.steps}
    return report


def run_opposed_halflines_cycle(alpha: float = 1.0, x0: float = 0.5, periods: int = 100, window: int = 8) -> ReproReport:
    if not 0.0 < x0 < alpha:
        raise PreconditionError(f"x0 must lie in ]0, alpha[ = ]0, {alpha}[, got {x0}")
    report = ReproReport("opposed-halflines-cycle")
    p = opposed_halflines_problem()
    sched = Constant(alpha)
    selector = SelectionRule().selector()
    x = np.array([x0])
    trace = []
    for k in range(2 * periods):
        x, record = step(p, x, selector, sched, k)
        trace.append(record)
    iterates = [r.x_k for r in trace] + [x]
    low = np.array([x0 - alpha])
    high = np.array([x0])
    exact = all(it.tobytes() == (high if j % 2 == 0 else low).tobytes() for j, it in enumerate(iterates))
    report.check("period-2 iterates are bitwise exact", exact, f"{periods} periods of ({x0!r}, {float(low[0])!r})")
    period = detect_cycle(trace, window)
    report.check("cycle detector finds period 2", period == 2, f"detected period {period}")
    out = solve(p, [x0], SelectionRule(), sched, budget=4 * periods, cycle_window=window)
    report.check(
        "solver verdict is a 2-cycle",
        isinstance(out.verdict, CycleDetected) and out.verdict.period == 2,
        repr(out.verdict),
    )
    report.observations = {"x_even": x0, "x_odd": float(low[0]), "solver_steps": out.steps}
    return report


REPRO_CASES: dict[str, Callable[..., ReproReport]] = {
    "huber-nonfinite": run_huber_nonfinite,
    "truncated-huber-limit": run_truncated_huber_limit,
    "opposed-halflines-cycle": run_opposed_halflines_cycle,
}

# published command-line names of the three cases
REPRO_ALIASES: dict[str, str] = {
    "remark-2-6": "huber-nonfinite",
    "example-2-7": "truncated-huber-limit",
    "example-3-1": "opposed-halflines-cycle",
}


def repro_case(name: str) -> Callable[..., ReproReport] | None:
    return REPRO_CASES.get(REPRO_ALIASES.get(name, name))

from __future__ import annotations

from collections import Counter, deque
from collections.abc import Collection, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from TPTBox import Log_Type, No_Logger, Print_Logger

from feasibility.core import (
    EPS_FLOAT,
    FeasibilityProblem,
    SlaterCertificate,
    Vector,
    inner,
    is_feasible,
    norm_sq,
    residual,
    tolerance_eps,
    violated,
)
from feasibility.errors import InputError, NoViolatedConstraintError, ScheduleExhaustedError
from feasibility.schedules import StepSchedule, delta_from_alpha, iteration_bound

DEFAULT_BUDGET = 10**6
BUDGET_SLACK = 10
DEFAULT_CYCLE_WINDOW = 64


class SelectionKind(Enum):
    first_violated = "first_violated"
    most_violated = "most_violated"
    cyclic = "cyclic"
    random = "random"


@dataclass(frozen=True)
class SelectionRule:
    kind: SelectionKind = SelectionKind.first_violated
    seed: int = 0

    def selector(self) -> Selector:
        return Selector(self)

    @classmethod
    def parse(cls, text: str | SelectionKind, seed: int = 0) -> SelectionRule:
        if isinstance(text, SelectionKind):
            return cls(text, seed)
        try:
            return cls(SelectionKind(str(text).replace("-", "_")), seed)
        except ValueError:
            raise InputError(f"unknown selection rule {text!r}; expected one of {[k.value for k in SelectionKind]}") from None


class Selector:
    """Per-solve selection state (cyclic pointer, random generator)."""

    def __init__(self, rule: SelectionRule):
        self.rule = rule
        self._last = -1
        self._rng = np.random.default_rng(rule.seed) if rule.kind == SelectionKind.random else None

    def choose(self, values: Vector, mask: np.ndarray) -> int:
        candidates = np.flatnonzero(mask)
        if candidates.size == 0:
            raise NoViolatedConstraintError("no violated constraint to select")
        kind = self.rule.kind
        if kind == SelectionKind.first_violated:
            i = int(candidates[0])
        elif kind == SelectionKind.most_violated:
            # argmax keeps the lowest index on ties
            i = int(candidates[np.argmax(values[candidates])])
        elif kind == SelectionKind.cyclic:
            m = values.shape[0]
            order = (np.arange(1, m + 1) + self._last) % m
            i = int(order[np.argmax(mask[order])])
        else:
            assert self._rng is not None
            i = int(self._rng.choice(candidates))
        self._last = i
        return i


class MonitorFlag(Enum):
    ONE_STEP_ESTIMATE = "one_step_estimate"
    SLATER_SUBGRADIENT = "slater_subgradient"
    SUBGRADIENT_BOUND = "subgradient_bound"
    DELTA_EXCEEDS_DISTANCE = "delta_exceeds_distance"
    NEGATIVE_DELTA = "negative_delta"


ALL_MONITORS = frozenset(MonitorFlag) - {MonitorFlag.NEGATIVE_DELTA}


@dataclass
class IterationRecord:
    k: int
    x_k: Vector
    i_k: int
    f_value: float
    g_k: Vector
    g_norm: float
    alpha_k: float
    delta_k: float | None
    x_next: Vector
    flags: frozenset[MonitorFlag] = field(default_factory=frozenset)

    def same_as(self, other: IterationRecord) -> bool:
        """Bitwise equality of every recorded number, so -0.0 and 0.0 differ."""
        return (
            self.k == other.k
            and self.i_k == other.i_k
            and _bits(self.f_value) == _bits(other.f_value)
            and _bits(self.g_norm) == _bits(other.g_norm)
            and _bits(self.alpha_k) == _bits(other.alpha_k)
            and _bits(self.delta_k) == _bits(other.delta_k)
            and self.flags == other.flags
            and _bits(self.x_k) == _bits(other.x_k)
            and _bits(self.g_k) == _bits(other.g_k)
            and _bits(self.x_next) == _bits(other.x_next)
        )


def _bits(v) -> bytes | None:
    return None if v is None else np.asarray(v, dtype=np.float64).tobytes()


class Verdict:
    name = ""
    exit_code = 1

    def __init__(self, x: Vector, steps: int):
        self.x = x
        self.steps = steps

    def to_dict(self) -> dict:
        return {"verdict": self.name, "steps": self.steps, "x": self.x.tolist()}

    def __repr__(self):
        return f"{type(self).__name__}(steps={self.steps}, x={self.x.tolist()})"


class Feasible(Verdict):
    name = "feasible"
    exit_code = 0


class BudgetExhausted(Verdict):
    name = "budget_exhausted"
    exit_code = 2


class CycleDetected(Verdict):
    name = "cycle_detected"
    exit_code = 3

    def __init__(self, x: Vector, steps: int, period: int):
        super().__init__(x, steps)
        self.period = period

    def to_dict(self) -> dict:
        return {**super().to_dict(), "period": self.period}

    def __repr__(self):
        return f"CycleDetected(period={self.period}, steps={self.steps}, x={self.x.tolist()})"


@dataclass
class SolveOutcome:
    verdict: Verdict
    trace: list[IterationRecord]
    bound_used: int | None
    budget: int
    final_residual: Vector
    flag_counts: Counter = field(default_factory=Counter)

    @property
    def steps(self) -> int:
        return self.verdict.steps

    @property
    def feasible(self) -> bool:
        return isinstance(self.verdict, Feasible)

    def summary(self) -> dict:
        out = self.verdict.to_dict()
        out["budget"] = self.budget
        out["iteration_bound"] = self.bound_used
        out["final_residual"] = self.final_residual.tolist()
        out["monitor_flags"] = {f.value: int(self.flag_counts.get(f, 0)) for f in MonitorFlag}
        return out

    def same_trace(self, other: SolveOutcome) -> bool:
        return len(self.trace) == len(other.trace) and all(a.same_as(b) for a, b in zip(self.trace, other.trace))


def step(
    p: FeasibilityProblem,
    x_k: Vector,
    rule: SelectionRule | Selector,
    sched: StepSchedule,
    k: int,
    tolerance: float = 0.0,
    strict: bool = False,
    values: Vector | None = None,
) -> tuple[Vector, IterationRecord]:
    """One update x_{k+1} = x_k - alpha_k g_k on a violated constraint."""
    if values is None:
        values = residual(p, x_k)
    mask = violated(values, tolerance, strict)
    if not mask.any():
        raise NoViolatedConstraintError(f"x_{k} is feasible; the iteration should have stopped")
    selector = rule if isinstance(rule, Selector) else rule.selector()
    i = selector.choose(values, mask)
    g = p.constraints[i].subgradient(x_k)
    g_norm = float(np.linalg.norm(g))
    a = sched.alpha(k, g_norm)
    x_next = x_k - a * g
    cert = p.slater
    d = delta_from_alpha(a, cert) if cert is not None else None
    record = IterationRecord(
        k=k, x_k=x_k, i_k=i, f_value=float(values[i]), g_k=g, g_norm=g_norm, alpha_k=a, delta_k=d, x_next=x_next
    )
    return x_next, record


def monitor_one_step(
    record: IterationRecord,
    cert: SlaterCertificate,
    x_next: Vector | None = None,
    eps: float = EPS_FLOAT,
    enabled: Collection[MonitorFlag] = ALL_MONITORS,
) -> frozenset[MonitorFlag]:
    """Check the descent estimate, the slater subgradient inequality and the L bound for one step."""
    if x_next is None:
        x_next = record.x_next
    flags = set()
    to_s = record.x_k - cert.s
    dist = norm_sq(to_s)
    slack = tolerance_eps(dist, eps)
    d = record.delta_k if record.delta_k is not None else delta_from_alpha(record.alpha_k, cert)
    if MonitorFlag.ONE_STEP_ESTIMATE in enabled and norm_sq(x_next - cert.s) > dist - d + slack:
        flags.add(MonitorFlag.ONE_STEP_ESTIMATE)
    # at f_{i_k}(x_k) = 0 (strict rule) only <x_k - s, g_k> >= sigma holds
    along = inner(to_s, record.g_k)
    below = along < cert.sigma - slack if record.f_value <= 0 else along <= cert.sigma
    if MonitorFlag.SLATER_SUBGRADIENT in enabled and below:
        flags.add(MonitorFlag.SLATER_SUBGRADIENT)
    if MonitorFlag.SUBGRADIENT_BOUND in enabled and record.g_norm > cert.L + tolerance_eps(cert.L, eps):
        flags.add(MonitorFlag.SUBGRADIENT_BOUND)
    if MonitorFlag.DELTA_EXCEEDS_DISTANCE in enabled and d > dist + slack:
        flags.add(MonitorFlag.DELTA_EXCEEDS_DISTANCE)
    return frozenset(flags)


def find_period(history: Sequence[bytes], window: int) -> int | None:
    n = len(history)
    for p in range(1, window + 1):
        if 2 * p > n:
            break
        if all(history[n - 1 - j] == history[n - 1 - j - p] for j in range(p)):
            return p
    return None


def detect_cycle(trace: Sequence[IterationRecord], window: int = DEFAULT_CYCLE_WINDOW) -> int | None:
    """Smallest p <= window such that the last 2p iterates are two bitwise-equal blocks."""
    if len(trace) == 0:
        return None
    iterates = [r.x_k.tobytes() for r in trace] + [trace[-1].x_next.tobytes()]
    return find_period(iterates, window)


def _monitor_set(monitors: bool | Collection[MonitorFlag] | None) -> frozenset[MonitorFlag]:
    if monitors is None or monitors is False:
        return frozenset()
    if monitors is True:
        return ALL_MONITORS
    return frozenset(monitors)


def solve(
    p: FeasibilityProblem,
    x0: Vector | Sequence[float],
    rule: SelectionRule | None = None,
    sched: StepSchedule | None = None,
    budget: int | None = None,
    monitors: bool | Collection[MonitorFlag] | None = False,
    tolerance: float = 0.0,
    strict: bool = False,
    cycle_window: int = DEFAULT_CYCLE_WINDOW,
    record_trace: bool = True,
    eps: float = EPS_FLOAT,
    logger: No_Logger | Print_Logger | None = None,
) -> SolveOutcome:
    """Run the subgradient feasibility iteration until x_k is feasible, the budget is spent or iterates cycle.

    Args:
        p: the problem; its certificate (if any) drives delta_k, the default budget and the monitors
        x0: starting point
        rule: which violated constraint to step on (default: first violated)
        sched: step sizes alpha_k
        budget: maximum number of updates; default iteration_bound + 10, else 10^6
        monitors: True for all runtime checks, or a set of MonitorFlag
        tolerance: feasibility tolerance tau
        strict: treat f_i(x) == tau as violated
        cycle_window: longest period searched for; 0 disables. Only active for constant steps.
        record_trace: keep one IterationRecord per update
    """
    if sched is None:
        raise InputError("solve needs a step schedule")
    if tolerance < 0:
        raise InputError(f"feasibility tolerance must be >= 0, got {tolerance}")
    logger = logger if logger is not None else No_Logger()
    rule = rule if rule is not None else SelectionRule()
    x = p.check_vector(x0, "x0")
    cert = p.slater
    enabled = _monitor_set(monitors)
    if enabled and cert is None:
        logger.print("monitors need a slater certificate; running without them", Log_Type.WARNING)
        enabled = frozenset()

    bound = iteration_bound(x, cert, sched) if cert is not None else None
    if budget is None:
        budget = bound + BUDGET_SLACK if bound is not None else DEFAULT_BUDGET
    if budget < 1:
        raise InputError(f"budget must be >= 1, got {budget}")
    logger.print(f"solve: m={p.m}, n={p.dimension}, rule={rule.kind.value}, schedule={sched}, budget={budget}, bound={bound}", Log_Type.STAGE)

    selector = rule.selector()
    watch_cycles = cycle_window > 0 and sched.is_constant
    history: deque[bytes] = deque([x.tobytes()], maxlen=2 * cycle_window if watch_cycles else 1)
    trace: list[IterationRecord] = []
    counts: Counter = Counter()

    def outcome(verdict: Verdict, values: Vector) -> SolveOutcome:
        return SolveOutcome(verdict=verdict, trace=trace, bound_used=bound, budget=budget, final_residual=values, flag_counts=counts)

    for k in range(budget):
        values = residual(p, x)
        if is_feasible(values, tolerance, strict):
            logger.print(f"feasible after {k} steps", Log_Type.OK)
            return outcome(Feasible(x, k), values)
        try:
            x_next, record = step(p, x, selector, sched, k, tolerance, strict, values=values)
        except ScheduleExhaustedError as e:
            e.outcome = outcome(BudgetExhausted(x, k), values)
            raise
        flags = monitor_one_step(record, cert, x_next, eps, enabled) if enabled else frozenset()
        if record.delta_k is not None and record.delta_k < 0:
            flags = flags | {MonitorFlag.NEGATIVE_DELTA}
        if flags:
            record.flags = flags
            counts.update(flags)
        if record_trace:
            trace.append(record)
        x = x_next
        if watch_cycles:
            history.append(x.tobytes())
            period = find_period(history, cycle_window)
            if period is not None:
                logger.print(f"iterates repeat with period {period} after {k + 1} steps", Log_Type.FAIL)
                return outcome(CycleDetected(x, k + 1, period), residual(p, x))

    values = residual(p, x)
    if is_feasible(values, tolerance, strict):
        logger.print(f"feasible after {budget} steps", Log_Type.OK)
        return outcome(Feasible(x, budget), values)
    logger.print(f"budget of {budget} steps exhausted, max residual {float(values.max())!r}", Log_Type.FAIL)
    return outcome(BudgetExhausted(x, budget), values)

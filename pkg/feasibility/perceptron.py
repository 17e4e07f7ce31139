"""
Linear specialisation f_i = <., -a_i>: problem assembly from data, slater
certificates scaled from a known strict separator, and the classical
mistake-driven perceptron x <- x + alpha a_i.
"""

from __future__ import annotations

from collections import Counter, deque
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from TPTBox import Log_Type, No_Logger, Print_Logger

from feasibility.core import EPS_FLOAT, FeasibilityProblem, SlaterCertificate, Vector, as_vector, is_feasible, require_valid_certificate, violated
from feasibility.errors import CertificateError, DimensionMismatchError, InputError
from feasibility.functions import LinearFunctional
from feasibility.schedules import Constant, delta_from_alpha, iteration_bound, validate_constant
from feasibility.solver import (
    BUDGET_SLACK,
    DEFAULT_BUDGET,
    DEFAULT_CYCLE_WINDOW,
    BudgetExhausted,
    CycleDetected,
    Feasible,
    IterationRecord,
    MonitorFlag,
    SelectionRule,
    SolveOutcome,
    Verdict,
    find_period,
    monitor_one_step,
)

RHO_GRID = tuple(2.0**e for e in range(-3, 11))
MARGIN_BUDGET = 10**5


@dataclass(frozen=True)
class LinearDataset:
    """Rows a_i of the homogeneous system <x, a_i> >= 0.

    Args:
        rows: (m, d) array of the a_i
        points: raw points p_i when built from labelled data
        labels: y_i in {+1, -1} when built from labelled data
    """

    rows: npt.NDArray[np.float64]
    points: npt.NDArray[np.float64] | None = None
    labels: npt.NDArray[np.int64] | None = None

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64, ndmin=2)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise InputError(f"dataset needs at least one row of dimension >= 1, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise InputError("dataset has non-finite entries")
        zero = np.flatnonzero(~np.any(rows != 0.0, axis=1))
        if zero.size:
            raise InputError(f"dataset rows {zero.tolist()} are zero")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_labeled(cls, points, labels) -> LinearDataset:
        """a_i = y_i p_i; no bias term, append a constant-1 coordinate to get one."""
        pts = np.array(points, dtype=np.float64, ndmin=2)
        y = np.asarray(labels).astype(np.int64).reshape(-1)
        if pts.shape[0] != y.shape[0]:
            raise DimensionMismatchError(f"{pts.shape[0]} points but {y.shape[0]} labels")
        bad = np.flatnonzero((y != 1) & (y != -1))
        if bad.size:
            raise InputError(f"labels must be +1 or -1; rows {bad.tolist()} are not")
        return cls(rows=y[:, None] * pts, points=pts, labels=y)

    @property
    def m(self) -> int:
        return int(self.rows.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.rows.shape[1])

    @property
    def L(self) -> float:
        return float(max(np.linalg.norm(a) for a in self.rows))

    def margins(self, x: Vector) -> Vector:
        # row by row, so the numbers match the per-constraint oracle evaluations
        return np.array([float(np.dot(a, x)) for a in self.rows], dtype=np.float64)

    def constraint_values(self, x: Vector) -> Vector:
        """f_i(x) = <-a_i, x> + 0.0, the same arithmetic as the oracles of `build_problem`."""
        return np.array([float(np.dot(-a, x)) + 0.0 for a in self.rows], dtype=np.float64)


@dataclass(frozen=True)
class MarginCertificate:
    z: Vector
    mu: float
    L: float
    rho: float

    @property
    def s(self) -> Vector:
        return self.rho * (self.L * self.L / self.mu) * self.z

    @property
    def sigma(self) -> float:
        return self.rho * self.L * self.L

    def to_slater(self) -> SlaterCertificate:
        return SlaterCertificate(s=self.s, sigma=self.sigma, L=self.L)


def build_problem(ds: LinearDataset, certificate: SlaterCertificate | None = None) -> FeasibilityProblem:
    return FeasibilityProblem(tuple(LinearFunctional(-a, 0.0) for a in ds.rows), ds.dimension, certificate)


def margin_certificate(ds: LinearDataset, z: Vector | Sequence[float], rho: float = 1.0, mu: float | None = None) -> MarginCertificate:
    z = as_vector(z, ds.dimension, name="separator z")
    if not rho > 0:
        raise InputError(f"rho must be > 0, got {rho}")
    margins = ds.margins(z)
    mu_exact = float(margins.min())
    if mu_exact <= 0:
        raise CertificateError(f"z is not a strict separator: min_i <z, a_i> = {mu_exact!r} (row {int(margins.argmin())})")
    if mu is None:
        mu = mu_exact
    elif not 0 < mu <= mu_exact:
        raise CertificateError(f"mu = {mu!r} must lie in (0, {mu_exact!r}]")
    return MarginCertificate(z=z, mu=float(mu), L=ds.L, rho=float(rho))


def derive_certificate(ds: LinearDataset, z: Vector | Sequence[float], rho: float = 1.0) -> SlaterCertificate:
    """Slater certificate s = rho (L^2/mu) z, sigma = rho L^2 from a strict separator z."""
    mc = margin_certificate(ds, z, rho)
    problem = build_problem(ds)
    s = mc.s
    # rho L^2 is exact in real arithmetic; rounding of s may shave an ulp off min_i <s, a_i>
    sigma = min(mc.sigma, float(np.min([-c.value(s) for c in problem.constraints])))
    cert = SlaterCertificate(s=s, sigma=sigma, L=mc.L)
    require_valid_certificate(problem, cert)
    return cert


def rho_for_step(alpha: float, grid: Sequence[float] = RHO_GRID) -> float | None:
    """Smallest rho in the grid with alpha < 2 rho."""
    for rho in sorted(grid):
        if alpha < 2 * rho:
            return rho
    return None


def mistake_bound(
    ds: LinearDataset,
    z: Vector | Sequence[float],
    x0: Vector | None = None,
    alpha: float = 1.0,
    grid: Sequence[float] = RHO_GRID,
) -> tuple[int, float] | None:
    """Best (bound, rho) over the grid from the telescoped one-step estimate."""
    x0 = np.zeros(ds.dimension) if x0 is None else as_vector(x0, ds.dimension, name="x0")
    best = None
    for rho in grid:
        cert = derive_certificate(ds, z, rho)
        if not validate_constant(alpha, cert):
            continue
        n = iteration_bound(x0, cert, Constant(alpha))
        if n is not None and (best is None or n < best[0]):
            best = (n, rho)
    return best


def train_perceptron(
    ds: LinearDataset,
    x0: Vector | Sequence[float] | None = None,
    alpha: float = 1.0,
    budget: int | None = None,
    rule: SelectionRule | None = None,
    strict: bool = True,
    certificate: SlaterCertificate | None = None,
    monitors: bool = False,
    cycle_window: int = DEFAULT_CYCLE_WINDOW,
    record_trace: bool = True,
    logger: No_Logger | Print_Logger | None = None,
) -> SolveOutcome:
    """Classical perceptron: on a mistake <x, a_i> <= 0 (or < 0 when not strict) update x <- x + alpha a_i.

    Produces the same outcome and trace as `solve` on `build_problem(ds, certificate)` with
    `Constant(alpha)`, the same rule and the same `strict` flag.
    """
    logger = logger if logger is not None else No_Logger()
    if not alpha > 0:
        raise InputError(f"perceptron step must be > 0, got {alpha}")
    rule = rule if rule is not None else SelectionRule()
    x = np.zeros(ds.dimension) if x0 is None else as_vector(x0, ds.dimension, name="x0")
    sched = Constant(alpha)
    bound = iteration_bound(x, certificate, sched) if certificate is not None else None
    if budget is None:
        budget = bound + BUDGET_SLACK if bound is not None else DEFAULT_BUDGET
    if budget < 1:
        raise InputError(f"budget must be >= 1, got {budget}")
    delta = delta_from_alpha(alpha, certificate) if certificate is not None else None
    logger.print(f"perceptron: m={ds.m}, d={ds.dimension}, alpha={alpha}, budget={budget}, bound={bound}", Log_Type.STAGE)

    selector = rule.selector()
    history: deque[bytes] = deque([x.tobytes()], maxlen=max(1, 2 * cycle_window))
    trace: list[IterationRecord] = []
    counts: Counter = Counter()

    def outcome(verdict: Verdict, values: Vector) -> SolveOutcome:
        return SolveOutcome(verdict=verdict, trace=trace, bound_used=bound, budget=budget, final_residual=values, flag_counts=counts)

    for k in range(budget):
        values = ds.constraint_values(x)
        if is_feasible(values, 0.0, strict):
            logger.print(f"separator found after {k} mistakes", Log_Type.OK)
            return outcome(Feasible(x, k), values)
        i = selector.choose(values, violated(values, 0.0, strict))
        a_i = ds.rows[i]
        g = np.negative(a_i)
        x_next = x + alpha * a_i
        record = IterationRecord(
            k=k,
            x_k=x,
            i_k=i,
            f_value=float(values[i]),
            g_k=g,
            g_norm=float(np.linalg.norm(g)),
            alpha_k=alpha,
            delta_k=delta,
            x_next=x_next,
        )
        flags = monitor_one_step(record, certificate, x_next, EPS_FLOAT) if monitors and certificate is not None else frozenset()
        if delta is not None and delta < 0:
            flags = flags | {MonitorFlag.NEGATIVE_DELTA}
        if flags:
            record.flags = flags
            counts.update(flags)
        if record_trace:
            trace.append(record)
        x = x_next
        if cycle_window > 0:
            history.append(x.tobytes())
            period = find_period(history, cycle_window)
            if period is not None:
                logger.print(f"perceptron cycles with period {period}; the data has no strict separator", Log_Type.FAIL)
                return outcome(CycleDetected(x, k + 1, period), ds.constraint_values(x))

    values = ds.constraint_values(x)
    if is_feasible(values, 0.0, strict):
        return outcome(Feasible(x, budget), values)
    logger.print(f"no separator within {budget} updates", Log_Type.FAIL)
    return outcome(BudgetExhausted(x, budget), values)


def estimate_margin(ds: LinearDataset, budget: int = MARGIN_BUDGET) -> tuple[Vector, float] | None:
    """Find some strict separator with the perceptron from 0; (unit z_hat, mu_hat) or None."""
    result = train_perceptron(ds, None, 1.0, budget, strict=True, record_trace=False)
    if not result.feasible:
        return None
    x = result.verdict.x
    z_hat = x / float(np.linalg.norm(x))
    mu_hat = float(ds.margins(z_hat).min())
    if mu_hat <= 0:
        return None
    return z_hat, mu_hat

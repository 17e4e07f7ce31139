"""
Seeded experiment suites over planted problems and datasets. Runs are independent
and dispatched with joblib; each returns plain dicts so results pickle cheaply.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from TPTBox import Log_Type, No_Logger, Print_Logger
from tqdm import tqdm

from feasibility.generators import planted_dataset, planted_problem
from feasibility.perceptron import RHO_GRID, build_problem, derive_certificate, mistake_bound, rho_for_step, train_perceptron
from feasibility.schedules import Constant, Harmonic, validate_constant
from feasibility.solver import MonitorFlag, SelectionRule, solve

STEP_FRACTIONS = (0.1, 0.5, 0.9)
SCALING_ALPHAS = (0.5, 1.0, 4.0, 32.0)
HARMONIC_BUDGET = 10**6
DESCENT_FLAGS = (MonitorFlag.ONE_STEP_ESTIMATE, MonitorFlag.SLATER_SUBGRADIENT)


@dataclass
class SuiteResult:
    name: str
    runs: list[dict] = field(default_factory=list)

    @property
    def violations(self) -> list[dict]:
        return [r for r in self.runs if not r["ok"]]

    @property
    def passed(self) -> bool:
        return len(self.runs) > 0 and not self.violations

    def summary(self) -> dict:
        return {"suite": self.name, "runs": len(self.runs), "violations": len(self.violations), "passed": self.passed}


def _descent_flags(counts) -> int:
    return int(sum(counts.get(f, 0) for f in DESCENT_FLAGS))


def constant_run(seed: int, fraction: float) -> dict:
    planted = planted_problem(seed)
    cert = planted.problem.slater
    alpha = fraction * 2.0 * cert.sigma / cert.L**2
    out = solve(planted.problem, planted.x0, SelectionRule(), Constant(alpha), monitors=True, record_trace=False)
    flags = _descent_flags(out.flag_counts)
    ok = out.feasible and out.bound_used is not None and out.steps <= out.bound_used and flags == 0
    return {"seed": seed, "fraction": fraction, "steps": out.steps, "bound": out.bound_used, "flags": flags, "ok": ok}


def harmonic_run(seed: int, offset: float = 1.0, budget: int = HARMONIC_BUDGET) -> dict:
    planted = planted_problem(seed)
    out = solve(planted.problem, planted.x0, SelectionRule(), Harmonic(offset), budget=budget, monitors=True, record_trace=False)
    flags = _descent_flags(out.flag_counts)
    return {"seed": seed, "steps": out.steps, "flags": flags, "ok": out.feasible and flags == 0}


def perceptron_run(seed: int) -> dict:
    planted = planted_dataset(seed)
    ds = planted.dataset
    x0 = np.zeros(ds.dimension)
    trained = train_perceptron(ds, x0, 1.0, strict=True)
    generic = solve(build_problem(ds), x0, SelectionRule(), Constant(1.0), budget=trained.budget, strict=True)
    best = mistake_bound(ds, planted.z, x0, 1.0)
    bound = best[0] if best is not None else None
    same = trained.same_trace(generic) and trained.verdict.name == generic.verdict.name
    ok = same and trained.feasible and bound is not None and trained.steps <= bound
    return {"seed": seed, "m": ds.m, "d": ds.dimension, "mistakes": trained.steps, "bound": bound, "equivalent": same, "ok": ok}


def scaling_run(seed: int, alphas: Iterable[float] = SCALING_ALPHAS) -> dict:
    planted = planted_dataset(seed)
    ds = planted.dataset
    results = {}
    for alpha in alphas:
        rho = rho_for_step(alpha, RHO_GRID)
        if rho is None:
            results[alpha] = False
            continue
        cert = derive_certificate(ds, planted.z, rho)
        out = train_perceptron(ds, None, alpha, certificate=cert, strict=True, record_trace=False)
        results[alpha] = validate_constant(alpha, cert) and out.feasible and out.steps <= out.bound_used
    return {"seed": seed, "alphas": {str(a): v for a, v in results.items()}, "ok": all(results.values())}


SUITES: dict[str, tuple[Callable[..., dict], Callable[[int], list[tuple]]]] = {
    "constant": (constant_run, lambda n: [(seed, f) for seed in range(n) for f in STEP_FRACTIONS]),
    "harmonic": (harmonic_run, lambda n: [(seed,) for seed in range(n)]),
    "perceptron": (perceptron_run, lambda n: [(seed,) for seed in range(n)]),
    "scaling": (scaling_run, lambda n: [(seed,) for seed in range(n)]),
}
DEFAULT_SIZES = {"constant": 100, "harmonic": 100, "perceptron": 50, "scaling": 50}


def run_suite(
    name: str,
    count: int | None = None,
    n_jobs: int = 1,
    progress: bool = False,
    logger: No_Logger | Print_Logger | None = None,
) -> SuiteResult:
    logger = logger if logger is not None else No_Logger()
    fn, make_args = SUITES[name]
    jobs = make_args(DEFAULT_SIZES[name] if count is None else count)
    logger.print(f"suite {name}: {len(jobs)} runs on {n_jobs} worker(s)", Log_Type.STAGE)
    it = tqdm(jobs, desc=name) if progress else jobs
    runs = Parallel(n_jobs=n_jobs)(delayed(fn)(*args) for args in it)
    result = SuiteResult(name, list(runs))
    if result.passed:
        logger.print(f"suite {name}: all {len(result.runs)} runs passed", Log_Type.OK)
    else:
        logger.print(f"suite {name}: {len(result.violations)} of {len(result.runs)} runs violated", Log_Type.FAIL)
    return result

"""
Command-line entry point.

    feasibility solve problems/neg_x.json --x0 -5 --schedule constant:1
    feasibility perceptron data/opposed_halflines.csv --alpha 1
    feasibility perceptron --generate --seed 3
    feasibility repro example-3-1 --alpha 1 --x0 0.5
    feasibility bench perceptron --n_jobs 4

Exit codes: 0 feasible (or all checks passed), 1 input error or failed checks,
2 budget exhausted, 3 cycle detected, 4 explicit schedule ran out.
"""

import os
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from inspect import signature
from pathlib import Path

import numpy as np
from ruamel.yaml import YAML
from TPTBox import Log_Type, No_Logger, Print_Logger

from feasibility.autoargs import Class_to_ArgParse
from feasibility.errors import CertificateError, InputError, ScheduleExhaustedError
from feasibility.experiments import SUITES, run_suite
from feasibility.generators import planted_dataset
from feasibility.perceptron import derive_certificate, estimate_margin, mistake_bound, rho_for_step, train_perceptron
from feasibility.problem_io import load_problem, read_dataset
from feasibility.repro import REPRO_ALIASES, REPRO_CASES, repro_case
from feasibility.schedules import parse_schedule
from feasibility.solver import DEFAULT_CYCLE_WINDOW, SelectionRule, SolveOutcome, solve
from feasibility.trace_io import write_trace

logger = Print_Logger()

EXIT_INPUT = 1
EXIT_SCHEDULE_EXHAUSTED = 4
SEED_ENV = "FEASIBILITY_SEED"


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    try:
        return int(os.environ.get(SEED_ENV, 0))
    except ValueError:
        raise InputError(f"{SEED_ENV} must be an integer, got {os.environ[SEED_ENV]!r}") from None


def emit(doc: dict) -> None:
    y = YAML(typ="safe", pure=True)
    y.default_flow_style = None
    y.dump(doc, sys.stdout)


def _logger(verbose: bool) -> No_Logger | Print_Logger:
    return Print_Logger() if verbose else No_Logger()


@dataclass
class SolveArguments(Class_to_ArgParse):
    """Run the subgradient feasibility method on a problem file.

    Args:
        problem: JSON or YAML problem file
        x0: starting point (default: origin)
        schedule: constant:<a>, harmonic:<c>, explicit:<path>[@tail] or normalized:<inner>
        select: first_violated, most_violated, cyclic or random
        seed: seed of the random selection rule (default: $FEASIBILITY_SEED or 0)
        budget: maximum number of updates (default: problem default, else iteration bound + 10, else 10^6)
        tolerance: feasibility tolerance (default: problem default, else 0)
        strict: count f_i(x) == tolerance as violated
        trace: write a JSON-lines trace to this file
        monitors: check the one-step estimate and the certificate at every step
        cycle_window: longest period searched for under constant steps; 0 disables
        verbose: log progress
        config_out: write the effective options to this config file
    """

    problem: Path | None = None
    x0: list[float] | None = None
    schedule: str = "constant:1"
    select: str = "first_violated"
    seed: int | None = None
    budget: int | None = None
    tolerance: float | None = None
    strict: bool = False
    trace: Path | None = None
    monitors: bool = False
    cycle_window: int = DEFAULT_CYCLE_WINDOW
    verbose: bool = False
    config_out: Path | None = None


@dataclass
class PerceptronArguments(Class_to_ArgParse):
    """Train the perceptron x <- x + alpha a_i on a CSV dataset or a generated one.

    Args:
        data: CSV of rows a_i, or labelled points when the first line is '#labeled'
        generate: use a seeded dataset with a planted separator instead of --data
        max_dim: largest dimension of a generated dataset
        max_rows: largest row count of a generated dataset
        alpha: step size
        x0: starting point (default: origin)
        rho: certificate scale (default: smallest grid value with alpha < 2 rho)
        z: known strict separator used for the certificate
        budget: maximum number of updates
        select: first_violated, most_violated, cyclic or random
        seed: seed of the generator and the random selection rule
        boundary_feasible: accept <x, a_i> == 0 instead of counting it as a mistake
        monitors: check the one-step estimate at every update
        trace: write a JSON-lines trace to this file
        cycle_window: longest period searched for; 0 disables
        verbose: log progress
        config_out: write the effective options to this config file
    """

    data: Path | None = None
    generate: bool = False
    max_dim: int = 20
    max_rows: int = 200
    alpha: float = 1.0
    x0: list[float] | None = None
    rho: float | None = None
    z: list[float] | None = None
    budget: int | None = None
    select: str = "first_violated"
    seed: int | None = None
    boundary_feasible: bool = False
    monitors: bool = False
    trace: Path | None = None
    cycle_window: int = DEFAULT_CYCLE_WINDOW
    verbose: bool = False
    config_out: Path | None = None


@dataclass
class ReproArguments(Class_to_ArgParse):
    """Run a self-checking reproduction.

    Args:
        name: remark-2-6, example-2-7 or example-3-1 (also huber-nonfinite, truncated-huber-limit, opposed-halflines-cycle)
        steps: number of updates for the Huber cases
        alpha: constant step of the cycling case
        x0: starting point of the cycling case, must lie in ]0, alpha[
        periods: number of periods checked in the cycling case
    """

    name: str | None = None
    steps: int | None = None
    alpha: float | None = None
    x0: float | None = None
    periods: int | None = None


@dataclass
class BenchArguments(Class_to_ArgParse):
    """Run a seeded experiment suite.

    Args:
        suite: constant, harmonic, perceptron, scaling or all
        count: number of seeds (default depends on the suite)
        n_jobs: joblib workers
        progress: show a progress bar
    """

    suite: str | None = None
    count: int | None = None
    n_jobs: int = 1
    progress: bool = False


def _finish(outcome: SolveOutcome, trace: Path | None, summary: dict, extra: dict | None = None) -> int:
    if trace is not None:
        write_trace(trace, outcome, extra)
    emit(summary)
    return outcome.verdict.exit_code


def cmd_solve(args: SolveArguments) -> int:
    if args.problem is None:
        raise InputError("solve needs a problem file")
    log = _logger(args.verbose)
    problem, defaults = load_problem(args.problem)
    tolerance = args.tolerance if args.tolerance is not None else float(defaults.get("tolerance", 0.0))
    budget = args.budget if args.budget is not None else defaults.get("budget")
    sched = parse_schedule(args.schedule)
    rule = SelectionRule.parse(args.select, resolve_seed(args.seed))
    x0 = args.x0 if args.x0 is not None else np.zeros(problem.dimension)
    extra = {"command": "solve", "problem": str(args.problem), "schedule": sched.describe(), "select": rule.kind.value}
    try:
        outcome = solve(
            problem,
            x0,
            rule,
            sched,
            budget=budget,
            monitors=args.monitors,
            tolerance=tolerance,
            strict=args.strict,
            cycle_window=args.cycle_window,
            record_trace=args.trace is not None,
            logger=log,
        )
    except ScheduleExhaustedError as e:
        logger.print(str(e), Log_Type.FAIL)
        if e.outcome is not None:
            extra["stopped"] = "schedule_exhausted"
            _finish(e.outcome, args.trace, {**e.outcome.summary(), **extra}, extra)
        return EXIT_SCHEDULE_EXHAUSTED
    return _finish(outcome, args.trace, {**outcome.summary(), **extra}, extra)


def _perceptron_dataset(args: PerceptronArguments, seed: int):
    if args.generate:
        planted = planted_dataset(seed, max_dim=args.max_dim, max_rows=args.max_rows)
        return planted.dataset, planted.z, "planted"
    if args.data is None:
        raise InputError("perceptron needs a CSV dataset or --generate")
    return read_dataset(args.data), None, None


def cmd_perceptron(args: PerceptronArguments) -> int:
    log = _logger(args.verbose)
    seed = resolve_seed(args.seed)
    ds, z, z_source = _perceptron_dataset(args, seed)
    if args.z is not None:
        z, z_source = np.asarray(args.z, dtype=np.float64), "given"
    elif z is None:
        estimate = estimate_margin(ds)
        if estimate is not None:
            z, z_source = estimate[0], "estimated"
        else:
            log.print("no strict separator found; running without a certificate", Log_Type.WARNING)

    x0 = np.zeros(ds.dimension) if args.x0 is None else np.asarray(args.x0, dtype=np.float64)
    cert = rho = best = None
    if z is not None:
        rho = args.rho if args.rho is not None else rho_for_step(args.alpha)
        if rho is None:
            raise InputError(f"no rho in the grid admits alpha = {args.alpha}; pass --rho")
        try:
            cert = derive_certificate(ds, z, rho)
        except CertificateError:
            if z_source == "given":
                raise
            log.print(f"{z_source} separator gives no certificate", Log_Type.WARNING)
            cert = None
        if cert is not None:
            best = mistake_bound(ds, z, x0, args.alpha)

    outcome = train_perceptron(
        ds,
        x0,
        args.alpha,
        args.budget,
        SelectionRule.parse(args.select, seed),
        strict=not args.boundary_feasible,
        certificate=cert,
        monitors=args.monitors,
        cycle_window=args.cycle_window,
        record_trace=args.trace is not None,
        logger=log,
    )
    x = outcome.verdict.x
    summary = outcome.summary()
    summary.update(
        {
            "command": "perceptron",
            "mistakes": outcome.steps,
            "separator": x.tolist(),
            "margins": ds.margins(x).tolist(),
            "certificate": None if cert is None else {**cert.to_dict(), "rho": rho, "separator_source": z_source},
            "best_grid_bound": None if best is None else {"bound": best[0], "rho": best[1]},
        }
    )
    extra = {"command": "perceptron", "data": "generated" if args.generate else str(args.data), "seed": seed}
    return _finish(outcome, args.trace, summary, extra)


def cmd_repro(args: ReproArguments) -> int:
    case = repro_case(args.name)
    if case is None:
        raise InputError(f"unknown reproduction {args.name!r}; expected one of {[*REPRO_ALIASES, *REPRO_CASES]}")
    accepted = signature(case).parameters
    options = {k: v for k, v in args.to_dict().items() if k != "name" and v is not None}
    for k in set(options) - set(accepted):
        logger.print(f"option --{k} is not used by {args.name}", Log_Type.WARNING)
    report = case(**{k: v for k, v in options.items() if k in accepted})
    report.log(logger)
    emit(report.to_dict())
    return 0 if report.passed else 1


def cmd_bench(args: BenchArguments) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if any(n not in SUITES for n in names):
        raise InputError(f"unknown suite {args.suite!r}; expected one of {[*SUITES, 'all']}")
    results = [run_suite(n, args.count, args.n_jobs, args.progress, logger) for n in names]
    emit({"suites": [r.summary() for r in results], "violations": {r.name: r.violations for r in results if r.violations}})
    return 0 if all(r.passed for r in results) else 1


COMMANDS: dict[str, tuple[str, type[Class_to_ArgParse], Callable[..., int]]] = {
    "solve": ("problem", SolveArguments, cmd_solve),
    "perceptron": ("data", PerceptronArguments, cmd_perceptron),
    "repro": ("name", ReproArguments, cmd_repro),
    "bench": ("suite", BenchArguments, cmd_bench),
}


def _usage() -> str:
    return "usage: feasibility {" + ",".join(COMMANDS) + "} [target] [options]; -h after a command for its options"


def run_command(command: str, argv: Sequence[str]) -> int:
    positional, cls, fn = COMMANDS[command]
    argv = list(argv)
    if argv and not argv[0].startswith("-"):
        argv = [f"--{positional}", argv[0], *argv[1:]]
    try:
        args = cls.get_opt(argv, prog=f"feasibility {command}")
    except SystemExit as e:
        # argparse exits 2 on bad flags; map to the input-error code
        return 0 if e.code in (0, None) else EXIT_INPUT
    config_out = getattr(args, "config_out", None)
    if config_out is not None:
        args.save_config(config_out)
    try:
        return fn(args)
    except InputError as e:
        logger.print(f"{command}: {e}", Log_Type.FAIL)
        return EXIT_INPUT
    except Exception:
        logger.print_error()
        return EXIT_INPUT


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(_usage())
        return 0 if argv else EXIT_INPUT
    if argv[0] not in COMMANDS:
        logger.print(f"unknown command {argv[0]!r}", Log_Type.FAIL)
        print(_usage())
        return EXIT_INPUT
    return run_command(argv[0], argv[1:])


if __name__ == "__main__":
    sys.exit(main())

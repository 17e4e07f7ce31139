from feasibility.core import (
    CertificateReport,
    FeasibilityProblem,
    SlaterCertificate,
    exact_certificate,
    is_feasible,
    residual,
    validate_certificate,
)
from feasibility.errors import (
    CertificateError,
    DimensionMismatchError,
    FeasibilityError,
    InputError,
    MissingCertificateError,
    NoViolatedConstraintError,
    PreconditionError,
    ScheduleExhaustedError,
)
from feasibility.functions import (
    ConstraintOracle,
    HuberFunction,
    LinearFunctional,
    PointwiseMax,
    TruncatedHuberFunction,
    evaluate,
    subgrad,
    subgrad_bound,
)
from feasibility.perceptron import LinearDataset, build_problem, derive_certificate, estimate_margin, mistake_bound, train_perceptron
from feasibility.problem_io import load_problem, read_dataset, save_problem
from feasibility.schedules import Constant, Explicit, Harmonic, Normalized, delta, iteration_bound, parse_schedule, validate_constant
from feasibility.solver import (
    BudgetExhausted,
    CycleDetected,
    Feasible,
    MonitorFlag,
    SelectionKind,
    SelectionRule,
    SolveOutcome,
    detect_cycle,
    monitor_one_step,
    solve,
    step,
)

"""
Step-size schedules alpha_k, the derived decrease budget
delta_k = alpha_k (2 sigma - alpha_k L^2), and the a-priori iteration bound
obtained by telescoping ||x_{k+1} - s||^2 <= ||x_k - s||^2 - delta_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import numpy.typing as npt
from ruamel.yaml import YAML

from feasibility.core import SlaterCertificate, Vector, norm_sq
from feasibility.errors import InputError, MissingCertificateError, ScheduleExhaustedError

BOUND_CAP = 10**9
_EXACT_HEAD = 2**20


class ExplicitTail(Enum):
    error = "error"
    repeat_last = "repeat_last"
    zero = "zero"


class StepSchedule:
    """Base class. `depends_on_gradient` schedules need g_norm at every step."""

    depends_on_gradient = False
    is_constant = False

    def alpha(self, k: int, g_norm: float | None = None) -> float:
        raise NotImplementedError()

    def describe(self) -> str:
        raise NotImplementedError()

    def __str__(self):
        return self.describe()


def _check_alpha(a: float, what: str) -> float:
    a = float(a)
    if not math.isfinite(a) or a < 0:
        raise InputError(f"{what} must be a finite step size >= 0, got {a}")
    return a


@dataclass(frozen=True)
class Constant(StepSchedule):
    value: float
    is_constant = True

    def __post_init__(self):
        object.__setattr__(self, "value", _check_alpha(self.value, "constant step"))

    def alpha(self, k: int, g_norm: float | None = None) -> float:  # noqa: ARG002
        return self.value

    def describe(self) -> str:
        return f"constant:{self.value!r}"


@dataclass(frozen=True)
class Harmonic(StepSchedule):
    """alpha_k = 1 / (k + offset); divergent sum, square-summable."""

    offset: float = 1.0

    def __post_init__(self):
        c = float(self.offset)
        if not math.isfinite(c) or c <= 0:
            raise InputError(f"harmonic offset must be > 0, got {self.offset}")
        object.__setattr__(self, "offset", c)

    def alpha(self, k: int, g_norm: float | None = None) -> float:  # noqa: ARG002
        return 1.0 / (k + self.offset)

    def describe(self) -> str:
        return f"harmonic:{self.offset!r}"


@dataclass(frozen=True)
class Explicit(StepSchedule):
    values: tuple[float, ...]
    tail: ExplicitTail = ExplicitTail.error
    source: str | None = None

    def __post_init__(self):
        vals = tuple(_check_alpha(v, f"explicit step {i}") for i, v in enumerate(self.values))
        if len(vals) == 0:
            raise InputError("explicit schedule has no steps")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "tail", ExplicitTail(self.tail))

    def alpha(self, k: int, g_norm: float | None = None) -> float:  # noqa: ARG002
        if k < len(self.values):
            return self.values[k]
        if self.tail == ExplicitTail.repeat_last:
            return self.values[-1]
        if self.tail == ExplicitTail.zero:
            return 0.0
        raise ScheduleExhaustedError(f"explicit schedule has {len(self.values)} steps, step {k} requested")

    def describe(self) -> str:
        return f"explicit:{self.source}" if self.source else f"explicit[{len(self.values)}, tail={self.tail.value}]"


@dataclass(frozen=True)
class Normalized(StepSchedule):
    """alpha_k / max(1, ||g_k||)"""

    inner: StepSchedule
    depends_on_gradient = True

    def alpha(self, k: int, g_norm: float | None = None) -> float:
        if g_norm is None:
            raise InputError("normalized schedule needs the subgradient norm")
        return self.inner.alpha(k) / max(1.0, g_norm)

    def describe(self) -> str:
        return f"normalized:{self.inner.describe()}"


def alpha(sched: StepSchedule, k: int, g_norm: float | None = None) -> float:
    if k < 0:
        raise InputError(f"step index must be >= 0, got {k}")
    return sched.alpha(k, g_norm)


def delta_from_alpha(a: float, cert: SlaterCertificate) -> float:
    return a * (2.0 * cert.sigma - a * cert.L * cert.L)


def delta(sched: StepSchedule, k: int, cert: SlaterCertificate | None, g_norm: float | None = None) -> float:
    if cert is None:
        raise MissingCertificateError("delta_k needs a slater certificate (sigma, L)")
    return delta_from_alpha(alpha(sched, k, g_norm), cert)


def validate_constant(a: float, cert: SlaterCertificate | None) -> bool:
    if cert is None:
        raise MissingCertificateError("validating a constant step needs a slater certificate")
    return 0.0 < a < 2.0 * cert.sigma / (cert.L * cert.L)


def first_nonnegative_delta(sched: StepSchedule, cert: SlaterCertificate) -> int | None:
    """Smallest k0 with delta_k >= 0 for every k >= k0, for monotonically decreasing schedules."""
    threshold = 2.0 * cert.sigma / (cert.L * cert.L)
    if isinstance(sched, Constant):
        return 0 if sched.value <= threshold else None
    if isinstance(sched, Harmonic):
        # 1/(k+c) <= 2 sigma / L^2  <=>  k >= L^2/(2 sigma) - c
        return max(0, math.ceil(1.0 / threshold - sched.offset))
    return None


def iteration_bound(x0: Vector, cert: SlaterCertificate | None, sched: StepSchedule, cap: int = BOUND_CAP) -> int | None:
    """Smallest n with sum_{k<n} delta_k > ||x0 - s||^2, or None.

    The algorithm cannot perform n updates without reaching the feasible set.
    None when delta_k depends on runtime subgradient norms, or the partial sums do
    not exceed the distance within `cap` terms. Long harmonic runs may answer one
    step late, see `_harmonic_bound`.
    """
    if cert is None:
        raise MissingCertificateError("iteration bound needs a slater certificate")
    if sched.depends_on_gradient:
        return None
    dist = norm_sq(np.asarray(x0, dtype=np.float64) - cert.s)

    if isinstance(sched, Constant):
        d = delta_from_alpha(sched.value, cert)
        if d <= 0:
            return None
        n = math.floor(dist / d) + 1
        return n if n <= cap else None

    if isinstance(sched, Explicit):
        deltas = np.array([delta_from_alpha(a, cert) for a in sched.values])
        n = _first_exceeding(np.cumsum(deltas), dist)
        if n is not None:
            return n if n <= cap else None
        if sched.tail != ExplicitTail.repeat_last:
            return None
        d_last = float(deltas[-1])
        if d_last <= 0:
            return None
        n = len(deltas) + math.floor((dist - float(np.sum(deltas))) / d_last) + 1
        return n if n <= cap else None

    if isinstance(sched, Harmonic):
        return _harmonic_bound(sched.offset, cert, dist, cap)

    return None


def _first_exceeding(partial: npt.NDArray[np.float64], dist: float) -> int | None:
    hits = np.flatnonzero(partial > dist)
    return int(hits[0]) + 1 if hits.size else None


def _harmonic_bound(c: float, cert: SlaterCertificate, dist: float, cap: int) -> int | None:
    """First crossing for alpha_k = 1/(k + c).

    The first `_EXACT_HEAD` partial sums are accumulated term by term. Past the head the
    sums come from midpoint (Euler-Maclaurin) integrals, lowered by their worst-case
    error, so the n returned there is never below the true first crossing and exceeds
    it only when the crossing lies within that error (about 1e-13).
    """
    head = min(_EXACT_HEAD, cap)
    a = 1.0 / (np.arange(head, dtype=np.float64) + c)
    deltas = a * (2.0 * cert.sigma - a * cert.L**2)
    n = _first_exceeding(np.cumsum(deltas), dist)
    if n is not None or cap <= head:
        return n
    base = math.fsum(deltas)
    lo_ref = head + c - 0.5
    # the midpoint integral of 1/x overshoots the sum by at most 1/(12 lo_ref^2); for 1/x^2 it only overshoots
    error = 2.0 * cert.sigma / (12.0 * lo_ref * lo_ref)

    def lower_sum(n: int) -> float:
        hi_ref = n + c - 0.5
        return base + 2.0 * cert.sigma * math.log(hi_ref / lo_ref) - cert.L**2 * (1.0 / lo_ref - 1.0 / hi_ref) - error

    if lower_sum(cap) <= dist:
        return None
    # partial sums only grow once delta_k >= 0
    lo = max(head, math.ceil(cert.L**2 / (2.0 * cert.sigma) - c))
    hi = cap
    if lower_sum(lo) > dist:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if lower_sum(mid) > dist:
            hi = mid
        else:
            lo = mid
    return hi



def load_explicit_values(path: str | Path) -> tuple[list[float], ExplicitTail]:
    """Read explicit steps: YAML/JSON list or {values, tail}, else one value per line ('#' comments)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"explicit schedule file not found: {path}")
    if path.suffix.lower() in (".json", ".yaml", ".yml"):
        with open(path, encoding="utf-8") as f:
            doc = YAML(typ="safe").load(f)
        if isinstance(doc, dict):
            return [float(v) for v in doc.get("values", [])], ExplicitTail(doc.get("tail", "error"))
        if isinstance(doc, list):
            return [float(v) for v in doc], ExplicitTail.error
        raise InputError(f"explicit schedule file {path} must hold a list or {{values, tail}}")
    values = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.split("#", 1)[0].strip()  # noqa: PLW2901
            if line:
                values.append(float(line))
    return values, ExplicitTail.error


def parse_schedule(text: str) -> StepSchedule:
    """Parse `constant:<a>`, `harmonic:<c>`, `explicit:<path>[@tail]`, `normalized:<inner>`."""
    kind, _, arg = text.strip().partition(":")
    try:
        if kind == "constant":
            return Constant(float(arg))
        if kind == "harmonic":
            return Harmonic(float(arg) if arg else 1.0)
        if kind == "explicit":
            file, _, tail = arg.partition("@")
            values, file_tail = load_explicit_values(file)
            return Explicit(tuple(values), ExplicitTail(tail) if tail else file_tail, source=file)
        if kind == "normalized":
            return Normalized(parse_schedule(arg))
    except ValueError as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"invalid schedule {text!r}: {e}") from e
    raise InputError(f"invalid schedule {text!r}; expected constant:<a>, harmonic:<c>, explicit:<path>, normalized:<inner>")

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from feasibility.errors import CertificateError, DimensionMismatchError, InputError

if TYPE_CHECKING:
    from feasibility.functions import ConstraintOracle

Vector = npt.NDArray[np.float64]

EPS_FLOAT = 1e-9


def as_vector(coords, dimension: int | None = None, name: str = "vector") -> Vector:
    """Coerce coordinates into a finite 1-D float64 array.

    Args:
        coords: scalar or sequence of reals
        dimension: expected length, checked when given
        name: used in error messages
    """
    v = np.atleast_1d(np.asarray(coords, dtype=np.float64))
    if v.ndim != 1 or v.shape[0] < 1:
        raise InputError(f"{name} must be a non-empty 1-D list of reals, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite coordinates: {v.tolist()}")
    if dimension is not None and v.shape[0] != dimension:
        raise DimensionMismatchError(f"{name} has dimension {v.shape[0]}, expected {dimension}")
    # owned copy; callers may not mutate our iterates through their input
    return v.copy() if v is coords else v


def inner(x: Vector, y: Vector) -> float:
    if x.shape != y.shape:
        raise DimensionMismatchError(f"inner product of dimension {x.shape} and {y.shape}")
    return float(np.dot(x, y))


def norm_sq(x: Vector) -> float:
    if not np.all(np.isfinite(x)):
        raise InputError(f"norm of non-finite vector {x.tolist()}")
    return float(np.dot(x, x))


def tolerance_eps(scale: float, eps: float = EPS_FLOAT) -> float:
    """Absolute slack for floating comparisons of quantities of size `scale`."""
    return eps * max(1.0, abs(scale))


@dataclass(frozen=True)
class SlaterCertificate:
    s: Vector
    sigma: float
    L: float

    def __post_init__(self):
        object.__setattr__(self, "s", as_vector(self.s, name="slater point"))
        if not np.isfinite(self.sigma) or not np.isfinite(self.L):
            raise InputError(f"certificate constants must be finite: sigma={self.sigma}, L={self.L}")
        if self.L <= 0:
            raise InputError(f"subgradient bound L must be positive, got {self.L}")

    @property
    def dimension(self) -> int:
        return int(self.s.shape[0])

    def to_dict(self) -> dict:
        return {"s": self.s.tolist(), "sigma": float(self.sigma), "L": float(self.L)}


@dataclass
class CertificateReport:
    values: list[float]
    sigma_claimed: float
    sigma_exact: float
    failures: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return len(self.failures) == 0

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "values": [float(v) for v in self.values],
            "sigma_claimed": float(self.sigma_claimed),
            "sigma_exact": float(self.sigma_exact),
            "failures": list(self.failures),
        }


@dataclass(frozen=True)
class FeasibilityProblem:
    """Indexed family of convex constraints f_i(x) <= 0 on R^n.

    Args:
        constraints: the oracles f_0, ..., f_{m-1}
        dimension: n
        slater: optional certificate (s, sigma, L)
    """

    constraints: tuple[ConstraintOracle, ...]
    dimension: int
    slater: SlaterCertificate | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if len(self.constraints) < 1:
            raise InputError("a feasibility problem needs at least one constraint")
        if self.dimension < 1:
            raise InputError(f"dimension must be >= 1, got {self.dimension}")
        for i, c in enumerate(self.constraints):
            if c.dimension is not None and c.dimension != self.dimension:
                raise DimensionMismatchError(f"constraint {i} ({c.kind}) has dimension {c.dimension}, problem has {self.dimension}")
        if self.slater is not None and self.slater.dimension != self.dimension:
            raise DimensionMismatchError(f"slater point has dimension {self.slater.dimension}, problem has {self.dimension}")

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def subgradient_bound(self) -> float:
        return max(c.bound for c in self.constraints)

    def with_certificate(self, cert: SlaterCertificate | None) -> FeasibilityProblem:
        return FeasibilityProblem(self.constraints, self.dimension, cert)

    def check_vector(self, x, name: str = "x") -> Vector:
        return as_vector(x, self.dimension, name=name)


def residual(p: FeasibilityProblem, x: Vector) -> Vector:
    x = p.check_vector(x)
    return np.array([c.value(x) for c in p.constraints], dtype=np.float64)


def violated(values: Vector, tolerance: float = 0.0, strict: bool = False) -> npt.NDArray[np.bool_]:
    """Mask of violated constraints; `strict` treats f_i(x) == tolerance as violated."""
    return values >= tolerance if strict else values > tolerance


def is_feasible(values: Vector, tolerance: float = 0.0, strict: bool = False) -> bool:
    return not bool(np.any(violated(values, tolerance, strict)))


def validate_certificate(p: FeasibilityProblem, cert: SlaterCertificate) -> CertificateReport:
    if cert.dimension != p.dimension:
        raise DimensionMismatchError(f"certificate dimension {cert.dimension} != problem dimension {p.dimension}")
    values = residual(p, cert.s)
    sigma_exact = float(np.min(-values))
    report = CertificateReport(values=values.tolist(), sigma_claimed=float(cert.sigma), sigma_exact=sigma_exact)
    for i, v in enumerate(values):
        if v >= 0:
            report.failures.append(f"f_{i}(s) = {v!r} is not < 0")
    if cert.sigma <= 0:
        report.failures.append(f"sigma = {cert.sigma!r} is not > 0")
    if cert.sigma > sigma_exact:
        report.failures.append(f"sigma = {cert.sigma!r} exceeds min_i -f_i(s) = {sigma_exact!r}")
    return report


def require_valid_certificate(p: FeasibilityProblem, cert: SlaterCertificate) -> CertificateReport:
    report = validate_certificate(p, cert)
    if not report.valid:
        raise CertificateError("invalid slater certificate: " + "; ".join(report.failures), report=report)
    return report


def exact_certificate(p: FeasibilityProblem, s: Sequence[float] | Vector) -> SlaterCertificate:
    """Certificate with sigma = min_i -f_i(s) and L = max_i L_i, validated."""
    s = p.check_vector(s, "slater point")
    sigma = float(np.min(-residual(p, s)))
    cert = SlaterCertificate(s=s, sigma=sigma, L=p.subgradient_bound)
    require_valid_certificate(p, cert)
    return cert

"""
Built-in convex constraint functions with exact values and deterministic subgradients.

Every oracle exposes `value(x)`, `subgradient(x)` and the declared subgradient
norm bound `bound`. One-dimensional profiles (Huber, truncated Huber) act on
h(<w, x> - c) + b, where w defaults to the unit vector of `coordinate`.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from feasibility.core import EPS_FLOAT, Vector, as_vector, tolerance_eps
from feasibility.errors import DimensionMismatchError, InputError


class ConstraintOracle(ABC):
    kind: str = ""

    @property
    @abstractmethod
    def dimension(self) -> int | None: ...

    @property
    @abstractmethod
    def bound(self) -> float:
        """Declared upper bound on the norm of every returned subgradient."""

    @abstractmethod
    def value(self, x: Vector) -> float: ...

    @abstractmethod
    def subgradient(self, x: Vector) -> Vector: ...

    @abstractmethod
    def to_descriptor(self) -> dict: ...

    def __call__(self, x: Vector) -> float:
        return self.value(x)

    def _check(self, x: Vector) -> None:
        n = self.dimension
        if n is not None and x.shape[0] != n:
            raise DimensionMismatchError(f"{self.kind} expects dimension {n}, got {x.shape[0]}")


class LinearFunctional(ConstraintOracle):
    """f(x) = <a, x> + b"""

    kind = "linear"

    def __init__(self, a: Sequence[float] | Vector, b: float = 0.0):
        self.a = as_vector(a, name="linear coefficient a")
        self.a.setflags(write=False)
        self.b = float(b)
        if not np.isfinite(self.b):
            raise InputError(f"linear offset b must be finite, got {b}")
        self._bound = float(np.linalg.norm(self.a))

    @property
    def dimension(self) -> int:
        return int(self.a.shape[0])

    @property
    def bound(self) -> float:
        return self._bound

    def value(self, x: Vector) -> float:
        self._check(x)
        return float(np.dot(self.a, x)) + self.b

    def subgradient(self, x: Vector) -> Vector:
        self._check(x)
        return np.array(self.a, dtype=np.float64)

    def to_descriptor(self) -> dict:
        return {"kind": self.kind, "params": {"a": self.a.tolist(), "b": self.b}}

    def __repr__(self):
        return f"LinearFunctional(a={self.a.tolist()}, b={self.b})"


class _ProfileFunction(ConstraintOracle):
    """Convex 1-D profile h composed with an affine scalar argument."""

    def __init__(
        self,
        coordinate: int = 0,
        dimension: int | None = None,
        direction: Sequence[float] | Vector | None = None,
        center: float = 0.0,
        offset: float = 0.0,
    ):
        self.center = float(center)
        self.offset = float(offset)
        if not (np.isfinite(self.center) and np.isfinite(self.offset)):
            raise InputError(f"{self.kind}: center and offset must be finite")
        if direction is not None:
            self.direction: Vector | None = as_vector(direction, dimension, name=f"{self.kind} direction")
            self.direction.setflags(write=False)
            self.coordinate = None
            self._dimension: int | None = int(self.direction.shape[0])
            self._bound = float(np.linalg.norm(self.direction))
        else:
            if coordinate < 0:
                raise InputError(f"{self.kind}: coordinate must be >= 0, got {coordinate}")
            if dimension is not None and coordinate >= dimension:
                raise DimensionMismatchError(f"{self.kind}: coordinate {coordinate} outside dimension {dimension}")
            self.direction = None
            self.coordinate = int(coordinate)
            self._dimension = dimension
            self._bound = 1.0

    @staticmethod
    @abstractmethod
    def profile(t: float) -> float: ...

    @staticmethod
    @abstractmethod
    def slope(t: float) -> float: ...

    @property
    def dimension(self) -> int | None:
        return self._dimension

    @property
    def bound(self) -> float:
        return self._bound

    def _argument(self, x: Vector) -> float:
        self._check(x)
        if self.direction is not None:
            return float(np.dot(self.direction, x)) - self.center
        if self.coordinate >= x.shape[0]:
            raise DimensionMismatchError(f"{self.kind}: coordinate {self.coordinate} outside dimension {x.shape[0]}")
        return float(x[self.coordinate]) - self.center

    def value(self, x: Vector) -> float:
        return self.profile(self._argument(x)) + self.offset

    def subgradient(self, x: Vector) -> Vector:
        d = self.slope(self._argument(x))
        if self.direction is not None:
            return d * self.direction
        g = np.zeros(x.shape[0], dtype=np.float64)
        g[self.coordinate] = d
        return g

    def to_descriptor(self) -> dict:
        params: dict = {}
        if self.center != 0.0:
            params["center"] = self.center
        if self.offset != 0.0:
            params["offset"] = self.offset
        desc: dict = {"kind": self.kind}
        if self.direction is not None:
            params["direction"] = self.direction.tolist()
        else:
            desc["coordinate"] = self.coordinate
        if params:
            desc["params"] = params
        return desc

    def __repr__(self):
        where = f"direction={self.direction.tolist()}" if self.direction is not None else f"coordinate={self.coordinate}"
        return f"{type(self).__name__}({where}, center={self.center}, offset={self.offset})"


class HuberFunction(_ProfileFunction):
    """H(t) = t^2/2 for |t| <= 1, |t| - 1/2 otherwise. C^1, H' = clip(t, -1, 1)."""

    kind = "huber"

    @staticmethod
    def profile(t: float) -> float:
        if abs(t) <= 1.0:
            return 0.5 * t * t
        return abs(t) - 0.5

    @staticmethod
    def slope(t: float) -> float:
        return min(max(t, -1.0), 1.0)


class TruncatedHuberFunction(_ProfileFunction):
    """0 for t <= 0, t^2/2 on [0, 1], t - 1/2 beyond. Derivative clip(t, 0, 1)."""

    kind = "truncated_huber"

    @staticmethod
    def profile(t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t <= 1.0:
            return 0.5 * t * t
        return t - 0.5

    @staticmethod
    def slope(t: float) -> float:
        return min(max(t, 0.0), 1.0)


class PointwiseMax(ConstraintOracle):
    kind = "max"

    def __init__(self, children: Sequence[ConstraintOracle]):
        self.children = tuple(children)
        if len(self.children) == 0:
            raise InputError("max needs at least one child")
        dims = {c.dimension for c in self.children if c.dimension is not None}
        if len(dims) > 1:
            raise DimensionMismatchError(f"max children disagree on dimension: {sorted(dims)}")
        self._dimension = dims.pop() if dims else None
        self._bound = max(c.bound for c in self.children)

    @property
    def dimension(self) -> int | None:
        return self._dimension

    @property
    def bound(self) -> float:
        return self._bound

    def active_child(self, x: Vector) -> int:
        # np.argmax returns the first maximiser, i.e. the lowest index on ties
        return int(np.argmax([c.value(x) for c in self.children]))

    def value(self, x: Vector) -> float:
        return max(c.value(x) for c in self.children)

    def subgradient(self, x: Vector) -> Vector:
        return self.children[self.active_child(x)].subgradient(x)

    def to_descriptor(self) -> dict:
        return {"kind": self.kind, "params": {"children": [c.to_descriptor() for c in self.children]}}

    def __repr__(self):
        return f"PointwiseMax({list(self.children)})"


BUILTIN_KINDS: dict[str, type[ConstraintOracle]] = {
    LinearFunctional.kind: LinearFunctional,
    HuberFunction.kind: HuberFunction,
    TruncatedHuberFunction.kind: TruncatedHuberFunction,
    PointwiseMax.kind: PointwiseMax,
}


def oracle_from_descriptor(desc: dict, dimension: int | None = None) -> ConstraintOracle:
    """Build an oracle from a problem-file descriptor {kind, params, coordinate}."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise InputError(f"constraint descriptor needs a 'kind': {desc!r}")
    kind = str(desc["kind"])
    params = dict(desc.get("params") or {})
    unknown = set(desc) - {"kind", "params", "coordinate"}
    if unknown:
        raise InputError(f"unknown keys in {kind} descriptor: {sorted(unknown)}")
    try:
        if kind == LinearFunctional.kind:
            oracle: ConstraintOracle = LinearFunctional(a=params.pop("a"), b=params.pop("b", 0.0))
        elif kind in (HuberFunction.kind, TruncatedHuberFunction.kind):
            cls = BUILTIN_KINDS[kind]
            oracle = cls(
                coordinate=int(desc.get("coordinate", 0)),
                dimension=dimension,
                direction=params.pop("direction", None),
                center=params.pop("center", 0.0),
                offset=params.pop("offset", 0.0),
            )
        elif kind == PointwiseMax.kind:
            oracle = PointwiseMax([oracle_from_descriptor(c, dimension) for c in params.pop("children")])
        else:
            raise InputError(f"unknown constraint kind {kind!r}; expected one of {sorted(BUILTIN_KINDS)}")
    except KeyError as e:
        raise InputError(f"{kind} descriptor misses parameter {e}") from None
    except (TypeError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"bad {kind} parameters: {e}") from e
    if params:
        raise InputError(f"unknown {kind} parameters: {sorted(params)}")
    if dimension is not None and oracle.dimension is not None and oracle.dimension != dimension:
        raise DimensionMismatchError(f"{kind} has dimension {oracle.dimension}, problem has {dimension}")
    return oracle


def evaluate(fn: ConstraintOracle, x: Vector) -> float:
    return fn.value(x)


def subgrad(fn: ConstraintOracle, x: Vector) -> Vector:
    return fn.subgradient(x)


def subgrad_bound(fn: ConstraintOracle) -> float:
    return fn.bound


@dataclass
class OracleCheck:
    samples: int
    inequality_violations: int
    bound_violations: int
    worst_gap: float

    @property
    def passed(self) -> bool:
        return self.inequality_violations == 0 and self.bound_violations == 0


def sample_oracle_properties(
    fn: ConstraintOracle,
    dimension: int,
    rng: np.random.Generator,
    samples: int = 10_000,
    box: float = 5.0,
    eps: float = EPS_FLOAT,
) -> OracleCheck:
    """Spot-check the subgradient inequality and the declared norm bound on random pairs."""
    check = OracleCheck(samples=samples, inequality_violations=0, bound_violations=0, worst_gap=0.0)
    xs = rng.uniform(-box, box, size=(samples, dimension))
    ys = rng.uniform(-box, box, size=(samples, dimension))
    for x, y in zip(xs, ys):
        fx, fy, g = fn.value(x), fn.value(y), fn.subgradient(x)
        lower = fx + float(np.dot(g, y - x))
        gap = lower - fy
        if gap > tolerance_eps(max(abs(fx), abs(fy)), eps):
            check.inequality_violations += 1
        check.worst_gap = max(check.worst_gap, gap)
        if float(np.linalg.norm(g)) > fn.bound + tolerance_eps(fn.bound, eps):
            check.bound_violations += 1
    return check

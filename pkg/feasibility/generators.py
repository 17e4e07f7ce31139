from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from feasibility.core import FeasibilityProblem, Vector, exact_certificate
from feasibility.functions import ConstraintOracle, HuberFunction, LinearFunctional, TruncatedHuberFunction
from feasibility.perceptron import LinearDataset

CONSTRAINT_KINDS = ("linear", "huber", "truncated_huber")


@dataclass
class PlantedProblem:
    problem: FeasibilityProblem
    x0: Vector
    seed: int


@dataclass
class PlantedDataset:
    dataset: LinearDataset
    z: Vector
    margin: float
    seed: int


def _direction(rng: np.random.Generator, n: int, low: float = 0.5, high: float = 1.5) -> Vector:
    u = rng.normal(size=n)
    while not np.any(u):
        u = rng.normal(size=n)
    return u / np.linalg.norm(u) * rng.uniform(low, high)


def planted_problem(seed: int, max_dim: int = 10, max_constraints: int = 20, max_start_distance: float = 4.0) -> PlantedProblem:
    """Mixed linear / Huber-type problem with a planted slater point and its exact (sigma, L)."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(1, max_constraints + 1))
    s = rng.uniform(-2.0, 2.0, size=n)
    oracles: list[ConstraintOracle] = []
    for _ in range(m):
        kind = CONSTRAINT_KINDS[int(rng.integers(len(CONSTRAINT_KINDS)))]
        margin = rng.uniform(0.2, 1.0)
        w = _direction(rng, n)
        if kind == "linear":
            oracles.append(LinearFunctional(w, -float(np.dot(w, s)) - margin))
            continue
        cls = HuberFunction if kind == "huber" else TruncatedHuberFunction
        center = rng.uniform(-1.0, 1.0)
        at_s = cls.profile(float(np.dot(w, s)) - center)
        oracles.append(cls(direction=w, center=center, offset=-at_s - margin))
    problem = FeasibilityProblem(tuple(oracles), n)
    problem = problem.with_certificate(exact_certificate(problem, s))
    x0 = s + _direction(rng, n, 1.0, max_start_distance)
    return PlantedProblem(problem=problem, x0=x0, seed=seed)


def planted_dataset(
    seed: int,
    max_dim: int = 20,
    max_rows: int = 200,
    margin: tuple[float, float] = (0.25, 0.75),
    labeled: bool = False,
) -> PlantedDataset:
    """Separable rows a_i with <z, a_i> >= gamma for a planted unit separator z."""
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(1, max_rows + 1))
    z = _direction(rng, d, 1.0, 1.0)
    gamma = float(rng.uniform(*margin))
    rows = rng.normal(size=(m, d))
    t = rows @ z
    rows += (np.abs(t) + gamma - t)[:, None] * z
    if labeled:
        y = rng.choice(np.array([-1, 1]), size=m)
        ds = LinearDataset.from_labeled(y[:, None] * rows, y)
    else:
        ds = LinearDataset(rows=rows)
    return PlantedDataset(dataset=ds, z=z, margin=float(ds.margins(z).min()), seed=seed)

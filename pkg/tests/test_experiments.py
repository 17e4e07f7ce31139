import numpy as np
import pytest

from feasibility.core import validate_certificate
from feasibility.experiments import DEFAULT_SIZES, constant_run, harmonic_run, perceptron_run, run_suite, scaling_run
from feasibility.generators import planted_dataset, planted_problem


@pytest.mark.parametrize("seed", range(10))
def test_planted_problem(seed):
    planted = planted_problem(seed)
    p = planted.problem
    assert 1 <= p.dimension <= 10
    assert 1 <= p.m <= 20
    assert validate_certificate(p, p.slater).valid
    assert p.slater.L == p.subgradient_bound
    assert 1.0 - 1e-12 <= np.linalg.norm(planted.x0 - p.slater.s) <= 4.0 + 1e-12


def test_planted_problem_is_seeded():
    a, b = planted_problem(3), planted_problem(3)
    assert a.problem.m == b.problem.m
    np.testing.assert_array_equal(a.x0, b.x0)
    np.testing.assert_array_equal(a.problem.slater.s, b.problem.slater.s)


@pytest.mark.parametrize("labeled", [False, True])
@pytest.mark.parametrize("seed", range(5))
def test_planted_dataset(seed, labeled):
    planted = planted_dataset(seed, labeled=labeled)
    ds = planted.dataset
    assert 1 <= ds.dimension <= 20
    assert 1 <= ds.m <= 200
    assert np.linalg.norm(planted.z) == pytest.approx(1.0)
    assert planted.margin > 0
    assert planted.margin == ds.margins(planted.z).min()
    assert (ds.labels is not None) == labeled


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("fraction", [0.1, 0.5, 0.9])
def test_constant_steps_stop_within_bound(seed, fraction):
    run = constant_run(seed, fraction)
    assert run["ok"], run


@pytest.mark.parametrize("seed", range(5))
def test_harmonic_steps_terminate(seed):
    run = harmonic_run(seed)
    assert run["ok"], run


@pytest.mark.parametrize("seed", range(5))
def test_perceptron_matches_solver_and_bound(seed):
    run = perceptron_run(seed)
    assert run["equivalent"], run
    assert run["ok"], run


@pytest.mark.parametrize("seed", range(3))
def test_step_scaling(seed):
    run = scaling_run(seed)
    assert run["ok"], run


def test_run_suite_in_parallel():
    serial = run_suite("perceptron", count=4, n_jobs=1)
    parallel = run_suite("perceptron", count=4, n_jobs=2)
    assert serial.passed
    assert serial.runs == parallel.runs
    assert serial.summary() == {"suite": "perceptron", "runs": 4, "violations": 0, "passed": True}


@pytest.mark.slow
@pytest.mark.parametrize("name", list(DEFAULT_SIZES))
def test_full_suites(name):
    result = run_suite(name, n_jobs=-1)
    assert len(result.runs) == DEFAULT_SIZES[name] * (3 if name == "constant" else 1)
    assert result.passed, result.violations[:5]

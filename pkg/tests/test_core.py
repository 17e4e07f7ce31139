import numpy as np
import pytest
from numpy.testing import assert_array_equal

from feasibility.core import (
    FeasibilityProblem,
    SlaterCertificate,
    as_vector,
    exact_certificate,
    is_feasible,
    residual,
    validate_certificate,
    violated,
)
from feasibility.errors import CertificateError, DimensionMismatchError, InputError
from feasibility.functions import HuberFunction, LinearFunctional, PointwiseMax


def test_as_vector_rejects_bad_input():
    with pytest.raises(InputError):
        as_vector([1.0, np.nan])
    with pytest.raises(InputError):
        as_vector([])
    with pytest.raises(DimensionMismatchError):
        as_vector([1.0, 2.0], dimension=3)
    assert_array_equal(as_vector(2.5), [2.5])


def test_problem_construction_checks_dimensions():
    with pytest.raises(InputError):
        FeasibilityProblem((), 1)
    with pytest.raises(DimensionMismatchError):
        FeasibilityProblem((LinearFunctional([1.0, 2.0]),), 1)
    with pytest.raises(DimensionMismatchError):
        FeasibilityProblem((LinearFunctional([1.0]),), 1, SlaterCertificate(s=[0.0, 0.0], sigma=1.0, L=1.0))


def test_residual_and_feasibility(neg_x):
    assert_array_equal(residual(neg_x, [-2.0]), [2.0])
    assert is_feasible(residual(neg_x, [0.0]))
    assert not is_feasible(residual(neg_x, [0.0]), strict=True)
    assert is_feasible(residual(neg_x, [-0.5]), tolerance=1.0)
    with pytest.raises(DimensionMismatchError):
        residual(neg_x, [1.0, 2.0])


def test_violated_mask():
    values = np.array([-1.0, 0.0, 0.5])
    assert_array_equal(violated(values), [False, False, True])
    assert_array_equal(violated(values, strict=True), [False, True, True])
    assert_array_equal(violated(values, tolerance=0.5), [False, False, False])


def test_valid_certificate_for_negative_identity():
    p = FeasibilityProblem((LinearFunctional([-1.0]),), 1)
    report = validate_certificate(p, SlaterCertificate(s=[1.0], sigma=1.0, L=1.0))
    assert report.valid
    assert report.values == [-1.0]
    assert report.sigma_exact == 1.0


def test_huber_has_no_slater_point():
    p = FeasibilityProblem((HuberFunction(dimension=1),), 1)
    report = validate_certificate(p, SlaterCertificate(s=[0.0], sigma=1.0, L=1.0))
    assert not report.valid
    assert report.values == [0.0]


@pytest.mark.parametrize("s", [-3.0, -0.5, 0.0, 0.5, 3.0])
def test_opposed_halflines_never_certify(opposed, s):
    assert not validate_certificate(opposed, SlaterCertificate(s=[s], sigma=0.1, L=1.0)).valid


def test_overclaimed_sigma_is_reported(neg_x):
    report = validate_certificate(neg_x, SlaterCertificate(s=[4.0], sigma=5.0, L=1.0))
    assert not report.valid
    assert any("exceeds" in f for f in report.failures)


def test_certificate_dimension_mismatch(neg_x):
    with pytest.raises(DimensionMismatchError):
        validate_certificate(neg_x, SlaterCertificate(s=[4.0, 0.0], sigma=1.0, L=1.0))


def test_exact_certificate():
    p = FeasibilityProblem(
        (
            LinearFunctional([1.0, 0.0], -1.0),
            PointwiseMax([LinearFunctional([-1.0, 0.0]), LinearFunctional([0.0, -1.0])]),
            HuberFunction(direction=[1.0, 1.0], center=1.0, offset=-0.5),
        ),
        2,
    )
    cert = exact_certificate(p, [0.5, 0.5])
    assert cert.sigma == 0.5
    assert cert.L == pytest.approx(np.sqrt(2.0))
    with pytest.raises(CertificateError):
        exact_certificate(p, [5.0, 5.0])

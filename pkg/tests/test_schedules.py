import math

import numpy as np
import pytest

from feasibility.core import SlaterCertificate
from feasibility.errors import InputError, MissingCertificateError, ScheduleExhaustedError
from feasibility.schedules import (
    Constant,
    Explicit,
    ExplicitTail,
    Harmonic,
    Normalized,
    StepSchedule,
    alpha,
    delta,
    first_nonnegative_delta,
    iteration_bound,
    parse_schedule,
    validate_constant,
)

CERT = SlaterCertificate(s=[4.0], sigma=4.0, L=1.0)


def brute_force_bound(sched, cert, dist, limit=100_000):
    total = 0.0
    for k in range(limit):
        a = sched.alpha(k)
        total += a * (2.0 * cert.sigma - a * cert.L**2)
        if total > dist:
            return k + 1
    return None


def test_alphas():
    assert alpha(Constant(0.25), 7) == 0.25
    assert alpha(Harmonic(2.0), 0) == 0.5
    assert alpha(Harmonic(2.0), 3) == 0.2
    assert Normalized(Constant(1.0)).alpha(0, 4.0) == 0.25
    assert Normalized(Constant(1.0)).alpha(0, 0.5) == 1.0
    with pytest.raises(InputError):
        alpha(Constant(1.0), -1)
    with pytest.raises(InputError):
        Constant(-1.0)
    with pytest.raises(InputError):
        Harmonic(0.0)


def test_delta():
    assert delta(Constant(1.0), 0, CERT) == 7.0
    assert delta(Constant(10.0), 0, CERT) == -20.0
    with pytest.raises(MissingCertificateError):
        delta(Constant(1.0), 0, None)


def test_validate_constant():
    assert validate_constant(1.0, CERT)
    assert validate_constant(7.9, CERT)
    assert not validate_constant(8.0, CERT)
    assert not validate_constant(0.0, CERT)
    with pytest.raises(MissingCertificateError):
        validate_constant(1.0, None)


def test_constant_bound():
    assert iteration_bound(np.array([-5.0]), CERT, Constant(1.0)) == 12
    assert iteration_bound(np.array([-5.0]), CERT, Constant(8.0)) is None
    assert iteration_bound(np.array([4.0]), CERT, Constant(1.0)) == 1


@pytest.mark.parametrize("offset", [0.5, 1.0, 2.0, 10.0])
@pytest.mark.parametrize("x0", [-1.0, 1.0, 4.0])
def test_harmonic_bound_matches_running_sum(offset, x0):
    cert = SlaterCertificate(s=[1.0], sigma=1.0, L=1.5)
    dist = (x0 - 1.0) ** 2
    assert iteration_bound(np.array([x0]), cert, Harmonic(offset)) == brute_force_bound(Harmonic(offset), cert, dist)


def test_harmonic_bound_beyond_exact_head():
    cert = SlaterCertificate(s=[0.0], sigma=1.0, L=1.0)
    near = iteration_bound(np.array([6.0]), cert, Harmonic(1.0))
    far = iteration_bound(np.array([6.2]), cert, Harmonic(1.0))
    assert near is not None and far is not None
    assert 2**20 < near < far
    # 2 sum 1/k grows like 2 ln n
    assert math.log(far) - math.log(near) == pytest.approx((6.2**2 - 36.0) / 2.0, rel=1e-3)


def accurate_harmonic_sum(c, cert, n, chunk=2**20):
    sums = []
    for start in range(0, n, chunk):
        a = 1.0 / (np.arange(start, min(n, start + chunk), dtype=np.float64) + c)
        sums.append(float(np.sum(a * (2.0 * cert.sigma - a * cert.L**2))))
    return math.fsum(sums)


def test_harmonic_bound_past_head_against_summed_steps():
    cert = SlaterCertificate(s=[0.0], sigma=1.0, L=1.0)
    dist = 36.0
    n = iteration_bound(np.array([6.0]), cert, Harmonic(1.0))
    assert n is not None and n > 2**20
    assert accurate_harmonic_sum(1.0, cert, n) > dist
    assert accurate_harmonic_sum(1.0, cert, n - 2) <= dist


def test_harmonic_bound_cap():
    cert = SlaterCertificate(s=[0.0], sigma=1.0, L=1.0)
    assert iteration_bound(np.array([100.0]), cert, Harmonic(1.0)) is None


def test_explicit_schedule_tails():
    sched = Explicit((1.0, 0.5))
    assert sched.alpha(1) == 0.5
    with pytest.raises(ScheduleExhaustedError):
        sched.alpha(2)
    assert Explicit((1.0, 0.5), ExplicitTail.repeat_last).alpha(10) == 0.5
    assert Explicit((1.0, 0.5), ExplicitTail.zero).alpha(10) == 0.0
    with pytest.raises(InputError):
        Explicit(())


def test_explicit_bound():
    values = (1.0, 1.0, 1.0)
    assert iteration_bound(np.array([-5.0]), CERT, Explicit(values)) is None
    assert iteration_bound(np.array([-5.0]), CERT, Explicit(values, ExplicitTail.repeat_last)) == 12
    assert iteration_bound(np.array([2.0]), CERT, Explicit(values)) == 1


def test_normalized_has_no_bound():
    assert iteration_bound(np.array([-5.0]), CERT, Normalized(Constant(1.0))) is None
    with pytest.raises(MissingCertificateError):
        iteration_bound(np.array([-5.0]), None, Constant(1.0))


class Halving(StepSchedule):
    def alpha(self, k, g_norm=None):
        return 0.5**k

    def describe(self):
        return "halving"


def test_other_schedule_kinds_have_no_bound():
    assert Halving().alpha(3) == 0.125
    assert iteration_bound(np.array([-5.0]), CERT, Halving()) is None


def test_first_nonnegative_delta():
    cert = SlaterCertificate(s=[0.0], sigma=0.25, L=1.0)
    assert first_nonnegative_delta(Harmonic(1.0), cert) == 1
    assert first_nonnegative_delta(Constant(0.5), cert) == 0
    assert first_nonnegative_delta(Constant(0.6), cert) is None
    for k in range(1, 50):
        assert delta(Harmonic(1.0), k, cert) >= 0


def test_parse_schedule(tmp_path):
    assert parse_schedule("constant:0.5") == Constant(0.5)
    assert parse_schedule("harmonic:2") == Harmonic(2.0)
    assert parse_schedule("harmonic") == Harmonic(1.0)
    assert parse_schedule("normalized:harmonic:3") == Normalized(Harmonic(3.0))

    steps = tmp_path / "steps.txt"
    steps.write_text("# two steps\n1.0\n0.5\n")
    sched = parse_schedule(f"explicit:{steps}@repeat_last")
    assert sched.values == (1.0, 0.5)
    assert sched.tail == ExplicitTail.repeat_last

    doc = tmp_path / "steps.yaml"
    doc.write_text("values: [0.25, 0.125]\ntail: zero\n")
    sched = parse_schedule(f"explicit:{doc}")
    assert sched.values == (0.25, 0.125)
    assert sched.tail == ExplicitTail.zero


@pytest.mark.parametrize("text", ["", "constant", "constant:abc", "constant:-1", "polyak:1", "explicit:/does/not/exist.txt", "harmonic:0"])
def test_parse_schedule_rejects(text):
    with pytest.raises(InputError):
        parse_schedule(text)

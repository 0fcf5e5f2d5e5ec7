import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tubeforms.errors import DomainError
from tubeforms.tubegeom import (
    TubeParams,
    boundary_torus_area,
    canonicalize,
    disk_area,
    log_cosh,
    metric_weights,
    min_tube_radius,
    tube_volume,
)


def test_disk_area_closed_form():
    assert disk_area(2.0) == pytest.approx(2 * math.pi * (math.cosh(2.0) - 1), rel=1e-15)
    assert disk_area(2.0) == pytest.approx(17.355, abs=5e-4)
    assert disk_area(0.0) == 0.0
    assert disk_area(1e-9) == pytest.approx(math.pi * 1e-18, rel=1e-9)


def test_volume_and_torus_area():
    t = TubeParams(0.5, 1.0, 1.2)
    assert tube_volume(t) == pytest.approx(math.pi * 0.5 * math.sinh(1.2) ** 2)
    assert boundary_torus_area(t) == pytest.approx(2 * math.pi * 0.5 * math.sinh(1.2) * math.cosh(1.2))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(1e-3, 1e-2))
def test_volume_derivative_is_torus_area(R, h):
    t = TubeParams(0.3, 0.0, R)
    fd = (tube_volume(TubeParams(0.3, 0.0, R + h)) - tube_volume(TubeParams(0.3, 0.0, R - h))) / (2 * h)
    assert fd == pytest.approx(boundary_torus_area(t), rel=1e-4)


def test_log_cosh_stable():
    assert log_cosh(1.0) == pytest.approx(math.log(math.cosh(1.0)), rel=1e-15)
    assert log_cosh(1000.0) == pytest.approx(1000.0 - math.log(2.0), rel=1e-15)
    assert log_cosh(-3.0) == log_cosh(3.0)


def test_metric_weights():
    assert metric_weights(0.0) == (1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        metric_weights(-1.0)


def test_min_tube_radius():
    lam = 1e-8
    R = min_tube_radius(lam)
    assert math.cosh(R) == pytest.approx(0.29 / math.sqrt(7.256 * lam), rel=1e-12)
    assert R == pytest.approx(7.675, abs=1e-3)
    assert min_tube_radius(1.0) is None
    # shorter core, fatter tube
    assert min_tube_radius(1e-10) > min_tube_radius(1e-6)


@pytest.mark.parametrize("lam,R", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (float("nan"), 1.0)])
def test_tube_params_validation(lam, R):
    with pytest.raises(DomainError):
        TubeParams(lam, 0.0, R)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-50.0, 50.0), st.floats(-20.0, 20.0))
def test_canonicalize_lands_in_fundamental_domain(r, th, z):
    t = TubeParams(0.7, 1.9, 1.0)
    p = canonicalize(t, r, th, z)
    assert 0.0 <= p.theta < 2 * math.pi and 0.0 <= p.z < t.lam
    # idempotent
    q = canonicalize(t, p.r, p.theta, p.z)
    assert q.theta == pytest.approx(p.theta, abs=1e-12) and q.z == pytest.approx(p.z, abs=1e-12)


def test_canonicalize_uses_twist():
    t = TubeParams(1.0, 0.5, 1.0)
    p = canonicalize(t, 0.5, 0.0, 1.25)
    assert p.z == pytest.approx(0.25) and p.theta == pytest.approx(0.5)
    with pytest.raises(DomainError):
        canonicalize(t, 2.0, 0.0, 0.0)
